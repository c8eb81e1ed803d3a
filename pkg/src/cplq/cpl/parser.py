"""Recursive-descent parser for .cpl source files.

Concrete syntax (after the style of the language's example programs):

    declare Matrix(Fin<N>, Fin<M>) -> Bool end

    def IsEntryZero(i: Fin<N>, j: Fin<M>) -> Bool
    do
      e <- Matrix(i, j);
      e' <- not e;
      return e'
    end

    ok <- HasAllOnesRow()          // optional entry statement

Sequences are right-associated. `//` starts a line comment. Constants are
written `const v : T`; bare integer literals are accepted where a type can be
inferred from the other operand of a binary operation.
"""

from __future__ import annotations

import re

from .ast import (
    BOOL,
    Assign,
    BinOp,
    CallStmt,
    Const,
    CplError,
    Expr,
    FinType,
    FunDecl,
    FunDef,
    Function,
    PrimCall,
    PRIMITIVES,
    Program,
    Seq,
    Stmt,
    UnOp,
    Var,
    seq_of,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
  | (?P<arrow><-|->)
  | (?P<op>&&|\|\||[=<>+,:;()\[\]])
    """,
    re.VERBOSE,
)

KEYWORDS = {"declare", "def", "do", "return", "end", "const", "not", "Bool", "Fin"}


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self) -> str:  # pragma: no cover
        return f"Tok({self.kind},{self.text!r})"


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise CplError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup or "op"
        if kind not in ("ws", "comment"):
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise CplError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def expect_ident(self) -> str:
        t = self.next()
        if t.kind != "ident":
            raise CplError(f"expected identifier, found {t.text!r}", t.line, t.col)
        return t.text

    def at(self, text: str) -> bool:
        return self.peek().text == text

    # -- grammar ------------------------------------------------------------

    def parse_type(self) -> FinType:
        t = self.next()
        if t.text == "Bool":
            return BOOL
        if t.text != "Fin":
            raise CplError(f"expected type, found {t.text!r}", t.line, t.col)
        self.expect("<")
        s = self.next()
        if s.kind == "int":
            size: int | str = int(s.text)
        elif s.kind == "ident":
            size = s.text
        else:
            raise CplError(f"expected size, found {s.text!r}", s.line, s.col)
        self.expect(">")
        return FinType(size)

    def parse_type_tuple(self) -> tuple[FinType, ...]:
        if self.at("("):
            self.next()
            types = [self.parse_type()]
            while self.at(","):
                self.next()
                types.append(self.parse_type())
            self.expect(")")
            return tuple(types)
        return (self.parse_type(),)

    def parse_atom(self) -> Expr:
        t = self.peek()
        if t.text == "const":
            self.next()
            v = self.next()
            if v.kind != "int":
                raise CplError(f"expected integer, found {v.text!r}", v.line, v.col)
            self.expect(":")
            return Const(int(v.text), self.parse_type())
        if t.kind == "int":
            self.next()
            return Const(int(t.text), None)
        if t.text == "not":
            self.next()
            return UnOp("not", self.parse_atom())
        if t.text == "(":
            self.next()
            e = self.parse_expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.next()
            return Var(t.text)
        raise CplError(f"expected expression, found {t.text!r}", t.line, t.col)

    def parse_expr(self) -> Expr:
        lhs = self.parse_atom()
        t = self.peek()
        if t.text in ("+", "=", "<", "&&", "||"):
            self.next()
            rhs = self.parse_atom()
            nxt = self.peek()
            if nxt.text in ("+", "=", "<", "&&", "||"):
                raise CplError(
                    "operators do not chain; parenthesize nested expressions",
                    nxt.line,
                    nxt.col,
                )
            return BinOp(t.text, lhs, rhs)
        return lhs

    def parse_stmt_one(self) -> Stmt:
        # targets <- rhs
        targets = [self.expect_ident()]
        while self.at(","):
            self.next()
            targets.append(self.expect_ident())
        self.expect("<-")
        t = self.peek()
        if t.kind == "ident" and t.text in PRIMITIVES and self.peek(1).text == "[":
            if len(targets) != 1:
                raise CplError("primitive call binds a single variable", t.line, t.col)
            prim = self.next().text
            self.expect("[")
            pred = self.expect_ident()
            self.expect("]")
            self.expect("(")
            args: list[str] = []
            if not self.at(")"):
                args.append(self.expect_ident())
                while self.at(","):
                    self.next()
                    args.append(self.expect_ident())
            self.expect(")")
            return PrimCall(targets[0], prim, pred, tuple(args))
        if t.kind == "ident" and self.peek(1).text == "(":
            func = self.next().text
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.expect_ident())
                while self.at(","):
                    self.next()
                    args.append(self.expect_ident())
            self.expect(")")
            return CallStmt(tuple(targets), func, tuple(args))
        if len(targets) != 1:
            raise CplError("expression assigns a single variable", t.line, t.col)
        return Assign(targets[0], self.parse_expr())

    def parse_stmt_block(self, stop: tuple[str, ...]) -> Stmt:
        stmts = [self.parse_stmt_one()]
        while self.at(";"):
            self.next()
            if self.peek().text in stop or self.peek().kind == "eof":
                break
            stmts.append(self.parse_stmt_one())
        return seq_of(stmts)

    def parse_function(self) -> Function:
        t = self.next()
        if t.text == "declare":
            name = self.expect_ident()
            self.expect("(")
            in_types = []
            if not self.at(")"):
                in_types.append(self.parse_type())
                while self.at(","):
                    self.next()
                    in_types.append(self.parse_type())
            self.expect(")")
            self.expect("->")
            out_types = self.parse_type_tuple()
            self.expect("end")
            return FunDecl(name, tuple(in_types), out_types)
        if t.text != "def":
            raise CplError(f"expected declare/def, found {t.text!r}", t.line, t.col)
        name = self.expect_ident()
        self.expect("(")
        params: list[tuple[str, FinType]] = []
        if not self.at(")"):
            while True:
                pname = self.expect_ident()
                self.expect(":")
                params.append((pname, self.parse_type()))
                if not self.at(","):
                    break
                self.next()
        self.expect(")")
        self.expect("->")
        ret_types = self.parse_type_tuple()
        self.expect("do")
        body = self.parse_stmt_block(stop=("return",))
        self.expect("return")
        rets = [self.expect_ident()]
        while self.at(","):
            self.next()
            rets.append(self.expect_ident())
        self.expect("end")
        if len(rets) != len(ret_types):
            raise CplError(f"def {name}: {len(ret_types)} return types but {len(rets)} returned variables")
        return FunDef(name, tuple(params), tuple(ret_types), body, tuple(rets))

    def parse_program(self) -> Program:
        funs: list[Function] = []
        names: set[str] = set()
        while self.peek().text in ("declare", "def"):
            f = self.parse_function()
            if f.name in names:
                t = self.peek()
                raise CplError(f"duplicate function name {f.name!r}", t.line, t.col)
            names.add(f.name)
            funs.append(f)
        entry: Stmt | None = None
        if self.peek().kind != "eof":
            entry = self.parse_stmt_block(stop=())
        t = self.peek()
        if t.kind != "eof":
            raise CplError(f"unexpected {t.text!r}", t.line, t.col)
        return Program(tuple(funs), entry)


def parse_program(source_text: str) -> Program:
    """Parse a .cpl source text into a Program."""
    return _Parser(source_text).parse_program()


def parse_stmt(source_text: str) -> Stmt:
    """Parse a bare statement (used in tests and the CLI entry option)."""
    p = _Parser(source_text)
    s = p.parse_stmt_block(stop=())
    t = p.peek()
    if t.kind != "eof":
        raise CplError(f"unexpected {t.text!r}", t.line, t.col)
    return s
