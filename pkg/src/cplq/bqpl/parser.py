"""Parser for .bqpl program text (the printer's inverse on ASTs)."""

from __future__ import annotations

import re

from ..cpl.ast import BOOL, BinOp, Const, Expr, FinType, UnOp, Var
from ..cpl.typecheck import TypingContext
from .ast import (
    AdjOp,
    BqplError,
    CAssign,
    CCall,
    CCallMeas,
    CCallMeasIndexed,
    CFor,
    CIf,
    CProcDecl,
    CProcDef,
    CRandom,
    CRandomRange,
    CRepeat,
    CSeq,
    CSkip,
    CStmt,
    CtrlOp,
    CWhileLeq,
    EmbedOp,
    GateOp,
    Proc,
    ProcContext,
    Refl0Op,
    UApply,
    UCall,
    UCallAdj,
    UnifOp,
    UnitaryOp,
    UProcDecl,
    UProcDef,
    USeq,
    USkip,
    UStmt,
    UWith,
    cseq_of,
    useq_of,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<float>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:=\$|:=|::|\*=|=>|\.\.|&&|\|\||call†|†|[-=<>+,:;(){}\[\]$])
    """,
    re.VERBOSE,
)

_UKEYWORDS = {"skip", "call", "with", "do"}


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise BqplError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup or "op"
        if kind not in ("ws", "comment"):
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
            raise BqplError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def expect_ident(self) -> str:
        t = self.next()
        if t.kind != "ident":
            raise BqplError(f"expected identifier, found {t.text!r}", t.line, t.col)
        return t.text

    def expect_int(self) -> int:
        t = self.next()
        if t.kind != "int":
            raise BqplError(f"expected integer, found {t.text!r}", t.line, t.col)
        return int(t.text)

    # -- names, types, expressions -------------------------------------------

    def parse_proc_name(self) -> str:
        name = self.expect_ident()
        if self.at("["):
            depth = 0
            parts = []
            while True:
                t = self.next()
                parts.append(t.text)
                if t.text == "[":
                    depth += 1
                elif t.text == "]":
                    depth -= 1
                    if depth == 0:
                        break
                elif t.kind == "eof":
                    raise BqplError("unterminated bracketed name", t.line, t.col)
            name += "".join(parts)
        return name

    def parse_type(self) -> FinType:
        t = self.next()
        if t.text == "Bool":
            return BOOL
        if t.text != "Fin":
            raise BqplError(f"expected type, found {t.text!r}", t.line, t.col)
        self.expect("<")
        s = self.expect_int()
        self.expect(">")
        return FinType(s)

    def parse_atom(self) -> Expr:
        t = self.peek()
        if t.text == "const":
            self.next()
            v = self.expect_int()
            self.expect(":")
            return Const(v, self.parse_type())
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
        raise BqplError(f"expected expression, found {t.text!r}", t.line, t.col)

    def parse_expr(self) -> Expr:
        lhs = self.parse_atom()
        t = self.peek()
        if t.text in ("+", "=", "<", "&&", "||"):
            self.next()
            return BinOp(t.text, lhs, self.parse_atom())
        return lhs

    # -- unitary operators ----------------------------------------------------

    def parse_unitary_op(self) -> UnitaryOp:
        t = self.next()
        if t.text in ("X", "Z", "H", "CNOT"):
            return GateOp(t.text)
        if t.text == "Adj":
            self.expect("-")
            return AdjOp(self.parse_unitary_op())
        if t.text == "Ctrl":
            self.expect("-")
            return CtrlOp(self.parse_unitary_op())
        if t.text in ("Unif", "Refl0"):
            self.expect("[")
            typ = self.parse_type()
            self.expect("]")
            return UnifOp(typ) if t.text == "Unif" else Refl0Op(typ)
        if t.text == "Embed":
            self.expect("[")
            self.expect("(")
            params = []
            if not self.at(")"):
                params.append(self.expect_ident())
                while self.at(","):
                    self.next()
                    params.append(self.expect_ident())
            self.expect(")")
            self.expect("=>")
            expr = self.parse_expr()
            self.expect("]")
            return EmbedOp(tuple(params), expr)
        raise BqplError(f"expected unitary operator, found {t.text!r}", t.line, t.col)

    # -- statements -----------------------------------------------------------

    def parse_var_list(self) -> tuple[str, ...]:
        names = [self.expect_ident()]
        while self.at(","):
            self.next()
            names.append(self.expect_ident())
        return tuple(names)

    def parse_ustmt_one(self) -> UStmt:
        t = self.peek()
        if t.text == "skip":
            self.next()
            self.expect(";")
            return USkip()
        if t.text == "with":
            self.next()
            self.expect("{")
            compute = self.parse_ustmt_block()
            self.expect("}")
            self.expect("do")
            self.expect("{")
            body = self.parse_ustmt_block()
            self.expect("}")
            return UWith(compute, body)
        if t.text in ("call", "call†"):
            self.next()
            adjoint = t.text == "call†"
            if not adjoint and self.at("†"):
                self.next()
                adjoint = True
            name = self.parse_proc_name()
            self.expect("(")
            wires: tuple[str, ...] = ()
            if not self.at(")"):
                wires = self.parse_var_list()
            self.expect(")")
            self.expect(";")
            return UCallAdj(name, wires) if adjoint else UCall(name, wires)
        wires = self.parse_var_list()
        self.expect("*=")
        op = self.parse_unitary_op()
        self.expect(";")
        return UApply(wires, op)

    def parse_ustmt_block(self) -> UStmt:
        stmts = []
        while not self.at("}") and self.peek().kind != "eof":
            stmts.append(self.parse_ustmt_one())
        return useq_of(stmts) if stmts else USkip()

    def parse_cstmt_one(self) -> CStmt:
        t = self.peek()
        if t.text == "skip":
            self.next()
            self.expect(";")
            return CSkip()
        if t.text == "if":
            self.next()
            self.expect("(")
            b = self.expect_ident()
            self.expect(")")
            self.expect("{")
            body = self.parse_cstmt_block()
            self.expect("}")
            return CIf(b, body)
        if t.text == "repeat":
            self.next()
            k = self.expect_int()
            self.expect("{")
            body = self.parse_cstmt_block()
            self.expect("}")
            return CRepeat(k, body)
        if t.text == "while":
            self.next()
            self.expect("[")
            k = self.expect_int()
            self.expect("]")
            self.expect("(")
            b = self.expect_ident()
            self.expect(")")
            self.expect("{")
            body = self.parse_cstmt_block()
            self.expect("}")
            return CWhileLeq(k, b, body)
        if t.text == "for":
            self.next()
            x = self.expect_ident()
            self.expect("in")
            self.expect("{")
            values = [self.expect_int()]
            while self.at(","):
                self.next()
                values.append(self.expect_int())
            self.expect("}")
            self.expect(":")
            typ = self.parse_type()
            self.expect("{")
            body = self.parse_cstmt_block()
            self.expect("}")
            return CFor(x, typ, tuple(values), body)
        if t.text == "call":
            self.next()
            name = self.parse_proc_name()
            self.expect("(")
            args: tuple[str, ...] = ()
            if not self.at(")"):
                args = self.parse_var_list()
            self.expect(")")
            self.expect(";")
            return CCall(name, args)
        if t.text == "call_uproc_and_meas":
            self.next()
            name = self.expect_ident()
            indexed = None
            if self.at("[") and self.peek(2).text == "in":
                self.next()
                index = self.expect_ident()
                self.expect("in")
                self.expect("{")
                values = [self.expect_int()]
                while self.at(","):
                    self.next()
                    values.append(self.expect_int())
                self.expect("}")
                self.expect(":")
                typ = self.parse_type()
                self.expect("]")
                indexed = (index, typ, tuple(values))
            elif self.at("["):
                depth = 0
                parts = []
                while True:
                    tk = self.next()
                    parts.append(tk.text)
                    if tk.text == "[":
                        depth += 1
                    elif tk.text == "]":
                        depth -= 1
                        if depth == 0:
                            break
                name += "".join(parts)
            self.expect("(")
            args = ()
            if not self.at(")"):
                args = self.parse_var_list()
            self.expect(")")
            self.expect(";")
            if indexed is not None:
                index, typ, values = indexed
                return CCallMeasIndexed(name, index, typ, values, args)
            return CCallMeas(name, args)
        # assignment or random
        x = self.expect_ident()
        t2 = self.next()
        if t2.text == ":=":
            e = self.parse_expr()
            self.expect(";")
            return CAssign(x, e)
        if t2.text == ":=$":
            if self.at("["):
                self.next()
                one = self.expect_int()
                if one != 1:
                    raise BqplError("ranged sampling starts at 1", t2.line, t2.col)
                self.expect("..")
                y = self.expect_ident()
                self.expect("]")
                self.expect(";")
                return CRandomRange(x, y)
            typ = self.parse_type()
            self.expect(";")
            return CRandom(x, typ)
        raise BqplError(f"expected ':=' or ':=$', found {t2.text!r}", t2.line, t2.col)

    def parse_cstmt_block(self) -> CStmt:
        stmts = []
        while not self.at("}") and self.peek().kind != "eof":
            stmts.append(self.parse_cstmt_one())
        return cseq_of(stmts) if stmts else CSkip()

    # -- procedures -----------------------------------------------------------

    def parse_params(self) -> TypingContext:
        self.expect("(")
        items: list[tuple[str, FinType]] = []
        if not self.at(")"):
            while True:
                n = self.expect_ident()
                self.expect(":")
                items.append((n, self.parse_type()))
                if not self.at(","):
                    break
                self.next()
        self.expect(")")
        return TypingContext(items)

    def parse_tick(self) -> float:
        self.expect("::")
        self.expect("tick")
        self.expect("(")
        t = self.next()
        if t.kind not in ("int", "float"):
            raise BqplError(f"expected tick value, found {t.text!r}", t.line, t.col)
        self.expect(")")
        return float(t.text)

    def parse_proc(self) -> Proc:
        t = self.next()
        if t.text == "declare":
            kind = self.next().text
            name = self.parse_proc_name()
            params = self.parse_params()
            tick = self.parse_tick()
            if kind == "uproc":
                return UProcDecl(name, params, tick)
            if kind == "proc":
                return CProcDecl(name, params, tick)
            raise BqplError(f"expected uproc/proc, found {kind!r}", t.line, t.col)
        if t.text == "uproc":
            name = self.parse_proc_name()
            params = self.parse_params()
            self.expect("do")
            self.expect("{")
            body = self.parse_ustmt_block()
            self.expect("}")
            return UProcDef(name, params, body)
        if t.text == "proc":
            name = self.parse_proc_name()
            params = self.parse_params()
            locals_ = TypingContext()
            if self.at("{") and self.peek(1).text == "locals":
                self.next()
                self.expect("locals")
                self.expect(":")
                locals_ = self.parse_params()
                self.expect("}")
            self.expect("do")
            self.expect("{")
            body = self.parse_cstmt_block()
            self.expect("}")
            return CProcDef(name, params, locals_, body)
        raise BqplError(f"expected procedure, found {t.text!r}", t.line, t.col)

    def parse_program(self) -> ProcContext:
        procs = []
        while self.peek().kind != "eof":
            procs.append(self.parse_proc())
        return ProcContext(procs)


def parse_bqpl(source_text: str) -> ProcContext:
    return _Parser(source_text).parse_program()
