"""Seeded generator of random well-typed CPL programs and data.

Programs are built bottom-up so they are well-typed by construction: a few
declared data functions, then definitions whose bodies use expressions, calls
to earlier functions, and search primitives over earlier Bool-valued
predicates, then an entry statement. Nesting depth of primitives is bounded.
"""

from __future__ import annotations

import random

from cplq.cpl.ast import (
    BOOL,
    Assign,
    BinOp,
    CallStmt,
    Const,
    FinType,
    FunDecl,
    FunDef,
    PrimCall,
    Program,
    Seq,
    UnOp,
    Var,
    seq_of,
)
from cplq.cpl.evaluate import Interpretation
from cplq.cpl.typecheck import TypingContext, check_program, type_check_stmt


class ProgramGen:
    def __init__(self, rng: random.Random, max_size: int = 4, prims=("any",)):
        self.rng = rng
        self.max_size = max_size
        self.prims = prims
        self.counter = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    def some_type(self) -> FinType:
        return FinType(self.rng.randint(2, self.max_size))

    def gen_expr(self, ctx: list[tuple[str, FinType]], want: FinType | None = None):
        rng = self.rng
        typed = {}
        for n, t in ctx:
            typed.setdefault(t, []).append(n)
        choices = []
        if want is None or want == BOOL:
            bools = typed.get(BOOL, [])
            if bools:
                choices.append(lambda: UnOp("not", Var(rng.choice(bools))))
                choices.append(
                    lambda: BinOp(rng.choice(["&&", "||"]), Var(rng.choice(bools)), Var(rng.choice(bools)))
                )
            for t, names in typed.items():
                if names:
                    choices.append(
                        lambda t=t, names=names: BinOp(
                            rng.choice(["=", "<"]), Var(rng.choice(names)), Var(rng.choice(names))
                        )
                    )
            choices.append(lambda: Const(rng.randint(0, 1), BOOL))
        if want is None or want != BOOL:
            targets = [t for t in typed if want is None or t == want]
            if want is not None and want not in typed:
                targets = []
            for t in targets:
                names = typed[t]
                choices.append(
                    lambda t=t, names=names: BinOp("+", Var(rng.choice(names)), Var(rng.choice(names)))
                )
        if want is not None and want != BOOL:
            choices.append(lambda: Const(rng.randint(0, want.concrete_size - 1), want))
        if not choices:
            w = want or BOOL
            return Const(rng.randint(0, w.concrete_size - 1), w)
        return rng.choice(choices)()

    def gen_stmt(self, phi, ctx: list[tuple[str, FinType]], depth: int):
        """One statement extending ctx; returns (stmt, new ctx)."""
        rng = self.rng
        options = ["assign"]
        callables = [
            f
            for f in phi.functions()
            if all(
                any(ct == ti for _, ct in ctx)
                for ti in (f.in_types if isinstance(f, FunDecl) else tuple(t for _, t in f.params))
            )
        ]
        if callables:
            options.append("call")
        preds = [f for f in phi.functions() if self._pred_ok(f, ctx, depth)]
        if preds and depth > 0:
            options += ["prim"] * 2
        kind = rng.choice(options)
        if kind == "assign":
            x = self.fresh("v")
            e = self.gen_expr(ctx)
            from cplq.cpl.typecheck import elaborate_expr

            t, e2 = elaborate_expr(TypingContext(ctx), e)
            return Assign(x, e2), ctx + [(x, t)]
        if kind == "call":
            f = rng.choice(callables)
            in_types = f.in_types if isinstance(f, FunDecl) else tuple(t for _, t in f.params)
            out_types = f.out_types if isinstance(f, FunDecl) else f.ret_types
            args = self._distinct_args(ctx, in_types)
            if args is None:
                return self.gen_assign(ctx)
            targets = tuple(self.fresh("v") for _ in out_types)
            return CallStmt(targets, f.name, args), ctx + list(zip(targets, out_types))
        f = rng.choice(preds)
        in_types = f.in_types if isinstance(f, FunDecl) else tuple(t for _, t in f.params)
        args = self._distinct_args(ctx, in_types[:-1])
        if args is None:
            return self.gen_assign(ctx)
        x = self.fresh("b")
        prim = rng.choice(self.prims)
        return PrimCall(x, prim, f.name, args), ctx + [(x, BOOL)]

    def gen_assign(self, ctx):
        x = self.fresh("v")
        e = self.gen_expr(ctx)
        from cplq.cpl.typecheck import elaborate_expr

        t, e2 = elaborate_expr(TypingContext(ctx), e)
        return Assign(x, e2), ctx + [(x, t)]

    def _distinct_args(self, ctx, in_types):
        """Pick pairwise distinct argument variables (the compilers pass by
        reference and reject aliasing)."""
        rng = self.rng
        used: set[str] = set()
        args = []
        for ti in in_types:
            pool = [n for n, t in ctx if t == ti and n not in used]
            if not pool:
                return None
            a = rng.choice(pool)
            used.add(a)
            args.append(a)
        return tuple(args)

    def _pred_ok(self, f, ctx, depth) -> bool:
        in_types = f.in_types if isinstance(f, FunDecl) else tuple(t for _, t in f.params)
        out_types = f.out_types if isinstance(f, FunDecl) else f.ret_types
        if len(out_types) != 1 or out_types[0] != BOOL or len(in_types) < 1:
            return False
        if self._prim_depth(f) >= depth:
            return False
        return all(any(t == ti for _, t in ctx) for ti in in_types[:-1])

    def _prim_depth(self, f) -> int:
        if isinstance(f, FunDecl):
            return 0
        depth = 0

        def walk(s):
            nonlocal depth
            if isinstance(s, Seq):
                walk(s.first)
                walk(s.rest)
            elif isinstance(s, PrimCall):
                depth = max(depth, 1 + self._prim_depth(self._phi[s.pred]))
            elif isinstance(s, CallStmt):
                depth = max(depth, self._prim_depth(self._phi[s.func]))

        walk(f.body)
        return depth

    def gen_fun(self, phi, depth: int):
        rng = self.rng
        n_params = rng.randint(1, 2)
        params = tuple((self.fresh("p"), self.some_type()) for _ in range(n_params))
        ctx = list(params)
        stmts = []
        self._phi = phi
        for _ in range(rng.randint(1, 3)):
            s, ctx = self.gen_stmt(phi, ctx, depth)
            stmts.append(s)
        computed = [(n, t) for n, t in ctx if n not in {p for p, _ in params}]
        if not computed:
            x = self.fresh("v")
            e = self.gen_expr(ctx, BOOL)
            from cplq.cpl.typecheck import elaborate_expr

            t, e2 = elaborate_expr(TypingContext(ctx), e)
            stmts.append(Assign(x, e2))
            computed = [(x, t)]
        ret, rt = rng.choice(computed)
        return FunDef(self.fresh("f"), params, (rt,), seq_of(stmts), (ret,))

    def gen_program(self, n_decls: int = 1, n_defs: int = 3, max_depth: int = 2) -> Program:
        rng = self.rng
        funs = []
        from cplq.cpl.ast import FunctionContext

        phi = FunctionContext()
        for _ in range(n_decls):
            d = FunDecl(
                self.fresh("D"),
                tuple(self.some_type() for _ in range(rng.randint(1, 2))),
                (rng.choice([BOOL, self.some_type()]),),
            )
            funs.append(d)
            phi.add(d)
        for _ in range(n_defs):
            f = self.gen_fun(phi, depth=rng.randint(0, max_depth))
            funs.append(f)
            phi.add(f)
        # entry: call a nullary-compatible chain; simplest: assignments + prim if possible
        self._phi = phi
        ctx: list[tuple[str, FinType]] = []
        stmts = []
        x = self.fresh("v")
        t = self.some_type()
        stmts.append(Assign(x, Const(rng.randint(0, t.concrete_size - 1), t)))
        ctx.append((x, t))
        for _ in range(rng.randint(0, 2)):
            s, ctx = self.gen_stmt(phi, ctx, depth=2)
            stmts.append(s)
        return check_program(Program(tuple(funs), seq_of(stmts)))

    def gen_interps(self, program: Program) -> dict[str, Interpretation]:
        rng = self.rng
        out = {}
        for d in program.fun_context.declared():
            sizes = [t.concrete_size for t in d.in_types]
            out_sizes = [t.concrete_size for t in d.out_types]

            def fn(*args, _o=out_sizes, _r=rng):
                return tuple(_r.randint(0, s - 1) for s in _o)

            out[d.name] = Interpretation.from_function(d, fn)
        return out


def random_program(seed: int, **kw) -> Program:
    return ProgramGen(random.Random(seed), **{k: v for k, v in kw.items() if k in ("max_size", "prims")}).gen_program(
        **{k: v for k, v in kw.items() if k in ("n_decls", "n_defs", "max_depth")}
    )
