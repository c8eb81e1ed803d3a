"""Command-line front door.

Subcommands: check, run, cost, compile, simulate, sweep. Programs are .cpl
files; input data comes from an interpretation JSON file; ticks from a ticks
JSON file. Exactly one of --eps/--delta applies where a precision is needed.
Exit codes: 1 for parse/type errors, 2 for missing data.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__
from .cpl.ast import CplError, FunDecl, Program
from .cpl.evaluate import EvalContext, State, load_interpretation_file, run_entry
from .cpl.parser import parse_program, parse_stmt
from .cpl.printer import print_program
from .cpl.typecheck import TypingContext, check_program, resolve_params, type_check_stmt
from .bqpl.printer import print_bqpl
from .compiler.quantum import compile_program
from .compiler.unitary import CompileUnsupported
from .cost.analysis import cost_q, cost_q_max, cost_u
from .cost.queries import CostConfig, SplitStrategy, UAnyVariant, load_ticks_file
from .cost.symbolic import DELTA, print_cost_expr, simplify, symbolic_cost_u
from .pipeline import entry_statement, simulate_compiled, build_qeval
from .sim.classical import ProbDist, eval_classical_stmt


def _parse_params(items: list[str]) -> dict[str, int]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise CplError(f"bad --param {item!r}, expected NAME=VALUE")
        k, v = item.split("=", 1)
        out[k.strip()] = int(v)
    return out


def _load_program(args) -> Program:
    with open(args.program, "r", encoding="utf-8") as fh:
        text = fh.read()
    program = parse_program(text)
    program = resolve_params(program, _parse_params(args.param))
    return check_program(program)


def _config(args) -> CostConfig:
    cfg = CostConfig()
    if getattr(args, "ticks", None):
        cfg.ticks = load_ticks_file(args.ticks)
    if getattr(args, "split", None):
        cfg.split = SplitStrategy(args.split)
    if getattr(args, "uany", None):
        cfg.uany_variant = UAnyVariant(args.uany)
    return cfg


def _interps(args, phi):
    if not getattr(args, "data", None):
        if phi.declared():
            print("error: program declares functions but no --data file given", file=sys.stderr)
            sys.exit(2)
        return {}
    try:
        return load_interpretation_file(phi, args.data)
    except FileNotFoundError:
        print(f"error: data file {args.data!r} not found", file=sys.stderr)
        sys.exit(2)


def _precision(args) -> tuple[str, float]:
    eps = getattr(args, "eps", None)
    delta = getattr(args, "delta", None)
    if (eps is None) == (delta is None):
        print("error: exactly one of --eps/--delta is required", file=sys.stderr)
        sys.exit(1)
    return ("eps", eps) if eps is not None else ("delta", delta)


def cmd_check(args) -> int:
    program = _load_program(args)
    stmt = entry_statement(program, args.entry)
    gamma = type_check_stmt(program.fun_context, TypingContext(), stmt)
    print(f"ok: {gamma}")
    return 0


def cmd_run(args) -> int:
    program = _load_program(args)
    phi = program.fun_context
    stmt = entry_statement(program, args.entry)
    ctx = EvalContext(phi, _interps(args, phi))
    out = run_entry(ctx, stmt)
    for name, value in out.items():
        print(f"{name} = {value.value}")
    return 0


def cmd_cost(args) -> int:
    program = _load_program(args)
    phi = program.fun_context
    stmt = entry_statement(program, args.entry)
    cfg = _config(args)
    kind, value = _precision(args)
    eps = value if kind == "eps" else value  # same budget reused for both reports
    report: dict[str, object] = {}
    if args.data or not phi.declared():
        ctx = EvalContext(phi, _interps(args, phi))
        report["cost_q"] = cost_q(ctx, cfg, eps, stmt, State())
    report["cost_q_max"] = cost_q_max(phi, cfg, eps, stmt)
    report["cost_u"] = cost_u(phi, cfg, value, stmt)
    expr = simplify(symbolic_cost_u(phi, cfg, stmt))
    report["cost_u_symbolic"] = print_cost_expr(expr)
    for k, v in report.items():
        print(f"{k} = {v}")
    return 0


def cmd_compile(args) -> int:
    program = _load_program(args)
    phi = program.fun_context
    stmt = entry_statement(program, args.entry)
    cfg = _config(args)
    kind, value = _precision(args)
    if kind != "eps":
        print("error: compilation needs --eps", file=sys.stderr)
        sys.exit(1)
    try:
        cp = compile_program(phi, stmt, cfg, value)
    except CompileUnsupported as e:
        print(f"error: {e}", file=sys.stderr)
        sys.exit(1)
    text = print_bqpl(cp.pi)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.output} ({len(cp.pi.procs())} procedures)")
    else:
        print(text)
    return 0


def cmd_simulate(args) -> int:
    program = _load_program(args)
    phi = program.fun_context
    stmt = entry_statement(program, args.entry)
    cfg = _config(args)
    kind, value = _precision(args)
    if kind != "eps":
        print("error: simulation needs --eps", file=sys.stderr)
        sys.exit(1)
    interps = _interps(args, phi)
    try:
        cp = compile_program(phi, stmt, cfg, value)
    except CompileUnsupported as e:
        print(f"error: {e}", file=sys.stderr)
        sys.exit(1)
    if args.shots:
        report = _sample_report(cp, interps, phi, stmt, args.shots, args.seed)
    else:
        report = simulate_compiled(cp, interps, phi, stmt).to_json()
    text = json.dumps(report, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.output}")
    else:
        print(text)
    return 0


def _sample_report(cp, interps, phi, stmt, shots: int, seed: int) -> dict:
    """Shot-based sampling; shot i uses a counter-based generator at counter i."""
    qctx = build_qeval(cp, interps)
    counts: dict[str, int] = {}
    for shot in range(shots):
        rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, shot]))
        values = _sample_once(qctx, cp, rng)
        key = ",".join(str(values[n]) for n in cp.gamma.names())
        counts[key] = counts.get(key, 0) + 1
    return {
        "variables": cp.gamma.names(),
        "shots": shots,
        "seed": seed,
        "counts": dict(sorted(counts.items())),
    }


def _sample_once(qctx, cp, rng) -> dict[str, int]:
    from .bqpl.ast import (
        CAssign,
        CCall,
        CCallMeas,
        CIf,
        CProcDecl,
        CProcDef,
        CRandom,
        CRandomRange,
        CSeq,
        CSkip,
    )
    from .cpl.evaluate import eval_expr

    def run(stmt, env, gamma):
        match stmt:
            case CSkip():
                return
            case CSeq(a, b):
                run(a, env, gamma)
                run(b, env, gamma)
            case CAssign(x, e):
                env[x] = eval_expr(e, _env_state(env, gamma)).value
            case CRandom(x, t):
                env[x] = int(rng.integers(0, t.concrete_size))
            case CRandomRange(x, y):
                upper = env[y]
                env[x] = int(rng.integers(1, upper + 1)) if upper >= 1 else 0
            case CIf(b, body):
                if env[b] == 1:
                    run(body, env, gamma)
            case CCall(h, xs):
                proc = qctx.pi[h]
                if isinstance(proc, CProcDecl):
                    vals = qctx.chat[h](tuple(env[x] for x in xs))
                    for x, v in zip(xs, vals):
                        env[x] = v
                    return
                assert isinstance(proc, CProcDef)
                inner_gamma = proc.params.concat(proc.locals)
                inner = {n: 0 for n in inner_gamma.names()}
                for p, x in zip(proc.params.names(), xs):
                    inner[p] = env[x]
                run(qctx.body_of(h), inner, inner_gamma)
                for p, x in zip(proc.params.names(), xs):
                    env[x] = inner[p]
            case CCallMeas(g, xs):
                outcomes, _ = qctx.measure_uproc(g, tuple(env[x] for x in xs))
                keys = list(outcomes)
                probs = np.array([outcomes[k] for k in keys])
                probs = probs / probs.sum()
                idx = rng.choice(len(keys), p=probs)
                for x, v in zip(xs, keys[idx]):
                    env[x] = v
            case _:
                raise CplError(f"cannot sample statement {stmt!r}")

    def _env_state(env, gamma):
        from .cpl.evaluate import State as CplState, Value

        return CplState([(n, Value(env[n], gamma[n])) for n in gamma.names()])

    from .bqpl.transform import desugar_cstmt

    env = {n: 0 for n in cp.gamma.names()}
    run(desugar_cstmt(cp.entry), env, cp.gamma)
    return env


def one_zero_per_row(n: int, m: int, rng) -> list[list[int]]:
    """A random 0/1 matrix with exactly one 0 in each row."""
    rows = []
    for _ in range(n):
        row = [1] * m
        row[int(rng.integers(0, m))] = 0
        rows.append(row)
    return rows


def sweep_costs(n: int, eps: float, cfg: CostConfig, rng) -> dict[str, float]:
    """Cost columns of the matrix-search family at size n x n.

    The quantum/deterministic/randomized variants differ only in which search
    primitive both nesting levels use. Costs are evaluated from the cost
    functions directly; the input-dependent solution counts come from the
    seeded one-zero-per-row generator (no all-ones row, and one zero at a
    random column per row).
    """
    from .cost.queries import (
        qsearch_max_queries,
        randsearch_cutoff,
        uany_query_bound,
    )

    zero_cols = [int(rng.integers(0, n)) for _ in range(n)]

    # any/any: eq. of the factorized matrix-search cost at K = 0
    qmax = qsearch_max_queries(n, eps / 2)
    inner = uany_query_bound(n, eps / (32 * qmax), cfg.uany_variant)
    cost_any = 8 * qmax * inner

    # det/det: rows scanned fully (no all-ones row), each row up to its zero
    cost_det = float(sum(c + 1 for c in zero_cols))

    # rand/rand: cutoff times the mean row cost; each row has K = 1
    cost_rand = randsearch_cutoff(n, eps) * (n + 1.0)

    return {
        "N": n,
        "cost_any": cost_any,
        "cost_any_det": cost_det,
        "cost_any_rand": cost_rand,
        "det_ref": float(n) * n,
        "rand_ref": n * n / 2.0,
    }


def cmd_sweep(args) -> int:
    cfg = _config(args)
    rng = np.random.default_rng(args.seed)
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else []
    rows = [sweep_costs(n, args.eps, cfg, rng) for n in sizes]
    header = ["N", "cost_any", "cost_any_det", "cost_any_rand", "N^2", "N^2/2"]
    config_hash = hashlib.sha256(
        f"{args.eps}|{args.seed}|{cfg.split.value}|{cfg.uany_variant.value}".encode()
    ).hexdigest()[:12]
    lines = [
        f"# cplq {__version__} sweep eps={args.eps} seed={args.seed} config={config_hash}",
        ",".join(header),
    ]
    for r in rows:
        lines.append(
            f"{r['N']},{r['cost_any']},{r['cost_any_det']},{r['cost_any_rand']},"
            f"{r['det_ref']},{r['rand_ref']}"
        )
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.csv}")
    else:
        print(text, end="")
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cplq", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, data=True, precision=False):
        p.add_argument("program", help=".cpl source file")
        p.add_argument("--param", action="append", default=[], metavar="K=V")
        p.add_argument("--entry", default=None, help="entry function name")
        if data:
            p.add_argument("--data", default=None, help="interpretation JSON file")
        if precision:
            p.add_argument("--ticks", default=None, help="ticks JSON file")
            p.add_argument("--eps", type=float, default=None)
            p.add_argument("--delta", type=float, default=None)
            p.add_argument("--split", choices=["half", "lossless"], default="half")
            p.add_argument("--uany", choices=["definition", "lemma"], default="lemma")

    p = sub.add_parser("check", help="type-check and print the output context")
    common(p, data=False)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("run", help="evaluate the program classically")
    common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("cost", help="report the cost functions")
    common(p, precision=True)
    p.set_defaults(fn=cmd_cost)

    p = sub.add_parser("compile", help="compile to a .bqpl file")
    common(p, data=False, precision=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("simulate", help="compile and simulate exactly (or sample)")
    common(p, precision=True)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="cost columns over a size grid (CSV)")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--sizes", default="", help="comma-separated sizes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", choices=["half", "lossless"], default="half")
    p.add_argument("--uany", choices=["definition", "lemma"], default="lemma")
    p.add_argument("--ticks", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CplError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
