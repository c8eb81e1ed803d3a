"""Registry of search primitives.

Each primitive contributes five facets: reference semantics, an expected
quantum cost rule, a unitary cost rule, a unitary compilation, and a general
quantum compilation. The analyses and both compilers dispatch through this
table, so adding a primitive means adding one entry here (plus its handlers)
without touching the compiler cores.

The registry is populated lazily to keep the provider modules import-cycle
free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable


@dataclass
class PrimitiveSpec:
    name: str
    semantics: Callable  # (ctx, gamma, pred, fixed_args, state) -> Value
    cost_q_rule: Callable  # expected quantum cost of the primitive call
    cost_q_max_rule: Callable  # worst-case quantum cost
    cost_u_rule: Callable  # unitary cost
    symbolic_u_rule: Callable  # symbolic unitary cost
    unitary_builder: Callable | None  # emits the unitary realization
    classical_builder: Callable | None  # emits the classical-fragment realization


_REGISTRY: dict[str, PrimitiveSpec] = {}


def register(spec: PrimitiveSpec) -> None:
    _REGISTRY[spec.name] = spec


def get(name: str) -> PrimitiveSpec:
    if not _REGISTRY:
        _populate()
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown primitive {name!r}") from None


def _populate() -> None:
    from . import cost  # noqa: F401  (registers cost rules)
    from .cost import analysis, symbolic
    from .cpl import evaluate
    from .compiler import primitives as comp

    def entry(name, semantics, unitary_builder, classical_builder):
        register(
            PrimitiveSpec(
                name=name,
                semantics=semantics,
                cost_q_rule=analysis.PRIM_COST_Q[name],
                cost_q_max_rule=analysis.PRIM_COST_Q_MAX[name],
                cost_u_rule=analysis.PRIM_COST_U[name],
                symbolic_u_rule=symbolic.PRIM_SYMBOLIC_U[name],
                unitary_builder=unitary_builder,
                classical_builder=classical_builder,
            )
        )

    entry("any", evaluate.any_hat, comp.build_any_unitary, comp.build_any_classical)
    entry("any_det", evaluate.any_hat, comp.build_bruteforce_unitary, comp.build_det_classical)
    entry("any_rand", evaluate.any_hat, comp.build_bruteforce_unitary, comp.build_rand_classical)
    entry("max", evaluate.max_hat, None, None)  # cost analysis only
    entry("count", evaluate.count_hat, None, None)  # cost analysis only
