"""Distance metrics used by the verification suite.

The unitary distance restricts both operators to zero-initialized auxiliary
wires and takes the operator norm of the difference of the restricted blocks,
computed from the Gram matrix of the difference columns (so huge operators
never materialize). Total variation lives in classical.py next to ProbDist.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable

import numpy as np

from .states import State, WireSpace


def gram_operator_norm(gram: np.ndarray) -> float:
    """||M|| from G = M^dagger M."""
    g = (gram + gram.conj().T) / 2
    ev = np.linalg.eigvalsh(g)
    return math.sqrt(max(float(ev[-1]), 0.0))


def unitary_distance_columns(cols_u: list[State], cols_v: list[State]) -> float:
    """|| U(I (x) |0>) - V(I (x) |0>) || from explicit columns."""
    k = len(cols_u)
    gram = np.zeros((k, k), dtype=np.complex128)
    uu = np.zeros((k, k), dtype=np.complex128)
    uv = np.zeros((k, k), dtype=np.complex128)
    vv = np.zeros((k, k), dtype=np.complex128)
    for i in range(k):
        for j in range(k):
            uu[i, j] = cols_u[i].inner(cols_u[j])
            uv[i, j] = cols_u[i].inner(cols_v[j])
            vv[i, j] = cols_v[i].inner(cols_v[j])
    gram = uu - uv - uv.conj().T + vv
    return gram_operator_norm(gram)


def basis_assignments(space: WireSpace, names: list[str]):
    sizes = [space.sizes[n] for n in names]
    for vals in itertools.product(*[range(s) for s in sizes]):
        yield dict(zip(names, vals))


def unitary_distance(
    space: WireSpace,
    aux_names: set[str],
    col_u: Callable[[dict[str, int]], State],
    col_v: Callable[[dict[str, int]], State],
) -> tuple[float, float]:
    """Distance restricted to |0>-initialized aux wires, plus a tracked bound.

    Returns (distance, truncation_bound): the bound collects any norm loss the
    factored backend tracked while producing the columns, so the true distance
    lies within `truncation_bound` of the reported one.
    """
    main = [n for n in space.names if n not in aux_names]
    cols_u_list: list[State] = []
    cols_v_list: list[State] = []
    lost = 0.0
    for values in basis_assignments(space, main):
        cu = col_u(dict(values))
        cv = col_v(dict(values))
        lost = max(lost, getattr(cu, "lost", 0.0) + getattr(cv, "lost", 0.0))
        cols_u_list.append(cu)
        cols_v_list.append(cv)
    return unitary_distance_columns(cols_u_list, cols_v_list), lost


def unitary_distance_matrices(u: np.ndarray, v: np.ndarray, aux_dim: int) -> float:
    """Distance for dense operators over (main (x) aux) with aux last."""
    dim = u.shape[0]
    main_dim = dim // aux_dim
    cols = [m * aux_dim for m in range(main_dim)]
    m = (u - v)[:, cols]
    return float(np.linalg.norm(m, ord=2))


def is_unitary(m: np.ndarray, tol: float = 1e-9) -> bool:
    d = m.shape[0]
    return bool(np.linalg.norm(m.conj().T @ m - np.eye(d)) <= tol)
