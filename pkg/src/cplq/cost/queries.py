"""Query-count formulas for the search primitives, and cost configuration.

Two families of bounds drive the analysis:

* expected/worst-case queries of bounded-error quantum search with K solutions
  out of N, used by the general quantum compilation of `any`;
* the worst-case query count of the fixed-iteration unitary search used by the
  unitary compilation of `any`, parametrized by an operator-norm error delta.

The unitary bound comes in two variants that differ by a factor of two
("definition" and "lemma"); the constructed search procedure's actual query
count matches the lemma variant, which is therefore the default (see the cost
soundness tests).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

GROVER_ALPHA = 9.2  # per-run query budget factor of the expected-cost search
ZALKA_SUCCESS = 0.3914  # per-run success probability of the unitary search


class PrecisionKind(Enum):
    FAIL_PROB = "eps"  # total-variation failure probability
    NORM_ERROR = "delta"  # operator-norm error on zero-initialized auxiliaries


@dataclass(frozen=True)
class Precision:
    kind: PrecisionKind
    value: float

    def __post_init__(self):
        if not (0.0 < self.value <= 1.0):
            raise ValueError(f"precision must lie in (0, 1], got {self.value}")

    @staticmethod
    def eps(value: float) -> "Precision":
        return Precision(PrecisionKind.FAIL_PROB, value)

    @staticmethod
    def delta(value: float) -> "Precision":
        return Precision(PrecisionKind.NORM_ERROR, value)


class SplitStrategy(Enum):
    HALF = "half"  # halve the budget at every sequence
    LOSSLESS = "lossless"  # only split between statements that can fail


class UAnyVariant(Enum):
    DEFINITION = "definition"  # W(N, delta^2/4)
    LEMMA = "lemma"  # 2 * W(N, delta^2/4); matches the built procedure


@dataclass(frozen=True)
class Ticks:
    classical: float = 1.0
    quantum: float = 1.0


@dataclass
class CostConfig:
    """Per-function tick constants and analysis options."""

    ticks: dict[str, Ticks] = field(default_factory=dict)
    split: SplitStrategy = SplitStrategy.HALF
    uany_variant: UAnyVariant = UAnyVariant.LEMMA
    count_constant: float = 1.0  # scale of the counting primitive's quantum cost

    def classical_tick(self, fname: str) -> float:
        return self.ticks.get(fname, Ticks()).classical

    def quantum_tick(self, fname: str) -> float:
        return self.ticks.get(fname, Ticks()).quantum


def load_ticks(doc: dict) -> dict[str, Ticks]:
    """Ticks file format: {"Matrix": {"classical_tick": 1, "quantum_tick": 1}}."""
    out = {}
    for name, spec in doc.items():
        c = float(spec.get("classical_tick", 1.0))
        q = float(spec.get("quantum_tick", 1.0))
        if c < 0 or q < 0:
            raise ValueError(f"negative tick for {name!r}")
        out[name] = Ticks(c, q)
    return out


def load_ticks_file(path: str) -> dict[str, Ticks]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_ticks(json.load(fh))


# ---------------------------------------------------------------------------
# Search query counts
# ---------------------------------------------------------------------------

def qsearch_expected_queries(n: int, k: int, eps: float) -> float:
    """Expected predicate queries of bounded-error quantum search.

    With K solutions among N the search finds one after an expected
    F(N,K) * (1 + 1/(1 - F(N,K)/(alpha*sqrt(N)))) queries; with no solutions
    it exhausts its worst-case budget alpha * ceil(log3(1/eps)) * sqrt(N).
    """
    if n < 1 or not (0 <= k <= n):
        raise ValueError(f"bad search-space parameters N={n}, K={k}")
    if k == 0:
        return qsearch_max_queries(n, eps)
    if k < n / 4:
        f = GROVER_ALPHA * math.sqrt(n) / (3 * math.sqrt(k))
    else:
        f = 2.0344
    return f * (1 + 1 / (1 - f / (GROVER_ALPHA * math.sqrt(n))))


def qsearch_max_queries(n: int, eps: float) -> float:
    """Worst-case predicate queries of the expected-cost search."""
    if n < 1:
        raise ValueError(f"bad search-space size N={n}")
    return GROVER_ALPHA * math.ceil(math.log(1 / eps, 3)) * math.sqrt(n)


def zalka_base_queries(n: int, fail_prob: float) -> int:
    """Fixed-iteration unitary search: queries to reach a failure probability."""
    n_g = math.ceil(math.pi / 4 * math.sqrt(n))
    n_r = math.ceil(math.log(fail_prob) / math.log(1 - ZALKA_SUCCESS))
    return n_g * n_r


def uany_query_bound(n: int, delta: float, variant: UAnyVariant = UAnyVariant.LEMMA) -> int:
    """Worst-case predicate queries of the unitary `any` at norm error delta."""
    if n < 1:
        raise ValueError(f"bad search-space size N={n}")
    base = zalka_base_queries(n, delta**2 / 4)
    return 2 * base if variant is UAnyVariant.LEMMA else base


def uany_counts(n: int, delta: float) -> tuple[int, int]:
    """(grover iterations per run, number of runs) of the built unitary search."""
    n_g = math.ceil(math.pi / 4 * math.sqrt(n))
    n_r = math.ceil(math.log(delta**2 / 4) / math.log(1 - ZALKA_SUCCESS))
    return n_g, n_r


# ---------------------------------------------------------------------------
# Max-finding and counting
# ---------------------------------------------------------------------------

def maxfind_expected_queries(n: int, eps: float) -> float:
    """Predicate queries of quantum max-finding at failure probability eps."""
    if n < 1:
        raise ValueError(f"bad search-space size N={n}")
    return (57.2 * math.sqrt(n) + 25.4) * math.log(1 / eps, 3)


def maxfind_unitary_queries(n: int, delta: float) -> float:
    """Predicate queries of unitary max-finding at norm error delta."""
    if n < 1:
        raise ValueError(f"bad search-space size N={n}")
    return (57.2 * math.sqrt(n) + 25.4) * math.log(4 / delta**2, 3)


def count_expected_queries(n: int, solutions: int, eps: float, constant: float = 1.0) -> float:
    """Quantum counting queries: constant * sqrt(N*c) * ln(1/eps).

    Only the asymptotic shape is established; the leading constant is
    configurable and defaults to 1.
    """
    if n < 1 or not (0 <= solutions <= n):
        raise ValueError(f"bad counting parameters N={n}, c={solutions}")
    return constant * math.sqrt(n * solutions) * math.log(1 / eps)


def count_max_queries(n: int, eps: float, constant: float = 1.0) -> float:
    return count_expected_queries(n, n, eps, constant)


def count_unitary_queries(n: int) -> float:
    """Unitary counting evaluates the predicate on every element."""
    return float(n)


def randsearch_expected_iterations(n: int, k: int, eps: float) -> float:
    """Iterations of sampling-with-replacement search before the cutoff."""
    if k > 0:
        return n / k
    return float(math.ceil(n * math.log(1 / eps)))


def randsearch_cutoff(n: int, eps: float) -> int:
    return math.ceil(n * math.log(1 / eps))
