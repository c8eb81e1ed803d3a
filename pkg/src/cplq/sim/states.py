"""State representations for exact unitary simulation.

Two interchangeable backends:

* DenseState: one complex amplitude array over the whole wire space.
* FactoredState: a short sum of tensor-product terms, each term a product of
  factors over disjoint wire groups. Operators merge the touched factors,
  apply densely inside the merged group, and split rank-one groups back off.
  Splits and drops below a tolerance are accumulated into a tracked bound
  (`lost`) on the L2 distance to the exact state.

The factored form is what makes deeply nested compiled searches simulable:
their run-local registers stay unentangled (or nearly so) and the state never
materializes as one astronomically large vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPLIT_TOL = 1e-12  # singular values below this are cut when splitting factors
DROP_TOL = 1e-14  # terms with smaller norm are dropped (tracked)
MAX_MERGED_DIM = 1 << 22  # refuse to build factors larger than this
PIN_DIM = 1 << 12  # pin a wire to basis values rather than merge beyond this
PAIR_MERGE_DIM = 1 << 12  # max factor size built when recombining two terms
MAX_TERMS = 96  # hard cap on the term count (excess pruned, tracked)


class SimError(Exception):
    pass


def _fnorm(a: np.ndarray) -> float:
    """L2 norm without np.linalg.norm's dispatch overhead."""
    flat = a.ravel()
    return math.sqrt(abs(np.vdot(flat, flat).real))


class WireSpace:
    """Ordered wires with dimensions."""

    def __init__(self, items: list[tuple[str, int]]):
        self.names: tuple[str, ...] = tuple(n for n, _ in items)
        self.sizes: dict[str, int] = dict(items)
        if len(self.sizes) != len(self.names):
            raise SimError("duplicate wire name")
        self.dim = math.prod(self.sizes.values()) if items else 1

    def size(self, name: str) -> int:
        return self.sizes[name]

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    def basis_index(self, values: dict[str, int]) -> int:
        idx = 0
        for n in self.names:
            idx = idx * self.sizes[n] + values[n]
        return idx

    def shape(self) -> tuple[int, ...]:
        return tuple(self.sizes[n] for n in self.names)


# ---------------------------------------------------------------------------
# Dense backend
# ---------------------------------------------------------------------------

class DenseState:
    def __init__(self, space: WireSpace, tensor: np.ndarray | None = None, lost: float = 0.0):
        self.space = space
        if tensor is None:
            tensor = np.zeros(space.shape(), dtype=np.complex128)
            tensor[(0,) * len(space.names)] = 1.0
        self.tensor = tensor
        self.lost = lost

    @classmethod
    def basis(cls, space: WireSpace, values: dict[str, int]) -> "DenseState":
        t = np.zeros(space.shape(), dtype=np.complex128)
        t[tuple(values.get(n, 0) for n in space.names)] = 1.0
        return cls(space, t)

    def copy(self) -> "DenseState":
        return DenseState(self.space, self.tensor.copy(), self.lost)

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensor))

    def apply_matrix(self, matrix: np.ndarray, wires: tuple[str, ...]) -> None:
        axes = [self.space.index_of(w) for w in wires]
        sizes = [self.space.sizes[w] for w in wires]
        d = math.prod(sizes)
        t = np.moveaxis(self.tensor, axes, range(len(axes)))
        rest = t.shape[len(axes):]
        t = t.reshape(d, -1)
        t = matrix @ t
        t = t.reshape(*sizes, *rest)
        self.tensor = np.moveaxis(t, range(len(axes)), axes)

    def amplitude(self, values: dict[str, int]) -> complex:
        return complex(self.tensor[tuple(values[n] for n in self.space.names)])

    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def marginal(self, wires: tuple[str, ...]) -> dict[tuple[int, ...], float]:
        keep = [self.space.index_of(w) for w in wires]
        drop = tuple(i for i in range(len(self.space.names)) if i not in keep)
        probs = np.abs(self.tensor) ** 2
        if drop:
            probs = probs.sum(axis=drop)
        # axes of `probs` follow ascending original positions; permute to `wires` order
        sorted_keep = sorted(keep)
        probs = np.transpose(probs, axes=[sorted_keep.index(k) for k in keep])
        out: dict[tuple[int, ...], float] = {}
        it = np.nditer(probs, flags=["multi_index"])
        for p in it:
            v = float(p)
            if v > 0.0:
                out[it.multi_index] = v
        return out

    def inner(self, other: "DenseState") -> complex:
        return complex(np.vdot(self.tensor.reshape(-1), other.tensor.reshape(-1)))


# ---------------------------------------------------------------------------
# Factored backend
# ---------------------------------------------------------------------------

@dataclass
class Factor:
    wires: tuple[str, ...]
    tensor: np.ndarray  # shape = sizes of the wires, in order

    def copy(self) -> "Factor":
        return Factor(self.wires, self.tensor.copy())


@dataclass
class Term:
    coeff: complex
    factors: list[Factor]

    def copy(self) -> "Term":
        return Term(self.coeff, [f.copy() for f in self.factors])

    def norm(self) -> float:
        out = abs(self.coeff)
        for f in self.factors:
            out *= _fnorm(f.tensor)
        return out


class FactoredState:
    """Sum of tensor-product terms.

    Wires with no factor in a term are implicitly in |0>; that keeps factor
    lists short (touched wires only) in states with many idle registers.
    """

    def __init__(
        self,
        space: WireSpace,
        terms: list[Term],
        lost: float = 0.0,
        lossy_tol: float = 0.0,
    ):
        self.space = space
        self.terms = terms
        self.lost = lost
        self.lossy_tol = lossy_tol  # tracked truncation threshold for peeling

    @classmethod
    def basis(cls, space: WireSpace, values: dict[str, int]) -> "FactoredState":
        factors = []
        for n, v in values.items():
            if v != 0:
                t = np.zeros(space.sizes[n], dtype=np.complex128)
                t[v] = 1.0
                factors.append(Factor((n,), t))
        return cls(space, [Term(1.0 + 0.0j, factors)])

    def copy(self) -> "FactoredState":
        return FactoredState(
            self.space, [t.copy() for t in self.terms], self.lost, self.lossy_tol
        )

    def norm(self) -> float:
        g = 0.0
        for i, t1 in enumerate(self.terms):
            for j, t2 in enumerate(self.terms):
                if j < i:
                    continue
                v = _pair_inner(t1, t2, self.space.sizes)
                g += v.real if i == j else 2 * v.real
        return math.sqrt(max(g, 0.0))

    # -- operator application -------------------------------------------------

    def apply_matrix(self, matrix: np.ndarray, wires: tuple[str, ...]) -> None:
        worklist = list(self.terms)
        done: list[Term] = []
        while worklist:
            term = worklist.pop()
            pin = _pin_wire_needed(term, wires)
            if pin is not None:
                worklist.extend(self._pin(term, pin))
                continue
            fac = _merge_for(term, wires, self.space)
            _apply_in_factor(fac, matrix, wires)
            self._split_factor(term, fac)
            done.append(term)
        self.terms = done
        self._compact()

    def _pin(self, term: Term, wire: str) -> list[Term]:
        """Split a term over the basis values of one wire (exact)."""
        out: list[Term] = []
        for f in term.factors:
            if wire in f.wires:
                pos = f.wires.index(wire)
                dw = f.tensor.shape[pos]
                rest_wires = tuple(w for w in f.wires if w != wire)
                moved = np.moveaxis(f.tensor, pos, 0)
                for v in range(dw):
                    slice_t = moved[v]
                    if _fnorm(slice_t) <= DROP_TOL:
                        continue
                    child = term.copy()
                    child.factors = [g for g in child.factors if g.wires != f.wires]
                    if v != 0:  # v == 0 stays implicit
                        child.factors.append(Factor((wire,), _one_hot(dw, v)))
                    if rest_wires:
                        rest = Factor(rest_wires, slice_t.copy())
                        child.factors.append(rest)
                        self._split_factor(child, rest)
                    out.append(child)
                return out
        raise SimError(f"wire {wire!r} not found for pinning")

    def apply_or_embed(self, inputs: tuple[str, ...], output: str) -> None:
        """b ^= OR(inputs) as a rank-2 sum of product operators.

        U = I (x) X_b  +  (prod_j P0_j) (x) (I - X)_b, which keeps factors
        over many wires from merging.
        """
        new_terms: list[Term] = []
        for term in self.terms:
            t1 = term.copy()
            _apply_in_factor(_ensure_factor(t1, output, 2), _X2, (output,))
            new_terms.append(t1)
            t2 = term.copy()
            ok = True
            for f in list(t2.factors):
                for w in inputs:
                    if w in f.wires:
                        _apply_in_factor(f, _P0, (w,))
                if _fnorm(f.tensor) == 0.0:
                    ok = False
                    break
                if len(f.wires) > 1:
                    self._split_factor(t2, f)
            if ok:
                _apply_in_factor(_ensure_factor(t2, output, 2), _I_minus_X, (output,))
                new_terms.append(t2)
        self.terms = new_terms
        self._compact()

    def _split_factor(self, term: Term, fac: Factor) -> None:
        """Peel off rank-one wires from a factor, tracking truncation.

        Peeled wires that land exactly in |0> are removed from the factor
        list entirely (their phase is folded into the coefficient), restoring
        the implicit-zero representation.
        """
        tol = max(SPLIT_TOL, self.lossy_tol)
        changed = True
        while changed and len(fac.wires) > 1:
            changed = False
            for w in fac.wires:
                pos = fac.wires.index(w)
                dw = fac.tensor.shape[pos]
                m = np.moveaxis(fac.tensor, pos, 0).reshape(dw, -1)
                if min(m.shape) == 0:
                    continue
                try:
                    u, s, vh = np.linalg.svd(m, full_matrices=False)
                except np.linalg.LinAlgError:  # pragma: no cover
                    continue
                tail = float(np.linalg.norm(s[1:])) if len(s) > 1 else 0.0
                if tail <= tol:
                    if tail > 1e-12:
                        self.lost += abs(term.coeff) * tail * _other_norm(term, fac)
                    rest_wires = tuple(x for x in fac.wires if x != w)
                    rest_shape = tuple(self.space.sizes[x] for x in rest_wires)
                    col = u[:, 0]
                    if abs(abs(col[0]) - 1.0) <= 1e-14:
                        term.coeff *= col[0]  # exactly |0> up to phase: implicit
                    else:
                        term.factors.append(Factor((w,), col * 1.0))
                    fac.wires = rest_wires
                    fac.tensor = (s[0] * vh[0]).reshape(rest_shape)
                    changed = True
                    break
            if not fac.wires:
                break
        if not fac.wires:
            term.factors.remove(fac)
        elif len(fac.wires) == 1 and _is_zero_basis(fac.tensor):
            term.coeff *= fac.tensor[0]
            term.factors.remove(fac)

    def _compact(self) -> None:
        if len(self.terms) <= 1:
            return
        # drop negligible terms (tracked), then merge compatible terms
        kept: list[Term] = []
        for t in self.terms:
            n = t.norm()
            if n <= DROP_TOL:
                self.lost += n
            else:
                kept.append(t)
        self.terms = kept
        merged = True
        while merged:
            merged = False
            for i in range(len(self.terms)):
                for j in range(i + 1, len(self.terms)):
                    ok, fused = _try_merge(self.terms[i], self.terms[j])
                    if ok:
                        del self.terms[j]
                        if fused is not None:
                            self._split_factor(self.terms[i], fused)
                        merged = True
                        break
                if merged:
                    break
        if len(self.terms) > MAX_TERMS:
            self.prune_terms(MAX_TERMS)

    def prune_terms(self, max_terms: int) -> None:
        if len(self.terms) <= max_terms:
            return
        self.terms.sort(key=lambda t: -t.norm())
        for t in self.terms[max_terms:]:
            self.lost += t.norm()
        self.terms = self.terms[:max_terms]

    # -- read-out --------------------------------------------------------------

    def amplitude(self, values: dict[str, int]) -> complex:
        total = 0.0 + 0.0j
        for term in self.terms:
            a = term.coeff
            present = set()
            for f in term.factors:
                present.update(f.wires)
                a *= f.tensor[tuple(values[w] for w in f.wires)]
                if a == 0:
                    break
            if a != 0:
                for w, v in values.items():
                    if v != 0 and w not in present:
                        a = 0.0 + 0.0j  # implicit wires sit in |0>
                        break
            total += a
        return complex(total)

    def inner(self, other: "FactoredState") -> complex:
        """<self | other>."""
        total = 0.0 + 0.0j
        for ts in self.terms:
            for to in other.terms:
                total += _pair_inner(to, ts, self.space.sizes)  # = <ts | to>
        return complex(total)

    def marginal(self, wires: tuple[str, ...]) -> dict[tuple[int, ...], float]:
        shape = tuple(self.space.sizes[w] for w in wires)
        acc = np.zeros(shape, dtype=np.complex128)
        for i, t1 in enumerate(self.terms):
            for j, t2 in enumerate(self.terms):
                if j < i:
                    continue
                block = _pair_marginal(t1, t2, wires, self.space.sizes)
                acc += block if i == j else block + np.conj(block)
        probs = np.real(acc)
        out: dict[tuple[int, ...], float] = {}
        it = np.nditer(probs, flags=["multi_index"])
        for p in it:
            v = float(p)
            if v > 1e-18:
                out[it.multi_index] = v
        return out

    def vector(self) -> np.ndarray:
        if self.space.dim > MAX_MERGED_DIM:
            raise SimError("state too large to densify")
        out = np.zeros(self.space.shape(), dtype=np.complex128)
        for term in self.terms:
            cur_wires: tuple[str, ...] = ()
            cur = np.array(term.coeff, dtype=np.complex128)
            for f in term.factors:
                cur = np.multiply.outer(cur, f.tensor)
                cur_wires += f.wires
            for n in self.space.names:
                if n not in cur_wires:
                    cur = np.multiply.outer(cur, _one_hot(self.space.sizes[n], 0))
                    cur_wires += (n,)
            perm = [cur_wires.index(n) for n in self.space.names]
            out += np.transpose(cur, axes=perm)
        return out.reshape(-1)


_X2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_I_minus_X = np.array([[1, -1], [-1, 1]], dtype=np.complex128)


def _one_hot(size: int, v: int) -> np.ndarray:
    t = np.zeros(size, dtype=np.complex128)
    t[v] = 1.0
    return t


def _is_zero_basis(tensor: np.ndarray) -> bool:
    return (
        tensor.ndim == 1
        and abs(abs(tensor[0]) - 1.0) <= 1e-14
        and _fnorm(tensor[1:]) <= 1e-16
    )


def _ensure_factor(term: Term, wire: str, size: int) -> Factor:
    for f in term.factors:
        if wire in f.wires:
            return f
    f = Factor((wire,), _one_hot(size, 0))
    term.factors.append(f)
    return f


def _other_norm(term: Term, fac: Factor) -> float:
    out = 1.0
    for f in term.factors:
        if f is not fac:
            out *= _fnorm(f.tensor)
    return out


def _pin_wire_needed(term: Term, wires: tuple[str, ...]) -> str | None:
    """If merging the factors for `wires` would be too big, a wire to pin.

    Superposed search indices entangle with every run of a nested search and
    would chain all its registers into one factor; slicing such a wire into
    basis values (one term per value) keeps factors small and is exact.
    """
    wire_set = set(wires)
    touched = [f for f in term.factors if wire_set.intersection(f.wires)]
    dim = 1
    for f in touched:
        dim *= f.tensor.size
    if dim <= PIN_DIM:
        return None
    biggest = max(touched, key=lambda f: f.tensor.size)
    if len(biggest.wires) < 2:
        return None  # cannot shrink by pinning a single-wire factor
    sizes = {w: biggest.tensor.shape[biggest.wires.index(w)] for w in biggest.wires}
    return min(sorted(biggest.wires), key=lambda w: sizes[w])


def _merge_for(term: Term, wires: tuple[str, ...], space: WireSpace) -> Factor:
    wire_set = set(wires)
    touched = [f for f in term.factors if wire_set.intersection(f.wires)]
    covered = set()
    for f in touched:
        covered.update(f.wires)
    missing = [w for w in wires if w not in covered]
    for w in missing:  # implicit |0> wires materialize on demand
        touched.append(Factor((w,), _one_hot(space.sizes[w], 0)))
    if len(touched) == 1 and not missing:
        return touched[0]
    dim = 1
    for f in touched:
        dim *= f.tensor.size
    if dim > MAX_MERGED_DIM:
        raise SimError(f"operator would merge factors of dimension {dim}")
    wires_all: tuple[str, ...] = ()
    cur = np.array(1.0, dtype=np.complex128)
    for f in touched:
        cur = np.multiply.outer(cur, f.tensor)
        wires_all += f.wires
    merged = Factor(wires_all, cur)
    keep = [f for f in term.factors if not wire_set.intersection(f.wires)]
    term.factors = keep + [merged]
    return merged


def _apply_in_factor(fac: Factor, matrix: np.ndarray, wires: tuple[str, ...]) -> None:
    axes = [fac.wires.index(w) for w in wires]
    sizes = [fac.tensor.shape[a] for a in axes]
    d = math.prod(sizes)
    t = np.moveaxis(fac.tensor, axes, range(len(axes)))
    rest = t.shape[len(axes):]
    t = t.reshape(d, -1)
    t = matrix @ t
    t = t.reshape(*sizes, *rest)
    fac.tensor = np.moveaxis(t, range(len(axes)), axes)


def _try_merge(t1: Term, t2: Term) -> tuple[bool, Factor | None]:
    """Merge t2 into t1 if they differ in at most one factor group.

    Two terms over identical partitions that differ in one factor combine by
    summing that factor. Terms that differ in exactly two factors combine by
    first fusing those two groups into one (when small enough) in both terms.
    Returns (merged?, the combined factor if any).
    """
    if len(t1.factors) != len(t2.factors):
        return False, None
    by_wires = {f.wires: f for f in t2.factors}
    diff: list[tuple[Factor, Factor]] = []
    for f1 in t1.factors:
        f2 = by_wires.get(f1.wires)
        if f2 is None:
            return False, None
        if f1.tensor.shape != f2.tensor.shape or not np.array_equal(f1.tensor, f2.tensor):
            diff.append((f1, f2))
            if len(diff) > 2:
                return False, None
    if not diff:
        t1.coeff += t2.coeff
        return True, None
    if len(diff) == 2:
        (a1, a2), (b1, b2) = diff
        if a1.tensor.size * b1.tensor.size > PAIR_MERGE_DIM:
            return False, None
        fused1 = Factor(a1.wires + b1.wires, np.multiply.outer(a1.tensor, b1.tensor))
        fused2 = Factor(a2.wires + b2.wires, np.multiply.outer(a2.tensor, b2.tensor))
        t1.factors = [f for f in t1.factors if f is not a1 and f is not b1] + [fused1]
        diff = [(fused1, fused2)]
    f1, f2 = diff[0]
    f1.tensor = t1.coeff * f1.tensor + t2.coeff * f2.tensor
    t1.coeff = 1.0 + 0.0j
    return True, f1


def _component_groups(
    t1: Term, t2: Term, sizes: dict[str, int]
) -> list[tuple[list[Factor], list[Factor]]]:
    """Connected components of the overlap graph between two partitions.

    Wires explicit on one side only get an implicit |0> factor materialized
    on the other side, so both sides of a component cover the same wires.
    """
    groups: list[tuple[list[Factor], list[Factor]]] = []
    remaining1 = list(t1.factors)
    remaining2 = list(t2.factors)
    while remaining1 or remaining2:
        if remaining1:
            comp1 = [remaining1.pop(0)]
            comp2: list[Factor] = []
            wires = set(comp1[0].wires)
        else:
            comp2 = [remaining2.pop(0)]
            comp1 = []
            wires = set(comp2[0].wires)
        changed = True
        while changed:
            changed = False
            for f in list(remaining2):
                if wires & set(f.wires):
                    comp2.append(f)
                    remaining2.remove(f)
                    wires |= set(f.wires)
                    changed = True
            for f in list(remaining1):
                if wires & set(f.wires):
                    comp1.append(f)
                    remaining1.remove(f)
                    wires |= set(f.wires)
                    changed = True
        covered1 = {w for f in comp1 for w in f.wires}
        covered2 = {w for f in comp2 for w in f.wires}
        for w in sorted(wires - covered1):
            comp1.append(Factor((w,), _one_hot(sizes[w], 0)))
        for w in sorted(wires - covered2):
            comp2.append(Factor((w,), _one_hot(sizes[w], 0)))
        groups.append((comp1, comp2))
    return groups


def _dense_component(factors: list[Factor], order: tuple[str, ...]) -> np.ndarray:
    cur = np.array(1.0, dtype=np.complex128)
    wires: tuple[str, ...] = ()
    for f in factors:
        cur = np.multiply.outer(cur, f.tensor)
        wires += f.wires
    perm = [wires.index(w) for w in order]
    return np.transpose(cur, axes=perm)


def _pair_inner(t1: Term, t2: Term, sizes: dict[str, int] | None = None) -> complex:
    """<t2 | t1> over matching wire spaces (implicit wires contribute 1)."""
    total = t1.coeff * np.conj(t2.coeff)
    for comp1, comp2 in _component_groups(t1, t2, sizes or {}):
        order = tuple(w for f in comp1 for w in f.wires)
        a = _dense_component(comp1, order)
        b = _dense_component(comp2, order)
        total *= np.vdot(b.reshape(-1), a.reshape(-1))
        if total == 0:
            return 0.0 + 0.0j
    return complex(total)


def _term_inner(t1: Term, t2: Term) -> complex:
    return _pair_inner(t1, t2)


def _pair_marginal(
    t1: Term, t2: Term, wires: tuple[str, ...], sizes: dict[str, int]
) -> np.ndarray:
    """sum_aux <t2|pass,aux> conj -> array over the passed wires (t1 x t2*)."""
    out = np.array(t1.coeff * np.conj(t2.coeff), dtype=np.complex128)
    out_wires: tuple[str, ...] = ()
    for comp1, comp2 in _component_groups(t1, t2, sizes):
        order = tuple(w for f in comp1 for w in f.wires)
        a = _dense_component(comp1, order)
        b = _dense_component(comp2, order)
        keep = [i for i, w in enumerate(order) if w in wires]
        drop = [i for i, w in enumerate(order) if w not in wires]
        a2 = np.transpose(a, axes=keep + drop).reshape(
            int(np.prod([a.shape[i] for i in keep], initial=1)), -1
        )
        b2 = np.transpose(b, axes=keep + drop).reshape(a2.shape)
        block = np.einsum("ka,ka->k", a2, np.conj(b2))
        kept_wires = tuple(order[i] for i in keep)
        out = np.multiply.outer(out, block.reshape([a.shape[i] for i in keep]))
        out_wires += kept_wires
    for w in wires:
        if w not in out_wires:  # implicit in both terms: pinned at 0
            out = np.multiply.outer(out, _one_hot(sizes[w], 0).real.astype(np.complex128))
            out_wires += (w,)
    perm = [out_wires.index(w) for w in wires]
    return np.transpose(out, axes=perm) if out_wires else out


State = DenseState | FactoredState
