"""Finite posets given by a relation matrix, and table operators on them.

Elements of a :class:`FinitePoset` of size n are the integers 0..n-1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product as cartesian
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidPoset, ShapeError
from .operators import BivariateOperator, check_mixed_monotone
from .order import IntersectionTracker, OrderedUniverse, OrderInterval


@dataclass(frozen=True)
class PosetVerdict:
    ok: bool
    axiom: str | None = None
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def validate_poset(leq) -> PosetVerdict:
    """Check reflexivity, antisymmetry and transitivity of a relation matrix.

    Returns the first violated axiom with a witness pair or triple.
    """
    m = np.asarray(leq)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ShapeError(f"relation matrix must be square and non-empty, got shape {m.shape}")
    m = m.astype(bool)
    n = m.shape[0]
    diag = np.flatnonzero(~np.diag(m))
    if len(diag):
        a = int(diag[0])
        return PosetVerdict(False, "reflexivity", (a,))
    both = np.argwhere(m & m.T & ~np.eye(n, dtype=bool))
    if len(both):
        a, b = (int(v) for v in both[0])
        return PosetVerdict(False, "antisymmetry", (a, b))
    missing = np.argwhere((m.astype(np.int64) @ m.astype(np.int64) > 0) & ~m)
    if len(missing):
        a, c = (int(v) for v in missing[0])
        b = int(np.flatnonzero(m[a] & m[:, c])[0])
        return PosetVerdict(False, "transitivity", (a, b, c))
    return PosetVerdict(True)


class _MaskTracker(IntersectionTracker):
    def __init__(self, leq: np.ndarray):
        self._leq = leq
        self.mask = np.ones(leq.shape[0], dtype=bool)
        self.count = 0

    def add(self, lo, hi):
        self.mask &= self._leq[lo, :] & self._leq[:, hi]
        self.count += 1

    def is_empty(self):
        return not self.mask.any()

    def members(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.mask)]

    def singleton(self, tol=0.0):
        members = self.members()
        return members[0] if len(members) == 1 else None

    def summary(self):
        return {"members": self.members(), "intervals": self.count}


class FinitePoset(OrderedUniverse):
    """A partial order on {0, ..., n-1}; ``leq_matrix[i, j]`` iff i <= j.

    The axioms are checked at construction and the matrix is frozen.
    """

    is_finite = True

    def __init__(self, leq, labels: Sequence | None = None):
        verdict = validate_poset(leq)
        if not verdict:
            raise InvalidPoset(verdict)
        matrix = np.array(leq, dtype=bool)
        matrix.setflags(write=False)
        self.leq_matrix = matrix
        self.size = matrix.shape[0]
        self.labels = list(labels) if labels is not None else list(range(self.size))
        if len(self.labels) != self.size:
            raise ShapeError("one label per element is required")

    def __repr__(self):
        return f"FinitePoset(size={self.size})"

    def __eq__(self, other):
        return isinstance(other, FinitePoset) and np.array_equal(self.leq_matrix, other.leq_matrix)

    def __hash__(self):
        return hash(self.leq_matrix.tobytes())

    def leq(self, x, y):
        return bool(self.leq_matrix[x, y])

    def eq(self, x, y):
        return int(x) == int(y)

    def key(self, x):
        return int(x)

    def elements(self):
        return range(self.size)

    def interval(self, lo: int, hi: int) -> OrderInterval:
        return OrderInterval(self, lo, hi)

    def interval_members(self, lo: int, hi: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.leq_matrix[lo, :] & self.leq_matrix[:, hi])]

    def comparable_pairs(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in np.argwhere(self.leq_matrix)]

    def upper_bounds(self, elements: Iterable[int]) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        for s in elements:
            mask &= self.leq_matrix[s, :]
        return mask

    def lower_bounds(self, elements: Iterable[int]) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        for s in elements:
            mask &= self.leq_matrix[:, s]
        return mask

    def sup_of(self, elements):
        ub = np.flatnonzero(self.upper_bounds(elements))
        for u in ub:
            if self.leq_matrix[u, ub].all():
                return int(u)
        return None

    def inf_of(self, elements):
        lb = np.flatnonzero(self.lower_bounds(elements))
        for v in lb:
            if self.leq_matrix[lb, v].all():
                return int(v)
        return None

    def running_intersection(self):
        return _MaskTracker(self.leq_matrix)

    @cached_property
    def join_table(self) -> np.ndarray:
        """join_table[a, b] is sup{a, b}, or -1 where it does not exist."""
        return self._pairwise(self.sup_of)

    @cached_property
    def meet_table(self) -> np.ndarray:
        return self._pairwise(self.inf_of)

    def _pairwise(self, fn):
        out = np.full((self.size, self.size), -1, dtype=np.int64)
        for a in range(self.size):
            for b in range(a, self.size):
                v = fn((a, b))
                out[a, b] = out[b, a] = -1 if v is None else v
        out.setflags(write=False)
        return out

    @cached_property
    def is_lattice(self) -> bool:
        return bool((self.join_table >= 0).all() and (self.meet_table >= 0).all())

    def join(self, a: int, b: int) -> int:
        return int(self.join_table[a, b])

    def meet(self, a: int, b: int) -> int:
        return int(self.meet_table[a, b])

    @cached_property
    def bottom(self) -> int | None:
        return self.inf_of(range(self.size))

    @cached_property
    def top(self) -> int | None:
        return self.sup_of(range(self.size))

    @cached_property
    def linear_extension(self) -> list[int]:
        """Elements sorted so that a < b implies a comes first."""
        depth = self.leq_matrix.sum(axis=0)
        return [int(i) for i in np.argsort(depth, kind="stable")]

    def to_json(self) -> dict:
        return {"size": self.size, "leq": self.leq_matrix.astype(int).tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "FinitePoset":
        leq = np.asarray(data["leq"], dtype=bool)
        if leq.shape != (data["size"], data["size"]):
            raise ShapeError(f"declared size {data['size']} does not match matrix {leq.shape}")
        return cls(leq)


# -- constructors -------------------------------------------------------------

def chain(n: int) -> FinitePoset:
    return FinitePoset(np.triu(np.ones((n, n), dtype=bool)))


def product_poset(*factors: FinitePoset) -> FinitePoset:
    """Componentwise product order; elements are enumerated lexicographically."""
    tuples = list(cartesian(*(range(f.size) for f in factors)))
    leq = np.array([[all(f.leq_matrix[a[k], b[k]] for k, f in enumerate(factors))
                     for b in tuples] for a in tuples], dtype=bool)
    return FinitePoset(leq, labels=tuples)


def product_of_chains(lengths: Sequence[int]) -> FinitePoset:
    return product_poset(*(chain(k) for k in lengths))


def divisor_lattice(n: int) -> FinitePoset:
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    leq = np.array([[b % a == 0 for b in divisors] for a in divisors], dtype=bool)
    return FinitePoset(leq, labels=divisors)


def boolean_lattice(k: int) -> FinitePoset:
    sets = range(2 ** k)
    leq = np.array([[(a & b) == a for b in sets] for a in sets], dtype=bool)
    return FinitePoset(leq, labels=list(sets))


def moore_family_lattice(family: Iterable[int]) -> FinitePoset:
    """Subsets (as bitmasks) ordered by inclusion; a lattice when the family is
    closed under intersection and contains the ground set."""
    members = sorted(set(family), key=lambda s: (bin(s).count("1"), s))
    leq = np.array([[(a & b) == a for b in members] for a in members], dtype=bool)
    return FinitePoset(leq, labels=members)


def _permuted(poset: FinitePoset, perm: np.ndarray) -> FinitePoset:
    leq = poset.leq_matrix[np.ix_(perm, perm)]
    return FinitePoset(leq, labels=[poset.labels[i] for i in perm])


def _random_factorization(rng, size: int) -> list[int]:
    factors = []
    rest = size
    while rest > 1:
        divisors = [d for d in range(2, rest + 1) if rest % d == 0]
        d = int(rng.choice(divisors))
        factors.append(d)
        rest //= d
    return factors or [1]


def _random_moore_family(rng, size: int, attempts: int) -> list[int] | None:
    ground = int(rng.integers(max(1, math.ceil(math.log2(size))), size)) if size > 2 else 1
    full = (1 << ground) - 1
    family = {full}
    for _ in range(attempts):
        if len(family) == size:
            return sorted(family)
        r = int(rng.integers(0, full + 1))
        grown = family | {r & f for f in family}
        if len(grown) <= size:
            family = grown
    return sorted(family) if len(family) == size else None


def generate_random_lattice(seed, size: int, method: str = "auto") -> FinitePoset:
    """A random lattice with exactly ``size`` elements.

    ``closure`` draws an intersection-closed family of subsets (every finite
    lattice arises this way, distributive or not); ``chains`` takes a product of
    chains over a random factorization of ``size``. The elements are randomly
    relabelled so callers cannot rely on index order.
    """
    if not 2 <= size <= 64:
        raise ValueError("size must lie in [2, 64]")
    rng = np.random.default_rng(seed)
    if method == "auto":
        method = "closure" if rng.random() < 0.7 else "chains"
    lattice = None
    if method == "closure":
        family = _random_moore_family(rng, size, attempts=50 * size)
        if family is not None:
            lattice = moore_family_lattice(family)
    elif method != "chains":
        raise ValueError(f"unknown method {method!r}")
    if lattice is None:
        lattice = product_of_chains(_random_factorization(rng, size))
    return _permuted(lattice, rng.permutation(size))


def generate_random_poset(seed, size: int, density: float = 0.3) -> FinitePoset:
    """A random poset (not necessarily a lattice): transitive closure of a random DAG."""
    rng = np.random.default_rng(seed)
    rel = np.triu(rng.random((size, size)) < density, k=1) | np.eye(size, dtype=bool)
    for k in range(size):
        rel |= rel[:, k:k + 1] & rel[k:k + 1, :]
    perm = rng.permutation(size)
    return FinitePoset(rel[np.ix_(perm, perm)])


# -- table operators ----------------------------------------------------------

class TableOperator(BivariateOperator):
    """A(x, y) = table[x, y] on a finite poset."""

    def __init__(self, poset: FinitePoset, table, label: str = "T"):
        t = np.array(table, dtype=np.int64)
        if t.shape != (poset.size, poset.size):
            raise ShapeError(f"table must have shape {(poset.size, poset.size)}, got {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= poset.size):
            raise ShapeError("table entries must be element indices")
        t.setflags(write=False)
        self.table = t
        super().__init__(self._lookup, poset, label)

    def _lookup(self, x, y):
        return int(self.table[x, y])

    @classmethod
    def from_operator(cls, op: BivariateOperator) -> "TableOperator":
        poset = op.universe
        table = [[op(x, y) for y in range(poset.size)] for x in range(poset.size)]
        return cls(poset, table, label=op.label)

    def to_json(self) -> list[list[int]]:
        return self.table.tolist()


def _random_monotone_map(rng, poset: FinitePoset, increasing: bool) -> list[int]:
    # Walk a linear extension; each image is combined with the images of all
    # elements below, which forces the required monotonicity in a lattice.
    combine = poset.join if increasing else poset.meet
    anchor = poset.bottom if increasing else poset.top
    image = [0] * poset.size
    for x in poset.linear_extension:
        r = anchor if rng.random() < 0.3 else int(rng.integers(poset.size))
        for z in np.flatnonzero(poset.leq_matrix[:, x]):
            if z != x:
                r = combine(r, image[z])
        image[x] = r
    return image


def mixed_monotone_from_maps(poset: FinitePoset, f: Sequence[int], g: Sequence[int],
                             form: str = "join") -> TableOperator:
    """A(x, y) = f(x) v g(y) (``join``) or f(x) ^ g(y) (``meet``)."""
    combine = {"join": poset.join_table, "meet": poset.meet_table}[form]
    f = np.asarray(f)
    g = np.asarray(g)
    return TableOperator(poset, combine[f[:, None], g[None, :]], label=f"{form}(f,g)")


def generate_random_mixed_monotone(seed, poset: FinitePoset) -> TableOperator:
    """Random mixed monotone table on a lattice, re-verified exhaustively."""
    if not poset.is_lattice:
        raise ValueError("random mixed monotone operators are generated on lattices")
    rng = np.random.default_rng(seed)
    f = _random_monotone_map(rng, poset, increasing=True)
    g = _random_monotone_map(rng, poset, increasing=False)
    op = mixed_monotone_from_maps(poset, f, g, form="join" if rng.random() < 0.5 else "meet")
    verdict = check_mixed_monotone(op)
    if not verdict:
        raise AssertionError(f"generator produced a non mixed monotone table: {verdict.witness}")
    return op


def generate_general_mixed_monotone(seed, poset: FinitePoset) -> TableOperator:
    """Random mixed monotone table without the f(x) v g(y) structure.

    A mixed monotone table is an order-preserving map on X x X^op. Pairs are
    visited along a linear extension of that product and each entry is a
    random element joined with every entry already fixed below it, so every
    mixed monotone table has positive probability.
    """
    if not poset.is_lattice:
        raise ValueError("random mixed monotone operators are generated on lattices")
    rng = np.random.default_rng(seed)
    n = poset.size
    rank = np.empty(n, dtype=np.int64)
    rank[poset.linear_extension] = np.arange(n)
    leq = poset.leq_matrix
    table = np.full((n, n), -1, dtype=np.int64)
    for x, y in sorted(((x, y) for x in range(n) for y in range(n)),
                       key=lambda p: rank[p[0]] + (n - 1 - rank[p[1]])):
        r = poset.bottom if rng.random() < 0.3 else int(rng.integers(n))
        for xb in np.flatnonzero(leq[:, x]):
            for yb in np.flatnonzero(leq[y, :]):
                if table[xb, yb] >= 0:
                    r = poset.join(r, int(table[xb, yb]))
        table[x, y] = r
    op = TableOperator(poset, table, label="general")
    verdict = check_mixed_monotone(op)
    if not verdict:
        raise AssertionError(f"generator produced a non mixed monotone table: {verdict.witness}")
    return op


def random_comparable_pair(rng, poset: FinitePoset) -> tuple[int, int]:
    pairs = poset.comparable_pairs()
    x0, y0 = pairs[int(rng.integers(len(pairs)))]
    return x0, y0


def enumerate_coupled_fixed_points(op: BivariateOperator, box: OrderInterval | None = None
                                   ) -> set[tuple[int, int]]:
    """All (x, y) in box x box (or X x X) with A(x, y) = x and A(y, x) = y."""
    poset = op.universe
    table = op.table if isinstance(op, TableOperator) else TableOperator.from_operator(op).table
    if box is None:
        members = np.arange(poset.size)
    else:
        members = np.asarray(poset.interval_members(box.lo, box.hi), dtype=np.int64)
    sub = table[np.ix_(members, members)]
    hits = (sub == members[:, None]) & (sub.T == members[None, :])
    return {(int(members[i]), int(members[j])) for i, j in np.argwhere(hits)}
