"""Bivariate operators, the symmetric composition and operator powers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InfiniteUniverseExhaustive, UniverseMismatch
from .order import Element, OrderedUniverse


class BivariateOperator:
    """A map A: X x X -> X bound to the universe X it acts on.

    Operators are treated as pure functions; mixed monotonicity is a contract
    that :func:`check_mixed_monotone` tests rather than assumes.
    """

    def __init__(self, apply: Callable[[Element, Element], Element],
                 universe: OrderedUniverse, label: str = "A"):
        self.apply = apply
        self.universe = universe
        self.label = label

    def __call__(self, x: Element, y: Element) -> Element:
        return self.apply(x, y)

    def __repr__(self):
        return f"{type(self).__name__}({self.label!r})"


def projection(universe: OrderedUniverse) -> BivariateOperator:
    """The canonical projection P(x, y) = x, identity of the s-composition."""
    return BivariateOperator(lambda x, y: x, universe, label="P_X")


def _same_universe(a: OrderedUniverse, b: OrderedUniverse) -> bool:
    return a is b or a == b


def s_compose(outer: BivariateOperator, inner: BivariateOperator) -> BivariateOperator:
    """Symmetric composition: (outer * inner)(x, y) = outer(inner(x, y), inner(y, x))."""
    if not _same_universe(outer.universe, inner.universe):
        raise UniverseMismatch(f"{outer.label} and {inner.label} act on different universes")

    def composed(x, y):
        return outer(inner(x, y), inner(y, x))

    return BivariateOperator(composed, inner.universe, label=f"({outer.label}*{inner.label})")


def power_apply(op: BivariateOperator, n: int, x: Element, y: Element) -> Element:
    """A^n(x, y), advancing the coupled pair so the cost is n applications of A.

    Unfolding A^n by repeated s-composition would evaluate A O(2^n) times.
    """
    if n < 0:
        raise ValueError("operator powers are defined for n >= 0")
    u, v = x, y
    for _ in range(n):
        u, v = op(u, v), op(v, u)
    return u


@dataclass(frozen=True)
class OperatorPower:
    base: BivariateOperator
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("operator powers are defined for n >= 0")

    def __call__(self, x: Element, y: Element) -> Element:
        return power_apply(self.base, self.n, x, y)

    def as_operator(self) -> BivariateOperator:
        return BivariateOperator(self, self.base.universe, label=f"{self.base.label}^{self.n}")


@dataclass
class MonotonicityVerdict:
    ok: bool
    checked: int
    strategy: str
    witness: tuple | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_mixed_monotone(op: BivariateOperator, strategy: str = "exhaustive",
                         samples: int = 1000, rng=None, sampler=None) -> MonotonicityVerdict:
    """Test x1 <= x2, y1 >= y2  =>  A(x1, y1) <= A(x2, y2).

    ``exhaustive`` needs a finite universe and checks monotonicity separately
    in each argument, which is equivalent by transitivity. ``sampled`` draws
    comparable quadruples by adding nonnegative increments to a base point;
    ``sampler(rng)`` supplies base points (default: ``universe.sample``).
    A failure carries a witness ``(x1, x2, y1, y2)``.
    """
    universe = op.universe
    if strategy == "exhaustive":
        if not universe.is_finite:
            raise InfiniteUniverseExhaustive(f"{universe!r} is not finite")
        return _exhaustive_mixed_monotone(op)
    if strategy != "sampled":
        raise ValueError(f"unknown strategy {strategy!r}")

    rng = np.random.default_rng(rng)
    sampler = sampler or universe.sample
    for i in range(samples):
        x1 = sampler(rng)
        y2 = sampler(rng)
        x2 = x1 + _increment(rng, x1)
        y1 = y2 + _increment(rng, y2)
        if not universe.leq(op(x1, y1), op(x2, y2)):
            return MonotonicityVerdict(False, i + 1, strategy, (x1, x2, y1, y2))
    return MonotonicityVerdict(True, samples, strategy)


def _increment(rng, like):
    shape = np.shape(like)
    step = rng.exponential(1.0, size=shape) * (rng.random(size=shape) < 0.8)
    return step if shape else float(step)


def _exhaustive_mixed_monotone(op: BivariateOperator) -> MonotonicityVerdict:
    universe = op.universe
    if getattr(op, "table", None) is not None and getattr(universe, "leq_matrix", None) is not None:
        return _exhaustive_table(np.asarray(op.table), universe.leq_matrix)
    elems = list(universe.elements())
    table = [[op(x, y) for y in elems] for x in elems]
    checked = 0
    # nondecreasing in the first argument, for every fixed second argument
    for j, y in enumerate(elems):
        for i1, x1 in enumerate(elems):
            for i2, x2 in enumerate(elems):
                if i1 != i2 and universe.leq(x1, x2):
                    checked += 1
                    if not universe.leq(table[i1][j], table[i2][j]):
                        return MonotonicityVerdict(False, checked, "exhaustive", (x1, x2, y, y))
    # nonincreasing in the second argument, for every fixed first argument
    for i, x in enumerate(elems):
        for j1, y1 in enumerate(elems):
            for j2, y2 in enumerate(elems):
                if j1 != j2 and universe.leq(y2, y1):
                    checked += 1
                    if not universe.leq(table[i][j1], table[i][j2]):
                        return MonotonicityVerdict(False, checked, "exhaustive", (x, x, y1, y2))
    return MonotonicityVerdict(True, checked, "exhaustive")


def _exhaustive_table(table: np.ndarray, leq: np.ndarray) -> MonotonicityVerdict:
    # Same scan order (and so the same first witness) as the generic loops.
    n = leq.shape[0]
    comparable = leq & ~np.eye(n, dtype=bool)
    # first argument: ok[j, i1, i2] = leq[T[i1, j], T[i2, j]]
    cols = table.T
    ok = leq[cols[:, :, None], cols[:, None, :]]
    bad = np.argwhere(comparable[None, :, :] & ~ok)
    checked = int(comparable.sum()) * n
    if len(bad):
        j, i1, i2 = (int(v) for v in bad[0])
        return MonotonicityVerdict(False, checked, "exhaustive", (i1, i2, j, j))
    # second argument: ok[i, j1, j2] = leq[T[i, j1], T[i, j2]] for y2 <= y1
    ok = leq[table[:, :, None], table[:, None, :]]
    bad = np.argwhere(comparable.T[None, :, :] & ~ok)
    checked *= 2
    if len(bad):
        i, j1, j2 = (int(v) for v in bad[0])
        return MonotonicityVerdict(False, checked, "exhaustive", (i, i, j1, j2))
    return MonotonicityVerdict(True, checked, "exhaustive")
