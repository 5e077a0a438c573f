"""Partially ordered universes, order intervals and sup/inf queries.

Concrete universes live next to their representations: finite posets in
:mod:`monotone_iter.finite`, componentwise-ordered vectors in
:mod:`monotone_iter.cone`. This module only fixes the contract the iteration
engine relies on.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Sequence

from .errors import AbsentSupremum, InvalidInterval

Element = Any


class IntersectionTracker(abc.ABC):
    """Running intersection of the intervals [x_0,y_0], [x_1,y_1], ..."""

    @abc.abstractmethod
    def add(self, lo: Element, hi: Element) -> None: ...

    @abc.abstractmethod
    def is_empty(self) -> bool: ...

    @abc.abstractmethod
    def singleton(self, tol: float = 0.0) -> Element | None:
        """The unique member of the intersection, or None if it is not a singleton."""

    @abc.abstractmethod
    def summary(self) -> dict: ...


class OrderedUniverse(abc.ABC):
    """A partial order (X, <=) with optional finite sup/inf queries.

    Implementations are immutable after construction; every method is pure.
    """

    is_finite: bool = False

    @abc.abstractmethod
    def leq(self, x: Element, y: Element) -> bool: ...

    @abc.abstractmethod
    def eq(self, x: Element, y: Element) -> bool: ...

    def leq_exact(self, x: Element, y: Element) -> bool:
        """The order without any equality tolerance (same as leq on exact backings)."""
        return self.leq(x, y)

    def lt(self, x: Element, y: Element) -> bool:
        return self.leq(x, y) and not self.eq(x, y)

    def sup_of(self, elements: Iterable[Element]) -> Element | None:
        """Least upper bound of a finite set, or None when it does not exist."""
        return None

    def inf_of(self, elements: Iterable[Element]) -> Element | None:
        return None

    def sup_inf_of_sequences(
        self, xs: Sequence[Element], ys: Sequence[Element]
    ) -> tuple[Element | None, Element | None]:
        """sup of the stored sequence xs and inf of ys, as the universe can certify."""
        return self.sup_of(xs), self.inf_of(ys)

    @abc.abstractmethod
    def running_intersection(self) -> IntersectionTracker: ...

    @abc.abstractmethod
    def key(self, x: Element) -> Hashable:
        """Hashable identity of an element (used for cycle detection)."""

    def elements(self) -> Sequence[Element]:
        raise NotImplementedError(f"{type(self).__name__} cannot enumerate its elements")


@dataclass(frozen=True)
class OrderInterval:
    """The order interval [lo, hi]; construction fails unless lo <= hi."""

    universe: OrderedUniverse
    lo: Element
    hi: Element

    def __post_init__(self):
        if not self.universe.leq(self.lo, self.hi):
            raise InvalidInterval(f"[{self.lo!r}, {self.hi!r}] is not a valid interval")

    def __contains__(self, z: Element) -> bool:
        return interval_contains(self.universe, self, z)

    def contains_interval(self, other: "OrderInterval") -> bool:
        u = self.universe
        return u.leq(self.lo, other.lo) and u.leq(other.hi, self.hi)


def interval_contains(universe: OrderedUniverse, interval: OrderInterval, z: Element) -> bool:
    return universe.leq(interval.lo, z) and universe.leq(z, interval.hi)


def intersect_interval_chain(
    universe: OrderedUniverse, intervals: Iterable[OrderInterval], probe: Element
) -> bool:
    """True iff probe belongs to every interval of the sequence."""
    return all(interval_contains(universe, iv, probe) for iv in intervals)


def sup_inf_of_trace(
    universe: OrderedUniverse,
    xs: Sequence[Element],
    ys: Sequence[Element],
    strict: bool = False,
) -> tuple[Element | None, Element | None]:
    """Return (sup xs, inf ys); None marks a value the universe cannot certify.

    With ``strict=True`` a missing value raises :class:`AbsentSupremum` instead.
    """
    sup, inf = universe.sup_inf_of_sequences(list(xs), list(ys))
    if strict and (sup is None or inf is None):
        which = "supremum" if sup is None else "infimum"
        raise AbsentSupremum(f"{which} of the stored trace cannot be certified")
    return sup, inf
