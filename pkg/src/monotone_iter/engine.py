"""The coupled monotone iteration x_{n+1} = A(x_n, y_n), y_{n+1} = A(y_n, x_n).

:func:`run` records a :class:`CoupledTrace` and :func:`classify` turns the
recorded evidence into an :class:`AttractionVerdict`. Verdicts never go beyond
what the trace certifies: a point that attracts the iteration is reported as
a fixed point only after A(x*, x*) has been evaluated.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from .errors import MonotonicityViolation, NondeterministicOperator, PreconditionOrder
from .operators import BivariateOperator
from .order import Element, IntersectionTracker, OrderedUniverse


@dataclass(frozen=True)
class StopPolicy:
    """When to stop iterating.

    ``early_stop=False`` turns the run into a fixed horizon of ``max_steps``:
    only exact terminal events (fixed point reached, certified empty
    intersection, a repeated pair on a finite universe) end it sooner.
    ``min_steps`` defers the numeric early stops until that many steps exist.
    """

    max_steps: int = 10_000
    gap_tolerance: float = 1e-12
    stagnation_window: int = 10
    early_stop: bool = True
    fixed_point_tolerance: float = 1e-9
    store_cap: int = 100_000
    spot_check: bool = False
    min_steps: int = 0


class VerdictKind(str, enum.Enum):
    WEAKLY_ORDER_ATTRACTIVE = "WeaklyOrderAttractive"
    ORDER_ATTRACTIVE = "OrderAttractive"
    NO_COUPLED_FIXED_POINT_IN_BOX = "NoCoupledFixedPointInBox"
    FIXED_POINT_REACHED = "FixedPointReached"
    UNDECIDED = "Undecided"


@dataclass
class AttractionVerdict:
    kind: VerdictKind
    x_star: Element | None = None
    fixed_point_confirmed: bool = False
    certificate: dict = field(default_factory=dict)

    @property
    def weakly_attractive(self) -> bool:
        return self.kind in (VerdictKind.WEAKLY_ORDER_ATTRACTIVE, VerdictKind.ORDER_ATTRACTIVE,
                             VerdictKind.FIXED_POINT_REACHED)

    @property
    def order_attractive(self) -> bool:
        # reaching x_k = y_k = x* with A(x*, x*) = x* makes both sequences
        # eventually constant, so sup and inf exist and equal x*
        return self.kind in (VerdictKind.ORDER_ATTRACTIVE, VerdictKind.FIXED_POINT_REACHED)


@dataclass
class CoupledTrace:
    xs: deque
    ys: deque
    lu_onset: int | None = None
    equal_at: int | None = None
    empty_intersection_at: int | None = None
    stop_reason: str = ""
    cycle: tuple[int, int] | None = None
    intersection: IntersectionTracker | None = None
    verdict: AttractionVerdict | None = None
    universe: OrderedUniverse | None = None
    offset: int = 0

    @property
    def horizon(self) -> int:
        """Index of the last recorded iterate."""
        return self.offset + len(self.xs) - 1

    @property
    def steps(self):
        for i, (x, y) in enumerate(zip(self.xs, self.ys)):
            yield self.offset + i, x, y

    def x(self, n: int) -> Element:
        return self.xs[n - self.offset]

    def y(self, n: int) -> Element:
        return self.ys[n - self.offset]

    @property
    def start(self) -> tuple[Element, Element]:
        if self.offset:
            raise IndexError("the start pair has been dropped from the stored window")
        return self.xs[0], self.ys[0]


def _step(op: BivariateOperator, x, y, spot_check: bool):
    x1, y1 = op(x, y), op(y, x)
    if spot_check:
        u = op.universe
        if not (u.eq(op(x, y), x1) and u.eq(op(y, x), y1)):
            raise NondeterministicOperator(f"{op.label} returned different values for equal inputs")
    return x1, y1


def _lu_step(leq, x, y, x1, y1) -> bool:
    return leq(x, x1) and leq(y1, y)


def run(op: BivariateOperator, x0: Element, y0: Element,
        policy: StopPolicy = StopPolicy()) -> CoupledTrace:
    """Run the coupled iteration from x0 <= y0 and classify the result."""
    universe = op.universe
    if not universe.leq(x0, y0):
        raise PreconditionOrder(f"start pair is not ordered: {x0!r} is not <= {y0!r}")

    tracker = universe.running_intersection()
    tracker.add(x0, y0)
    trace = CoupledTrace(deque([x0], maxlen=policy.store_cap), deque([y0], maxlen=policy.store_cap),
                         intersection=tracker, universe=universe)
    seen = {(universe.key(x0), universe.key(y0)): 0} if universe.is_finite else None
    still = 0
    x, y = x0, y0
    n = 0
    while True:
        if tracker.is_empty():
            trace.empty_intersection_at = n
            trace.stop_reason = "empty"
            break
        if universe.eq(x, y):
            if trace.equal_at is None:
                trace.equal_at = n
            if universe.eq(op(x, x), x):
                # every later pair is (x, x), so the brackets are monotone from here
                if trace.lu_onset is None:
                    trace.lu_onset = n
                trace.stop_reason = "fixed"
                break
        if policy.early_stop and not universe.is_finite and n >= policy.min_steps:
            if tracker.singleton(policy.gap_tolerance) is not None:
                trace.stop_reason = "gap"
                break
            if still >= policy.stagnation_window:
                trace.stop_reason = "stagnation"
                break
        if n >= policy.max_steps:
            trace.stop_reason = "max_steps"
            break

        x1, y1 = _step(op, x, y, policy.spot_check)
        if not universe.leq(x1, y1):
            raise MonotonicityViolation(
                f"step {n + 1}: x_n <= y_n fails, so {op.label} is not mixed monotone here")
        if trace.lu_onset is None:
            if _lu_step(universe.leq_exact, x, y, x1, y1):
                trace.lu_onset = n
        elif not _lu_step(universe.leq, x, y, x1, y1):
            raise MonotonicityViolation(
                f"step {n}: monotone brackets from step {trace.lu_onset} do not persist")

        if seen is not None:
            pair = (universe.key(x1), universe.key(y1))
            if pair in seen:
                trace.cycle = (seen[pair], n + 1)
                trace.stop_reason = "cycle"
                break
            seen[pair] = n + 1

        moved = not (universe.eq(x, x1) and universe.eq(y, y1))
        still = 0 if moved else still + 1
        x, y = x1, y1
        n += 1
        trace.xs.append(x)
        trace.ys.append(y)
        tracker.add(x, y)

    trace.offset = n + 1 - len(trace.xs)
    trace.verdict = classify(trace, universe, op, policy)
    return trace


def is_coupled_fixed_point(op: BivariateOperator, x: Element, y: Element) -> bool:
    u = op.universe
    return u.eq(op(x, y), x) and u.eq(op(y, x), y)


def is_coupled_lu_fixed_point(op: BivariateOperator, x: Element, y: Element) -> bool:
    """x <= y, x <= A(x, y) and A(y, x) <= y."""
    u = op.universe
    return u.leq(x, y) and u.leq(x, op(x, y)) and u.leq(op(y, x), y)


def _fixed(universe: OrderedUniverse, op: BivariateOperator, z, tol: float) -> tuple[bool, Any]:
    image = op(z, z)
    if universe.is_finite:
        return universe.eq(image, z), None
    residual = universe.distance(image, z)
    return residual <= tol, residual


def classify(trace: CoupledTrace, universe: OrderedUniverse, op: BivariateOperator,
             policy: StopPolicy = StopPolicy()) -> AttractionVerdict:
    """Turn a recorded trace into an attraction verdict.

    On finite universes the intersection of all [x_n, y_n] is exact once the
    run has ended on a cycle, a fixed point or an empty intersection. On
    numeric universes the intersection is a coordinate box which counts as the
    single point x* once its width is below ``policy.gap_tolerance``.
    """
    tracker = trace.intersection
    cert: dict = {"horizon": trace.horizon, "stop_reason": trace.stop_reason,
                  "intersection": tracker.summary()}
    if tracker.is_empty():
        return AttractionVerdict(VerdictKind.NO_COUPLED_FIXED_POINT_IN_BOX, certificate=cert)

    if universe.is_finite:
        if trace.stop_reason not in ("cycle", "fixed"):
            cert["reason"] = "horizon ended before the pair sequence repeated"
            return AttractionVerdict(VerdictKind.UNDECIDED, certificate=cert)
        z = tracker.singleton()
    else:
        z = tracker.singleton(policy.gap_tolerance)
    if z is None:
        cert["reason"] = "intersection is not a single point"
        return AttractionVerdict(VerdictKind.UNDECIDED, certificate=cert)

    sup, inf = universe.sup_inf_of_sequences(list(trace.xs), list(trace.ys))
    cert["sup_x"], cert["inf_y"] = sup, inf
    if universe.is_finite:
        order = sup is not None and inf is not None and universe.eq(sup, z) and universe.eq(inf, z)
    else:
        # bounded sequences in R^n have componentwise sup/inf, which the
        # collapsed box pins down to x*
        order = True
    fixed, residual = _fixed(universe, op, z, policy.fixed_point_tolerance)
    cert["residual"] = residual
    if fixed and trace.stop_reason == "fixed":
        kind = VerdictKind.FIXED_POINT_REACHED
    elif order:
        kind = VerdictKind.ORDER_ATTRACTIVE
    else:
        kind = VerdictKind.WEAKLY_ORDER_ATTRACTIVE
    return AttractionVerdict(kind, z, fixed, cert)


def detect_lu_onset(trace: CoupledTrace) -> int | None:
    """Least stored k with x_k <= x_{k+1} and y_{k+1} <= y_k.

    The onset is declared on the exact order; afterwards the brackets must
    stay monotone (up to the universe tolerance) for every later stored step,
    otherwise the operator cannot be mixed monotone and
    :class:`MonotonicityViolation` is raised.
    """
    universe = trace.universe
    steps = list(trace.steps)
    onset = None
    for (n, x, y), (_, x1, y1) in zip(steps, steps[1:]):
        if onset is None:
            if _lu_step(universe.leq_exact, x, y, x1, y1):
                onset = n
        elif not _lu_step(universe.leq, x, y, x1, y1):
            raise MonotonicityViolation(f"monotone brackets from step {onset} break at step {n}")
    return onset


@dataclass
class SandwichResult:
    ok: bool
    violation_at: int | None = None
    clause: str | None = None

    def __bool__(self):
        return self.ok


def sandwich_check(op: BivariateOperator, outer: CoupledTrace, u0: Element, v0: Element,
                   x_star: Element | None = None) -> SandwichResult:
    """Run the inner iteration from (u0, v0) and check x_n <= u_n, v_n <= y_n.

    With a confirmed fixed point ``x_star`` also check u_n <= x* <= v_n.
    """
    universe = op.universe
    x0, y0 = outer.start
    if not (universe.leq(x0, u0) and universe.leq(u0, y0)
            and universe.leq(x0, v0) and universe.leq(v0, y0)):
        raise PreconditionOrder("u0 and v0 must lie in [x0, y0]")
    if x_star is not None and not (universe.leq(u0, x_star) and universe.leq(x_star, v0)):
        raise PreconditionOrder("x* must lie between u0 and v0")
    u, v = u0, v0
    for n, x, y in outer.steps:
        if n:
            u, v = op(u, v), op(v, u)
        if not universe.leq(x, u):
            return SandwichResult(False, n, "x_n <= u_n")
        if not universe.leq(v, y):
            return SandwichResult(False, n, "v_n <= y_n")
        if x_star is not None and not (universe.leq(u, x_star) and universe.leq(x_star, v)):
            return SandwichResult(False, n, "u_n <= x* <= v_n")
    return SandwichResult(True)
