"""Componentwise-ordered R^n, the nonnegative cone, and the cone fixed point solver.

The solver handles mixed monotone operators A on a part P of R^n_+ that
satisfy A(l*x, y) >= phi(l) * A(x, l*y) for linearly dependent x, y in P,
with phi(l) > l on (0, 1). It builds a coupled lower-upper start pair from a
single element u, iterates, and carries the certificate sequence
l_{n+1} = phi(l_n) with x_n >= l_n * y_n at every step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .errors import (CertificateViolation, DimensionMismatch, InvalidPhi, MonotonicityViolation,
                     NonConvergence, NotLinked, Underflow, ZeroElement)
from .operators import BivariateOperator
from .order import IntersectionTracker, OrderedUniverse

EPS_EQ = 1e-12


class _BoxTracker(IntersectionTracker):
    """Intersection of coordinate boxes [lo, hi], with last-change bookkeeping."""

    def __init__(self, eps: float):
        self.eps = eps
        self.lo = None
        self.hi = None
        self.scalar = False
        self.count = 0
        self.lo_changed = 0
        self.hi_changed = 0

    def add(self, lo, hi):
        lo_arr = np.asarray(lo, dtype=float)
        hi_arr = np.asarray(hi, dtype=float)
        if self.lo is None:
            self.scalar = lo_arr.ndim == 0
            self.lo, self.hi = lo_arr.copy(), hi_arr.copy()
        else:
            new_lo = np.maximum(self.lo, lo_arr)
            new_hi = np.minimum(self.hi, hi_arr)
            if not np.array_equal(new_lo, self.lo):
                self.lo_changed = self.count
            if not np.array_equal(new_hi, self.hi):
                self.hi_changed = self.count
            self.lo, self.hi = new_lo, new_hi
        self.count += 1

    def width(self) -> float:
        return float(np.max(self.hi - self.lo))

    def is_empty(self):
        return bool(np.any(self.lo > self.hi + self.eps))

    def singleton(self, tol=0.0):
        if self.lo is None or self.is_empty() or self.width() > tol:
            return None
        # report the bound that stopped moving first; ties go to the lower one
        point = self.hi if self.hi_changed < self.lo_changed else self.lo
        return float(point) if self.scalar else point.copy()

    def summary(self):
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist(), "width": self.width()}


class ComponentwiseUniverse(OrderedUniverse):
    """R^dim with the order x <= y iff y - x lies in the nonnegative cone.

    Equality and order use an absolute slack ``eps_eq`` on the max-norm. For
    ``dim == 1`` plain Python floats are accepted as elements.
    """

    def __init__(self, dim: int, eps_eq: float = EPS_EQ, nonnegative: bool = False,
                 grid: Sequence[float] | None = None, sup_tolerance: float = 1e-12):
        if dim < 1:
            raise ValueError("dimension must be at least 1")
        self.dim = dim
        self.eps_eq = eps_eq
        self.nonnegative = nonnegative
        self.grid = None if grid is None else np.asarray(grid, dtype=float)
        self.sup_tolerance = sup_tolerance

    def __repr__(self):
        cone = "R+" if self.nonnegative else "R"
        return f"ComponentwiseUniverse({cone}^{self.dim})"

    def __eq__(self, other):
        return (isinstance(other, ComponentwiseUniverse) and self.dim == other.dim
                and self.nonnegative == other.nonnegative and self.eps_eq == other.eps_eq)

    def __hash__(self):
        return hash((self.dim, self.nonnegative, self.eps_eq))

    def _pair(self, x, y):
        a = np.atleast_1d(np.asarray(x, dtype=float))
        b = np.atleast_1d(np.asarray(y, dtype=float))
        if a.shape != b.shape or a.shape != (self.dim,):
            raise DimensionMismatch(f"expected dimension {self.dim}, got {a.shape} and {b.shape}")
        return a, b

    def leq(self, x, y):
        a, b = self._pair(x, y)
        return bool(np.all(a <= b + self.eps_eq))

    def leq_exact(self, x, y):
        a, b = self._pair(x, y)
        return bool(np.all(a <= b))

    def eq(self, x, y):
        return self.distance(x, y) <= self.eps_eq

    def distance(self, x, y) -> float:
        a, b = self._pair(x, y)
        return float(np.max(np.abs(a - b)))

    def key(self, x):
        return tuple(np.atleast_1d(np.asarray(x, dtype=float)).tolist())

    def contains(self, x) -> bool:
        """Membership in the nonnegative cone."""
        return bool(np.all(np.asarray(x) >= 0))

    def sup_of(self, elements):
        items = [np.asarray(e, dtype=float) for e in elements]
        return np.max(items, axis=0) if items else None

    def inf_of(self, elements):
        items = [np.asarray(e, dtype=float) for e in elements]
        return np.min(items, axis=0) if items else None

    def sup_inf_of_sequences(self, xs, ys):
        """sup of the sequence xs and inf of ys, from a stored prefix.

        When the prefix squeezes max(xs) and min(ys) together within
        ``sup_tolerance`` the common value is returned for both. Otherwise
        only exact cases are answered: a nonincreasing xs has sup xs[0] and a
        nondecreasing ys has inf ys[0].
        """
        box = _BoxTracker(self.eps_eq)
        for x, y in zip(xs, ys):
            box.add(x, y)
        point = box.singleton(self.sup_tolerance)
        if point is not None:
            return point, point
        sup = xs[0] if all(self.leq(b, a) for a, b in zip(xs, xs[1:])) else None
        inf = ys[0] if all(self.leq(a, b) for a, b in zip(ys, ys[1:])) else None
        return sup, inf

    def running_intersection(self):
        return _BoxTracker(self.eps_eq)

    def sample(self, rng):
        if self.nonnegative:
            v = rng.lognormal(0.0, 1.0, size=self.dim)
        else:
            v = rng.normal(0.0, 3.0, size=self.dim)
        return float(v[0]) if self.dim == 1 else v


def grid_function_cone(samples: int) -> ComponentwiseUniverse:
    """Nonnegative functions on an equispaced grid of [0, 1], as vectors in R^samples_+."""
    if samples < 1:
        raise ValueError("at least one grid point is required")
    grid = np.linspace(0.0, 1.0, samples) if samples > 1 else np.array([0.0])
    return ComponentwiseUniverse(samples, nonnegative=True, grid=grid)


def cone_vector(coords) -> np.ndarray:
    v = np.atleast_1d(np.asarray(coords, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatch("cone vectors are one-dimensional")
    if np.any(v < 0):
        raise ValueError(f"{v} is not in the nonnegative cone")
    return v


def cone_leq(x, y, eps: float = EPS_EQ) -> bool:
    a = np.atleast_1d(np.asarray(x, dtype=float))
    b = np.atleast_1d(np.asarray(y, dtype=float))
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return bool(np.all(a <= b + eps))


@dataclass(frozen=True)
class PartCertificate:
    support: frozenset
    lambda_max: float


def linked(x, y) -> PartCertificate | None:
    """Largest l with l*x <= y and l*y <= x, when x and y lie in the same part."""
    a = cone_vector(x)
    b = cone_vector(y)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    if not a.any() or not b.any():
        raise ZeroElement("the zero vector is not linked to anything")
    support = a > 0
    if not np.array_equal(support, b > 0):
        return None
    ratios = np.concatenate([a[support] / b[support], b[support] / a[support]])
    lam = float(min(1.0, ratios.min()))
    return PartCertificate(frozenset(int(i) for i in np.flatnonzero(support)), lam)


DEFAULT_LAMBDAS = tuple(round(0.05 * k, 2) for k in range(1, 20))


@dataclass(frozen=True)
class PhiSpec:
    """The comparison function phi: (0, 1) -> (0, 1] with phi(l) > l.

    The hypotheses are checked on ``grid`` at construction. Super-multiplicativity
    phi(l) phi(m) <= phi(l m) is only checked when declared, on a 20 x 20 grid.
    """

    phi: Callable[[float], float]
    declared_supermultiplicative: bool = False
    grid: tuple = DEFAULT_LAMBDAS

    def __post_init__(self):
        for lam in self.grid:
            val = self.phi(lam)
            if not lam < val <= 1.0:
                raise InvalidPhi(f"phi({lam}) = {val} violates {lam} < phi <= 1")
        if self.declared_supermultiplicative:
            pts = np.linspace(0.025, 0.975, 20)
            for lam in pts:
                for mu in pts:
                    lhs = self.phi(lam) * self.phi(mu)
                    rhs = self.phi(lam * mu)
                    if lhs > rhs * (1 + 1e-12):
                        raise InvalidPhi(f"phi({lam})phi({mu}) = {lhs} > phi({lam * mu}) = {rhs}")

    def __call__(self, lam: float) -> float:
        return self.phi(lam)


def power_phi(exponent: float) -> PhiSpec:
    """phi(l) = l**exponent, which is multiplicative; needs 0 <= exponent < 1."""
    return PhiSpec(lambda lam: lam ** exponent, declared_supermultiplicative=True)


@dataclass
class PhiVerdict:
    ok: bool
    checked: int
    witness: dict | None = None

    def __bool__(self):
        return self.ok


def phi_condition_check(op: BivariateOperator, phi: PhiSpec, part_sample, lambdas=DEFAULT_LAMBDAS,
                        scales=None, ratios=None, rtol: float = 1e-12) -> PhiVerdict:
    """Check A(l*x, y) >= phi(l) * A(x, l*y) on linearly dependent pairs y = c*x.

    x runs over scaled copies s*part_sample; s and c run over log-grids.
    Pairs that are not linearly dependent are out of scope of the hypothesis
    and are never tested.
    """
    base = cone_vector(part_sample)
    scales = np.logspace(-2, 2, 9) if scales is None else scales
    ratios = np.logspace(-3, 3, 13) if ratios is None else ratios
    checked = 0
    for s in scales:
        x = s * base
        for c in ratios:
            y = c * x
            for lam in lambdas:
                lhs = np.atleast_1d(op(lam * x, y))
                rhs = phi(lam) * np.atleast_1d(op(x, lam * y))
                checked += 1
                if np.any(lhs < rhs - rtol * np.maximum(1.0, np.abs(rhs))):
                    return PhiVerdict(False, checked, {"lambda": float(lam), "x": x.tolist(),
                                                       "y": y.tolist(), "lhs": lhs.tolist(),
                                                       "rhs": rhs.tolist()})
    return PhiVerdict(True, checked)


def closure_check(op: BivariateOperator, u, samples: int = 1000, rng=None,
                  spread: float = 2.0) -> PhiVerdict:
    """Sampled check that A(x, y) stays in the part of u when x and y do.

    x and y are drawn as u scaled coordinatewise by exp(N(0, spread^2)),
    which covers the part of u but nothing outside it.
    """
    u = cone_vector(u)
    rng = np.random.default_rng(rng)
    support = u > 0
    for i in range(samples):
        x, y = (u * np.exp(rng.normal(0.0, spread, size=u.size)) * support for _ in range(2))
        image = np.atleast_1d(op(x, y))
        if not np.all(np.isfinite(image)) or np.any(image < 0) or linked(u, image) is None:
            return PhiVerdict(False, i + 1, {"x": x.tolist(), "y": y.tolist(), "image": image.tolist()})
    return PhiVerdict(True, samples)


@dataclass
class LowerUpperPair:
    x0: np.ndarray
    y0: np.ndarray
    lambda0: float
    k0: int
    n0: int


_LOG_FLOOR = math.log(1e-300)


def _ceil_with_slack(q: float) -> int:
    # q is a ratio of logarithms; absorb rounding when it is an integer in exact arithmetic
    return max(0, math.ceil(q - 1e-9))


def construct_lu_pair(op: BivariateOperator, phi: PhiSpec, u, targets=None,
                      delta: float = 1e-6) -> LowerUpperPair:
    """Build x0 = l0^n0 * u, y0 = l0^-n0 * u, a coupled lower-upper pair containing targets.

    l0 is the linking constant of u and A(u, u) (clamped below 1 by ``delta``),
    k0 the least n with (phi(l0)/l0)^n >= 1/l0, and n0 >= k0 the least
    exponent for which every target lies in [x0, y0]. Exponents are computed
    in logarithms.
    """
    u = cone_vector(u)
    image = np.atleast_1d(op(u, u))
    cert = linked(u, image)
    if cert is None:
        raise NotLinked("A(u, u) is not in the part of u")
    lam0 = min(cert.lambda_max, 1.0 - delta)
    log_lam = math.log(lam0)
    gain = math.log(phi(lam0)) - log_lam
    if gain <= 0:
        raise InvalidPhi(f"phi({lam0}) <= {lam0}")
    k0 = _ceil_with_slack(-log_lam / gain)

    support = u > 0
    n0 = k0
    for t in targets if targets is not None else [u]:
        t = cone_vector(t)
        if linked(u, t) is None:
            raise NotLinked(f"target {t} is not in the part of u")
        spread = np.abs(np.log(t[support] / u[support])).max()
        n0 = max(n0, _ceil_with_slack(spread / -log_lam))
    if n0 * log_lam < _LOG_FLOOR:
        raise Underflow(f"l0^n0 = exp({n0 * log_lam:.1f}) is below the double range")

    x0 = math.exp(n0 * log_lam) * u
    y0 = math.exp(-n0 * log_lam) * u
    for t in targets if targets is not None else []:
        if not (cone_leq(x0, t) and cone_leq(t, y0)):
            raise CertificateViolation(f"target {t} escaped [x0, y0] after rounding")
    lower_ok = cone_leq(x0, op(x0, y0))
    upper_ok = cone_leq(op(y0, x0), y0)
    if not (cone_leq(x0, y0) and lower_ok and upper_ok):
        raise CertificateViolation(
            "constructed (x0, y0) is not a coupled lower-upper fixed point; "
            "the phi-condition does not hold for this operator")
    return LowerUpperPair(x0, y0, lam0, k0, n0)


@dataclass
class SolveReport:
    x_star: np.ndarray
    residual: float
    lambda_trace: list
    lu_pair: tuple
    iterations: int
    certificates: dict
    xs: list = field(default_factory=list, repr=False)
    ys: list = field(default_factory=list, repr=False)

    @property
    def lambda_final(self) -> float:
        return self.lambda_trace[-1]

    def to_json(self) -> dict:
        return {
            "x_star": self.x_star.tolist(),
            "residual": self.residual,
            "lambda0": self.certificates["lambda0"],
            "k0": self.certificates["k0"],
            "n0": self.certificates["n0"],
            "iterations": self.iterations,
            "lambda_final": self.lambda_final,
        }


def _certificate_holds(x, y, lam, rtol=1e-13) -> bool:
    return bool(np.all(x - lam * y >= -rtol * np.maximum(1.0, np.abs(x))))


def solve(op: BivariateOperator, phi: PhiSpec, u, tol: float = 1e-10,
          max_steps: int = 10_000) -> SolveReport:
    """Fixed point of A in the part of u, certified by the lambda sequence.

    Stops once 1 - l_n < tol. The reported x* is the lower iterate x_n; the
    residual obeys |A(x*, x*) - x*| <= |y_n - x_n| <= (1/l_n - 1) |x_n|.
    """
    pair = construct_lu_pair(op, phi, u, targets=[u])
    x, y = pair.x0, pair.y0
    lam = linked(x, y).lambda_max
    lambdas = [lam]
    xs, ys = [x], [y]
    n = 0
    while True:
        if not _certificate_holds(x, y, lam):
            raise CertificateViolation(
                f"step {n}: x_n >= lambda_n y_n fails with lambda_n = {lam!r}; "
                "the phi-condition does not hold for this operator")
        if 1.0 - lam < tol:
            break
        if n >= max_steps:
            raise NonConvergence(f"1 - lambda_n = {1 - lam:.3e} after {n} steps")
        x1 = np.atleast_1d(op(x, y))
        y1 = np.atleast_1d(op(y, x))
        if not (cone_leq(x, x1) and cone_leq(y1, y) and cone_leq(x1, y1)):
            raise MonotonicityViolation(f"step {n + 1}: iterates left the nested brackets")
        nxt = phi(lam)
        if not nxt > lam:
            raise InvalidPhi(f"phi({lam!r}) = {nxt!r} is not above its argument")
        x, y, lam = x1, y1, min(nxt, 1.0)
        n += 1
        xs.append(x)
        ys.append(y)
        lambdas.append(lam)

    residual = float(np.max(np.abs(np.atleast_1d(op(x, x)) - x)))
    certificates = {"lambda0": pair.lambda0, "k0": pair.k0, "n0": pair.n0,
                    "final_gap": float(np.max(y - x)), "lambda_start": lambdas[0]}
    return SolveReport(x.copy(), residual, lambdas, (pair.x0, pair.y0), n, certificates, xs, ys)


def residual_bound(report: SolveReport) -> float:
    """Bound on |A(x*, x*) - x*| implied by the final certificate."""
    return (1.0 / report.lambda_final - 1.0) * float(np.max(np.abs(report.x_star)))


@dataclass
class SelfBoundedVerdict:
    ok: bool
    witnesses: dict
    failed: float | None = None

    def __bool__(self):
        return self.ok


UPPER_MUS = (2.0, 1.5, 1.1, 1.01, 1.001, 1 + 1e-4, 1 + 1e-6, 1 + 1e-8)


def self_bounded_check(xs, direction: str = "upper", grid=None, min_tail: int = 1,
                       rtol: float = 1e-14) -> SelfBoundedVerdict:
    """Find, for each grid constant, the least k valid over the stored horizon.

    ``upper``: x_n <= mu * x_k for all stored n >= k (mu > 1).
    ``lower``: lam * x_k <= x_n for all stored n >= k (0 < lam < 1).
    A witness must leave at least ``min_tail`` later elements, so the check is
    never satisfied vacuously by the last stored index.
    """
    seq = [np.atleast_1d(np.asarray(x, dtype=float)) for x in xs]
    if direction == "upper":
        grid = UPPER_MUS if grid is None else grid
        holds = lambda c, xk, xn: np.all(xn <= c * xk + rtol * np.abs(xk))  # noqa: E731
    elif direction == "lower":
        grid = tuple(1.0 / m for m in UPPER_MUS) if grid is None else grid
        holds = lambda c, xk, xn: np.all(c * xk <= xn + rtol * np.abs(xn))  # noqa: E731
    else:
        raise ValueError(f"direction must be 'upper' or 'lower', not {direction!r}")
    witnesses = {}
    last = len(seq) - 1
    for c in grid:
        k = next((k for k in range(last - min_tail + 1)
                  if all(holds(c, seq[k], seq[n]) for n in range(k, last + 1))), None)
        if k is None:
            return SelfBoundedVerdict(False, witnesses, failed=c)
        witnesses[c] = k
    return SelfBoundedVerdict(True, witnesses)


def multistart_coupled_search(op: BivariateOperator, x0, y0, starts: int = 20, seed=0,
                              tol: float = 1e-12) -> list[tuple[np.ndarray, np.ndarray]]:
    """Coupled fixed points (x, y) in [x0, y0]^2 found by root finding from random starts.

    Solves A(x, y) = x, A(y, x) = y with a hybrid Powell method in log
    coordinates (which keeps iterates in the interior of the cone), starting
    from points drawn uniformly in the box.
    """
    x0 = cone_vector(x0)
    y0 = cone_vector(y0)
    d = x0.size
    rng = np.random.default_rng(seed)

    def residual(z):
        x, y = np.exp(z[:d]), np.exp(z[d:])
        with np.errstate(all="ignore"):
            return np.concatenate([np.log(np.atleast_1d(op(x, y))) - z[:d],
                                   np.log(np.atleast_1d(op(y, x))) - z[d:]])

    found = []
    for _ in range(starts):
        x = rng.uniform(x0, y0)
        y = rng.uniform(x0, y0)
        sol = optimize.root(residual, np.log(np.concatenate([x, y])), method="hybr", tol=tol)
        if not sol.success or not np.all(np.isfinite(sol.x)):
            continue
        if np.max(np.abs(residual(sol.x))) > 1e-9:
            continue
        x, y = np.exp(sol.x[:d]), np.exp(sol.x[d:])
        if all(cone_leq(x0, v, 1e-9) and cone_leq(v, y0, 1e-9) for v in (x, y)):
            found.append((x, y))
    return found
