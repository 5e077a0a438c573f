"""Built-in problems and the JSON problem-file format.

Cone operators come from a closed registry so that each one carries an
auditable mixed-monotonicity argument and a matching phi:

power-law      A(x, y) = x**alpha + y**(-beta) componentwise
affine-kernel  A(x, y) = M x**alpha + N y**(-beta) + b, with M, N, b >= 0
hammerstein    A(x, y)_i = sum_j w_j k(t_i, s_j) [x_j**alpha + g_scale * y_j**(-beta)]

For all three, A(l x, y) >= l**max(alpha, beta) A(x, l y) when 0 < l < 1, so
phi(l) = l**max(alpha, beta) is admissible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Callable

import numpy as np

from .cone import (ComponentwiseUniverse, PhiSpec, construct_lu_pair, cone_vector,
                   grid_function_cone, power_phi)
from .engine import StopPolicy
from .errors import ProblemSpecError
from .finite import FinitePoset, TableOperator
from .operators import BivariateOperator
from .order import OrderedUniverse

SPEC_VERSION = 1


@dataclass
class Problem:
    name: str
    universe: OrderedUniverse
    operator: BivariateOperator
    start: tuple | None = None
    phi: PhiSpec | None = None
    u: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    @property
    def is_cone(self) -> bool:
        return self.phi is not None

    def start_pair(self):
        """The declared start, or the synthesized lower-upper pair for cone problems."""
        if self.start is not None:
            return self.start
        if self.phi is None:
            raise ProblemSpecError(f"problem {self.name!r} has no start pair")
        pair = construct_lu_pair(self.operator, self.phi, self.u)
        return pair.x0, pair.y0


@dataclass(frozen=True)
class Param:
    default: object
    check: Callable[[object], bool]
    meaning: str


def _open_unit(v):
    return 0.0 < float(v) < 1.0


def _positive_int(v):
    return int(v) == v and int(v) >= 1


def _nonnegative(v):
    return float(v) >= 0.0


# -- builders ------------------------------------------------------------------

def _frac(x):
    return x - math.floor(x)


def frac_example() -> Problem:
    """A(x, y) = x + (1 - {x}) / 2 on the real line, started from (0, 1).

    Mixed monotone but without coupled fixed points: the iterates are
    x_n = 1 - 2**-n and y_n = 2 - 2**-n, and A(1, 1) = 1.5.
    """
    universe = ComponentwiseUniverse(1)
    op = BivariateOperator(lambda x, y: x + (1.0 - _frac(x)) / 2.0, universe, "frac")
    return Problem("frac-example", universe, op, start=(0.0, 1.0))


def _power_law(alpha, beta):
    def apply(x, y):
        return np.power(x, alpha) + np.power(y, -beta)
    return apply


def power_op(alpha=0.5, beta=1 / 3, dim=1) -> Problem:
    universe = ComponentwiseUniverse(int(dim), nonnegative=True)
    op = BivariateOperator(_power_law(alpha, beta), universe, f"x^{alpha:g}+y^-{beta:g}")
    return Problem("power-op", universe, op, phi=power_phi(max(alpha, beta)),
                   u=np.ones(int(dim)), params={"alpha": alpha, "beta": beta, "dim": int(dim)})


def _default_m(dim):
    idx = np.arange(dim)
    return 0.5 / (1.0 + np.abs(idx[:, None] - idx[None, :]))


def affine_kernel(M=None, N=None, b=None, alpha=0.5, beta=1 / 3, dim=3) -> Problem:
    dim = int(dim)
    M = _default_m(dim) if M is None else np.asarray(M, dtype=float)
    N = 0.25 * np.eye(dim) if N is None else np.asarray(N, dtype=float)
    b = np.full(dim, 0.1) if b is None else np.asarray(b, dtype=float)
    if M.shape != (dim, dim) or N.shape != (dim, dim) or b.shape != (dim,):
        raise ProblemSpecError(f"affine-kernel needs M, N of shape ({dim}, {dim}) and b of length {dim}")
    if (M < 0).any() or (N < 0).any() or (b < 0).any():
        raise ProblemSpecError("affine-kernel needs nonnegative M, N and b")
    if not np.all(M.sum(1) + N.sum(1) + b > 0):
        raise ProblemSpecError("every row of affine-kernel must have a positive entry")
    universe = ComponentwiseUniverse(dim, nonnegative=True)

    def apply(x, y):
        return M @ np.power(x, alpha) + N @ np.power(y, -beta) + b

    op = BivariateOperator(apply, universe, "affine-kernel")
    params = {"M": M.tolist(), "N": N.tolist(), "b": b.tolist(), "alpha": alpha, "beta": beta,
              "dim": dim}
    return Problem("affine-kernel", universe, op, phi=power_phi(max(alpha, beta)),
                   u=np.ones(dim), params=params)


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    if grid.size == 1:
        return np.ones(1)
    h = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def hammerstein_grid(samples=21, alpha=0.5, beta=1 / 3, g_scale=1.0, width=1.0) -> Problem:
    """Trapezoid discretization of x(t) = int_0^1 k(t, s)[f(x(s)) + g(y(s))] ds.

    k(t, s) = exp(-|t - s| / width), f(x) = x**alpha, g(y) = g_scale * y**(-beta).
    With g_scale = 0 the operator ignores y.
    """
    universe = grid_function_cone(int(samples))
    t = universe.grid
    K = np.exp(-np.abs(t[:, None] - t[None, :]) / width) * trapezoid_weights(t)[None, :]

    def apply(x, y):
        out = np.power(x, alpha)
        if g_scale:
            out = out + g_scale * np.power(y, -beta)
        return K @ out

    op = BivariateOperator(apply, universe, "hammerstein")
    exponent = max(alpha, beta) if g_scale else alpha
    params = {"samples": int(samples), "alpha": alpha, "beta": beta, "g_scale": g_scale,
              "width": width}
    return Problem("hammerstein-grid", universe, op, phi=power_phi(exponent),
                   u=np.ones(int(samples)), params=params)


@dataclass(frozen=True)
class Entry:
    build: Callable[..., Problem]
    params: dict
    summary: str


_MATRIX = Param(None, lambda v: v is None or np.asarray(v, dtype=float).ndim == 2, "square matrix")
_VECTOR = Param(None, lambda v: v is None or np.asarray(v, dtype=float).ndim == 1, "vector")

_POWER_PARAMS = {
    "alpha": Param(0.5, _open_unit, "exponent of x, in (0, 1)"),
    "beta": Param(1 / 3, _open_unit, "exponent of 1/y, in (0, 1)"),
    "dim": Param(1, _positive_int, "dimension, >= 1"),
}

BUILTINS: dict[str, Entry] = {
    "frac-example": Entry(frac_example, {}, "x + (1 - {x})/2 from (0, 1); no fixed point"),
    "power-op": Entry(power_op, _POWER_PARAMS, "x^alpha + y^-beta on R^dim_+"),
    "affine-kernel": Entry(affine_kernel, {
        **_POWER_PARAMS, "dim": Param(3, _positive_int, "dimension, >= 1"),
        "M": _MATRIX, "N": _MATRIX, "b": _VECTOR}, "M x^alpha + N y^-beta + b"),
    "hammerstein-grid": Entry(hammerstein_grid, {
        "samples": Param(21, _positive_int, "grid points, >= 1"),
        "alpha": Param(0.5, _open_unit, "exponent of f, in (0, 1)"),
        "beta": Param(1 / 3, _open_unit, "exponent of g, in (0, 1)"),
        "g_scale": Param(1.0, _nonnegative, "weight of g, >= 0"),
        "width": Param(1.0, lambda v: float(v) > 0, "kernel width, > 0"),
    }, "discretized Hammerstein equation on a grid of [0, 1]"),
}

# cone expressions addressable from problem files
EXPRESSIONS = {"power-law": "power-op", "affine-kernel": "affine-kernel",
               "hammerstein": "hammerstein-grid"}


def builtin_problems() -> dict[str, Entry]:
    return dict(BUILTINS)


def make_problem(name: str, params: dict | None = None) -> Problem:
    """Build a registered problem after checking parameter names and ranges."""
    if name not in BUILTINS:
        raise ProblemSpecError(f"unknown problem {name!r}; known: {', '.join(sorted(BUILTINS))}")
    entry = BUILTINS[name]
    params = dict(params or {})
    unknown = set(params) - set(entry.params)
    if unknown:
        raise ProblemSpecError(f"unknown parameters for {name}: {', '.join(sorted(unknown))}")
    for key, value in params.items():
        try:
            ok = entry.params[key].check(value)
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise ProblemSpecError(f"{name}.{key} = {value!r} is out of range ({entry.params[key].meaning})")
    return entry.build(**params)


# -- problem files ----------------------------------------------------------------

_COMMON_KEYS = {"version", "kind", "start", "u", "stop", "output"}
_KIND_KEYS = {
    "builtin": {"builtin", "params"},
    "cone": {"operator", "params"},
    "finite": {"poset", "operator"},
}
_STOP_KEYS = {f.name for f in fields(StopPolicy)}


@dataclass
class ProblemSpec:
    kind: str
    name: str | None = None
    params: dict = field(default_factory=dict)
    poset: dict | None = None
    table: list | None = None
    start: list | None = None
    u: list | None = None
    stop: dict = field(default_factory=dict)
    output: str | None = None

    @classmethod
    def from_json(cls, data) -> "ProblemSpec":
        if not isinstance(data, dict):
            raise ProblemSpecError("a problem file must hold a JSON object")
        if data.get("version") != SPEC_VERSION:
            raise ProblemSpecError(f"unsupported problem file version {data.get('version')!r}")
        kind = data.get("kind")
        if kind not in _KIND_KEYS:
            raise ProblemSpecError(f"kind must be one of {sorted(_KIND_KEYS)}, not {kind!r}")
        unknown = set(data) - _COMMON_KEYS - _KIND_KEYS[kind]
        if unknown:
            raise ProblemSpecError(f"unknown fields: {', '.join(sorted(unknown))}")
        stop = data.get("stop", {})
        if not isinstance(stop, dict) or set(stop) - _STOP_KEYS:
            raise ProblemSpecError(f"stop must be an object with keys among {sorted(_STOP_KEYS)}")
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise ProblemSpecError("params must be an object")
        spec = cls(kind, params=params, start=data.get("start"), u=data.get("u"), stop=stop,
                   output=data.get("output"))
        if kind == "builtin":
            spec.name = data.get("builtin")
        elif kind == "cone":
            if data.get("operator") not in EXPRESSIONS:
                raise ProblemSpecError(
                    f"cone operator must be one of {sorted(EXPRESSIONS)}, not {data.get('operator')!r}")
            spec.name = EXPRESSIONS[data["operator"]]
        else:
            if "poset" not in data or "operator" not in data:
                raise ProblemSpecError("finite problems need 'poset' and 'operator'")
            spec.poset, spec.table = data["poset"], data["operator"]
        return spec

    def stop_policy(self) -> StopPolicy:
        return StopPolicy(**self.stop)

    def build(self) -> Problem:
        try:
            if self.kind == "finite":
                poset = FinitePoset.from_json(self.poset)
                op = TableOperator(poset, self.table)
                if self.start is None:
                    raise ProblemSpecError("finite problems need a start pair")
                x0, y0 = (int(v) for v in self.start)
                return Problem("finite", poset, op, start=(x0, y0))
            problem = make_problem(self.name, self.params)
        except ProblemSpecError:
            raise
        except Exception as exc:  # malformed tables, shapes, values
            raise ProblemSpecError(f"malformed problem: {exc}") from exc
        if self.u is not None:
            problem.u = cone_vector(self.u)
        if self.start is not None:
            x0, y0 = self.start
            if problem.universe.dim == 1 and np.ndim(x0) == 0:
                problem.start = (float(x0), float(y0))
            else:
                problem.start = (cone_vector(x0), cone_vector(y0))
        return problem
