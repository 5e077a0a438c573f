"""Randomized exhaustive verification on small lattices.

Every trial draws a random lattice, a random mixed monotone table operator and
a random start pair x0 <= y0, then checks the conclusions of the monotone
iteration results wherever their hypotheses hold. The checks are computed by
a deliberately naive model (plain Python sets and loops over the pair
trajectory) and compared against the iteration engine, so a bug in either
shows up as a violated clause.

Clause ids
----------
brackets-ordered            x_n <= y_n, and A maps [x_n,y_n]^2 into [x_{n+1},y_{n+1}]
fixed-points-in-brackets    coupled fixed points of the start box lie in every bracket
lu-start-monotone           a lower-upper start gives monotone brackets of lower-upper pairs
empty-means-no-fixed-point  empty intersection => no coupled fixed point in the box
weak-point-in-start-box     a weakly attractive point lies in [x0, y0]
interval-weak-inherited     weak attraction on an interval passes to the start and sub-intervals
interval-strong-inherited   same for order attraction
strong-iff-weak-sup-inf     order attraction <=> weak attraction plus existing sup/inf
interval-strong-implies-weak
interval-weak-iff-fixed     weak attraction on [x0,y0] <=> weak attraction from (x0,y0) and A(x*,x*)=x*
interval-strong-iff-fixed
attractive-fixed-unique     (x*, x*) is the only coupled fixed point in the box
k-step-criterion            x* in the first k brackets and attracting (x_k, y_k)
one-step-criterion          the k = 1 case over [x0,y0] and [x1,y1]
lu-start-criterion          lower-upper start that is weakly attracted
lu-start-tail               ... and every later bracket
lu-onset-criterion          lower-upper pair first reached at step k
lu-onset-tail               ... and every bracket after k
engine-run / engine-classify / engine-lu-onset / engine-empty-sound /
engine-k-step / enumerate-agrees / sandwich
                            agreement of the package code with the naive model
generator-mixed-monotone    the random table passes the exhaustive monotonicity check
"""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .engine import StopPolicy, VerdictKind, run, sandwich_check
from .errors import MonotoneIterError
from .finite import (FinitePoset, TableOperator, enumerate_coupled_fixed_points,
                     generate_general_mixed_monotone, generate_random_lattice,
                     generate_random_mixed_monotone, random_comparable_pair)
from .operators import check_mixed_monotone

CLAUSES = (
    "generator-mixed-monotone",
    "brackets-ordered",
    "fixed-points-in-brackets",
    "lu-start-monotone",
    "empty-means-no-fixed-point",
    "weak-point-in-start-box",
    "interval-weak-inherited",
    "interval-strong-inherited",
    "strong-iff-weak-sup-inf",
    "interval-strong-implies-weak",
    "interval-weak-iff-fixed",
    "interval-strong-iff-fixed",
    "attractive-fixed-unique",
    "k-step-criterion",
    "one-step-criterion",
    "lu-start-criterion",
    "lu-start-tail",
    "lu-onset-criterion",
    "lu-onset-tail",
    "engine-run",
    "engine-classify",
    "engine-lu-onset",
    "engine-empty-sound",
    "engine-k-step",
    "enumerate-agrees",
    "sandwich",
)


class _Model:
    """Naive model of one (poset, table) instance; everything by enumeration."""

    def __init__(self, leq: list[list[bool]], table: list[list[int]]):
        self.leq = leq
        self.T = table
        self.n = len(leq)
        self.X = range(self.n)
        self.interval = lru_cache(maxsize=None)(self._interval)
        self.orbit = lru_cache(maxsize=None)(self._orbit)
        self.weak = lru_cache(maxsize=None)(self._weak)
        self.strong = lru_cache(maxsize=None)(self._strong)
        self.cfps = lru_cache(maxsize=None)(self._cfps)
        self.interval_weak = lru_cache(maxsize=None)(self._interval_weak)
        self.interval_strong = lru_cache(maxsize=None)(self._interval_strong)

    def _interval(self, lo, hi) -> frozenset:
        return frozenset(z for z in self.X if self.leq[lo][z] and self.leq[z][hi])

    def _orbit(self, u, v):
        """Pairs p_0..p_{m-1} up to the first repeat, and the index j with p_m = p_j."""
        pairs, index = [], {}
        while (u, v) not in index:
            index[(u, v)] = len(pairs)
            pairs.append((u, v))
            u, v = self.T[u][v], self.T[v][u]
        return tuple(pairs), index[(u, v)]

    def pair(self, u, v, n):
        pairs, j = self.orbit(u, v)
        m = len(pairs)
        return pairs[n] if n < m else pairs[j + (n - j) % (m - j)]

    def tail(self, u, v, k):
        pairs, j = self.orbit(u, v)
        return pairs[min(k, j):]

    def sup(self, s):
        ub = [w for w in self.X if all(self.leq[a][w] for a in s)]
        least = [w for w in ub if all(self.leq[w][b] for b in ub)]
        return least[0] if least else None

    def inf(self, s):
        lb = [w for w in self.X if all(self.leq[w][a] for a in s)]
        greatest = [w for w in lb if all(self.leq[b][w] for b in lb)]
        return greatest[0] if greatest else None

    def meet_all(self, u, v):
        pairs, _ = self.orbit(u, v)
        common = set(self.X)
        for a, b in pairs:
            common &= self.interval(a, b)
        return common

    def _weak(self, u, v):
        common = self.meet_all(u, v)
        return next(iter(common)) if len(common) == 1 else None

    def sup_inf(self, u, v, k=0):
        tail = self.tail(u, v, k)
        return self.sup({a for a, _ in tail}), self.inf({b for _, b in tail})

    def _strong(self, u, v):
        s, i = self.sup_inf(u, v)
        return s if s is not None and s == i else None

    def _cfps(self, lo, hi) -> frozenset:
        box = self.interval(lo, hi)
        return frozenset((a, b) for a in box for b in box if self.T[a][b] == a and self.T[b][a] == b)

    def fixed(self, z):
        return self.T[z][z] == z

    def fps(self, members):
        return {z for z in members if self.fixed(z)}

    def is_lu(self, u, v):
        return self.leq[u][v] and self.leq[u][self.T[u][v]] and self.leq[self.T[v][u]][v]

    def _starts_around(self, lo, hi, z):
        box = self.interval(lo, hi)
        return [(a, b) for a in box for b in box if self.leq[a][z] and self.leq[z][b]]

    def _interval_weak(self, lo, hi, z):
        return z in self.interval(lo, hi) and all(
            self.weak(a, b) == z for a, b in self._starts_around(lo, hi, z))

    def _interval_strong(self, lo, hi, z):
        return z in self.interval(lo, hi) and all(
            self.strong(a, b) == z for a, b in self._starts_around(lo, hi, z))


@dataclass
class InstanceResult:
    applicable: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)
    attractive_fixed_point: bool = False
    sandwich_pairs: int = 0
    trace: list = field(default_factory=list)

    def check(self, clause: str, ok) -> None:
        self.applicable[clause] += 1
        if not ok and clause not in self.violations:
            self.violations.append(clause)


def check_instance(poset: FinitePoset, op: TableOperator, start: tuple[int, int]) -> InstanceResult:
    """Check every clause on one instance; failures are returned, not raised."""
    res = InstanceResult()
    leq = poset.leq_matrix.tolist()
    table = op.table.tolist()
    M = _Model(leq, table)
    x0, y0 = start
    pairs, j = M.orbit(x0, y0)
    m = len(pairs)
    res.trace = [list(p) for p in pairs]
    res.check("generator-mixed-monotone", bool(check_mixed_monotone(op)))
    comparable = [(a, b) for a in M.X for b in M.X if leq[a][b]]

    # brackets along the start orbit (p_m = p_j closes the loop)
    ordered = all(leq[a][b] for a, b in pairs)
    images_ok = True
    for n in range(m):
        (a, b), (c, d) = M.pair(x0, y0, n), M.pair(x0, y0, n + 1)
        box = M.interval(a, b) if leq[a][b] else ()
        images_ok &= all(leq[c][table[p][q]] and leq[table[p][q]][d] for p in box for q in box)
    res.check("brackets-ordered", ordered and images_ok)

    start_cfps = M.cfps(x0, y0)
    res.check("fixed-points-in-brackets", all(
        p in M.interval(a, b) and q in M.interval(a, b) for p, q in start_cfps for a, b in pairs))

    if M.is_lu(x0, y0):
        ok = True
        for n in range(m):
            (a, b), (c, d) = M.pair(x0, y0, n), M.pair(x0, y0, n + 1)
            ok &= leq[a][c] and leq[d][b] and M.is_lu(a, b)
        res.check("lu-start-monotone", ok)

    # interval-level properties over every comparable pair of the poset
    for lo, hi in comparable:
        if not M.meet_all(lo, hi):
            res.check("empty-means-no-fixed-point", not M.cfps(lo, hi))
        w = M.weak(lo, hi)
        if w is not None:
            res.check("weak-point-in-start-box", w in M.interval(lo, hi))
        s, i = M.sup_inf(lo, hi)
        strong = M.strong(lo, hi)
        res.check("strong-iff-weak-sup-inf",
                  (strong is not None) == (w is not None and s is not None and i is not None)
                  and (strong is None or strong == w))
        for z in M.X:
            iw = M.interval_weak(lo, hi, z)
            ist = M.interval_strong(lo, hi, z)
            if iw:
                res.check("interval-weak-inherited", w == z and all(
                    M.interval_weak(a, b, z) for a, b in M._starts_around(lo, hi, z)))
            if ist:
                res.check("interval-strong-inherited", strong == z and all(
                    M.interval_strong(a, b, z) for a, b in M._starts_around(lo, hi, z)))
                res.check("interval-strong-implies-weak", iw)
            res.check("interval-weak-iff-fixed", iw == (w == z and M.fixed(z)))
            res.check("interval-strong-iff-fixed", ist == (strong == z and M.fixed(z)))
        if w is not None and M.fixed(w):
            res.check("attractive-fixed-unique", M.cfps(lo, hi) == {(w, w)})

    _check_criteria(M, res, x0, y0)
    _check_engine(M, res, poset, op, x0, y0)
    return res


def _unique_conclusions(M: _Model, n_pairs, z) -> bool:
    ok = True
    for a, b in n_pairs:
        ok &= M.cfps(a, b) == {(z, z)}
        ok &= M.fps(M.interval(a, b)) == {z}
        ok &= M.interval_weak(a, b, z)
    return ok


def _check_criteria(M: _Model, res: InstanceResult, x0, y0) -> None:
    pairs, j = M.orbit(x0, y0)
    m = len(pairs)
    p = lambda n: M.pair(x0, y0, n)  # noqa: E731

    for k in range(1, m + 1):
        z = M.weak(*p(k))
        if z is None or not all(z in M.interval(*p(n)) for n in range(k)):
            continue
        head = [p(n) for n in range(k + 1)]
        ok = _unique_conclusions(M, head, z)
        s, i = M.sup_inf(x0, y0, k)
        if s is not None and i is not None:
            ok &= all(M.interval_strong(a, b, z) for a, b in head)
        res.check("k-step-criterion", ok)
        res.check("engine-k-step", M.weak(x0, y0) == z)

    z = M.weak(*p(1))
    if z is not None and z in M.interval(x0, y0):
        (a0, b0), (a1, b1) = p(0), p(1)
        union = M.interval(a0, b0) | M.interval(a1, b1)
        ok = (M.cfps(a0, b0) | M.cfps(a1, b1)) == {(z, z)} and M.fps(union) == {z}
        ok &= M.interval_weak(a0, b0, z) and M.interval_weak(a1, b1, z)
        s, i = M.sup_inf(x0, y0, 1)
        if s is not None and i is not None:
            ok &= M.interval_strong(a0, b0, z) and M.interval_strong(a1, b1, z)
        res.check("one-step-criterion", ok)

    if M.is_lu(x0, y0):
        z = M.weak(x0, y0)
        if z is not None:
            ok = _unique_conclusions(M, [(x0, y0)], z)
            s, i = M.sup_inf(x0, y0)
            if s is not None and i is not None:
                ok &= M.interval_strong(x0, y0, z)
            res.check("lu-start-criterion", ok)
            res.check("lu-start-tail", all(
                M.cfps(*p(n)) == {(z, z)} and M.interval_weak(*p(n), z) for n in range(1, m + 1)))

    for k in range(1, m + 1):
        if not M.is_lu(*p(k)):
            continue
        z = M.weak(*p(k))
        if z is None or z not in M.interval(x0, y0):
            continue
        head = [p(n) for n in range(k + 1)]
        ok = _unique_conclusions(M, head, z)
        s, i = M.sup_inf(x0, y0, k)
        if s is not None and i is not None:
            ok &= all(M.interval_strong(a, b, z) for a, b in head)
        res.check("lu-onset-criterion", ok)
        res.check("lu-onset-tail", all(
            M.cfps(*p(n)) == {(z, z)} and M.interval_weak(*p(n), z) for n in range(k + 1, m + 1)))


def _check_engine(M: _Model, res: InstanceResult, poset, op, x0, y0) -> None:
    try:
        trace = run(op, x0, y0, StopPolicy(max_steps=max(64, poset.size ** 2 + 1)))
    except MonotoneIterError:
        res.check("engine-run", False)
        return
    res.check("engine-run", True)
    verdict = trace.verdict

    common = M.meet_all(x0, y0)
    z = M.weak(x0, y0)
    if not common:
        expected = {VerdictKind.NO_COUPLED_FIXED_POINT_IN_BOX}
    elif z is None:
        expected = {VerdictKind.UNDECIDED}
    elif M.strong(x0, y0) == z:
        expected = {VerdictKind.ORDER_ATTRACTIVE, VerdictKind.FIXED_POINT_REACHED}
    else:
        expected = {VerdictKind.WEAKLY_ORDER_ATTRACTIVE}
    ok = verdict.kind in expected
    if z is not None:
        ok &= verdict.x_star == z and verdict.fixed_point_confirmed == M.fixed(z)
    res.check("engine-classify", ok)

    last = trace.horizon if trace.stop_reason in ("cycle", "fixed") else trace.horizon - 1
    expected_onset = next((k for k in range(last + 1)
                           if M.leq[M.pair(x0, y0, k)[0]][M.pair(x0, y0, k + 1)[0]]
                           and M.leq[M.pair(x0, y0, k + 1)[1]][M.pair(x0, y0, k)[1]]), None)
    res.check("engine-lu-onset", trace.lu_onset == expected_onset)

    box = poset.interval(x0, y0)
    found = enumerate_coupled_fixed_points(op, box)
    res.check("enumerate-agrees", found == set(M.cfps(x0, y0)))
    if verdict.kind == VerdictKind.NO_COUPLED_FIXED_POINT_IN_BOX:
        res.check("engine-empty-sound", not found)

    if verdict.weakly_attractive and verdict.fixed_point_confirmed:
        res.attractive_fixed_point = True
        zs = verdict.x_star
        ok = True
        for u0, v0 in M._starts_around(x0, y0, zs):
            ok &= bool(sandwich_check(op, trace, u0, v0, x_star=zs))
            res.sandwich_pairs += 1
        res.check("sandwich", ok)


# -- trials, reports, bundles ---------------------------------------------------

GENERATORS = {"maps": generate_random_mixed_monotone, "general": generate_general_mixed_monotone}


def make_instance(seed: int, trial: int, sizes=(2, 8), generator: str = "maps"):
    """Random lattice, mixed monotone table and start pair for one trial.

    ``maps`` draws A(x, y) = f(x) v g(y) or f(x) ^ g(y); ``general`` draws any
    mixed monotone table.
    """
    rng = np.random.default_rng([seed, trial])
    size = int(rng.integers(sizes[0], sizes[1] + 1))
    lattice_seed, op_seed = (int(s) for s in rng.integers(0, 2 ** 63, size=2))
    poset = generate_random_lattice(lattice_seed, size)
    op = GENERATORS[generator](op_seed, poset)
    start = random_comparable_pair(rng, poset)
    return poset, op, start


def make_bundle(poset: FinitePoset, op: TableOperator, start, result: InstanceResult) -> dict:
    return {
        "poset": poset.to_json(),
        "operator": op.to_json(),
        "start": [int(start[0]), int(start[1])],
        "violated": result.violations[0] if result.violations else None,
        "trace": result.trace,
    }


def _run_trial(args):
    seed, trial, sizes, generator = args
    poset, op, start = make_instance(seed, trial, sizes, generator)
    result = check_instance(poset, op, start)
    bundle = make_bundle(poset, op, start, result) if result.violations else None
    return trial, result, bundle


@dataclass
class SuiteReport:
    seed: int
    trials: int
    sizes: tuple
    generator: str
    applicable: Counter
    violations: Counter
    attractive_fixed_point_instances: int
    sandwich_pairs: int
    failures: list
    bundles: list

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "sizes": list(self.sizes),
            "generator": self.generator,
            "applicable": {c: self.applicable[c] for c in CLAUSES},
            "violations": {c: self.violations[c] for c in CLAUSES},
            "total_violations": self.total_violations,
            "attractive_fixed_point_instances": self.attractive_fixed_point_instances,
            "sandwich_pairs_checked": self.sandwich_pairs,
            "failures": self.failures,
        }


def verify_theorem_suite(seed: int, trials: int, sizes=(2, 8), jobs: int = 1,
                         generator: str = "maps") -> SuiteReport:
    """Run ``trials`` independent random instances and aggregate the clause checks.

    Trial t uses the seed sequence (seed, t), so reports are reproducible and
    independent of ``jobs``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if generator not in GENERATORS:
        raise ValueError(f"generator must be one of {sorted(GENERATORS)}")
    work = [(seed, t, tuple(sizes), generator) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_trial, work, chunksize=16))
    else:
        outcomes = [_run_trial(w) for w in work]
    outcomes.sort(key=lambda o: o[0])

    applicable, violations = Counter(), Counter()
    attractive = sandwich = 0
    failures, bundles = [], []
    for trial, result, bundle in outcomes:
        applicable.update(result.applicable)
        violations.update(result.violations)
        attractive += result.attractive_fixed_point
        sandwich += result.sandwich_pairs
        if bundle is not None:
            failures.append({"trial": trial, "violated": result.violations})
            bundles.append(bundle)
    return SuiteReport(seed, trials, tuple(sizes), generator, applicable, violations, attractive, sandwich,
                       failures, bundles)


def load_bundle(bundle: dict) -> tuple[FinitePoset, TableOperator, tuple[int, int]]:
    poset = FinitePoset.from_json(bundle["poset"])
    op = TableOperator(poset, bundle["operator"])
    x0, y0 = bundle["start"]
    return poset, op, (int(x0), int(y0))


def replay(bundle: dict) -> InstanceResult:
    """Re-run the checks of a counterexample bundle."""
    poset, op, start = load_bundle(bundle)
    return check_instance(poset, op, start)
