"""Acceptance criteria; each test prints a PASS/FAIL line in the terminal summary."""
import csv
import itertools
import time

import numpy as np

from monotone_iter import io
from monotone_iter.cli import main
from monotone_iter.cone import (construct_lu_pair, multistart_coupled_search, power_phi,
                                self_bounded_check, solve)
from monotone_iter.engine import is_coupled_lu_fixed_point, run, sandwich_check
from monotone_iter.errors import CertificateViolation
from monotone_iter.finite import (TableOperator, generate_random_lattice,
                                  generate_random_mixed_monotone)
from monotone_iter.operators import (BivariateOperator, check_mixed_monotone, power_apply,
                                     projection, s_compose)
from monotone_iter.oracle import CLAUSES, make_instance, verify_theorem_suite
from monotone_iter.problems import affine_kernel, frac_example, hammerstein_grid, power_op

from .conftest import POWER_OP_FIXED_POINT, bisect


def test_criterion_1_frac_example(tmp_path, criterion):
    start = time.perf_counter()
    code = main(["iterate", "--builtin", "frac-example", "--steps", "50", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - start
    assert code == 0
    with open(tmp_path / "trace.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    assert len(rows) >= 51
    for row in rows[:51]:
        n = int(row[0])
        assert float(row[1]) == 1.0 - 2.0 ** -n
        assert float(row[2]) == 2.0 - 2.0 ** -n
    verdict = io.read_json(tmp_path / "verdict.json")
    assert verdict["kind"] == "OrderAttractive" and verdict["x_star"] == 1.0
    assert verdict["fixed_point_confirmed"] is False
    assert frac_example().operator(1.0, 1.0) == 1.5 and verdict["image_of_x_star"] == 1.5
    assert elapsed < 1.0
    criterion(f"exact for n<=50, OrderAttractive(1.0), A(1,1)=1.5, {elapsed:.2f}s")


def test_criterion_2_oracle_suite(criterion):
    start = time.perf_counter()
    report = verify_theorem_suite(42, 1000, sizes=(2, 8))
    elapsed = time.perf_counter() - start
    js = report.to_json()
    assert report.total_violations == 0, js["failures"][:5]
    assert all(js["applicable"][c] > 0 for c in CLAUSES)
    assert elapsed < 60.0
    checks = sum(js["applicable"].values())
    criterion(f"1000 trials, {checks} clause checks, 0 violations, {elapsed:.1f}s")


def test_criterion_3_operator_laws(criterion):
    rng = np.random.default_rng(2024)
    failures = 0
    samples = 0
    # finite universes: 100 lattices x 50 sampled points, mixed monotone and arbitrary tables
    for k in range(100):
        poset = generate_random_lattice(int(rng.integers(2 ** 32)), int(rng.integers(2, 9)))
        n = poset.size
        if k % 2:
            A, B, C = (generate_random_mixed_monotone(int(rng.integers(2 ** 32)), poset)
                       for _ in range(3))
        else:
            A, B, C = (TableOperator(poset, rng.integers(0, n, size=(n, n))) for _ in range(3))
        P = projection(poset)
        left, right = s_compose(s_compose(C, B), A), s_compose(C, s_compose(B, A))
        for _ in range(50):
            x, y = (int(v) for v in rng.integers(0, n, size=2))
            m, j = (int(v) for v in rng.integers(0, 10, size=2))
            ok = left(x, y) == right(x, y)
            ok &= s_compose(P, A)(x, y) == A(x, y) == s_compose(A, P)(x, y)
            inner = power_apply(A, j, x, y), power_apply(A, j, y, x)
            ok &= power_apply(A, m + j, x, y) == power_apply(A, m, *inner)
            failures += not ok
            samples += 1
    # numeric universes
    ops = [power_op(dim=3).operator, affine_kernel().operator, hammerstein_grid(samples=3).operator]
    frac = frac_example().operator
    P3 = projection(ops[0].universe)
    for _ in range(4000):
        x, y = rng.lognormal(0, 1, size=3), rng.lognormal(0, 1, size=3)
        A, B, C = (ops[i] for i in rng.integers(0, 3, size=3))
        m, j = (int(v) for v in rng.integers(0, 8, size=2))
        ok = np.array_equal(s_compose(s_compose(C, B), A)(x, y), s_compose(C, s_compose(B, A))(x, y))
        ok &= np.array_equal(s_compose(P3, A)(x, y), A(x, y))
        ok &= np.array_equal(s_compose(A, P3)(x, y), A(x, y))
        inner = power_apply(A, j, x, y), power_apply(A, j, y, x)
        ok &= np.array_equal(power_apply(A, m + j, x, y), power_apply(A, m, *inner))
        failures += not ok
        samples += 1
    for _ in range(1000):
        x, y = rng.uniform(-5, 5, size=2)
        m, j = (int(v) for v in rng.integers(0, 8, size=2))
        ok = s_compose(s_compose(frac, frac), frac)(x, y) == s_compose(frac, s_compose(frac, frac))(x, y)
        inner = power_apply(frac, j, x, y), power_apply(frac, j, y, x)
        ok &= power_apply(frac, m + j, x, y) == power_apply(frac, m, *inner)
        failures += not ok
        samples += 1
    # composition preserves mixed monotonicity on finite lattices
    compositions = 0
    for _ in range(300):
        poset = generate_random_lattice(int(rng.integers(2 ** 32)), int(rng.integers(2, 9)))
        A = generate_random_mixed_monotone(int(rng.integers(2 ** 32)), poset)
        B = generate_random_mixed_monotone(int(rng.integers(2 ** 32)), poset)
        assert check_mixed_monotone(A) and check_mixed_monotone(B)
        failures += not check_mixed_monotone(TableOperator.from_operator(s_compose(B, A)))
        compositions += 1
    assert samples >= 10_000
    assert failures == 0
    criterion(f"{samples} sampled points, {compositions} exhaustive composition checks, 0 failures")


def test_criterion_4_cone_solver(criterion):
    start = time.perf_counter()
    p = power_op()
    pair = construct_lu_pair(p.operator, p.phi, p.u, targets=[p.u])
    report = solve(p.operator, p.phi, p.u, tol=1e-10)
    elapsed = time.perf_counter() - start
    reference = bisect(lambda t: np.sqrt(t) + t ** (-1 / 3) - t, 2.0, 3.0)
    assert pair.lambda0 == 0.5 and pair.k0 == 2
    assert report.certificates["lambda0"] == 0.5 and report.certificates["k0"] == 2
    assert is_coupled_lu_fixed_point(p.operator, pair.x0, pair.y0)
    residual = float(np.max(np.abs(p.operator(report.x_star, report.x_star) - report.x_star)))
    assert residual < 1e-9 and report.residual == residual
    assert abs(report.x_star[0] - reference) < 1e-8
    assert abs(reference - POWER_OP_FIXED_POINT) < 1e-15
    assert elapsed < 1.0
    criterion(f"x*={float(report.x_star[0])!r}, bisection={reference!r}, residual={residual:.1e}, "
              f"{elapsed:.2f}s")


def _admissible_us(n=10, dim=3, seed=5):
    rng = np.random.default_rng(seed)
    return [np.ones(dim)] + [rng.uniform(0.05, 20.0, size=dim) for _ in range(n - 1)]


def test_criterion_5_uniqueness(criterion):
    p = power_op(dim=3)
    reports = [solve(p.operator, p.phi, u) for u in _admissible_us()]
    stars = np.array([r.x_star for r in reports])
    spread = float(np.max(np.abs(stars - stars[0])))
    assert len(reports) == 10 and spread < 1e-8
    found = 0
    for r in reports:
        x0, y0 = r.lu_pair
        for x, y in multistart_coupled_search(p.operator, x0, y0, starts=10, seed=0):
            found += 1
            assert np.max(np.abs(x - stars[0])) < 1e-8 and np.max(np.abs(y - stars[0])) < 1e-8
    assert found > 0
    criterion(f"10 starts agree to {spread:.1e}; {found} multistart roots, all equal to (x*,x*)")


def test_criterion_6_certificates(criterion):
    p1, p3 = power_op(), power_op(dim=3)
    solves = [(p1, p1.u), (affine_kernel(), None), (hammerstein_grid(), None)]
    solves += [(p3, u) for u in _admissible_us()]
    tol = 1e-10
    steps = 0
    for problem, u in solves:
        report = solve(problem.operator, problem.phi, problem.u if u is None else u, tol=tol)
        lams = report.lambda_trace
        assert all(a < b for a, b in zip(lams, lams[1:]))
        assert 1 - report.lambda_final < tol
        for x, y, lam in zip(report.xs, report.ys, lams):
            assert np.all(x >= lam * y * (1 - 1e-13))
            steps += 1
    injected = [
        (lambda x, y: np.power(x, 0.9) + np.power(y, -1 / 3), power_phi(0.5)),
        (lambda x, y: np.power(x, 2.0) + np.power(y, -1 / 3), power_phi(0.5)),
        (lambda x, y: np.power(x, 0.5) + np.power(y, -1 / 3), power_phi(0.2)),
        (lambda x, y: np.power(x, 0.5) + np.power(y, -0.9), power_phi(0.5)),
    ]
    for fn, phi in injected:
        op = BivariateOperator(fn, p1.universe)
        try:
            solve(op, phi, p1.u)
        except CertificateViolation:
            continue
        raise AssertionError("a phi-condition violation went undetected")
    criterion(f"{len(solves)} solves, {steps} certified steps, {len(injected)} injections caught")


def test_criterion_7_self_bounded(criterion):
    for problem in (power_op(), power_op(dim=3), affine_kernel(), hammerstein_grid()):
        report = solve(problem.operator, problem.phi, problem.u)
        assert self_bounded_check(report.xs, "upper")
    rng = np.random.default_rng(0)
    for _ in range(50):
        steps = rng.exponential(1.0, size=(30, 4))
        inc = np.cumsum(steps, axis=0) + 0.1
        dec = inc[::-1]
        up = self_bounded_check(list(dec), "upper")
        low = self_bounded_check(list(inc), "lower")
        assert up and set(up.witnesses.values()) == {0}
        assert low and set(low.witnesses.values()) == {0}
    criterion("4 solver traces upper self-bounded; 50 monotone sequences with witness k=0")


def test_criterion_8_sandwich(criterion):
    instances = pairs = 0
    for trial in itertools.count():
        poset, op, (x0, y0) = make_instance(42, trial)
        trace = run(op, x0, y0)
        v = trace.verdict
        if not (v.weakly_attractive and v.fixed_point_confirmed):
            continue
        z = v.x_star
        box = poset.interval_members(x0, y0)
        for u0 in box:
            for v0 in box:
                if poset.leq(u0, z) and poset.leq(z, v0):
                    assert sandwich_check(op, trace, u0, v0, x_star=z)
                    pairs += 1
        instances += 1
        if instances == 1000:
            break
    criterion(f"{instances} instances with a confirmed attractive fixed point, "
              f"{pairs} interior pairs, all pass")
