from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from monotone_iter.cone import (ComponentwiseUniverse, PhiSpec, closure_check, cone_leq,
                                construct_lu_pair, grid_function_cone, linked,
                                multistart_coupled_search, phi_condition_check, power_phi,
                                residual_bound, self_bounded_check, solve)
from monotone_iter.engine import is_coupled_lu_fixed_point
from monotone_iter.errors import (CertificateViolation, DimensionMismatch, InvalidPhi,
                                  NonConvergence, NotLinked, Underflow, ZeroElement)
from monotone_iter.operators import BivariateOperator, check_mixed_monotone
from monotone_iter.problems import hammerstein_grid, power_op

from .conftest import POWER_OP_FIXED_POINT, bisect

R1 = ComponentwiseUniverse(1, nonnegative=True)


def scalar_op(fn):
    return BivariateOperator(fn, R1)


def test_bisection_reference_value():
    t = bisect(lambda t: np.sqrt(t) + t ** (-1 / 3) - t, 2.0, 3.0)
    assert abs(t - POWER_OP_FIXED_POINT) < 1e-15


def test_cone_leq_examples():
    assert cone_leq([0, 0], [1, 2])
    assert not cone_leq([1, 0], [0, 1]) and not cone_leq([0, 1], [1, 0])
    assert cone_leq([3, 4], [3, 4])
    with pytest.raises(DimensionMismatch):
        cone_leq([1, 2], [1, 2, 3])


def test_linked_examples():
    assert linked([1, 2], [2, 1]).lambda_max == 0.5
    assert linked([1, 0], [1, 1]) is None
    assert linked([3, 0, 5], [3, 0, 5]).lambda_max == 1.0
    assert linked([3, 0, 5], [1, 0, 5]).support == frozenset({0, 2})
    with pytest.raises(ZeroElement):
        linked([0, 0], [1, 1])


nonneg_vectors = st.lists(st.sampled_from([0.0, 0.5, 1.0, 3.0]), min_size=3, max_size=3).filter(any)


@given(nonneg_vectors, nonneg_vectors, nonneg_vectors)
def test_linked_is_an_equivalence(x, y, z):
    assert linked(x, x) is not None
    assert (linked(x, y) is None) == (linked(y, x) is None)
    if linked(x, y) is not None and linked(y, z) is not None:
        assert linked(x, z) is not None
    cert = linked(x, y)
    if cert is not None:
        lam = cert.lambda_max
        assert 0 < lam <= 1
        assert cone_leq(lam * np.array(x), y) and cone_leq(lam * np.array(y), x)


@given(st.lists(st.fractions(-100, 100), min_size=2, max_size=4),
       st.lists(st.fractions(0, 100), min_size=4, max_size=4))
def test_archimedean_on_rationals(x, y):
    # if x has a positive coordinate, some n gives n*x_i > y_i, so "n x <= y for all n" forces x <= 0
    y = y[:len(x)]
    for xi, yi in zip(x, y):
        if xi > 0:
            n = int(yi / xi) + 1
            assert n * xi > yi
        else:
            assert all(n * xi <= yi for n in (1, 10, 10 ** 6))
    assert all(isinstance(v, Fraction) for v in x)


def test_phi_spec_validation():
    with pytest.raises(InvalidPhi):
        PhiSpec(lambda lam: lam)
    with pytest.raises(InvalidPhi):
        PhiSpec(lambda lam: 1.5)
    with pytest.raises(InvalidPhi):
        PhiSpec(lambda lam: min(1.0, 2 * lam), declared_supermultiplicative=True)
    PhiSpec(lambda lam: min(1.0, 2 * lam))
    assert power_phi(0.5)(0.25) == 0.5


def test_phi_condition_examples(power):
    assert phi_condition_check(power.operator, power_phi(0.5), [1.0])
    squares = scalar_op(lambda x, y: np.power(x, 2.0))
    verdict = phi_condition_check(squares, power_phi(0.5), [1.0], lambdas=[0.25],
                                  scales=[1.0], ratios=[1.0])
    assert not verdict
    assert verdict.witness["lambda"] == 0.25 and verdict.witness["x"] == [1.0]
    assert verdict.witness["lhs"] == [0.0625] and verdict.witness["rhs"] == [0.5]


def test_construct_pair_for_power_op(power):
    assert power.operator(np.ones(1), np.ones(1))[0] == 2.0
    pair = construct_lu_pair(power.operator, power.phi, power.u, targets=[power.u])
    assert pair.lambda0 == 0.5 and pair.k0 == 2 and pair.n0 == 2
    np.testing.assert_array_equal(pair.x0, [0.25])
    np.testing.assert_array_equal(pair.y0, [4.0])
    assert is_coupled_lu_fixed_point(power.operator, pair.x0, pair.y0)


def test_construct_pair_grows_for_far_targets(power):
    pair = construct_lu_pair(power.operator, power.phi, power.u, targets=[[100.0], [1e-3]])
    assert pair.n0 > pair.k0
    assert pair.x0[0] <= 1e-3 and pair.y0[0] >= 100.0


def test_construct_pair_errors(power):
    masked = BivariateOperator(lambda x, y: x * np.array([1.0, 0.0]),
                               ComponentwiseUniverse(2, nonnegative=True))
    with pytest.raises(NotLinked):
        construct_lu_pair(masked, power_phi(0.5), [1.0, 1.0])
    with pytest.raises(ZeroElement):
        construct_lu_pair(power.operator, power.phi, power.u, targets=[[0.0]])
    p2 = power_op(dim=2)
    with pytest.raises(NotLinked):
        construct_lu_pair(p2.operator, p2.phi, p2.u, targets=[[1.0, 0.0]])
    with pytest.raises(Underflow):
        construct_lu_pair(power.operator, power_phi(0.999), power.u)
    bad = scalar_op(lambda x, y: np.power(x, 0.9) + np.power(y, -1 / 3))
    with pytest.raises(CertificateViolation):
        construct_lu_pair(bad, power_phi(0.5), [1.0])


def test_solve_power_op(power):
    report = solve(power.operator, power.phi, power.u, tol=1e-10)
    assert abs(report.x_star[0] - POWER_OP_FIXED_POINT) < 1e-8
    assert report.residual < 1e-10
    assert report.residual <= residual_bound(report)
    assert 1 - report.lambda_final < 1e-10
    lams = report.lambda_trace
    assert all(a < b for a, b in zip(lams, lams[1:]))
    assert all(0 < v < 1 for v in lams)
    for x, y, lam in zip(report.xs, report.ys, lams):
        assert np.all(x >= lam * y * (1 - 1e-13))
    assert report.certificates["lambda_start"] == 1 / 16
    assert set(report.to_json()) == {"x_star", "residual", "lambda0", "k0", "n0", "iterations",
                                     "lambda_final"}


def test_symmetric_problem_has_equal_coordinates():
    p = power_op(dim=2)
    report = solve(p.operator, p.phi, p.u)
    assert report.x_star[0] == report.x_star[1]


def test_over_optimistic_phi_breaks_the_step_certificate(power):
    with pytest.raises(CertificateViolation, match="step"):
        solve(power.operator, power_phi(0.2), power.u)


def test_phi_that_stalls_is_rejected(power):
    stalls = PhiSpec(lambda lam: lam if lam > 0.96 else np.sqrt(lam))
    with pytest.raises(InvalidPhi):
        solve(power.operator, stalls, power.u)


def test_non_convergence_is_reported(power):
    with pytest.raises(NonConvergence):
        solve(power.operator, power.phi, power.u, max_steps=3)


def test_grid_function_cone():
    one = grid_function_cone(1)
    assert one.dim == 1 and one.grid.tolist() == [0.0]
    g = grid_function_cone(5)
    for a, b in [(0.5, 2.0), (2.0, 0.5), (1.0, 1.0)]:
        assert g.leq(np.full(5, a), np.full(5, b)) == (a <= b)
    with pytest.raises(ValueError):
        grid_function_cone(0)


def test_hammerstein_is_mixed_monotone_and_solvable():
    p = hammerstein_grid(samples=9)
    assert check_mixed_monotone(p.operator, "sampled", samples=500, rng=2)
    assert phi_condition_check(p.operator, p.phi, p.u)
    assert closure_check(p.operator, p.u, samples=200, rng=0)
    report = solve(p.operator, p.phi, p.u)
    assert report.residual < 1e-9
    np.testing.assert_allclose(report.x_star, report.x_star[::-1], rtol=1e-12)


def test_closure_check_detects_escape():
    r2 = ComponentwiseUniverse(2, nonnegative=True)
    escapes = BivariateOperator(lambda x, y: x * np.array([1.0, 0.0]), r2)
    assert not closure_check(escapes, [1.0, 1.0], samples=5, rng=0)


def test_self_bounded_trivial_cases():
    dec = [np.array([4.0, 2.0]) / (n + 1) for n in range(20)]
    inc = [np.array([1.0, 3.0]) * (2 - 1 / (n + 1)) for n in range(20)]
    up = self_bounded_check(dec, "upper")
    low = self_bounded_check(inc, "lower")
    assert up and set(up.witnesses.values()) == {0}
    assert low and set(low.witnesses.values()) == {0}
    assert not self_bounded_check([np.array([2.0 ** n]) for n in range(30)], "upper")
    with pytest.raises(ValueError):
        self_bounded_check(dec, "sideways")


def test_solver_trace_is_upper_self_bounded(power):
    report = solve(power.operator, power.phi, power.u)
    verdict = self_bounded_check(report.xs, "upper")
    assert verdict
    ks = [verdict.witnesses[m] for m in sorted(verdict.witnesses, reverse=True)]
    assert ks == sorted(ks)


def test_multistart_finds_only_the_diagonal_fixed_point():
    p = power_op(dim=3)
    report = solve(p.operator, p.phi, p.u)
    x0, y0 = report.lu_pair
    found = multistart_coupled_search(p.operator, x0, y0, starts=10, seed=1)
    assert found
    for x, y in found:
        assert np.max(np.abs(x - report.x_star)) < 1e-8
        assert np.max(np.abs(y - report.x_star)) < 1e-8
