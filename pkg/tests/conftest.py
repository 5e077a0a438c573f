import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from monotone_iter.finite import generate_random_lattice, generate_random_mixed_monotone
from monotone_iter.problems import frac_example, power_op

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# reference fixed point of t = sqrt(t) + t**(-1/3), computed by bisection on [2, 3]
POWER_OP_FIXED_POINT = 2.2668544161867272


@pytest.fixture
def frac():
    return frac_example()


@pytest.fixture
def power():
    return power_op()


@st.composite
def lattice_instances(draw, min_size=2, max_size=8):
    """(lattice, mixed monotone table) pairs drawn through the package generators."""
    size = draw(st.integers(min_size, max_size))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    poset = generate_random_lattice(seed, size)
    op = generate_random_mixed_monotone(seed + 1, poset)
    return poset, op


@st.composite
def comparable_pairs(draw, poset):
    pairs = poset.comparable_pairs()
    return pairs[draw(st.integers(0, len(pairs) - 1))]


def bisect(f, lo, hi, iters=200):
    """Plain bisection for a sign change of f on [lo, hi]."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo <= 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def frac_closed_form(n):
    return 1.0 - 2.0 ** -n, 2.0 - 2.0 ** -n


def as_array(v):
    return np.atleast_1d(np.asarray(v, dtype=float))


ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion for the terminal summary."""
    name = request.node.name
    ACCEPTANCE[name] = ["FAIL", ""]

    def note(detail):
        ACCEPTANCE[name][1] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    if rep is not None and rep.passed:
        ACCEPTANCE[name][0] = "PASS"


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{status}  {name}  {detail}")
