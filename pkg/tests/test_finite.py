import numpy as np
import pytest
from hypothesis import given, strategies as st

from monotone_iter.engine import is_coupled_fixed_point
from monotone_iter.errors import InvalidPoset, ShapeError
from monotone_iter.finite import (FinitePoset, TableOperator, boolean_lattice, chain,
                                  divisor_lattice, enumerate_coupled_fixed_points,
                                  generate_general_mixed_monotone, generate_random_lattice,
                                  generate_random_mixed_monotone, mixed_monotone_from_maps,
                                  product_of_chains, validate_poset)
from monotone_iter.operators import check_mixed_monotone, projection

from .conftest import lattice_instances


def test_validate_chain():
    assert validate_poset(chain(3).leq_matrix)


def test_validate_antisymmetry_witness():
    m = np.eye(3, dtype=bool)
    m[0, 1] = m[1, 0] = True
    v = validate_poset(m)
    assert not v and v.axiom == "antisymmetry" and v.witness == (0, 1)


def test_validate_transitivity_witness():
    m = np.eye(3, dtype=bool)
    m[0, 1] = m[1, 2] = True
    v = validate_poset(m)
    assert not v and v.axiom == "transitivity" and v.witness == (0, 1, 2)
    with pytest.raises(InvalidPoset) as err:
        FinitePoset(m)
    assert err.value.verdict.axiom == "transitivity"


def test_validate_reflexivity_and_shape():
    assert validate_poset(np.zeros((2, 2))).axiom == "reflexivity"
    with pytest.raises(ShapeError):
        validate_poset(np.ones((2, 3)))


def test_poset_matrix_is_frozen():
    c = chain(3)
    with pytest.raises(ValueError):
        c.leq_matrix[0, 0] = False


def test_two_by_two_grid():
    grid = product_of_chains([2, 2])
    assert grid.size == 4 and grid.is_lattice
    assert grid.labels == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert grid.join(1, 2) == 3 and grid.meet(1, 2) == 0
    assert not grid.leq(1, 2) and not grid.leq(2, 1)


def test_size_two_is_the_two_chain():
    for seed in range(20):
        p = generate_random_lattice(seed, 2)
        assert p.size == 2 and len(p.comparable_pairs()) == 3


def test_divisor_lattice_of_twelve():
    d = divisor_lattice(12)
    assert d.labels == [1, 2, 3, 4, 6, 12]
    idx = {v: i for i, v in enumerate(d.labels)}
    assert d.leq(idx[2], idx[4]) and d.leq(idx[3], idx[12]) and not d.leq(idx[4], idx[6])
    assert d.labels[d.join(idx[4], idx[6])] == 12 and d.labels[d.meet(idx[4], idx[6])] == 2


def test_lattice_size_bounds():
    with pytest.raises(ValueError):
        generate_random_lattice(0, 1)
    with pytest.raises(ValueError):
        generate_random_lattice(0, 65)


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 64), st.sampled_from(["auto", "closure", "chains"]))
def test_random_lattices_are_lattices(seed, size, method):
    p = generate_random_lattice(seed, size, method)
    assert p.size == size and p.is_lattice
    assert p == generate_random_lattice(seed, size, method)


def test_generator_examples():
    b = boolean_lattice(2)
    n = b.size
    ident = mixed_monotone_from_maps(b, list(range(n)), [b.bottom] * n)
    assert all(ident(x, y) == x for x in range(n) for y in range(n))
    const = mixed_monotone_from_maps(b, [2] * n, [2] * n)
    assert check_mixed_monotone(const) and set(const.table.ravel()) == {2}


def test_two_chain_join_with_complement():
    c = chain(2)
    op = mixed_monotone_from_maps(c, [0, 1], [1, 0], form="join")
    assert op.table.tolist() == [[1, 0], [1, 1]]
    assert check_mixed_monotone(op)


def test_enumerate_examples():
    c = chain(2)
    assert enumerate_coupled_fixed_points(TableOperator.from_operator(projection(c))) == {
        (0, 0), (0, 1), (1, 0), (1, 1)}
    const = TableOperator(c, [[1, 1], [1, 1]])
    assert enumerate_coupled_fixed_points(const) == {(1, 1)}
    assert enumerate_coupled_fixed_points(const, c.interval(0, 0)) == set()


@given(lattice_instances())
def test_enumerate_agrees_with_definition(inst):
    poset, op = inst
    expected = {(x, y) for x in range(poset.size) for y in range(poset.size)
                if is_coupled_fixed_point(op, x, y)}
    assert enumerate_coupled_fixed_points(op) == expected
    for lo, hi in poset.comparable_pairs():
        members = set(poset.interval_members(lo, hi))
        assert enumerate_coupled_fixed_points(op, poset.interval(lo, hi)) == {
            (x, y) for x, y in expected if x in members and y in members}


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 8))
def test_random_operators_are_mixed_monotone(seed, size):
    p = generate_random_lattice(seed, size)
    assert check_mixed_monotone(generate_random_mixed_monotone(seed, p))
    assert check_mixed_monotone(generate_general_mixed_monotone(seed, p))


def test_general_generator_leaves_the_join_of_maps_class():
    # f(x) v g(y) satisfies A(x, y) = A(x, top) v A(bottom, y); general tables need not
    found = False
    for seed in range(200):
        p = generate_random_lattice(seed, 6)
        op = generate_general_mixed_monotone(seed, p)
        t, b = p.top, p.bottom
        if any(op(x, y) != p.join(op(x, t), op(b, y)) for x in range(6) for y in range(6)):
            found = True
            break
    assert found


def test_json_round_trip():
    p = generate_random_lattice(5, 7)
    op = generate_random_mixed_monotone(5, p)
    q = FinitePoset.from_json(p.to_json())
    assert q == p
    assert TableOperator(q, op.to_json()).table.tolist() == op.table.tolist()
    with pytest.raises(ShapeError):
        FinitePoset.from_json({"size": 3, "leq": p.to_json()["leq"]})
    with pytest.raises(ShapeError):
        TableOperator(p, [[0]])
    with pytest.raises(ShapeError):
        TableOperator(p, np.full((7, 7), 9))


def test_sup_inf_on_lattice_match_join_meet():
    p = generate_random_lattice(11, 8)
    for a in range(8):
        for b in range(8):
            assert p.sup_of([a, b]) == p.join(a, b)
            assert p.inf_of([a, b]) == p.meet(a, b)
