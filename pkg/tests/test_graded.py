from math import comb

import pytest
from hypothesis import given, strategies as st

from detnorm.graded import (GradedFreeModule, GradedMap, compose, contraction, dual, dual_map,
                            exterior_power, exterior_power_map, symmetric_power, symmetric_power_map,
                            tensor, wedge_multiply)
from detnorm.ring import PolyRing, random_form

R = PolyRing(3)


def linear_map(rows, cols, seed):
    src = GradedFreeModule([1] * cols)
    tgt = GradedFreeModule([0] * rows)
    entries = [[random_form(R, 1, seed * 100 + 10 * i + j) for j in range(cols)] for i in range(rows)]
    return GradedMap.from_rows(R, src, tgt, entries)


@given(st.integers(0, 5), st.integers(0, 5))
def test_exterior_and_symmetric_ranks(r, q):
    m = GradedFreeModule(range(r))
    if q <= r:
        assert exterior_power(m, q).rank == comb(r, q)
    else:
        with pytest.raises(ValueError):
            exterior_power(m, q)
    assert symmetric_power(m, q).rank == (comb(r + q - 1, q) if r else int(q == 0))


def test_twists_add_up():
    m = GradedFreeModule([0, 1, 3])
    assert exterior_power(m, 2).twists == (1, 3, 4)
    assert symmetric_power(m, 2).twists == (0, 1, 3, 2, 4, 6)
    assert tensor(m, dual(m)).twists[:3] == (0, -1, -3)


def test_degree_check_rejects_inhomogeneous_maps():
    src, tgt = GradedFreeModule([2]), GradedFreeModule([0])
    with pytest.raises(ValueError):
        GradedMap.from_rows(R, src, tgt, [[R.gens()[0]]])


@given(st.integers(0, 10 ** 6))
def test_composition_is_associative(seed):
    f = linear_map(2, 3, seed)
    g = GradedMap.from_rows(R, GradedFreeModule([2] * 2), GradedFreeModule([1] * 3),
                            [[random_form(R, 1, seed + 7 * i + j) for j in range(2)] for i in range(3)])
    h = GradedMap.from_rows(R, GradedFreeModule([3]), GradedFreeModule([2] * 2),
                            [[random_form(R, 1, seed + 50 + i)] for i in range(2)])
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


@given(st.integers(0, 10 ** 6))
def test_dual_is_an_involution_and_reverses_composition(seed):
    f = linear_map(2, 3, seed)
    g = GradedMap.from_rows(R, GradedFreeModule([2] * 2), GradedFreeModule([1] * 3),
                            [[random_form(R, 1, seed + 3 * i + j) for j in range(2)] for i in range(3)])
    assert dual_map(dual_map(f)) == f
    assert dual_map(compose(f, g)) == compose(dual_map(g), dual_map(f))


@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_exterior_power_is_functorial(seed, q):
    f = linear_map(3, 3, seed)
    g = GradedMap.from_rows(R, GradedFreeModule([2] * 3), GradedFreeModule([1] * 3),
                            [[random_form(R, 1, seed + 5 * i + j) for j in range(3)] for i in range(3)])
    assert exterior_power_map(compose(f, g), q) == compose(exterior_power_map(f, q),
                                                          exterior_power_map(g, q))


@given(st.integers(0, 10 ** 6))
def test_symmetric_power_is_functorial(seed):
    f = linear_map(2, 2, seed)
    g = GradedMap.from_rows(R, GradedFreeModule([2] * 2), GradedFreeModule([1] * 2),
                            [[random_form(R, 1, seed + 3 * i + j) for j in range(2)] for i in range(2)])
    assert symmetric_power_map(compose(f, g), 2) == compose(symmetric_power_map(f, 2),
                                                           symmetric_power_map(g, 2))


basis_elements = st.lists(st.integers(0, 5), unique=True, max_size=4).map(lambda xs: tuple(sorted(xs)))


@given(basis_elements, st.integers(0, 5), st.integers(0, 5))
def test_wedge_anticommutes(T, y, z):
    f = {T: 1}
    a = wedge_multiply(y, wedge_multiply(z, f))
    b = wedge_multiply(z, wedge_multiply(y, f))
    assert a == {U: -c for U, c in b.items()}


@given(basis_elements, st.integers(0, 5), st.integers(0, 5))
def test_contraction_is_a_derivation(T, j, y):
    # j*(y ^ u) = delta_jy u - y ^ j*(u)
    f = {T: 1}
    lhs = contraction(j, wedge_multiply(y, f))
    rhs = {}
    if j == y:
        rhs[T] = 1
    for U, c in wedge_multiply(y, contraction(j, f)).items():
        rhs[U] = rhs.get(U, 0) - c
    assert lhs == {U: c for U, c in rhs.items() if c}
