from math import comb

import pytest
from hypothesis import given, strategies as st

from detnorm.detinput import (DegreeError, DegreeMatrix, build_matrix, degrees_from_grid,
                              expected_depth_J, expected_invariants, parse_grid, scheme_from_entries,
                              submaximal_minors)
from detnorm.ring import PolyRing


@st.composite
def degree_data(draw):
    t = draw(st.integers(1, 3))
    c = draw(st.integers(1, 3))
    b = sorted(draw(st.lists(st.integers(0, 2), min_size=t, max_size=t)))
    b = [x - b[0] for x in b]
    a = sorted(draw(st.lists(st.integers(max(b) + 1, max(b) + 3), min_size=t + c - 1, max_size=t + c - 1)))
    return t, c, a, b


@given(degree_data())
def test_grid_roundtrip(data):
    t, c, a, b = data
    deg = DegreeMatrix(t, c, c + 1, tuple(a), tuple(b))
    a2, b2 = degrees_from_grid(deg.grid())
    assert (tuple(sorted(a2)), tuple(sorted(b2))) == (deg.a, deg.b)


def test_grid_errors_name_the_place():
    with pytest.raises(DegreeError, match="row 1"):
        degrees_from_grid([[1, 1, 2], [1, 2]])
    with pytest.raises(DegreeError, match="row 1, column 2"):
        degrees_from_grid([[1, 1, 2], [1, 1, 3]])
    with pytest.raises(DegreeError, match="row 1"):
        parse_grid("1 1 2\n1 x 2")
    with pytest.raises(DegreeError, match="<= 0"):
        DegreeMatrix(2, 2, 3, (1, 1, 1), (0, 1))


def test_shape_checks():
    with pytest.raises(DegreeError):
        DegreeMatrix(2, 3, 2, (1, 1, 1, 1), (0, 0))
    with pytest.raises(DegreeError):
        DegreeMatrix(2, 2, 3, (1, 1), (0, 0))


@pytest.mark.parametrize("t,c,n", [(2, 2, 3), (3, 2, 4), (2, 3, 4)])
def test_generic_linear_minors(t, c, n):
    s = build_matrix(DegreeMatrix.linear(t, c, n), seed=1)
    gens = s.minor_ideal_gens
    assert len(gens) == comb(t + c - 1, t)
    assert all(f.degree == t for f in gens)
    assert s.minor_degrees() == [t] * len(gens)
    assert expected_invariants(s.degrees)["deg_linear_case"] == comb(t + c - 1, c)


def test_seeds_are_reproducible():
    d = DegreeMatrix.linear(2, 2, 3)
    assert build_matrix(d, seed=3).matrix == build_matrix(d, seed=3).matrix
    assert build_matrix(d, seed=3).matrix != build_matrix(d, seed=4).matrix


def test_explicit_entries():
    ring = PolyRing(4)
    s = scheme_from_entries(ring, [["x0", "x1", "x2"], ["x1", "x2", "x3"]])
    assert (s.t, s.c, s.n) == (2, 2, 3)
    assert str(s.minor((0, 1))) in ("x0*x2 - x1^2", "-x1^2 + x0*x2")
    assert len(submaximal_minors(s)) == 6


def test_expected_depth():
    assert expected_depth_J(DegreeMatrix.linear(2, 2, 4)) == 3
    assert expected_depth_J(DegreeMatrix.linear(2, 2, 7)) == 4
    assert expected_depth_J(DegreeMatrix.linear(2, 3, 7)) == 5
