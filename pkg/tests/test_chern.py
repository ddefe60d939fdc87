from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from detnorm.chern import (H, Y, ChowElement, chern_from_sequence, exclude_cases, expected_chern,
                           line_bundle, series_inverse, series_mul, series_pow, slope)

ONE = [ChowElement.const(1), ChowElement(), ChowElement()]
divisors = st.builds(ChowElement.linear, st.integers(-5, 5), st.integers(-5, 5))


@given(divisors, divisors, st.integers(0, 4))
def test_series_inverse(D, E, k):
    p = series_mul(line_bundle(D), series_pow(line_bundle(E), k))
    assert series_mul(p, series_inverse(p)) == ONE


def test_inverse_needs_unit_constant_term():
    with pytest.raises(ValueError):
        series_inverse([ChowElement.const(2), H, ChowElement()])


@pytest.mark.parametrize("t", range(2, 11))
def test_whitney_product(t):
    # the resolution 0 -> O(Y-2H)^t -> O(-H) + O(Y-H)^(t+1) -> N(-H) -> 0 is exact
    cn = chern_from_sequence(t)
    total = series_mul([ChowElement.const(1), cn.c1, cn.c2], series_pow(line_bundle(Y - 2 * H), t))
    assert total == series_mul(line_bundle(-H), series_pow(line_bundle(Y - H), t + 1))
    want = expected_chern(t)
    assert (cn.c1, cn.c2) == (want.c1, want.c2)


def test_small_t_is_refused():
    with pytest.raises(ValueError):
        chern_from_sequence(1)


@pytest.mark.parametrize("t", range(2, 11))
def test_where_each_case_fails(t):
    rep = exclude_cases(t)
    c1, c2, c3, c4 = rep.cases
    # c_1 = -2Y + 2tH and 4Y - 4H against Y + (t-2)H
    assert c1.c1_mismatch[0] == ("Y", -2, 1)
    assert c4.c1_mismatch[0] == ("Y", 4, 1)
    # the mixed cases share c_1 but c_2 has -2Y^2
    for c in (c2, c3):
        assert not c.c1_mismatch
        assert ("Y^2", -2, 0) in c.c2_mismatch
        assert ("YH", 2 * t + 2, -1) in c.c2_mismatch
        assert c.first_mismatch.startswith("c2")
    assert rep.all_excluded and rep.to_json()["all_excluded"]
    assert "independence" in rep.to_json()["note"]


def test_rendering():
    assert str(expected_chern(3).c2) == "-YH + 4H^2"
    assert str(ChowElement({(2, 0): Fraction(1, 2)})) == "(1/2)H^2"
    assert "case 4" in exclude_cases(2).render()


def test_truncation_above_degree_two():
    assert (H * Y) * H == ChowElement()
    assert (H + Y) ** 3 == ChowElement()


@given(st.integers(1, 6), divisors, divisors)
def test_slopes(rank, c1, D):
    s = slope(c1, rank)
    t = s.twist(D)
    assert t.value == (s.value[0] + D.coeff(0, 1), s.value[1] + D.coeff(1, 0))
    assert slope(rank * c1, rank) == slope(c1, 1)


def test_slope_needs_positive_rank():
    with pytest.raises(ValueError):
        slope(H, 0)
