from math import comb

import pytest
from hypothesis import given, strategies as st

from detnorm.ring import (CoeffField, PointEvaluator, PolyRing, count_monomials, grevlex_key, pack,
                          parse_polynomial, random_form, render, unpack)

R3 = PolyRing(3)
Q3 = PolyRing(3, CoeffField.rationals())


def forms(ring, max_degree=3):
    return st.builds(lambda d, seed: random_form(ring, d, seed),
                     st.integers(1, max_degree), st.integers(0, 10 ** 6))


def test_field_rejects_composite():
    with pytest.raises(ValueError):
        CoeffField(32000)


def test_field_reduces_fractions():
    F = CoeffField(7)
    assert F(3) * F.inv(3) % 7 == 1
    from fractions import Fraction
    assert F(Fraction(1, 2)) == 4


@pytest.mark.parametrize("nvars,d", [(1, 4), (3, 0), (3, 3), (5, 2)])
def test_monomial_count(nvars, d):
    ring = PolyRing(nvars)
    assert len(ring.monomials(d)) == comb(nvars - 1 + d, d) == count_monomials(nvars, d)


def test_monomials_descend_in_grevlex():
    ring = PolyRing(4)
    ms = ring.monomials(3)
    keys = [grevlex_key(m, 4) for m in ms]
    assert keys == sorted(keys, reverse=True)
    assert unpack(ms[0], 4) == (3, 0, 0, 0)
    assert unpack(ms[-1], 4) == (0, 0, 0, 3)


@given(st.lists(st.integers(0, 40), min_size=4, max_size=4))
def test_pack_roundtrip(exps):
    assert unpack(pack(exps), 4) == tuple(exps)


@given(forms(R3), forms(R3), forms(R3))
def test_ring_axioms(f, g, h):
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    if f.degree == g.degree or f.is_zero() or g.is_zero():
        assert (f + g) * h == f * h + g * h
    assert f - f == R3.zero()


@given(forms(R3), forms(R3), st.lists(st.integers(0, 32002), min_size=3, max_size=3))
def test_evaluation_is_a_homomorphism(f, g, pt):
    p = R3.field.p
    assert (f * g).eval(pt) == f.eval(pt) * g.eval(pt) % p
    ev = PointEvaluator(R3, pt)
    assert ev(f) == f.eval(pt)


@given(forms(Q3), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_point_evaluator_over_rationals(f, pt):
    assert PointEvaluator(Q3, pt)(f) == f.eval(pt)


@given(forms(R3))
def test_render_parse_roundtrip(f):
    assert parse_polynomial(R3, render(f)) == f


def test_mixed_degrees_rejected():
    x = R3.gens()
    with pytest.raises(ValueError):
        x[0] + x[1] * x[2]


def test_parse_errors():
    with pytest.raises(ValueError):
        R3.parse("x7")
    with pytest.raises(ValueError):
        R3.parse("")


def test_random_form_is_reproducible():
    assert random_form(R3, 2, 5) == random_form(R3, 2, 5)
    assert random_form(R3, 2, 5) != random_form(R3, 2, 6)
