from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from helpers import linear, mixed
from detnorm.complexes import (ChainComplex, ComplexError, build_D, hilbert_from_resolution, minimize,
                               rank_exactness)
from detnorm.cone import (IdentityFailure, TripleConeInput, diagram_A, ext1_resolution, lift_through,
                          triple_cone, ulrich_certificate)
from detnorm.graded import GradedFreeModule, GradedMap, compose
from detnorm.strands import hom_map_is_zero, module_S


@settings(max_examples=6)
@given(st.sampled_from([(2, 2, 3), (3, 2, 3), (2, 3, 3)]), st.integers(0, 500))
def test_identities_hold_for_every_i(shape, seed):
    s = linear(*shape, seed=seed)
    for i in range(0, s.c + 1):
        dg = diagram_A(s, i)
        assert all(dg.identities.values())
        assert "sigma commutes across the splice" in dg.identities or i == 0


def test_identity_names_cover_the_splice():
    dg = diagram_A(linear(2, 2, 3), 1)
    names = set(dg.identities)
    assert {"sigma commutes across the splice", "sigma commutes above the splice",
            "homotopy across the splice", "homotopy above the splice"} <= names


def test_a_broken_sign_is_reported_by_name():
    s = linear(2, 2, 3)
    inp = diagram_A(s, 1, check=False).input
    inp.sigma[1] = inp.sigma[1].scale(-1)
    with pytest.raises(IdentityFailure) as err:
        inp.verify()
    assert "splice" in str(err.value)
    with pytest.raises(IdentityFailure):
        triple_cone(inp, verify=True)


def test_cone_positions():
    s = linear(2, 2, 3)
    dg = diagram_A(s, 1, check=False)
    cone = triple_cone(dg.input, verify=False)
    inp = dg.input
    for m, mod in cone.complex.terms.items():
        assert mod.rank == inp.Q.term(m - 2).rank + inp.P.term(m - 1).rank + inp.F.term(m).rank
    assert cone.origin[0][0][0] == "F"
    cone.complex.check()
    assert rank_exactness(cone.complex, points=4).ok


@pytest.mark.parametrize("shape", [(2, 2, 4), (3, 2, 4), (2, 3, 4)])
def test_ext_resolution_lengths(shape):
    s = linear(*shape)
    c = s.c
    lengths = {i: ext1_resolution(s, i).length for i in range(0, c + 1)}
    assert lengths[c - 1] == c
    assert lengths[c] == c + 2
    assert lengths[0] <= c + 1 and lengths[1] <= c + 1


def test_provenance_counts_cancellations():
    s = linear(2, 2, 4)
    e = ext1_resolution(s, 2)
    cone_total = sum(m.rank for m in e.cone.complex.terms.values())
    kept = sum(m.rank for m in e.complex.terms.values())
    # each cancelled generator is counted once, under the summand it came from
    assert sum(e.provenance.values()) == cone_total - kept
    assert all(k[0] in "QPF" and "_" in k for k in e.provenance)


def test_truncated_and_closed_first_columns_agree():
    s = linear(2, 2, 4)
    a = ext1_resolution(s, 0, Q="truncated")
    b = ext1_resolution(s, 0, Q="closed")
    assert a.betti() == b.betti()
    assert a.Qsource == "truncated" and b.Qsource == "closed"


def test_truncated_column_only_for_i_zero():
    with pytest.raises(ValueError):
        diagram_A(linear(2, 2, 3), 1, Q="truncated")


@pytest.mark.parametrize("t,c,numbers", [(2, 2, [6, 12, 6]), (2, 3, [12, 36, 36, 12]), (3, 2, [12, 24, 12])])
def test_ulrich_numbers(t, c, numbers):
    rep = ulrich_certificate(linear(t, c, c + 1))
    assert rep.ok and rep.betti_totals == numbers
    assert rep.initial_dim == c * comb(t + c - 1, c)


def test_ulrich_needs_linear_entries():
    with pytest.raises(ValueError):
        ulrich_certificate(mixed(2, 2, 3, (1, 1, 2), (0, 0)))


def test_lift_through_solves_and_refuses():
    s = linear(2, 2, 3)
    D0 = build_D(0, s.phi)
    d2 = D0.diff(2)
    # anything of the form d2 x lifts
    x = GradedMap(s.ring, D0.term(2), D0.term(2), [{j: s.ring.one()} for j in range(D0.term(2).rank)])
    rhs = compose(d2, x)
    y = lift_through(d2, rhs)
    assert compose(d2, y) == rhs
    # d1 is not in the image of d2
    with pytest.raises(ComplexError):
        lift_through(d2, GradedMap(s.ring, D0.term(1), D0.term(1),
                                   [{j: s.ring.one()} for j in range(D0.term(1).rank)]))


@pytest.mark.parametrize("build", [lambda: linear(2, 2, 4), lambda: linear(2, 3, 5), lambda: linear(3, 2, 4),
                                   lambda: mixed(2, 2, 3, (1, 1, 2), (0, 0))])
def test_four_term_sequence_hilbert_functions(build):
    # 0 -> S_(c-2)M -> G* x S_(c-1)M -> F* x S_(c-1)M -> Ext^1(M, S_(c-1)M) -> 0
    s = build()
    nv, c = s.ring.nvars, s.c
    S1 = hilbert_from_resolution(minimize(build_D(c - 1, s.phi, check=False)), nv, 12)
    S2 = hilbert_from_resolution(minimize(build_D(c - 2, s.phi, check=False)), nv, 12)
    E = hilbert_from_resolution(ext1_resolution(s, c - 1).complex, nv, 12)
    a, b = s.degrees.a, s.degrees.b
    for d in range(-4, 8):
        alt = (E.value(d) - sum(S1.value(d + x) for x in a)
               + sum(S1.value(d + x) for x in b) - S2.value(d))
        assert alt == 0, d


@pytest.mark.parametrize("shape", [(2, 2, 4), (3, 2, 4), (2, 3, 5)])
def test_second_map_of_M_dies_into_the_top_power(shape):
    s = linear(*shape)
    eps1 = build_D(1, s.phi).diff(2)
    N = module_S(s, s.c - 1)
    assert hom_map_is_zero(eps1, N, range(-4, 4))
    # the first map does not
    assert not hom_map_is_zero(build_D(1, s.phi).diff(1), N, range(-4, 4))


def test_forced_failure_reports_tau():
    # Q = P, sigma = id, ell = 0: the homotopy identity reads tau = 0
    s = linear(2, 2, 3)
    D = build_D(1, s.phi)
    R = s.ring
    ident = {k: GradedMap.identity(R, D.term(k)) for k in D.terms}
    tau = {k: GradedMap.identity(R, D.term(k)) for k in D.terms}
    inp = TripleConeInput(D, D, D, ident, tau, {})
    with pytest.raises(IdentityFailure) as err:
        triple_cone(inp)
    assert err.value.name == "homotopy" and err.value.index == 0
    assert err.value.residual == tau[0]
    assert triple_cone(TripleConeInput(D, D, D, ident, {}, {})).complex.terms


def test_zero_input_gives_the_zero_complex():
    R = linear(2, 2, 3).ring
    Z = ChainComplex(R, {0: GradedFreeModule([])}, {})
    cone = triple_cone(TripleConeInput(Z, Z, Z, {}, {}, {}))
    assert all(m.rank == 0 for m in cone.complex.terms.values())
