from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from helpers import linear, mixed
from detnorm.complexes import (BettiTable, ComplexError, betti, build_C, build_D, dualize_shift,
                               hilbert_from_resolution, minimize, rank_exactness)
from detnorm.fixtures import FIXTURES

small_shapes = st.sampled_from([(2, 1, 2), (2, 2, 3), (3, 2, 3), (2, 3, 3), (3, 1, 3)])


@settings(max_examples=10)
@given(small_shapes, st.integers(0, 1000))
def test_every_D_i_is_a_complex(shape, seed):
    s = linear(*shape, seed=seed)
    for i in range(-1, s.c + 1):
        build_D(i, s.phi, check=True)
    for i in range(0, s.c + 1):
        build_C(i, s.phi).check()


def test_twisted_cubic_betti_table():
    s = FIXTURES["twisted-cubic"].scheme()
    b = betti(minimize(build_D(0, s.phi)))
    assert b.data == {(0, 0): 1, (1, 2): 3, (2, 3): 2}
    assert b.render().splitlines()[1].split() == ["total:", "1", "3", "2"]


@pytest.mark.parametrize("t,c", [(2, 2), (3, 2), (2, 3)])
def test_eagon_northcott_ranks(t, c):
    s = linear(t, c, c + 1)
    D0 = build_D(0, s.phi)
    N = t + c - 1
    assert D0.term(0).rank == 1
    for k in range(1, c + 1):
        assert D0.term(k).rank == comb(N, t + k - 1) * comb(t + k - 2, k - 1)


@settings(max_examples=10)
@given(small_shapes, st.integers(0, 1000))
def test_alternating_rank_sum_vanishes(shape, seed):
    # every D_i resolves a module of positive codimension
    s = linear(*shape, seed=seed)
    for i in range(0, s.c + 1):
        cx = build_D(i, s.phi, check=False)
        assert sum((-1) ** k * m.rank for k, m in cx.terms.items()) == 0


@settings(max_examples=8)
@given(small_shapes, st.integers(0, 1000))
def test_minimize_keeps_hilbert_function(shape, seed):
    s = linear(*shape, seed=seed)
    for i in range(0, s.c + 1):
        cx = build_D(i, s.phi, check=False)
        h1 = hilbert_from_resolution(cx, s.ring.nvars, 6)
        h2 = hilbert_from_resolution(minimize(cx), s.ring.nvars, 6)
        assert h1.tabulate(-2, 6) == h2.tabulate(-2, 6)


def test_minimize_cancels_units_in_mixed_case():
    s = mixed(2, 2, 3, (1, 1, 2), (0, 0))
    cx = build_D(2, s.phi)
    mc = minimize(cx)
    for k, f in mc.d.items():
        assert all(e.degree and e.degree > 0 for _, _, e in f.entries())
    assert sum(m.rank for m in mc.terms.values()) <= sum(m.rank for m in cx.terms.values())


def test_duality_between_D_0_and_D_c_minus_1():
    s = linear(2, 2, 3)
    K = betti(dualize_shift(minimize(build_D(0, s.phi)), s.n + 1))
    D1 = betti(minimize(build_D(1, s.phi)))
    shift = min(j for (i, j) in K.data if i == 0) - min(j for (i, j) in D1.data if i == 0)
    assert {(i, j - shift): v for (i, j), v in K.data.items()} == D1.data


def test_exactness_and_its_failure():
    s = linear(2, 2, 4)
    D0 = build_D(0, s.phi)
    assert rank_exactness(D0, points=5).ok
    # the Koszul complex on the minors is not exact for three quadrics in codim 2
    from detnorm.graded import GradedFreeModule, GradedMap
    ring = s.ring
    gens = s.minor_ideal_gens
    f = GradedMap.from_rows(ring, GradedFreeModule([2] * 3), GradedFreeModule([0]), [gens])
    from detnorm.complexes import ChainComplex
    bad = ChainComplex(ring, {0: f.target, 1: f.source}, {1: f})
    rep = rank_exactness(bad, points=3)
    assert not rep.ok and rep.failures[0]["index"] == 1


def test_d_squared_check_catches_errors():
    s = linear(2, 2, 3)
    cx = build_D(0, s.phi)
    cx.d[2] = cx.d[2].scale(1)
    broken = cx.d[1]
    from detnorm.graded import GradedMap
    cols = [dict(c) for c in broken.cols]
    k = next(iter(cols[0]))
    cols[0][k] = cols[0][k] + s.minor_ideal_gens[1]
    cx.d[1] = GradedMap(s.ring, broken.source, broken.target, cols)
    with pytest.raises(ComplexError):
        cx.check()


def test_hilbert_degree():
    s = linear(3, 2, 4)
    h = hilbert_from_resolution(minimize(build_D(0, s.phi)), 5)
    assert h.degree(2) == comb(4, 2)
    with pytest.raises(ValueError):
        h.degree(4)


def test_betti_table_json_is_sorted():
    b = BettiTable({(1, 2): 3, (0, 0): 1})
    assert b.to_json() == {"betti": [[0, 0, 1], [1, 2, 3]]}
    assert b.totals() == [1, 3] and b.length() == 1
