from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import linear
from detnorm import strands as sd
from detnorm.complexes import ChainComplex
from detnorm.fixtures import FIXTURES
from detnorm.graded import GradedFreeModule, GradedMap
from detnorm.ring import PolyRing, SHIFT


def cubic():
    return FIXTURES["twisted-cubic"].scheme()


def test_quotient_dimensions_of_the_twisted_cubic():
    R, A = sd.contexts(cubic())
    for d in range(0, 7):
        assert R.dim(d) == comb(d + 3, 3)
        assert A.dim(d) == 3 * d + 1
    assert sd.module_A(cubic()).hilbert(0, 5) == {d: 3 * d + 1 for d in range(6)}


@settings(max_examples=8)
@given(st.integers(0, 1000), st.integers(1, 4))
def test_standard_monomials_form_an_order_ideal(seed, d):
    s = linear(2, 2, 4, seed)
    _, A = sd.contexts(s)
    ring = s.ring
    std_lo = {ring.monomials(d - 1)[k] for k in A.basis_positions(d - 1)}
    for k in A.basis_positions(d):
        m = ring.monomials(d)[k]
        for v in range(ring.nvars):
            if (m >> (SHIFT * v)) & ((1 << SHIFT) - 1):
                assert m - (1 << (SHIFT * v)) in std_lo


@settings(max_examples=8)
@given(st.integers(0, 1000), st.integers(0, 3), st.integers(0, 4), st.integers(0, 4))
def test_variables_commute_on_the_quotient(seed, d, u, v):
    _, A = sd.contexts(linear(2, 2, 4, seed))
    X = A.mul_var_matrix(u, d + 1) @ A.mul_var_matrix(v, d) % A.p
    Y = A.mul_var_matrix(v, d + 1) @ A.mul_var_matrix(u, d) % A.p
    assert np.array_equal(X, Y)


def test_ext_of_a_hypersurface():
    # Ext^1_R(R/x_0, R) = (R/x_0)(1), Hom vanishes
    R = PolyRing(3)
    x0 = R.gens()[0]
    cx = ChainComplex(R, {0: GradedFreeModule([0]), 1: GradedFreeModule([1])},
                      {1: GradedMap.from_rows(R, GradedFreeModule([1]), GradedFreeModule([0]), [[x0]])})
    N = sd.FreeStrandModule(sd.StrandContext(R), [0])
    degs = range(-3, 4)
    assert sd.ext_dims(cx, N, 0, degs) == {e: 0 for e in degs}
    assert sd.ext_dims(cx, N, 1, degs) == {e: (e + 2 if e >= -1 else 0) for e in degs}


def test_resolution_of_the_cubic_ideal():
    s = cubic()
    res = sd.truncated_min_resolution(sd.module_I(s), sd.default_bound(s), name="I")
    assert res.terminated
    assert [res.complex.term(k).twists for k in range(2)] == [(2, 2, 2), (3, 3)]
    assert res.report.depth == 3  # one more than depth R/I


def test_image_and_kernel_of_a_variable():
    R = sd.StrandContext(PolyRing(3))
    F = sd.FreeStrandModule(R, [0])
    e = np.zeros(1)
    e[0] = 1
    x0R = sd.image(F, [(1, F.mul_var(0, 0) @ e)])
    for d in range(0, 5):
        assert x0R.dim(d) == (R.rdim(d - 1) if d >= 1 else 0)
    K = sd.kernel(F, F, lambda d: F.mul_var(0, d))
    assert all(K.dim(d) == 0 for d in range(4))
    Q = sd.subquotient(sd.image(F, [(0, e)]), x0R)
    assert [Q.dim(d) for d in range(4)] == [comb(d + 1, 1) for d in range(4)]


def test_hilbert_fit():
    fit = sd.fit_hilbert_polynomial({d: 3 * d + 1 for d in range(2, 6)}, 1)
    assert fit.multiplicity == 3
    with pytest.raises(sd.TruncationError):
        sd.fit_hilbert_polynomial({2: 7, 3: 10}, 1)
    with pytest.raises(sd.TruncationError):
        sd.fit_hilbert_polynomial({2: 7, 3: 10, 4: 14}, 1)


def test_snapshot_shapes_are_checked():
    snap = sd.StrandSnapshot(2, {"F": 3, "G": 2}, {"F->G": np.zeros((2, 3))})
    snap.check()
    snap.maps["F->G"] = np.zeros((3, 2))
    with pytest.raises(ValueError):
        snap.check()


def test_default_bound():
    s = linear(2, 3, 5)
    assert sd.default_bound(s) == 2 + 3 - 1
