import json
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from helpers import linear
from detnorm import checks as ck
from detnorm.complexes import build_D, hilbert_from_resolution, minimize
from detnorm.fixtures import FIXTURES, get_fixture, load_fixture
from detnorm.ring import PolyRing, random_form


def degree(s):
    h = hilbert_from_resolution(minimize(build_D(0, s.phi, check=False)), s.ring.nvars)
    return h.degree(s.c)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_substitution_is_a_ring_map(seed, d):
    R, T = PolyRing(3), PolyRing(2)
    images = [random_form(T, 1, seed + v) for v in range(3)]
    f, g, h = random_form(R, d, seed), random_form(R, 1, seed + 9), random_form(R, d, seed + 11)
    assert ck.substitute(f * g, images, T) == ck.substitute(f, images, T) * ck.substitute(g, images, T)
    assert ck.substitute(f + h, images, T) == ck.substitute(f, images, T) + ck.substitute(h, images, T)


@pytest.mark.parametrize("shape", [(2, 2, 4), (3, 2, 4), (2, 3, 5)])
def test_hyperplane_sections_keep_the_degree(shape):
    s = linear(*shape, seed=3)
    r = ck.hyperplane_restrict(s, seed=1)
    assert r.scheme.n == s.n - 1
    assert degree(s) == degree(r.scheme) == comb(shape[0] + shape[1] - 1, shape[1])


def test_two_restrictions_compose():
    s = linear(2, 2, 5, seed=2)
    first = ck.hyperplane_restrict(s, seed=4)
    second = ck.hyperplane_restrict(first.scheme, seed=5)
    images = ck.compose_restrictions(first, second)
    direct = ck.restrict_by(s, images, second.scheme.ring)
    assert direct.matrix == second.scheme.matrix


def test_restriction_needs_room():
    with pytest.raises(ValueError):
        ck.hyperplane_restrict(linear(2, 2, 2))


@pytest.mark.parametrize("t,c,n", [(2, 2, 4), (2, 2, 5), (2, 3, 6), (3, 2, 5)])
def test_gate_matches_the_generic_depth(t, c, n):
    s = linear(t, c, n)
    expected = min(c + 2, n + 1 - c)
    assert ck.depth_gate(s, expected).passed
    assert not ck.depth_gate(s, expected + 1).passed
    assert ck.depth_gate(s, 3).expected == expected


def test_fixture_expectations():
    for name, fx in FIXTURES.items():
        if fx.expect.get("simple") is None or name.startswith("p4"):
            continue
        v = ck.simplicity_check(fx.scheme())
        assert v.gate == fx.expect["gate"], name
        assert v.simple == fx.expect["simple"], name


def test_the_cubic_ideal_degrees():
    assert ck.ideal_resolution_degrees(FIXTURES["twisted-cubic"].scheme()) == ([2, 2, 2], [3, 3])


def test_ideal_degrees_from_generators_agree():
    s = FIXTURES["p3-curve-122"].scheme()
    assert ck.ideal_resolution_degrees(ring=s.ring, gens=s.minor_ideal_gens) == ck.ideal_resolution_degrees(s)


def test_canonical_shift():
    # K_A is generated where the dual of the last term of D_0, twisted by n + 1, sits:
    # 2x4 linear in P^7 ends in R(-4)^3, so K_A = S_2M(-(8 - 4)); the cubic ends in R(-3)^2
    assert ck.canonical_shift(linear(2, 3, 7)) == 4
    assert ck.canonical_shift(FIXTURES["twisted-cubic"].scheme()) == 1


def test_vanishing_is_not_forced_below_the_gate():
    # depth_J A = 3 < 4: the gate fails and the strand is nonzero
    s = linear(2, 2, 4)
    (v,) = ck.vanishing_suite(s, claims=("hom",))
    assert not v.gate.passed and v.verdict().startswith("gate failed")
    res = ck.conormal_resolution_over_A(s).complex
    from detnorm import strands
    dims = strands.ext_strand(res, strands.module_hom_MA(s), 1, range(-3, 1))
    assert any(dims.values())


def test_vanishing_rejects_unknown_claims():
    with pytest.raises(ValueError):
        ck.vanishing_suite(linear(2, 2, 5), claims=("nope",))


def test_exploration_flags():
    assert not ck.is_exploration(2, 1) and not ck.is_exploration(3, 0)
    assert ck.is_exploration(1, 1) and ck.is_exploration(4, 2) and ck.is_exploration(3, 2)


def test_scan_resumes_after_a_torn_line(tmp_path):
    log = tmp_path / "scan.jsonl"
    first = ck.conjecture_scan([2], [2], [0, 1], out=str(log))
    assert len(first) == 2
    lines = log.read_text().splitlines()
    log.write_text(lines[0] + "\n" + lines[1][: len(lines[1]) // 2])
    again = ck.conjecture_scan([2], [2], [0, 1], out=str(log))
    assert [r["key"] for r in again] == [first[1]["key"]]
    assert again[0]["verdict"] == first[1]["verdict"]
    assert set(ck.read_log(str(log))) == {r["key"] for r in first}
    assert len(log.read_text().splitlines()) == 2  # the torn fragment is gone


def test_scan_records_are_deterministic(tmp_path):
    a = ck.conjecture_scan([2], [2], [1], seeds=[3])
    b = ck.conjecture_scan([2], [2], [1], seeds=[3])
    strip = [ck.dumps_record({k: v for k, v in r.items() if k != "timing"}) for r in a + b]
    assert strip[0] == strip[1]
    rec = json.loads(strip[0])
    assert rec["params"]["bound"] == 0 and rec["verdict"] == "consistent"


def test_fixture_files(tmp_path):
    path = tmp_path / "cubic2.json"
    path.write_text(json.dumps({"grid": [[1, 1, 1], [1, 1, 1]], "n": 3, "expect": {"degree": 3}}))
    fx = load_fixture(str(path))
    assert fx.name == "cubic2" and degree(fx.scheme()) == 3
    assert get_fixture("cubic2", str(tmp_path)).expect == {"degree": 3}
    with pytest.raises(KeyError):
        get_fixture("nope")
