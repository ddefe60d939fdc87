"""The three-column mapping cone and the maps between the D-complexes.

For 0 <= i <= c the columns are

    Q = D_{i-1}(phi),   P = G* (x) D_i(phi),   F = F* (x) D_i(phi),

with tau = phi* (x) 1.  sigma: Q -> P is a chain map and ell: Q -> F[1] a
homotopy with d_F ell_k + ell_{k-1} d_Q = tau sigma_k.  All maps have closed
forms; the only non-constant entries are the (t-1)-minors in sigma_i, where
the symmetric head of Q meets its dual tail.

Index conventions: ``sigma[k]: Q_k -> P_k``, ``tau[k]: P_k -> F_k`` and
``ell[k]: Q_k -> F_{k+1}``.  The cone sits at positions m >= 0 with term
Q_{m-2} + P_{m-1} + F_m, so F_0 is at position 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .complexes import (BettiTable, ChainComplex, ComplexError, _shape, betti, build_D,
                        minimize, rank_exactness)
from .graded import (GradedFreeModule, GradedMap, block_map, compose, contraction_sign,
                     dual, dual_map, tensor, tensor_map, wedge_sign)
from .minors import Minors
from .ring import Polynomial


class IdentityFailure(ComplexError):
    """A chain-map or homotopy identity does not hold."""

    def __init__(self, name: str, index: int, residual: GradedMap):
        self.name = name
        self.index = index
        self.residual = residual
        super().__init__(f"identity {name} fails at index {index} "
                         f"(residual has {residual.nnz()} nonzero entries)")


def _get(maps: Dict[int, GradedMap], k: int, ring, src, tgt) -> GradedMap:
    f = maps.get(k)
    if f is None:
        return GradedMap.zero(ring, src, tgt)
    return f


@dataclass
class TripleConeInput:
    Q: ChainComplex
    P: ChainComplex
    F: ChainComplex
    sigma: Dict[int, GradedMap]
    tau: Dict[int, GradedMap]
    ell: Dict[int, GradedMap]
    names: Dict[Tuple[str, int], str] = field(default_factory=dict)

    @property
    def ring(self):
        return self.Q.ring

    def _s(self, k):
        return _get(self.sigma, k, self.ring, self.Q.term(k), self.P.term(k))

    def _t(self, k):
        return _get(self.tau, k, self.ring, self.P.term(k), self.F.term(k))

    def _l(self, k):
        return _get(self.ell, k, self.ring, self.Q.term(k), self.F.term(k + 1))

    def top(self) -> int:
        return max(self.Q.hi, self.P.hi, self.F.hi)

    def residuals(self) -> List[Tuple[str, int, GradedMap]]:
        """All identities as (name, index, residual); zero residual means it holds."""
        out = []
        for k in range(0, self.top() + 2):
            # sigma and tau commute with the differentials
            r = compose(self.P.diff(k), self._s(k)) - compose(self._s(k - 1), self.Q.diff(k)) \
                if k >= 1 else None
            if r is not None:
                out.append((self.names.get(("sigma", k), "sigma chain map"), k, r))
                r = compose(self.F.diff(k), self._t(k)) - compose(self._t(k - 1), self.P.diff(k))
                out.append((self.names.get(("tau", k), "tau chain map"), k, r))
            lhs = compose(self.F.diff(k + 1), self._l(k))
            if k >= 1:
                lhs = lhs + compose(self._l(k - 1), self.Q.diff(k))
            r = compose(self._t(k), self._s(k)) - lhs
            out.append((self.names.get(("ell", k), "homotopy"), k, r))
        return out

    def verify(self) -> None:
        for name, k, r in self.residuals():
            if not r.is_zero():
                raise IdentityFailure(name, k, r)

    def failures(self) -> List[Tuple[str, int]]:
        return [(name, k) for name, k, r in self.residuals() if not r.is_zero()]


@dataclass
class ConeComplex:
    complex: ChainComplex
    origin: Dict[int, List[Tuple[str, int, int]]]


def triple_cone(inp: TripleConeInput, verify: bool = True) -> ConeComplex:
    """The total complex with block differential
    [[d_Q, 0, 0], [sigma, -d_P, 0], [ell, -tau, d_F]]."""
    if verify:
        inp.verify()
    ring = inp.ring
    top = inp.top() + 2
    terms: Dict[int, GradedFreeModule] = {}
    origin: Dict[int, List[Tuple[str, int, int]]] = {}
    for m in range(0, top + 1):
        parts = [inp.Q.term(m - 2), inp.P.term(m - 1), inp.F.term(m)]
        tw = []
        orig = []
        for name, k, mod in zip("QPF", (m - 2, m - 1, m), parts):
            tw.extend(mod.twists)
            orig.extend((name, k, j) for j in range(mod.rank))
        terms[m] = GradedFreeModule(tw)
        origin[m] = orig
    d = {}
    for m in range(1, top + 1):
        i = m - 2
        src = [inp.Q.term(i), inp.P.term(i + 1), inp.F.term(i + 2)]
        tgt = [inp.Q.term(i - 1), inp.P.term(i), inp.F.term(i + 1)]
        blocks = {
            (0, 0): inp.Q.diff(i) if i >= 1 else GradedMap.zero(ring, src[0], tgt[0]),
            (1, 0): inp._s(i),
            (1, 1): -inp.P.diff(i + 1),
            (2, 0): inp._l(i),
            (2, 1): -inp._t(i + 1),
            (2, 2): inp.F.diff(i + 2),
        }
        blocks = {key: f for key, f in blocks.items() if f.source.rank and f.target.rank}
        d[m] = block_map(ring, blocks, src, tgt)
    cx = ChainComplex(ring, terms, d, "cone")
    return ConeComplex(cx, origin)


# -- the closed-form maps ----------------------------------------------------------

def _index(mod: GradedFreeModule) -> Dict:
    return {lab: k for k, lab in enumerate(mod.labels)}


def _tensor_dual_labels(left: GradedFreeModule, right: GradedFreeModule) -> GradedFreeModule:
    """dual(left) (x) right with labels (r, label)."""
    m = tensor(dual(left), right)
    return GradedFreeModule(m.twists, [(r, lab) for r in range(left.rank) for lab in right.labels])


def _minus(E: Tuple[int, ...], r: int) -> Tuple[int, ...]:
    e = list(E)
    e[r] -= 1
    return tuple(e)


def _plus(E: Tuple[int, ...], r: int) -> Tuple[int, ...]:
    e = list(E)
    e[r] += 1
    return tuple(e)


def _contract_all(V: Sequence[int], U: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    s = 1
    for v in V:
        e, U = contraction_sign(v, U)
        if e == 0:
            return 0, ()
        s *= e
    return s, U


@dataclass
class DiagramA:
    """The closed-form instance of the cone input, plus its named identities."""

    i: int
    input: TripleConeInput
    identities: Dict[str, bool]
    Qsource: str = "closed"


def sigma_splice(i: int, phi: GradedMap, src: GradedFreeModule, tgt: GradedFreeModule,
                 minors: Minors) -> GradedMap:
    """sigma at the splice level: twisted dual of Lambda^{c-i}F -> G* (x) Lambda^iF.

    y_W* is contracted into the top wedge, giving an element of
    Lambda^{t-1+i}F; for each row r it is then contracted by the product of
    phi*(x_s*) over s != r.  The entries are (t-1)-minors of A avoiding row r,
    with the cofactor sign (-1)^r, and an overall (-1)^(t+1).
    """
    t, N, c, a, b = _shape(phi)
    g = -1 if t % 2 == 0 else 1
    tindex = _index(tgt)
    zero_e = tuple([0] * t)
    ring = phi.ring
    cols = []
    for _, W in src.labels:
        s0, U = _contract_all(W, tuple(range(N)))
        col: Dict[int, Polynomial] = {}
        for r in range(t):
            rows = tuple(s for s in range(t) if s != r)
            for T in combinations(U, t - 1):
                s1, V = _contract_all(T, U)
                m = minors(rows, T)
                if not m.terms:
                    continue
                sign = g * s0 * s1 * (-1 if r % 2 else 1)
                col[tindex[(r, (zero_e, V))]] = m if sign > 0 else -m
        cols.append(col)
    return GradedMap(ring, src, tgt, cols)


def diagram_A(s, i: int, Q: str = "closed", check: bool = True, bound: Optional[int] = None) -> DiagramA:
    """sigma, tau, ell for Q -> P = G*(x)D_i -> F = F*(x)D_i.

    ``s`` is a DetScheme or the matrix phi itself.  With ``Q="closed"`` the
    first column is D_{i-1}(phi) with the closed-form maps; with
    ``Q="truncated"`` (i = 0 only) it is a minimal resolution of Hom_A(M, A)
    computed by strands, and sigma, ell are obtained by lifting.
    """
    phi = getattr(s, "phi", s)
    if Q == "truncated":
        if i != 0:
            raise ValueError("the truncated first column is only available for i = 0")
        return _diagram_A_lifted(s, bound, check)
    if Q != "closed":
        raise ValueError(f"unknown Q source {Q!r}")
    t, N, c, a, b = _shape(phi)
    if not 0 <= i <= c:
        raise ValueError(f"diagram_A needs 0 <= i <= c (got i={i}, c={c})")
    ring = phi.ring
    minors = Minors(ring, phi.to_rows())
    Di = build_D(i, phi, check=False)
    Q = build_D(i - 1, phi, check=False)
    Gm = GradedFreeModule(b)
    Fm = GradedFreeModule(a)
    one = ring.one()

    def P_term(k):
        m = Di.term(k)
        return _tensor_dual_labels(Gm, m) if m.rank else GradedFreeModule([])

    def F_term(k):
        m = Di.term(k)
        return _tensor_dual_labels(Fm, m) if m.rank else GradedFreeModule([])

    # sign of sigma and ell on the dual tail of Q
    eta = -1 if (t + c + i) % 2 else 1
    ks = sorted(Di.terms)
    P = ChainComplex(ring, {k: P_term(k) for k in ks},
                     {k: _relabel(tensor_map(GradedMap.identity(ring, dual(Gm)), f), P_term(k), P_term(k - 1))
                      for k, f in Di.d.items()}, "G*(x)D_i")
    F = ChainComplex(ring, {k: F_term(k) for k in ks},
                     {k: _relabel(tensor_map(GradedMap.identity(ring, dual(Fm)), f), F_term(k), F_term(k - 1))
                      for k, f in Di.d.items()}, "F*(x)D_i")
    phistar = dual_map(phi)
    tau = {k: _relabel(tensor_map(phistar, GradedMap.identity(ring, Di.term(k))), P.term(k), F.term(k))
           for k in ks if Di.term(k).rank}

    sigma: Dict[int, GradedMap] = {}
    ell: Dict[int, GradedMap] = {}
    for k in sorted(Q.terms):
        src = Q.term(k)
        if not src.rank:
            continue
        tgtP = P.term(k)
        tgtF = F.term(k + 1)
        if k <= i - 1:
            # head: m (x) f -> sum_r x_r* (x) x_r m (x) f
            pidx = _index(tgtP)
            cols = []
            for E, U in src.labels:
                cols.append({pidx[(r, (_plus(E, r), U))]: one for r in range(t)})
            sigma[k] = GradedMap(ring, src, tgtP, cols, check=check)
            if tgtF.rank:
                fidx = _index(tgtF)
                cols = []
                for E, U in src.labels:
                    col = {}
                    for j in range(N):
                        s, V = wedge_sign(j, U)
                        if s:
                            col[fidx[(j, (E, V))]] = one if s > 0 else -one
                    cols.append(col)
                ell[k] = GradedMap(ring, src, tgtF, cols, check=check)
        else:
            if k == i:
                if tgtP.rank:
                    sigma[k] = sigma_splice(i, phi, src, tgtP, minors)
            elif tgtP.rank:
                pidx = _index(tgtP)
                cols = []
                for E, V in src.labels:
                    cols.append({pidx[(r, (_minus(E, r), V))]: one.scale(eta) for r in range(t) if E[r] >= 1})
                sigma[k] = GradedMap(ring, src, tgtP, cols, check=check)
            if tgtF.rank:
                fidx = _index(tgtF)
                cols = []
                for E, V in src.labels:
                    col = {}
                    for j in V:
                        s, W = contraction_sign(j, V)
                        col[fidx[(j, (E, W))]] = one.scale(eta) if s > 0 else -one.scale(eta)
                    cols.append(col)
                ell[k] = GradedMap(ring, src, tgtF, cols, check=check)
    inp = TripleConeInput(Q, P, F, sigma, tau, ell, _identity_names(i, Q.hi + 1))
    ids = _named_results(inp) if check else {}
    if check:
        _raise_first(inp)
    return DiagramA(i, inp, ids)


def _identity_names(i: int, top: int) -> Dict[Tuple[str, int], str]:
    """Descriptive names for the identities, keyed by (map, index).

    Q carries its splice between indices i-1 and i, P and F between i and
    i+1; the identities touching sigma_i are the ones that pin the signs.
    """
    names = {}
    for k in range(1, top + 2):
        if k == i:
            names[("sigma", k)] = "sigma commutes across the splice"
        elif k == i + 1:
            names[("sigma", k)] = "sigma commutes above the splice"
        elif k < i:
            names[("sigma", k)] = "sigma commutes (symmetric head)"
        else:
            names[("sigma", k)] = "sigma commutes (dual tail)"
    for k in range(0, top + 2):
        if k == i:
            names[("ell", k)] = "homotopy across the splice"
        elif k == i + 1:
            names[("ell", k)] = "homotopy above the splice"
    return names


def _named_results(inp: TripleConeInput) -> Dict[str, bool]:
    out: Dict[str, bool] = {}
    for name, _, r in inp.residuals():
        out[name] = out.get(name, True) and r.is_zero()
    return out


def _raise_first(inp: TripleConeInput) -> None:
    for name, k, r in inp.residuals():
        if not r.is_zero():
            raise IdentityFailure(name, k, r)


def _relabel(f: GradedMap, src: GradedFreeModule, tgt: GradedFreeModule) -> GradedMap:
    return GradedMap(f.ring, src, tgt, f.cols, check=False)


# -- lifted maps for the Hom(M, A) column -------------------------------------------

def lift_through(d: GradedMap, rhs: GradedMap) -> GradedMap:
    """x with d x = rhs, for d: A -> B and rhs: C -> B maps of free R-modules.

    Solved one generator degree of C at a time on the strand of d.  Raises
    ComplexError if rhs does not factor through d.
    """
    from . import fp
    from .strands import FreeStrandModule, StrandContext, map_columns
    ring = d.ring
    ctx = StrandContext(ring)
    A = FreeStrandModule(ctx, d.source.twists)
    B = FreeStrandModule(ctx, d.target.twists)
    dcols = map_columns(B, d)
    out: List[Dict[int, Polynomial]] = [dict() for _ in range(rhs.source.rank)]
    by_deg: Dict[int, List[int]] = {}
    for j, g in enumerate(rhs.source.twists):
        if rhs.cols[j]:
            by_deg.setdefault(g, []).append(j)
    p = ring.field.p
    for g, js in sorted(by_deg.items()):
        D = A.map_strand(B, dcols, g)
        U = [B.vector(g, rhs.cols[j]) for j in js]
        n = D.shape[1]
        if n == 0:
            raise ComplexError(f"cannot lift in degree {g}: source strand is zero")
        aug = np.concatenate([D, np.stack(U, axis=1)], axis=1)
        E, piv = fp.rref(aug, p)
        if any(q >= n for q in piv):
            raise ComplexError(f"map does not lift through the differential in degree {g}")
        for col, j in enumerate(js):
            x = np.zeros(n)
            for row, q in enumerate(piv):
                x[q] = E[row, n + col]
            out[j] = A.polys(g, x)
    return GradedMap(ring, rhs.source, d.source, out, check=False)


def _diagram_A_lifted(s, bound: Optional[int], check: bool) -> DiagramA:
    from .strands import module_hom_MA, truncated_min_resolution
    phi = s.phi
    t, N, c, a, b = _shape(phi)
    ring = phi.ring
    H = module_hom_MA(s)
    if bound is None:
        bound = max(a) - min(b) + c
    res = truncated_min_resolution(H, bound)
    if not res.terminated:
        raise ComplexError(f"resolution of Hom(M,A) did not terminate within bound {bound}")
    Q = res.complex
    base = diagram_A(phi, 0, check=False).input
    P, F, tau = base.P, base.F, base.tau
    # sigma_0: a generator of Hom(M, A), lifted to G*, viewed in G* (x) D_0 = G*
    P0 = P.term(0)
    sigma = {0: GradedMap(ring, Q.term(0), P0, [dict(g) for g in res.gens], check=False)}
    ell: Dict[int, GradedMap] = {}
    hi = Q.hi
    for k in range(0, hi + 1):
        if k >= 1 and P.term(k).rank:
            rhs = compose(sigma[k - 1], Q.diff(k))
            sigma[k] = lift_through(P.diff(k), rhs)
        tgt = F.term(k + 1)
        if not tgt.rank:
            continue
        rhs = compose(base._t(k), sigma.get(k, GradedMap.zero(ring, Q.term(k), P.term(k))))
        if k >= 1 and k - 1 in ell:
            rhs = rhs - compose(ell[k - 1], Q.diff(k))
        ell[k] = lift_through(F.diff(k + 1), rhs)
    inp = TripleConeInput(Q, P, F, sigma, tau, ell, _identity_names(0, hi + 1))
    ids = _named_results(inp) if check else {}
    if check:
        _raise_first(inp)
    return DiagramA(0, inp, ids, "truncated")


# -- resolutions of Ext^1(M, S_iM) ----------------------------------------------------

@dataclass
class ExtResolution:
    i: int
    complex: ChainComplex
    cone: ConeComplex
    provenance: Dict[str, int]
    nvars: int
    Qsource: str = "closed"

    @property
    def length(self) -> int:
        lo, hi = self.complex.nonzero_range()
        return hi - lo

    @property
    def pd(self) -> int:
        return self.length

    @property
    def depth(self) -> int:
        return self.nvars - self.pd

    def betti(self) -> BettiTable:
        return betti(self.complex)

    def to_json(self) -> Dict:
        return {"i": self.i, "betti": self.betti().to_json(), "length": self.length,
                "depth": self.depth, "cancelled": dict(sorted(self.provenance.items())),
                "first_column": self.Qsource}


def _trim_zero(cx: ChainComplex) -> ChainComplex:
    from .complexes import trim
    return trim(cx)


def ext1_resolution(s, i: int, Q: Optional[str] = None, check: bool = True,
                    bound: Optional[int] = None) -> ExtResolution:
    """Minimal free resolution of Ext^1_R(M, S_iM), from the cone of diagram_A.

    ``provenance`` counts the cancelled summands by origin, as keys like
    "Q_3" or "F_2" (column and index in the cone input).
    """
    phi = getattr(s, "phi", s)
    if Q is None:
        Q = "truncated" if i == 0 and hasattr(s, "phi") else "closed"
    dg = diagram_A(s, i, Q=Q, check=check, bound=bound)
    cone = triple_cone(dg.input, verify=False)
    record: List = []
    mc = minimize(cone.complex, record)
    prov: Dict[str, int] = {}
    for k, col, row in record:
        for m, idx in ((k, col), (k - 1, row)):
            name, q, _ = cone.origin[m][idx]
            key = f"{name}_{q}"
            prov[key] = prov.get(key, 0) + 1
    return ExtResolution(i, _trim_zero(mc), cone, prov, phi.ring.nvars, dg.Qsource)


# -- the Ulrich certificate -------------------------------------------------------------

@dataclass
class UlrichReport:
    t: int
    c: int
    a0_expected: int
    initial_degree: int
    initial_dim: int
    below_dim: int
    betti_totals: List[int]
    pure_linear: bool
    items: Dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.items.values())

    def to_json(self) -> Dict:
        return {"t": self.t, "c": self.c, "a0": self.a0_expected, "initial_degree": self.initial_degree,
                "initial_dim": self.initial_dim, "below_dim": self.below_dim,
                "betti": self.betti_totals, "pure_linear": self.pure_linear, "items": self.items}


def ulrich_certificate(s, ext: Optional[ExtResolution] = None) -> UlrichReport:
    """Check that Ext^1(M, S_{c-1}M) has the Ulrich numbers of a rank-c module.

    With a_j = 1, b_i = 0 the generators sit in degree -1.
    """
    from .complexes import hilbert_from_resolution
    deg = s.degrees
    if not deg.is_linear or any(x != 1 for x in deg.a) or any(x != 0 for x in deg.b):
        raise ValueError("the Ulrich certificate needs a linear matrix with a_j = 1, b_i = 0")
    t, c = deg.t, deg.c
    if ext is None:
        ext = ext1_resolution(s, c - 1)
    a0 = c * comb(t + c - 1, c)
    bt = ext.betti()
    totals = bt.totals()
    lo = min(ext.complex.term(ext.complex.lo).twists)
    hd = hilbert_from_resolution(ext.complex, s.ring.nvars, lo + 1)
    init, below = hd.value(-1), hd.value(-2)
    expected = [comb(c, k) * a0 for k in range(c + 1)]
    items = {
        "initial piece": init == a0 and lo == -1,
        "piece below vanishes": below == 0,
        "pure linear": bt.is_pure_linear(),
        "betti numbers": totals == expected,
    }
    return UlrichReport(t, c, a0, lo, init, below, totals, bt.is_pure_linear(), items)
