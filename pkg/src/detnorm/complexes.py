"""Chain complexes of graded free modules and the determinantal families.

Terms of C_i are written S_p(G) (x) Lambda^q(F) at homological index q,
basis pairs (exponent vector, column tuple) in row-major order.  The tail of
D_i is the twisted dual of C_{c-1-i}: its basis elements are dual basis
vectors of S_k(G) (x) Lambda^q(F), twisted by ell.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import linalg
from .graded import (GradedFreeModule, GradedMap, compose, contraction_sign, dual,
                     dual_map, exterior_basis, symmetric_basis)
from .minors import Minors
from .ring import PointEvaluator, PolyRing, Polynomial


class ComplexError(ValueError):
    """A constructed complex fails d o d = 0 or a degree check."""


class ChainComplex:
    """Terms at indices lo..hi; ``d[k]`` maps term k to term k-1."""

    def __init__(self, ring: PolyRing, terms: Dict[int, GradedFreeModule],
                 d: Dict[int, GradedMap], name: str = ""):
        self.ring = ring
        self.terms = dict(sorted((k, v) for k, v in terms.items()))
        self.d = dict(d)
        self.name = name
        for k, f in self.d.items():
            if f.source != self.term(k) or f.target != self.term(k - 1):
                raise ComplexError(f"differential {k} does not match terms")

    @property
    def lo(self) -> int:
        return min(self.terms) if self.terms else 0

    @property
    def hi(self) -> int:
        return max(self.terms) if self.terms else -1

    def term(self, k: int) -> GradedFreeModule:
        return self.terms.get(k, GradedFreeModule([]))

    def diff(self, k: int) -> GradedMap:
        f = self.d.get(k)
        if f is None:
            return GradedMap.zero(self.ring, self.term(k), self.term(k - 1))
        return f

    def nonzero_range(self) -> Tuple[int, int]:
        ks = [k for k, m in self.terms.items() if m.rank]
        if not ks:
            return (0, -1)
        return (min(ks), max(ks))

    def length(self) -> int:
        lo, hi = self.nonzero_range()
        return max(hi - lo, 0)

    def ranks(self) -> Dict[int, int]:
        return {k: m.rank for k, m in self.terms.items()}

    def check(self) -> None:
        for k in self.terms:
            f, g = self.diff(k), self.diff(k + 1)
            if f.source.rank and g.source.rank and f.target.rank:
                if not compose(f, g).is_zero():
                    raise ComplexError(f"d_{k} o d_{k + 1} != 0 in {self.name or 'complex'}")
            f.check_degrees()

    def __repr__(self):
        return f"ChainComplex({self.name!r}, ranks={self.ranks()})"


# -- bases ------------------------------------------------------------------

def sg_lambda_basis(t: int, N: int, p: int, q: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    if p < 0 or q < 0 or q > N:
        return []
    return [(E, U) for E in symmetric_basis(t, p) for U in exterior_basis(N, q)]


def sg_lambda_module(a: Sequence[int], b: Sequence[int], p: int, q: int) -> GradedFreeModule:
    basis = sg_lambda_basis(len(b), len(a), p, q)
    tw = [sum(e * bi for e, bi in zip(E, b)) + sum(a[j] for j in U) for E, U in basis]
    return GradedFreeModule(tw, basis)


def dual_part_module(a, b, ell: int, k: int, q: int) -> GradedFreeModule:
    """Twisted dual of S_k(G) (x) Lambda^q(F)."""
    m = sg_lambda_module(a, b, k, q)
    return GradedFreeModule([ell - x for x in m.twists], m.labels)


def _shape(phi: GradedMap) -> Tuple[int, int, int, List[int], List[int]]:
    t, N = phi.target.rank, phi.source.rank
    c = N - t + 1
    return t, N, c, list(phi.source.twists), list(phi.target.twists)


# -- differentials ------------------------------------------------------------

def koszul_differential(p: int, q: int, phi: GradedMap) -> GradedMap:
    """S_pG (x) Lambda^qF -> S_{p+1}G (x) Lambda^{q-1}F, m (x) f -> sum_r x_r m (x) phi*(x_r*)(f)."""
    if q < 1 or p < 0:
        raise ValueError("koszul_differential needs q >= 1 and p >= 0")
    t, N, c, a, b = _shape(phi)
    if q > N:
        raise ValueError("q exceeds rank of F")
    src = sg_lambda_module(a, b, p, q)
    tgt = sg_lambda_module(a, b, p + 1, q - 1)
    tindex = {lab: k for k, lab in enumerate(tgt.labels)}
    rows = phi.to_rows()
    cols = []
    for E, U in src.labels:
        col: Dict[int, Polynomial] = {}
        for r in range(t):
            E2 = list(E)
            E2[r] += 1
            E2 = tuple(E2)
            for j in U:
                ent = rows[r][j]
                if not ent.terms:
                    continue
                s, V = contraction_sign(j, U)
                k = tindex[(E2, V)]
                v = ent if s > 0 else -ent
                col[k] = col[k] + v if k in col else v
        cols.append(col)
    return GradedMap(phi.ring, src, tgt, cols)


def build_C(i: int, phi: GradedMap) -> ChainComplex:
    if i < 0:
        raise ValueError("C_i needs i >= 0")
    t, N, c, a, b = _shape(phi)
    terms = {q: sg_lambda_module(a, b, i - q, q) for q in range(0, min(i, N) + 1)}
    d = {q: koszul_differential(i - q, q, phi) for q in range(1, min(i, N) + 1)}
    cx = ChainComplex(phi.ring, terms, d, f"C_{i}")
    return cx


def _top_contraction_sign(V: Tuple[int, ...], N: int) -> Tuple[int, Tuple[int, ...]]:
    """Sign and tuple of the contraction of y_top by y_V* (V contracted in order)."""
    U = tuple(range(N))
    s = 1
    for v in V:
        e, U = contraction_sign(v, U)
        s *= e
    return s, U


def _subset_contraction_sign(T: Tuple[int, ...], U: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    s = 1
    for v in T:
        e, U = contraction_sign(v, U)
        if e == 0:
            return 0, ()
        s *= e
    return s, U


def splice_map(i: int, phi: GradedMap, minors: Optional[Minors] = None) -> GradedMap:
    """eps_i from the twisted dual of Lambda^{c-1-i}F to Lambda^iF.

    The source basis vector y_V* is sent to y_V* contracted into the top
    wedge y_1 ^ ... ^ y_N (an element of Lambda^{t+i}F), and then contracted
    by phi*(x_1*) ^ ... ^ phi*(x_t*); entries are signed maximal minors.
    """
    t, N, c, a, b = _shape(phi)
    if not 0 <= i <= c - 1:
        raise ValueError("splice index out of range")
    if minors is None:
        minors = Minors(phi.ring, phi.to_rows())
    ell = sum(a) - sum(b)
    src = dual_part_module(a, b, ell, 0, c - 1 - i)
    tgt = sg_lambda_module(a, b, 0, i)
    tindex = {lab: k for k, lab in enumerate(tgt.labels)}
    rows_t = tuple(range(t))
    zero_e = tuple([0] * t)
    cols = []
    from itertools import combinations
    for E, V in src.labels:
        s0, U = _top_contraction_sign(V, N)
        col: Dict[int, Polynomial] = {}
        for T in combinations(U, t):
            s1, W = _subset_contraction_sign(T, U)
            m = minors(rows_t, T)
            if not m.terms:
                continue
            col[tindex[(zero_e, W)]] = m if s0 * s1 > 0 else -m
        cols.append(col)
    return GradedMap(phi.ring, src, tgt, cols)


def build_D(i: int, phi: GradedMap, check: bool = True) -> ChainComplex:
    """The spliced complex D_i for -1 <= i <= c (D_c = C_c)."""
    t, N, c, a, b = _shape(phi)
    if i < -1:
        raise ValueError("D_i needs i >= -1")
    if i > c:
        raise ValueError("D_i for i > c is not constructed here")
    ell = sum(a) - sum(b)
    ring = phi.ring
    terms: Dict[int, GradedFreeModule] = {}
    d: Dict[int, GradedMap] = {}
    for q in range(0, i + 1):
        if q <= N:
            terms[q] = sg_lambda_module(a, b, i - q, q)
    for q in range(1, i + 1):
        if q <= N:
            d[q] = koszul_differential(i - q, q, phi)
    if i < c:
        for k in range(0, c - i):
            terms[i + 1 + k] = dual_part_module(a, b, ell, k, c - i - 1 - k)
        for k in range(1, c - i):
            kd = koszul_differential(k - 1, c - i - k, phi)
            tr = dual_map(kd)
            d[i + 1 + k] = GradedMap(ring, terms[i + 1 + k], terms[i + k], tr.cols, check=False)
        if i >= 0:
            d[i + 1] = splice_map(i, phi)
    cx = ChainComplex(ring, terms, d, f"D_{i}")
    if check:
        cx.check()
    return cx


# -- Betti tables and Hilbert data ----------------------------------------------

@dataclass
class BettiTable:
    data: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @classmethod
    def from_complex(cls, cx: ChainComplex) -> "BettiTable":
        data: Dict[Tuple[int, int], int] = {}
        lo = cx.lo
        for k, m in cx.terms.items():
            for tw in m.twists:
                key = (k - lo, tw)
                data[key] = data.get(key, 0) + 1
        return cls(data)

    def __eq__(self, other):
        return isinstance(other, BettiTable) and self.data == other.data

    def totals(self) -> List[int]:
        if not self.data:
            return []
        top = max(i for i, _ in self.data)
        return [sum(v for (i, _), v in self.data.items() if i == k) for k in range(top + 1)]

    def length(self) -> int:
        ks = [i for (i, _), v in self.data.items() if v]
        return max(ks) - min(ks) if ks else 0

    def is_pure_linear(self) -> bool:
        rows = {j - i for (i, j), v in self.data.items() if v}
        return len(rows) <= 1

    def to_json(self) -> Dict:
        return {"betti": sorted([i, j, v] for (i, j), v in self.data.items() if v)}

    def render(self) -> str:
        entries = {k: v for k, v in self.data.items() if v}
        if not entries:
            return "0"
        cols = range(0, max(i for i, _ in entries) + 1)
        rws = sorted({j - i for i, j in entries})
        width = max(len(str(v)) for v in list(entries.values()) + self.totals()) + 1
        lab = max(len(f"{r}:") for r in rws + [0])
        lab = max(lab, len("total:"))
        lines = [" " * lab + "".join(str(i).rjust(width) for i in cols)]
        lines.append("total:".rjust(lab) + "".join(str(v).rjust(width) for v in self.totals()))
        for r in rws:
            row = "".join(str(entries.get((i, i + r), ".")).rjust(width) for i in cols)
            lines.append(f"{r}:".rjust(lab) + row)
        return "\n".join(lines)


def betti(cx: ChainComplex) -> BettiTable:
    return BettiTable.from_complex(cx)


@dataclass
class HilbertData:
    numerator: Dict[int, int]
    nvars: int
    values: Dict[int, int] = field(default_factory=dict)
    assumption: str = "resolution assumed acyclic"

    def value(self, d: int) -> int:
        total = 0
        for j, v in self.numerator.items():
            if d - j >= 0:
                total += v * comb(self.nvars - 1 + d - j, self.nvars - 1)
        return total

    def tabulate(self, lo: int, hi: int) -> Dict[int, int]:
        return {d: self.value(d) for d in range(lo, hi + 1)}

    def degree(self, codim: int) -> int:
        """Multiplicity of a module of the given codimension: h(1) where
        numerator = (1 - z)^codim h(z)."""
        if not self.numerator:
            return 0
        lo = min(self.numerator)
        coeffs = [self.numerator.get(j, 0) for j in range(lo, max(self.numerator) + 1)]
        for _ in range(codim):
            # divide by (1 - z): running sums, the remainder must vanish
            out, acc = [], 0
            for x in coeffs:
                acc += x
                out.append(acc)
            if out[-1] != 0:
                raise ValueError(f"numerator is not divisible by (1 - z)^{codim}")
            coeffs = out[:-1]
        return sum(coeffs)


def hilbert_from_resolution(cx: ChainComplex, nvars: int, bound: int = 10) -> HilbertData:
    num: Dict[int, int] = {}
    lo = cx.lo
    for k, m in cx.terms.items():
        sgn = -1 if (k - lo) % 2 else 1
        for tw in m.twists:
            num[tw] = num.get(tw, 0) + sgn
    num = {j: v for j, v in num.items() if v}
    h = HilbertData(num, nvars)
    start = min(num) if num else 0
    h.values = h.tabulate(start, bound)
    return h


# -- minimization -----------------------------------------------------------------

def minimize(cx: ChainComplex, record: Optional[List] = None) -> ChainComplex:
    """Cancel unit entries until every differential lies in m.

    Pivot choice: smallest (homological index, column, row).  ``record``
    receives (index, column, row) for each cancellation, using the original
    basis numbering of each term.
    """
    ring = cx.ring
    field = ring.field
    ks = sorted(cx.terms)
    twists = {k: list(cx.terms[k].twists) for k in ks}
    alive = {k: [True] * len(twists[k]) for k in ks}
    cols: Dict[int, Dict[int, Dict[int, Polynomial]]] = {}
    rows: Dict[int, Dict[int, Dict[int, Polynomial]]] = {}
    units: Dict[int, set] = {}
    for k in ks:
        f = cx.d.get(k)
        cols[k] = {}
        rows[k] = {}
        units[k] = set()
        if f is None:
            continue
        for j, col in enumerate(f.cols):
            if col:
                cols[k][j] = dict(col)
            for i, e in col.items():
                rows[k].setdefault(i, {})[j] = e
                if e.degree == 0:
                    units[k].add((j, i))

    def set_entry(k, i, j, e):
        if e.terms:
            cols[k].setdefault(j, {})[i] = e
            rows[k].setdefault(i, {})[j] = e
            if e.degree == 0:
                units[k].add((j, i))
            else:
                units[k].discard((j, i))
        else:
            c = cols[k].get(j)
            if c is not None:
                c.pop(i, None)
            r = rows[k].get(i)
            if r is not None:
                r.pop(j, None)
            units[k].discard((j, i))

    def drop_col(k, j):
        if k not in cols:
            return
        col = cols[k].pop(j, {})
        for i in col:
            rows[k][i].pop(j, None)
            units[k].discard((j, i))

    def drop_row(k, i):
        if k not in rows:
            return
        row = rows[k].pop(i, {})
        for j in row:
            cols[k][j].pop(i, None)
            units[k].discard((j, i))

    while True:
        cand = [(k, min(units[k])) for k in ks if units.get(k)]
        if not cand:
            break
        k, (s, r) = min(cand)
        u = cols[k][s][r]
        uinv = field.inv(u.constant_value())
        gamma = {i: e for i, e in cols[k][s].items() if i != r}
        beta = {j: e for j, e in rows[k][r].items() if j != s}
        for i, g in gamma.items():
            gg = g.scale(uinv)
            for j, bb in beta.items():
                upd = gg * bb
                old = cols[k].get(j, {}).get(i)
                new = (old - upd) if old is not None else -upd
                set_entry(k, i, j, new)
        drop_col(k, s)
        drop_row(k, r)
        drop_row(k + 1, s) if (k + 1) in rows else None
        drop_col(k - 1, r) if (k - 1) in cols else None
        alive[k][s] = False
        alive[k - 1][r] = False
        if record is not None:
            record.append((k, s, r))

    newpos = {k: {} for k in ks}
    terms = {}
    for k in ks:
        tw = []
        for idx, ok in enumerate(alive[k]):
            if ok:
                newpos[k][idx] = len(tw)
                tw.append(twists[k][idx])
        terms[k] = GradedFreeModule(tw)
    d = {}
    for k in ks:
        if k not in cx.d or (k - 1) not in terms:
            continue
        newcols = [dict() for _ in range(terms[k].rank)]
        for j, col in cols[k].items():
            if j not in newpos[k]:
                continue
            nc = newcols[newpos[k][j]]
            for i, e in col.items():
                nc[newpos[k - 1][i]] = e
        d[k] = GradedMap(ring, terms[k], terms[k - 1], newcols, check=False)
    return ChainComplex(ring, terms, d, cx.name + " (min)" if cx.name else "")


def trim(cx: ChainComplex) -> ChainComplex:
    """Drop zero terms at both ends."""
    lo, hi = cx.nonzero_range()
    terms = {k: m for k, m in cx.terms.items() if lo <= k <= hi}
    d = {k: f for k, f in cx.d.items() if lo < k <= hi}
    return ChainComplex(cx.ring, terms, d, cx.name)


def dualize_shift(cx: ChainComplex, twist: int) -> ChainComplex:
    """Hom(cx, R(-twist)) with indices reversed onto the same range."""
    lo, hi = cx.lo, cx.hi
    terms = {lo + hi - k: GradedFreeModule([twist - x for x in m.twists]) for k, m in cx.terms.items()}
    d = {}
    for k, f in cx.d.items():
        # d_k: E_k -> E_{k-1} dualizes to E_{k-1}* -> E_k*, i.e. index lo+hi-k+1 -> lo+hi-k
        m = lo + hi - k + 1
        tr = dual_map(f)
        d[m] = GradedMap(cx.ring, terms[m], terms[m - 1], tr.cols, check=False)
    return ChainComplex(cx.ring, terms, d, f"{cx.name}*" if cx.name else "")


def shift_complex(cx: ChainComplex, k: int) -> ChainComplex:
    """Renumber so that old index j sits at j + k."""
    return ChainComplex(cx.ring, {j + k: m for j, m in cx.terms.items()},
                        {j + k: f for j, f in cx.d.items()}, cx.name)


# -- randomized exactness ----------------------------------------------------------

@dataclass
class ExactnessReport:
    ok: bool
    points: int
    seed: int
    prime: Optional[int]
    failures: List[Dict] = field(default_factory=list)

    @property
    def label(self) -> str:
        return f"verified: randomized({self.points} points, field F_{self.prime}, seed {self.seed})"


def _ranks_at(cx: ChainComplex, pt) -> Dict[int, int]:
    field = cx.ring.field
    ev = PointEvaluator(cx.ring, pt)
    out = {}
    for k, f in cx.d.items():
        out[k] = linalg.evaluate_rank(field, f.evaluate(ev), f.target.rank, f.source.rank)
    return out


def rank_exactness(cx: ChainComplex, points: int = 10, seed: int = 0,
                   skip: Iterable[int] = (), jobs: int = 1) -> ExactnessReport:
    """Check rank(d_k) + rank(d_{k+1}) = rank E_k at interior positions and
    injectivity at the left end, at random points over F_p."""
    field = cx.ring.field
    if field.p is None:
        raise ValueError("randomized exactness needs a prime field")
    rng = random.Random(seed)
    pts = [[rng.randrange(field.p) for _ in range(cx.ring.nvars)] for _ in range(points)]
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as ex:
            all_ranks = list(ex.map(lambda p: _ranks_at(cx, p), pts))
    else:
        all_ranks = [_ranks_at(cx, p) for p in pts]
    lo, hi = cx.nonzero_range()
    skip = set(skip)
    failures = []
    for pt, rk in zip(pts, all_ranks):
        for k in range(lo + 1, hi + 1):
            if k in skip:
                continue
            r_in = rk.get(k + 1, 0)
            r_out = rk.get(k, 0)
            if r_in + r_out != cx.term(k).rank:
                failures.append({"index": k, "point": pt, "rank_in": r_in, "rank_out": r_out,
                                 "term_rank": cx.term(k).rank})
    return ExactnessReport(not failures, points, seed, field.p, failures)
