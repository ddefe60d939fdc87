"""Graded free modules, degree-checked maps and multilinear algebra.

Conventions fixed here and used everywhere else:

* ``GradedFreeModule(twists)`` is the direct sum of R(-twist) over the list;
  a twist is the degree of the corresponding basis element.
* Exterior power bases are strictly increasing index tuples in lex order.
* Symmetric power bases are exponent vectors in descending lex order
  (x0^2, x0 x1, x1^2, ...), i.e. the order of sorted index multisets.
* Tensor products use row-major order: left factor outer.
* ``wedge_multiply(y, e_T)`` carries the sign (-1)^#{i in T : i < y}, and the
  contraction by y* carries the same sign, so that contraction is a graded
  derivation: y*(u ^ v) = y*(u) ^ v + (-1)^deg(u) u ^ y*(v).
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ring import PointEvaluator, PolyRing, Polynomial

Entries = Dict[Tuple[int, int], Polynomial]


class GradedFreeModule:
    """Ordered list of twists; optional basis labels travel along."""

    __slots__ = ("twists", "labels")

    def __init__(self, twists: Iterable[int], labels: Optional[Sequence] = None):
        self.twists = tuple(int(x) for x in twists)
        if labels is not None and len(labels) != len(self.twists):
            raise ValueError("labels do not match rank")
        self.labels = tuple(labels) if labels is not None else None

    @property
    def rank(self) -> int:
        return len(self.twists)

    def __len__(self):
        return len(self.twists)

    def __eq__(self, other):
        return isinstance(other, GradedFreeModule) and self.twists == other.twists

    def __hash__(self):
        return hash(self.twists)

    def __repr__(self):
        return f"GradedFreeModule({render_twists(self.twists)})"

    def shift(self, k: int) -> "GradedFreeModule":
        """M(-k): every twist raised by k."""
        return GradedFreeModule([t + k for t in self.twists], self.labels)


def render_twists(twists: Sequence[int]) -> str:
    if not twists:
        return "0"
    groups: List[List[int]] = []
    for t in twists:
        if groups and groups[-1][0] == t:
            groups[-1][1] += 1
        else:
            groups.append([t, 1])
    parts = []
    for t, k in groups:
        base = "R" if t == 0 else f"R({-t})"
        parts.append(base if k == 1 else f"{base}^{k}")
    return " ++ ".join(parts)


def direct_sum(*mods: GradedFreeModule) -> GradedFreeModule:
    tw: List[int] = []
    for m in mods:
        tw.extend(m.twists)
    return GradedFreeModule(tw)


def dual(m: GradedFreeModule) -> GradedFreeModule:
    return GradedFreeModule([-t for t in m.twists], m.labels)


def tensor(m1: GradedFreeModule, m2: GradedFreeModule) -> GradedFreeModule:
    labels = None
    if m1.labels is not None and m2.labels is not None:
        labels = [(a, b) for a in m1.labels for b in m2.labels]
    return GradedFreeModule([s + t for s in m1.twists for t in m2.twists], labels)


def exterior_basis(rank: int, q: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(rank), q))


def symmetric_basis(rank: int, p: int) -> List[Tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(rank), p):
        e = [0] * rank
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def exterior_power(m: GradedFreeModule, q: int) -> GradedFreeModule:
    if not 0 <= q <= m.rank:
        raise ValueError(f"exterior power {q} out of range for rank {m.rank}")
    basis = exterior_basis(m.rank, q)
    return GradedFreeModule([sum(m.twists[i] for i in T) for T in basis], basis)


def symmetric_power(m: GradedFreeModule, p: int) -> GradedFreeModule:
    if p < 0:
        raise ValueError("negative symmetric power")
    basis = symmetric_basis(m.rank, p)
    return GradedFreeModule([sum(e * t for e, t in zip(E, m.twists)) for E in basis], basis)


# -- exterior algebra elements: dict sorted-tuple -> coefficient ------------

def wedge_multiply(y: int, f: Dict[Tuple[int, ...], object]) -> Dict[Tuple[int, ...], object]:
    out: Dict[Tuple[int, ...], object] = {}
    for T, c in f.items():
        if y in T:
            continue
        k = sum(1 for i in T if i < y)
        U = T[:k] + (y,) + T[k:]
        v = -c if k % 2 else c
        out[U] = out.get(U, 0) + v
    return {U: c for U, c in out.items() if c}


def contraction(j: int, f: Dict[Tuple[int, ...], object]) -> Dict[Tuple[int, ...], object]:
    out: Dict[Tuple[int, ...], object] = {}
    for T, c in f.items():
        if j not in T:
            continue
        k = T.index(j)
        U = T[:k] + T[k + 1:]
        v = -c if k % 2 else c
        out[U] = out.get(U, 0) + v
    return {U: c for U, c in out.items() if c}


def wedge_sign(y: int, T: Tuple[int, ...]) -> Tuple[int, Optional[Tuple[int, ...]]]:
    """Sign and result tuple of y ^ e_T (sign 0 when y is in T)."""
    if y in T:
        return 0, None
    k = sum(1 for i in T if i < y)
    return (-1 if k % 2 else 1), T[:k] + (y,) + T[k:]


def contraction_sign(j: int, T: Tuple[int, ...]) -> Tuple[int, Optional[Tuple[int, ...]]]:
    if j not in T:
        return 0, None
    k = T.index(j)
    return (-1 if k % 2 else 1), T[:k] + T[k + 1:]


class GradedMap:
    """Sparse polynomial matrix between graded free modules.

    ``cols[j]`` maps target row index to the (nonzero) entry in column j.
    """

    __slots__ = ("ring", "source", "target", "cols")

    def __init__(self, ring: PolyRing, source: GradedFreeModule, target: GradedFreeModule,
                 cols: Optional[List[Dict[int, Polynomial]]] = None, check: bool = True):
        self.ring = ring
        self.source = source
        self.target = target
        if cols is None:
            cols = [dict() for _ in range(source.rank)]
        if len(cols) != source.rank:
            raise ValueError("column count does not match source rank")
        self.cols = [{i: e for i, e in col.items() if e.terms} for col in cols]
        if check:
            self.check_degrees()

    @classmethod
    def from_entries(cls, ring, source, target, entries: Entries, check: bool = True) -> "GradedMap":
        cols: List[Dict[int, Polynomial]] = [dict() for _ in range(source.rank)]
        for (i, j), e in entries.items():
            if not 0 <= i < target.rank or not 0 <= j < source.rank:
                raise IndexError((i, j))
            if e.terms:
                cols[j][i] = cols[j][i] + e if i in cols[j] else e
        return cls(ring, source, target, cols, check)

    @classmethod
    def from_rows(cls, ring, source, target, rows: Sequence[Sequence[Polynomial]], check=True):
        ent = {(i, j): rows[i][j] for i in range(len(rows)) for j in range(len(rows[i]))}
        return cls.from_entries(ring, source, target, ent, check)

    @classmethod
    def identity(cls, ring, module: GradedFreeModule) -> "GradedMap":
        one = ring.one()
        return cls(ring, module, module, [{j: one} for j in range(module.rank)], check=False)

    @classmethod
    def zero(cls, ring, source, target) -> "GradedMap":
        return cls(ring, source, target, None, check=False)

    # -- basic access ---------------------------------------------------------
    @property
    def shape(self) -> Tuple[int, int]:
        return (self.target.rank, self.source.rank)

    def entry(self, i: int, j: int) -> Polynomial:
        return self.cols[j].get(i, self.ring.zero())

    def entries(self) -> Iterable[Tuple[int, int, Polynomial]]:
        for j, col in enumerate(self.cols):
            for i, e in col.items():
                yield i, j, e

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def to_rows(self) -> List[List[Polynomial]]:
        z = self.ring.zero()
        rows = [[z] * self.source.rank for _ in range(self.target.rank)]
        for i, j, e in self.entries():
            rows[i][j] = e
        return rows

    def check_degrees(self):
        st, tt = self.source.twists, self.target.twists
        for j, col in enumerate(self.cols):
            for i, e in col.items():
                if e.degree != st[j] - tt[i]:
                    raise ValueError(
                        f"entry ({i},{j}) has degree {e.degree}, expected {st[j] - tt[i]}")

    # -- algebra ----------------------------------------------------------------
    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        return compose(self, other)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        if self.source != other.source or self.target != other.target:
            raise ValueError("shape/twist mismatch in sum")
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            for i, e in b.items():
                c[i] = c[i] + e if i in c else e
            cols.append(c)
        return GradedMap(self.ring, self.source, self.target, cols, check=False)

    def __neg__(self) -> "GradedMap":
        return GradedMap(self.ring, self.source, self.target,
                         [{i: -e for i, e in c.items()} for c in self.cols], check=False)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + (-other)

    def scale(self, c) -> "GradedMap":
        return GradedMap(self.ring, self.source, self.target,
                         [{i: e.scale(c) for i, e in col.items()} for col in self.cols], check=False)

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.cols == other.cols)

    def __repr__(self):
        return f"GradedMap({self.target.rank}x{self.source.rank}, nnz={self.nnz()})"

    def transpose(self) -> "GradedMap":
        return dual_map(self)

    def evaluate(self, point) -> List[Tuple[int, int, object]]:
        """Entries at a point; ``point`` may be a PointEvaluator to share its cache."""
        ev = point if isinstance(point, PointEvaluator) else PointEvaluator(self.ring, point)
        return [(i, j, e.eval_with(ev)) for i, j, e in self.entries()]

    def select(self, rows: Sequence[int], cols: Sequence[int]) -> "GradedMap":
        """Submatrix on given target rows and source columns (renumbered)."""
        rpos = {r: k for k, r in enumerate(rows)}
        src = GradedFreeModule([self.source.twists[j] for j in cols])
        tgt = GradedFreeModule([self.target.twists[i] for i in rows])
        new = []
        for j in cols:
            new.append({rpos[i]: e for i, e in self.cols[j].items() if i in rpos})
        return GradedMap(self.ring, src, tgt, new, check=False)


def compose(f: GradedMap, g: GradedMap) -> GradedMap:
    """f after g."""
    if g.target != f.source:
        raise ValueError("non-composable maps (twist mismatch)")
    out = []
    fcols = f.cols
    for col in g.cols:
        acc: Dict[int, Polynomial] = {}
        for j, gij in col.items():
            for i, fij in fcols[j].items():
                prod = fij * gij
                if i in acc:
                    acc[i] = acc[i] + prod
                else:
                    acc[i] = prod
        out.append(acc)
    return GradedMap(f.ring, g.source, f.target, out, check=False)


def dual_map(f: GradedMap) -> GradedMap:
    cols: List[Dict[int, Polynomial]] = [dict() for _ in range(f.target.rank)]
    for i, j, e in f.entries():
        cols[i][j] = e
    return GradedMap(f.ring, dual(f.target), dual(f.source), cols, check=False)


def tensor_map(f: GradedMap, g: GradedMap) -> GradedMap:
    src = tensor(f.source, g.source)
    tgt = tensor(f.target, g.target)
    nc, nd = g.source.rank, g.target.rank
    cols: List[Dict[int, Polynomial]] = [dict() for _ in range(src.rank)]
    for a in range(f.source.rank):
        for c in range(nc):
            col = cols[a * nc + c]
            for b, fe in f.cols[a].items():
                for d, ge in g.cols[c].items():
                    col[b * nd + d] = fe * ge
    return GradedMap(f.ring, src, tgt, cols, check=False)


def block_map(ring: PolyRing, blocks: Dict[Tuple[int, int], GradedMap],
              sources: Sequence[GradedFreeModule], targets: Sequence[GradedFreeModule]) -> GradedMap:
    """Assemble a block matrix; block (r, s) maps sources[s] -> targets[r]."""
    src = direct_sum(*sources)
    tgt = direct_sum(*targets)
    soff = [0]
    for m in sources:
        soff.append(soff[-1] + m.rank)
    toff = [0]
    for m in targets:
        toff.append(toff[-1] + m.rank)
    cols: List[Dict[int, Polynomial]] = [dict() for _ in range(src.rank)]
    for (r, s), blk in blocks.items():
        if blk.source != sources[s] or blk.target != targets[r]:
            raise ValueError(f"block ({r},{s}) has wrong twists")
        for j, col in enumerate(blk.cols):
            dest = cols[soff[s] + j]
            for i, e in col.items():
                dest[toff[r] + i] = e
    return GradedMap(ring, src, tgt, cols, check=False)


def exterior_power_map(f: GradedMap, q: int) -> GradedMap:
    """Lambda^q f; entries are q x q minors of f."""
    from .minors import minor_table

    src = exterior_power(f.source, q)
    tgt = exterior_power(f.target, q)
    rows = f.to_rows()
    tbasis = tgt.labels
    cols = []
    for S in src.labels:
        col = {}
        for k, T in enumerate(tbasis):
            e = minor_table(f.ring, rows, T, S)
            if e.terms:
                col[k] = e
        cols.append(col)
    return GradedMap(f.ring, src, tgt, cols, check=False)


def symmetric_power_map(f: GradedMap, p: int) -> GradedMap:
    src = symmetric_power(f.source, p)
    tgt = symmetric_power(f.target, p)
    tindex = {E: k for k, E in enumerate(tgt.labels)}
    ring = f.ring
    cols = []
    for E in src.labels:
        # expand the product of images of the source basis elements
        acc: Dict[Tuple[int, ...], Polynomial] = {tuple([0] * f.target.rank): ring.one()}
        for j, e in enumerate(E):
            for _ in range(e):
                new: Dict[Tuple[int, ...], Polynomial] = {}
                for mono, coeff in acc.items():
                    for i, entry in f.cols[j].items():
                        m2 = list(mono)
                        m2[i] += 1
                        m2 = tuple(m2)
                        v = coeff * entry
                        new[m2] = new[m2] + v if m2 in new else v
                acc = new
        cols.append({tindex[m]: c for m, c in acc.items() if c.terms})
    return GradedMap(ring, src, tgt, cols, check=False)


def rank_of_exterior(r: int, q: int) -> int:
    return comb(r, q) if 0 <= q <= r else 0
