"""Graded modules realized one internal degree at a time.

Every module here is a :class:`StrandModule`: for each degree d it knows the
dimension of its degree-d piece over F_p, how each variable acts
(``apply_var``), and how to move between its own coordinates and those of an
ambient graded free module.  Nothing beyond dense linear algebra is used; in
particular there are no Groebner bases.

The base ring is either R = K[x_0..x_n] or A = R/I (a :class:`StrandContext`
with an ideal).  A_d is realized as R_d modulo I_d; its basis is the set of
monomials that are not pivots of the reduced echelon form of I_d.

Coordinates: the degree-d piece of a free module sum_j B(-g_j) is the direct
sum of B_{d-g_j} in generator order, monomials in the ring's order inside each
block.  A submodule keeps a basis matrix B_d (rows, in parent coordinates)
with B_d[:, piv] = identity, so coordinates of its elements are read off at
the pivot columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import fp
from .complexes import ChainComplex
from .graded import GradedFreeModule, GradedMap
from .ring import SHIFT, PolyRing, Polynomial, unpack


class TruncationError(ValueError):
    """The degree window is too small for the requested computation."""


# -- the base ring -----------------------------------------------------------------

class StrandContext:
    """R, or R/ideal, one degree at a time over a prime field."""

    def __init__(self, ring: PolyRing, ideal: Optional[Sequence[Polynomial]] = None, name: str = ""):
        if ring.field.p is None:
            raise ValueError("strand computations need a prime field")
        self.ring = ring
        self.p = ring.field.p
        self.ideal = None if ideal is None else [f for f in ideal if f.terms]
        self.name = name or ("A" if ideal is not None else "R")
        self._var: Dict[int, np.ndarray] = {}
        self._first: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self._mono: Dict[Tuple[int, int], np.ndarray] = {}
        self._quo: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self._avar: Dict[Tuple[int, int], np.ndarray] = {}

    @property
    def is_quotient(self) -> bool:
        return self.ideal is not None

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    def rdim(self, d: int) -> int:
        return self.ring.dim(d)

    # monomial bookkeeping in R
    def var_index(self, d: int) -> np.ndarray:
        """(nvars, dim R_d) array: position of x_v * m in R_{d+1}."""
        arr = self._var.get(d)
        if arr is None:
            mons = self.ring.monomials(d)
            idx = self.ring.monomial_index(d + 1)
            arr = np.empty((self.nvars, len(mons)), dtype=np.int64)
            for v in range(self.nvars):
                s = 1 << (SHIFT * v)
                arr[v] = [idx[m + s] for m in mons]
            self._var[d] = arr
        return arr

    def first_var(self, d: int) -> Tuple[np.ndarray, np.ndarray]:
        """For each monomial of degree d >= 1: its lowest variable v and the
        position of m / x_v in R_{d-1}."""
        out = self._first.get(d)
        if out is None:
            mons = self.ring.monomials(d)
            idx = self.ring.monomial_index(d - 1)
            vs = np.empty(len(mons), dtype=np.int64)
            pred = np.empty(len(mons), dtype=np.int64)
            for k, m in enumerate(mons):
                e = unpack(m, self.nvars)
                v = next(i for i, x in enumerate(e) if x)
                vs[k] = v
                pred[k] = idx[m - (1 << (SHIFT * v))]
            out = (vs, pred)
            self._first[d] = out
        return out

    def mono_index(self, m: int, d: int) -> np.ndarray:
        """Position of m * u in R_{d + deg m} for each monomial u of degree d."""
        key = (m, d)
        out = self._mono.get(key)
        if out is None:
            cur = np.arange(self.rdim(d))
            deg = d
            for v, e in enumerate(unpack(m, self.nvars)):
                for _ in range(e):
                    cur = self.var_index(deg)[v][cur]
                    deg += 1
            out = cur
            self._mono[key] = out
        return out

    # the quotient A = R/I
    def _quotient(self, d: int) -> Tuple[np.ndarray, np.ndarray]:
        """(free, P): basis monomials of A_d and the projection R_d -> A_d."""
        out = self._quo.get(d)
        if out is None:
            N = self.rdim(d)
            blocks = []
            for f in self.ideal:
                e = f.degree
                if e > d:
                    continue
                k = self.rdim(d - e)
                rows = np.zeros((k, N))
                for m, c in f.terms.items():
                    rows[np.arange(k), self.mono_index(m, d - e)] = int(c) % self.p
                blocks.append(rows)
            if blocks:
                E, piv = fp.rref(np.concatenate(blocks), self.p)
            else:
                E, piv = np.zeros((0, N)), []
            mask = np.ones(N, dtype=bool)
            mask[list(piv)] = False
            free = np.nonzero(mask)[0]
            P = np.zeros((len(free), N))
            P[np.arange(len(free)), free] = 1
            if len(piv):
                P[:, piv] = fp.red(-E[:, free].T, self.p)
            out = (free, P)
            self._quo[d] = out
        return out

    def dim(self, d: int) -> int:
        if d < 0:
            return 0
        if self.ideal is None:
            return self.rdim(d)
        return len(self._quotient(d)[0])

    def basis_positions(self, d: int) -> np.ndarray:
        """Positions in R_d of the basis monomials of B_d."""
        if self.ideal is None:
            return np.arange(self.rdim(d))
        return self._quotient(d)[0]

    def mul_var_matrix(self, v: int, d: int) -> np.ndarray:
        """Dense matrix of x_v: A_d -> A_{d+1} (quotient case only)."""
        key = (v, d)
        M = self._avar.get(key)
        if M is None:
            free, _ = self._quotient(d)
            _, P = self._quotient(d + 1)
            M = P[:, self.var_index(d)[v][free]]
            self._avar[key] = M
        return M

    def apply_var(self, v: int, d: int, V: np.ndarray) -> np.ndarray:
        """x_v * V for V of shape (dim B_d, k)."""
        k = V.shape[1]
        if d < 0:
            return np.zeros((self.dim(d + 1), k))
        if self.ideal is None:
            out = np.zeros((self.rdim(d + 1), k))
            out[self.var_index(d)[v]] = V
            return out
        return fp.red(self.mul_var_matrix(v, d) @ V, self.p)

    def coords(self, f: Polynomial, d: int) -> np.ndarray:
        """Coordinate vector of a homogeneous polynomial of degree d (or zero)."""
        vec = np.zeros(self.rdim(d))
        if f.terms:
            if f.degree != d:
                raise ValueError(f"expected degree {d}, got {f.degree}")
            idx = self.ring.monomial_index(d)
            for m, c in f.terms.items():
                vec[idx[m]] = int(c) % self.p
        if self.ideal is None:
            return vec
        return fp.red(self._quotient(d)[1] @ vec, self.p)

    def polynomial(self, vec: np.ndarray, d: int) -> Polynomial:
        """A representative polynomial of a coordinate vector."""
        mons = self.ring.monomials(d)
        pos = self.basis_positions(d)
        terms = {}
        for j in np.nonzero(vec)[0]:
            terms[mons[pos[j]]] = int(vec[j])
        return Polynomial(self.ring, terms)


# -- modules ------------------------------------------------------------------------

class StrandModule:
    """Common interface; subclasses provide dim, apply_var, lift and coords."""

    ctx: StrandContext
    name: str = ""
    lo: int = 0

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def ambient(self) -> "FreeStrandModule":
        raise NotImplementedError

    def dim(self, d: int) -> int:
        raise NotImplementedError

    def apply_var(self, v: int, d: int, V: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def lift(self, d: int, V: np.ndarray) -> np.ndarray:
        """Module coordinates -> ambient coordinates."""
        raise NotImplementedError

    def coords(self, d: int, W: np.ndarray) -> np.ndarray:
        """Ambient coordinates of module elements -> module coordinates."""
        raise NotImplementedError

    # derived operations
    def identity(self, d: int) -> np.ndarray:
        return np.eye(self.dim(d))

    def mul_var(self, v: int, d: int) -> np.ndarray:
        return self.apply_var(v, d, self.identity(d))

    def apply_poly(self, f: Polynomial, d: int, V: np.ndarray,
                   memo: Optional[Dict] = None) -> np.ndarray:
        """f * V for V of shape (dim M_d, k)."""
        if not f.terms:
            e = 0 if f.degree is None else f.degree
            return np.zeros((self.dim(d + e), V.shape[1]))
        e = f.degree
        if memo is None:
            memo = {}
        memo.setdefault((), V)
        out = np.zeros((self.dim(d + e), V.shape[1]))
        nv = self.ctx.nvars
        for m, c in f.terms.items():
            path: Tuple[int, ...] = ()
            cur = V
            for v, ex in enumerate(unpack(m, nv)):
                for _ in range(ex):
                    nxt = path + (v,)
                    got = memo.get(nxt)
                    if got is None:
                        got = self.apply_var(v, d + len(path), cur)
                        memo[nxt] = got
                    cur, path = got, nxt
            out += (int(c) % self.p) * cur
        return fp.red(out, self.p)

    def mul_poly(self, f: Polynomial, d: int) -> np.ndarray:
        return self.apply_poly(f, d, self.identity(d))

    def orbit(self, X: np.ndarray, d0: int, k: int, base: Optional[StrandContext] = None) -> np.ndarray:
        """Images of the degree-k monomials times the columns of X (elements of
        degree d0); shape (dim M_{d0+k}, r, #monomials).

        With a quotient ``base`` only its standard monomials are used.  They
        are the non-leading monomials of the ideal, hence closed under
        division, so the recursion never leaves them.
        """
        r = X.shape[1]
        cur = X.reshape(X.shape[0], r, 1)
        quotient = base is not None and base.is_quotient
        for j in range(1, k + 1):
            vs, pred = self.ctx.first_var(j)
            if quotient:
                keep = base.basis_positions(j)
                back = np.full(self.ctx.rdim(j - 1), -1, dtype=np.int64)
                prev = base.basis_positions(j - 1)
                back[prev] = np.arange(len(prev))
                vs, pred = vs[keep], back[pred[keep]]
            nxt = np.zeros((self.dim(d0 + j), r, len(vs)))
            for v in range(self.ctx.nvars):
                sel = np.nonzero(vs == v)[0]
                if not len(sel):
                    continue
                src = cur[:, :, pred[sel]].reshape(cur.shape[0], -1)
                img = self.apply_var(v, d0 + j - 1, src)
                nxt[:, :, sel] = img.reshape(img.shape[0], r, len(sel))
            cur = nxt
        return cur

    def element(self, d: int, polys: Dict[int, Polynomial]) -> np.ndarray:
        """Module coordinates of an ambient element given as {generator: polynomial}."""
        return self.coords(d, self.ambient.vector(d, polys)[:, None])[:, 0]

    def hilbert(self, lo: int, hi: int) -> Dict[int, int]:
        return {d: self.dim(d) for d in range(lo, hi + 1)}


class FreeStrandModule(StrandModule):
    """sum_j B(-g_j) over the base of ``ctx``."""

    def __init__(self, ctx: StrandContext, twists: Sequence[int], name: str = ""):
        self.ctx = ctx
        self.twists = [int(g) for g in twists]
        self.name = name
        self.lo = min(self.twists) if self.twists else 0

    @property
    def ambient(self) -> "FreeStrandModule":
        return self

    @property
    def rank(self) -> int:
        return len(self.twists)

    def offsets(self, d: int) -> List[int]:
        out = [0]
        for g in self.twists:
            out.append(out[-1] + self.ctx.dim(d - g))
        return out

    def dim(self, d: int) -> int:
        return self.offsets(d)[-1]

    def apply_var(self, v: int, d: int, V: np.ndarray) -> np.ndarray:
        o0, o1 = self.offsets(d), self.offsets(d + 1)
        out = np.zeros((o1[-1], V.shape[1]))
        for j, g in enumerate(self.twists):
            if o0[j + 1] > o0[j]:
                out[o1[j]:o1[j + 1]] = self.ctx.apply_var(v, d - g, V[o0[j]:o0[j + 1]])
        return out

    def lift(self, d: int, V: np.ndarray) -> np.ndarray:
        return V

    def coords(self, d: int, W: np.ndarray) -> np.ndarray:
        return W

    def vector(self, d: int, polys: Dict[int, Polynomial]) -> np.ndarray:
        o = self.offsets(d)
        vec = np.zeros(o[-1])
        for j, f in polys.items():
            if f.terms:
                vec[o[j]:o[j + 1]] = self.ctx.coords(f, d - self.twists[j])
        return vec

    def polys(self, d: int, vec: np.ndarray) -> Dict[int, Polynomial]:
        o = self.offsets(d)
        out = {}
        for j, g in enumerate(self.twists):
            seg = vec[o[j]:o[j + 1]]
            if seg.any():
                out[j] = self.ctx.polynomial(seg, d - g)
        return out

    def map_strand(self, target: StrandModule, cols: Sequence[np.ndarray], d: int) -> np.ndarray:
        """Matrix at degree d of the map sending generator j to cols[j], an
        element of ``target`` in degree twists[j]."""
        o = self.offsets(d)
        out = np.zeros((target.dim(d), o[-1]))
        groups: Dict[int, List[int]] = {}
        for j, g in enumerate(self.twists):
            if d - g >= 0 and o[j + 1] > o[j]:
                groups.setdefault(g, []).append(j)
        for g, js in groups.items():
            X = np.stack([cols[j] for j in js], axis=1) if js else None
            if X.shape[0] == 0:
                continue
            orb = self.ctx_orbit(target, X, g, d - g)
            for k, j in enumerate(js):
                out[:, o[j]:o[j + 1]] = orb[:, k, :]
        return out

    def ctx_orbit(self, target: StrandModule, X: np.ndarray, g: int, k: int) -> np.ndarray:
        return target.orbit(X, g, k, self.ctx)


def map_columns(target: StrandModule, f: GradedMap) -> List[np.ndarray]:
    """Columns of a graded map into ``target``'s ambient, in target coordinates."""
    amb = target.ambient
    if amb.twists != list(f.target.twists):
        raise ValueError("map target does not match the module's ambient")
    return [target.element(f.source.twists[j], col) for j, col in enumerate(f.cols)]


class QuotientStrandModule(StrandModule):
    """X / (span of relation rows), relations given per degree in X coordinates."""

    def __init__(self, X: StrandModule, relations: Callable[[int], np.ndarray], name: str = ""):
        self.X = X
        self.ctx = X.ctx
        self.rel_fn = relations
        self.name = name
        self.lo = X.lo
        self._q: Dict[int, Tuple[np.ndarray, np.ndarray, List[int]]] = {}
        self._mv: Dict[Tuple[int, int], np.ndarray] = {}

    @property
    def ambient(self):
        return self.X.ambient

    def data(self, d: int):
        out = self._q.get(d)
        if out is None:
            n = self.X.dim(d)
            R = self.rel_fn(d)
            if R.shape[0] and n:
                E, piv = fp.rref(R, self.p)
            else:
                E, piv = np.zeros((0, n)), []
            mask = np.ones(n, dtype=bool)
            mask[list(piv)] = False
            free = np.nonzero(mask)[0]
            out = (free, E[:, free], list(piv))
            self._q[d] = out
        return out

    def dim(self, d: int) -> int:
        return len(self.data(d)[0])

    def project(self, d: int, W: np.ndarray) -> np.ndarray:
        """X coordinates -> quotient coordinates."""
        free, Ef, piv = self.data(d)
        out = W[free]
        if len(piv):
            out = out - Ef.T @ W[piv]
        return fp.red(out, self.p)

    def embed(self, d: int, V: np.ndarray) -> np.ndarray:
        free, _, _ = self.data(d)
        W = np.zeros((self.X.dim(d), V.shape[1]))
        W[free] = V
        return W

    def mul_var(self, v: int, d: int) -> np.ndarray:
        key = (v, d)
        M = self._mv.get(key)
        if M is None:
            free, _, _ = self.data(d)
            W = self.X.apply_var(v, d, self.embed(d, np.eye(len(free))))
            M = self.project(d + 1, W)
            self._mv[key] = M
        return M

    def apply_var(self, v: int, d: int, V: np.ndarray) -> np.ndarray:
        return fp.red(self.mul_var(v, d) @ V, self.p)

    def lift(self, d: int, V: np.ndarray) -> np.ndarray:
        return self.X.lift(d, self.embed(d, V))

    def coords(self, d: int, W: np.ndarray) -> np.ndarray:
        return self.project(d, self.X.coords(d, W))


class SubStrandModule(StrandModule):
    """A submodule of X given per degree by a spanning set of rows in X coordinates."""

    def __init__(self, X: StrandModule, spanning: Callable[[int], np.ndarray], name: str = "",
                 lo: Optional[int] = None, already_reduced: bool = False):
        self.X = X
        self.ctx = X.ctx
        self.span_fn = spanning
        self.name = name
        self.lo = X.lo if lo is None else lo
        self.reduced = already_reduced
        self._b: Dict[int, Tuple[np.ndarray, List[int]]] = {}
        self._mv: Dict[Tuple[int, int], np.ndarray] = {}

    @property
    def ambient(self):
        return self.X.ambient

    def data(self, d: int):
        out = self._b.get(d)
        if out is None:
            S = self.span_fn(d)
            n = self.X.dim(d)
            if self.reduced:
                out = S if n else (np.zeros((0, 0)), [])
            elif S.shape[0] == 0 or n == 0:
                out = (np.zeros((0, n)), [])
            else:
                out = fp.rref(S, self.p)
            self._b[d] = out
        return out

    def dim(self, d: int) -> int:
        return len(self.data(d)[1])

    def mul_var(self, v: int, d: int) -> np.ndarray:
        key = (v, d)
        M = self._mv.get(key)
        if M is None:
            B, _ = self.data(d)
            _, piv1 = self.data(d + 1)
            W = self.X.apply_var(v, d, B.T)
            M = W[piv1] if piv1 else np.zeros((0, B.shape[0]))
            self._mv[key] = M
        return M

    def apply_var(self, v: int, d: int, V: np.ndarray) -> np.ndarray:
        return fp.red(self.mul_var(v, d) @ V, self.p)

    def lift(self, d: int, V: np.ndarray) -> np.ndarray:
        B, _ = self.data(d)
        return self.X.lift(d, fp.red(B.T @ V, self.p))

    def coords(self, d: int, W: np.ndarray) -> np.ndarray:
        _, piv = self.data(d)
        return self.X.coords(d, W)[piv]

    def contains(self, d: int, W: np.ndarray) -> bool:
        """Whether the columns of W (X coordinates) lie in the submodule."""
        B, piv = self.data(d)
        if not piv:
            return not W.any()
        back = fp.red(B.T @ W[piv], self.p)
        return bool(np.array_equal(back, W % self.p))


def cokernel(ctx: StrandContext, twists: Sequence[int], rel: Optional[GradedMap], name: str = "") -> StrandModule:
    """coker(rel) with rel a graded map into sum_j B(-twists[j])."""
    amb = FreeStrandModule(ctx, twists, name)
    if rel is None or rel.source.rank == 0:
        return amb
    src = FreeStrandModule(ctx, rel.source.twists)
    cols = map_columns(amb, rel)

    def relations(d):
        return src.map_strand(amb, cols, d).T

    return QuotientStrandModule(amb, relations, name)


def image(X: StrandModule, gens: Sequence[Tuple[int, np.ndarray]], name: str = "") -> SubStrandModule:
    """Submodule of X generated by elements (degree, X coordinates)."""
    src = FreeStrandModule(X.ctx, [g for g, _ in gens])
    cols = [v for _, v in gens]

    def spanning(d):
        return src.map_strand(X, cols, d).T

    lo = min((g for g, _ in gens), default=X.lo)
    return SubStrandModule(X, spanning, name, lo=lo)


def kernel(X: StrandModule, target: StrandModule, matrix: Callable[[int], np.ndarray],
           name: str = "") -> SubStrandModule:
    """ker of a degree-preserving map X -> target given by its strand matrices."""

    def spanning(d):
        T = matrix(d)
        n = X.dim(d)
        if T.shape[0] == 0:
            return (np.eye(n), list(range(n)))
        N = fp.nullspace(T, X.p)
        if not len(N):
            return (N, [])
        return fp.rref(N, X.p)

    return SubStrandModule(X, spanning, name, already_reduced=True)


def subquotient(U: SubStrandModule, V: SubStrandModule, name: str = "") -> QuotientStrandModule:
    """U / V for submodules V of U of the same module."""

    def relations(d):
        B, _ = V.data(d)
        _, pivU = U.data(d)
        return B[:, pivU] if B.shape[0] else np.zeros((0, U.dim(d)))

    return QuotientStrandModule(U, relations, name)


# -- strand snapshots ------------------------------------------------------------------

@dataclass
class StrandSnapshot:
    """Dimensions and matrices of a diagram in one degree."""

    degree: int
    dims: Dict[str, int]
    maps: Dict[str, np.ndarray] = field(default_factory=dict)

    def check(self) -> None:
        for name, M in self.maps.items():
            src, tgt = name.split("->")
            if M.shape != (self.dims[tgt], self.dims[src]):
                raise ValueError(f"snapshot map {name} has shape {M.shape}")


def graded_piece(m: StrandModule, d: int) -> StrandSnapshot:
    return StrandSnapshot(d, {m.name or "M": m.dim(d)})


# -- Hom and Ext strands -------------------------------------------------------------

def hom_block_matrix(F1: GradedFreeModule, F0: GradedFreeModule, dk: GradedMap,
                     N: StrandModule, e: int) -> np.ndarray:
    """Matrix of Hom(dk, N)_e : Hom(F0, N)_e -> Hom(F1, N)_e, i.e. precomposition
    with dk : F1 -> F0, on the sums of N_{g+e}."""
    t0, t1 = list(F0.twists), list(F1.twists)
    d0 = [N.dim(g + e) for g in t0]
    d1 = [N.dim(g + e) for g in t1]
    o0 = np.concatenate([[0], np.cumsum(d0)]).astype(int)
    o1 = np.concatenate([[0], np.cumsum(d1)]).astype(int)
    out = np.zeros((o1[-1], o0[-1]))
    rows_by_col: Dict[int, List[Tuple[int, Polynomial]]] = {}
    for l, col in enumerate(dk.cols):
        for j, f in col.items():
            rows_by_col.setdefault(j, []).append((l, f))
    for j, entries in rows_by_col.items():
        if d0[j] == 0:
            continue
        memo: Dict = {}
        I = np.eye(d0[j])
        for l, f in entries:
            if d1[l] == 0:
                continue
            out[o1[l]:o1[l + 1], o0[j]:o0[j + 1]] = N.apply_poly(f, t0[j] + e, I, memo)
    return out


def _rank(M: np.ndarray, p: int) -> int:
    if M.size == 0:
        return 0
    return fp.rank(M, p)


def ext_dims(res: ChainComplex, N: StrandModule, a: int, degrees: Sequence[int]) -> Dict[int, int]:
    """dim H^a(Hom(res, N))_e for e in degrees; res must have its module at
    index res.lo and terms through index lo + a + 1."""
    lo = res.lo
    k = lo + a
    out = {}
    for e in degrees:
        Fa = res.term(k)
        X = sum(N.dim(g + e) for g in Fa.twists)
        r_out = _rank(hom_block_matrix(res.term(k + 1), Fa, res.diff(k + 1), N, e), N.p) \
            if res.term(k + 1).rank else 0
        r_in = _rank(hom_block_matrix(Fa, res.term(k - 1), res.diff(k), N, e), N.p) \
            if a >= 1 and res.term(k - 1).rank else 0
        out[e] = X - r_out - r_in
    return out


@dataclass
class Presentation:
    """coker(relations: Rel -> Gens) over R."""

    gens: GradedFreeModule
    relations: GradedMap
    name: str = ""

    def as_complex(self, ring: PolyRing) -> ChainComplex:
        return ChainComplex(ring, {0: self.gens, 1: self.relations.source}, {1: self.relations}, self.name)


def hom_strand(pres, N: StrandModule, degrees: Sequence[int]) -> Dict[int, int]:
    """dim Hom(M1, N)_e with M1 given by a Presentation or by a resolution."""
    cx = pres.as_complex(N.ctx.ring) if isinstance(pres, Presentation) else pres
    return ext_dims(cx, N, 0, degrees)


def ext_strand(res: ChainComplex, N: StrandModule, a: int, degrees: Sequence[int]) -> Dict[int, int]:
    if res.hi < res.lo + a + 1 and res.term(res.lo + a + 1).rank == 0:
        pass  # a finite resolution that stops early is complete
    return ext_dims(res, N, a, degrees)


def hom_map_is_zero(psi: GradedMap, N: StrandModule, degrees: Sequence[int]) -> bool:
    """Whether Hom(psi, N) vanishes in the given degrees."""
    for e in degrees:
        M = hom_block_matrix(psi.source, psi.target, psi, N, e)
        if M.any():
            return False
    return True


# -- truncated minimal resolutions ---------------------------------------------------------

@dataclass
class DepthReport:
    name: str
    bound: int
    nvars: int
    pd: Optional[int]
    pd_lower: int
    confidence: str
    last_map_injective: Optional[bool] = None

    @property
    def depth(self) -> Optional[int]:
        return None if self.pd is None else self.nvars - self.pd

    def to_json(self) -> Dict:
        return {"module": self.name, "bound": self.bound, "pd": self.pd, "pd_lower": self.pd_lower,
                "depth": self.depth, "confidence": self.confidence,
                "last_map_injective": self.last_map_injective}


@dataclass
class TruncatedResolution:
    complex: ChainComplex
    generators: Dict[int, Polynomial] = field(repr=False, default=None)
    gens: List[Dict[int, Polynomial]] = field(default_factory=list, repr=False)
    base: str = "R"
    bound: int = 0
    terminated: bool = False
    report: Optional[DepthReport] = None

    def betti(self):
        from .complexes import betti
        return betti(self.complex)


def _new_generators(S: Optional[np.ndarray], K: np.ndarray, p: int) -> List[int]:
    """Rows of K extending the span of the rows of S."""
    nS = 0 if S is None else S.shape[0]
    stack = K if nS == 0 else np.concatenate([S, K])
    idx = fp.independent_rows(stack, p)
    return [i - nS for i in idx if i >= nS]


def _minimal_generators(M: StrandModule, bound: int) -> List[Tuple[int, np.ndarray]]:
    gens = []
    for d in range(M.lo, bound + 1):
        n = M.dim(d)
        if n == 0:
            continue
        if d - 1 >= M.lo and M.dim(d - 1):
            W = np.concatenate([M.mul_var(v, d - 1) for v in range(M.ctx.nvars)], axis=1)
            if W.shape[0] and W.any():
                E, piv = fp.rref(W.T, M.p)
            else:
                piv = []
        else:
            piv = []
        if len(piv) == n:
            continue
        mask = np.ones(n, dtype=bool)
        mask[list(piv)] = False
        for j in np.nonzero(mask)[0]:
            vec = np.zeros(n)
            vec[j] = 1
            gens.append((d, vec))
    return gens


def _kernel_generators(E: FreeStrandModule, T: StrandModule, cols: List[np.ndarray],
                       dmax: int) -> List[Tuple[int, np.ndarray]]:
    """Minimal generators, up to degree dmax, of ker(E -> T) where generator j
    of E maps to cols[j]."""
    p = E.p
    found: List[Tuple[int, np.ndarray]] = []
    if not E.twists:
        return found
    for d in range(min(E.twists), dmax + 1):
        n = E.dim(d)
        if n == 0:
            continue
        D = E.map_strand(T, cols, d)
        rk = _rank(D, p)
        kdim = n - rk
        if kdim == 0:
            continue
        S = None
        if found:
            src = FreeStrandModule(E.ctx, [g for g, _ in found])
            S = src.map_strand(E, [v for _, v in found], d).T
            if _rank(S, p) == kdim:
                continue
        K = fp.nullspace(D, p) if D.shape[0] else np.eye(n)
        for i in _new_generators(S, K, p):
            found.append((d, K[i]))
    return found


def truncated_min_resolution(M: StrandModule, bound: int, base: Optional[StrandContext] = None,
                             max_index: Optional[int] = None, name: str = "") -> TruncatedResolution:
    """Minimal free resolution of M over ``base`` (default R), computed degree by degree.

    ``bound`` limits the Betti table by slope: generators of the k-th term are
    searched in internal degrees d <= k + bound.  Over R the computation stops
    once a term is zero; over a quotient ring it stops at ``max_index``.
    """
    if M.dim(M.lo) == 0 and all(M.dim(d) == 0 for d in range(M.lo, bound + 1)):
        if bound < M.lo:
            raise TruncationError(f"bound {bound} is below the lowest degree {M.lo} of {M.name}")
    base = base or StrandContext(M.ctx.ring)
    ring = base.ring
    over_R = not base.is_quotient
    if max_index is None:
        max_index = ring.nvars + 1 if over_R else 3
    gens0 = _minimal_generators(M, bound)
    if not gens0:
        raise TruncationError(f"no generators of {M.name or 'module'} in degrees <= {bound}")
    stages: List[List[Tuple[int, np.ndarray]]] = [gens0]
    targets: List[StrandModule] = [M]
    frees: List[FreeStrandModule] = []
    terminated = False
    for k in range(0, max_index):
        E = FreeStrandModule(base, [g for g, _ in stages[-1]])
        frees.append(E)
        nxt = _kernel_generators(E, targets[-1], [v for _, v in stages[-1]], k + 1 + bound)
        if not nxt:
            terminated = True
            break
        stages.append(nxt)
        targets.append(E)
    else:
        frees.append(FreeStrandModule(base, [g for g, _ in stages[-1]]))
    # assemble the complex with polynomial entries
    terms = {k: GradedFreeModule(E.twists) for k, E in enumerate(frees)}
    d = {}
    for k in range(1, len(frees)):
        Eprev = frees[k - 1]
        cols = [Eprev.polys(g, v) for g, v in stages[k]]
        d[k] = GradedMap(ring, terms[k], terms[k - 1], cols, check=False)
    gpolys = [M.ambient.polys(g, M.lift(g, v[:, None])[:, 0]) for g, v in gens0]
    cx = ChainComplex(ring, terms, d, name or (M.name + " resolution" if M.name else ""))
    pd = len(frees) - 1 if terminated else None
    inj = None
    if terminated and over_R and pd >= 1:
        from .complexes import _ranks_at
        import random
        rng = random.Random(0)
        pt = [rng.randrange(base.p) for _ in range(ring.nvars)]
        inj = _ranks_at(cx, pt).get(pd, 0) == cx.term(pd).rank
    elif terminated and pd == 0:
        inj = True
    conf = "exact-within-bound" if terminated else "bound-censored"
    rep = DepthReport(M.name or name, bound, ring.nvars, pd if over_R else None,
                      len(frees) - 1, conf if over_R else "bound-censored", inj)
    return TruncatedResolution(cx, None, gpolys, base.name, bound, terminated, rep)


# -- contexts and standard modules of a determinantal scheme -------------------------------

def contexts(s) -> Tuple[StrandContext, StrandContext]:
    """(R, A) strand contexts of a scheme, cached on the scheme."""
    cached = getattr(s, "_strand_ctx", None)
    if cached is None or cached[0].ring is not s.ring:
        cached = (StrandContext(s.ring, None, "R"), StrandContext(s.ring, s.minor_ideal_gens, "A"))
        object.__setattr__(s, "_strand_ctx", cached)
    return cached


def module_A(s, over: str = "R") -> StrandModule:
    """A = R/I: a quotient of R, or the free A-module of rank one."""
    R, A = contexts(s)
    if over == "A":
        return FreeStrandModule(A, [0], "A")
    gens = s.minor_ideal_gens
    rel = GradedMap(s.ring, GradedFreeModule([f.degree for f in gens]), GradedFreeModule([0]),
                    [{0: f} for f in gens], check=False)
    return cokernel(R, [0], rel, "A")


def module_M(s, over: str = "A") -> StrandModule:
    R, A = contexts(s)
    return cokernel(A if over == "A" else R, s.degrees.b, s.phi, "M")


def module_S(s, i: int, over: str = "A") -> StrandModule:
    """S_iM = S_iG / (S_{i-1}G . im phi) for i >= 1, A for i = 0, Hom_A(M, A) for i = -1."""
    from .complexes import koszul_differential, sg_lambda_module
    if i == 0:
        return module_A(s, over)
    if i == -1:
        return module_hom_MA(s)
    if i < -1:
        raise ValueError("S_iM is defined here for i >= -1")
    R, A = contexts(s)
    a, b = s.degrees.a, s.degrees.b
    tw = sg_lambda_module(a, b, i, 0).twists
    rel = koszul_differential(i - 1, 1, s.phi)
    return cokernel(A if over == "A" else R, tw, rel, f"S_{i}M")


def module_hom_MA(s) -> SubStrandModule:
    """Hom_A(M, A) = ker(phi* : G* (x) A -> F* (x) A)."""
    _, A = contexts(s)
    Gd = FreeStrandModule(A, [-x for x in s.degrees.b], "G*")
    Fd = FreeStrandModule(A, [-x for x in s.degrees.a], "F*")
    from .graded import dual_map
    phistar = dual_map(s.phi)
    cols = map_columns(Fd, phistar)

    def matrix(d):
        return Gd.map_strand(Fd, cols, d)

    return kernel(Gd, Fd, matrix, "Hom(M,A)")


def module_I(s) -> SubStrandModule:
    """The ideal I as a submodule of R."""
    R, _ = contexts(s)
    amb = FreeStrandModule(R, [0])
    gens = [(f.degree, amb.vector(f.degree, {0: f})) for f in s.minor_ideal_gens]
    return image(amb, gens, "I")


def module_conormal(s) -> SubStrandModule:
    """I/I^2, as the image of the minors in R/I^2."""
    R, _ = contexts(s)
    gens = s.minor_ideal_gens
    prods = []
    for x in range(len(gens)):
        for y in range(x, len(gens)):
            prods.append(gens[x] * gens[y])
    prods = [f for f in prods if f.terms]
    rel = GradedMap(s.ring, GradedFreeModule([f.degree for f in prods]), GradedFreeModule([0]),
                    [{0: f} for f in prods], check=False)
    Q = cokernel(R, [0], rel, "R/I^2")
    cols = [(f.degree, Q.element(f.degree, {0: f})) for f in gens]
    return image(Q, cols, "I/I^2")


def conormal_presentation(s) -> Presentation:
    """I/I^2 = I (x) A presented over R: the syzygies of the minors together with
    the products f_i e_j."""
    from .complexes import build_D
    D0 = build_D(0, s.phi, check=False)
    gens = D0.term(1)
    syz = D0.diff(2)
    mins = s.minor_ideal_gens
    extra_tw = []
    extra_cols = []
    for j in range(gens.rank):
        for f in mins:
            extra_tw.append(gens.twists[j] + f.degree)
            extra_cols.append({j: f})
    src = GradedFreeModule(list(syz.source.twists) + extra_tw)
    rel = GradedMap(s.ring, src, gens, list(syz.cols) + extra_cols, check=False)
    return Presentation(gens, rel, "I/I^2")


def ideal_presentation(s) -> Presentation:
    from .complexes import build_D
    D0 = build_D(0, s.phi, check=False)
    return Presentation(D0.term(1), D0.diff(2), "I")


# -- Hilbert polynomial fit ------------------------------------------------------------------

@dataclass
class HilbertFit:
    degree: int
    coeffs: List  # Fractions, low degree first, in the binomial basis C(d + k, k)
    multiplicity: object
    window: Tuple[int, int]


def fit_hilbert_polynomial(values: Dict[int, int], degree: int) -> HilbertFit:
    """Interpolate a polynomial of the given degree through the last degree+1
    points and check it on the others; refuses windows shorter than degree + 2."""
    from fractions import Fraction
    ds = sorted(values)
    if len(ds) < degree + 2:
        raise TruncationError(f"window of {len(ds)} degrees cannot fit a degree-{degree} polynomial")
    # Newton forward differences on the last degree+1 consecutive points
    pts = ds[-(degree + 1):]
    if pts != list(range(pts[0], pts[0] + degree + 1)):
        raise TruncationError("fit needs consecutive degrees")
    diffs = [values[d] for d in pts]
    table = [list(diffs)]
    for _ in range(degree):
        prev = table[-1]
        table.append([prev[i + 1] - prev[i] for i in range(len(prev) - 1)])
    lead = table[degree][0]  # degree-th difference = multiplicity for a Hilbert polynomial

    def poly(d):
        total = Fraction(0)
        x = d - pts[0]
        for k in range(degree + 1):
            total += table[k][0] * Fraction(comb_frac(x, k))
        return total

    for d in ds:
        if poly(d) != values[d]:
            raise TruncationError(f"values do not follow a polynomial of degree {degree} "
                                  f"(first mismatch at degree {d})")
    return HilbertFit(degree, [table[k][0] for k in range(degree + 1)], lead, (ds[0], ds[-1]))


def comb_frac(x: int, k: int):
    from fractions import Fraction
    out = Fraction(1)
    for i in range(k):
        out *= Fraction(x - i, i + 1)
    return out


# -- Ext as a module ------------------------------------------------------------------------

class ShiftedSumModule(StrandModule):
    """sum_j N(g_j) for a module N, i.e. Hom(sum_j B(-g_j), N)."""

    def __init__(self, N: StrandModule, shifts: Sequence[int], name: str = ""):
        self.N = N
        self.ctx = N.ctx
        self.shifts = [int(g) for g in shifts]
        self.name = name
        self.lo = (N.lo - max(self.shifts)) if self.shifts else 0
        amb_tw = []
        for g in self.shifts:
            amb_tw.extend(x - g for x in N.ambient.twists)
        self._amb = FreeStrandModule(self.ctx, amb_tw)

    @property
    def ambient(self):
        return self._amb

    def offsets(self, d: int) -> List[int]:
        out = [0]
        for g in self.shifts:
            out.append(out[-1] + self.N.dim(d + g))
        return out

    def dim(self, d: int) -> int:
        return self.offsets(d)[-1]

    def apply_var(self, v: int, d: int, V: np.ndarray) -> np.ndarray:
        o0, o1 = self.offsets(d), self.offsets(d + 1)
        out = np.zeros((o1[-1], V.shape[1]))
        for j, g in enumerate(self.shifts):
            if o1[j + 1] > o1[j] and o0[j + 1] > o0[j]:
                out[o1[j]:o1[j + 1]] = self.N.apply_var(v, d + g, V[o0[j]:o0[j + 1]])
        return out

    def lift(self, d: int, V: np.ndarray) -> np.ndarray:
        o = self.offsets(d)
        parts = [self.N.lift(d + g, V[o[j]:o[j + 1]]) for j, g in enumerate(self.shifts)]
        return np.concatenate(parts) if parts else np.zeros((0, V.shape[1]))

    def coords(self, d: int, W: np.ndarray) -> np.ndarray:
        parts = []
        pos = 0
        for g in self.shifts:
            n = self.N.ambient.dim(d + g)
            parts.append(self.N.coords(d + g, W[pos:pos + n]))
            pos += n
        return np.concatenate(parts) if parts else np.zeros((0, W.shape[1]))


def ext_module(res: ChainComplex, N: StrandModule, a: int, name: str = "") -> StrandModule:
    """Ext^a(module resolved by res, N) as a subquotient of Hom(res_a, N)."""
    lo = res.lo
    k = lo + a
    X = ShiftedSumModule(N, res.term(k).twists)
    if res.term(k + 1).rank:
        Y = ShiftedSumModule(N, res.term(k + 1).twists)
        out_map = lambda d: hom_block_matrix(res.term(k + 1), res.term(k), res.diff(k + 1), N, d)
        Z = kernel(X, Y, out_map)
    else:
        n_id = lambda d: (np.eye(X.dim(d)), list(range(X.dim(d))))
        Z = SubStrandModule(X, n_id, already_reduced=True)
    if a >= 1 and res.term(k - 1).rank:
        in_map = lambda d: hom_block_matrix(res.term(k), res.term(k - 1), res.diff(k), N, d)

        def spanning(d):
            M = in_map(d)
            return M.T if M.size else np.zeros((0, X.dim(d)))

        B = SubStrandModule(X, spanning)
        return subquotient(Z, B, name or f"Ext^{a}")
    Z.name = name or f"Ext^{a}"
    return Z


def default_bound(s) -> int:
    """Default slope window for a scheme: largest minor degree plus c - 1."""
    return max(s.minor_degrees()) + s.c - 1
