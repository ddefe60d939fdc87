"""Degree matrices, determinantal matrices and their minors."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .graded import GradedFreeModule, GradedMap
from .minors import Minors
from .ring import CoeffField, PolyRing, Polynomial, random_form


class DegreeError(ValueError):
    """Inconsistent or malformed degree data."""


@dataclass(frozen=True)
class DegreeMatrix:
    """Shape data of a t x (t+c-1) matrix with entry degrees a_j - b_i."""

    t: int
    c: int
    n: int
    a: Tuple[int, ...]
    b: Tuple[int, ...]
    positive_entries: bool = True

    def __post_init__(self):
        if self.t < 1 or self.c < 1:
            raise DegreeError("need t >= 1 and c >= 1")
        if self.n < self.c:
            raise DegreeError(f"need n >= c (got n={self.n}, c={self.c})")
        if len(self.a) != self.t + self.c - 1:
            raise DegreeError(f"expected {self.t + self.c - 1} column degrees, got {len(self.a)}")
        if len(self.b) != self.t:
            raise DegreeError(f"expected {self.t} row degrees, got {len(self.b)}")
        object.__setattr__(self, "a", tuple(sorted(int(x) for x in self.a)))
        object.__setattr__(self, "b", tuple(sorted(int(x) for x in self.b)))
        if self.positive_entries:
            for i, bi in enumerate(self.b):
                for j, aj in enumerate(self.a):
                    if aj - bi <= 0:
                        raise DegreeError(f"entry ({i},{j}) has degree {aj - bi} <= 0")

    @classmethod
    def linear(cls, t: int, c: int, n: int) -> "DegreeMatrix":
        return cls(t, c, n, tuple([1] * (t + c - 1)), tuple([0] * t))

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[int]], n: int, positive_entries: bool = True) -> "DegreeMatrix":
        a, b = degrees_from_grid(grid)
        t = len(b)
        c = len(a) - t + 1
        return cls(t, c, n, tuple(a), tuple(b), positive_entries)

    @property
    def ncols(self) -> int:
        return self.t + self.c - 1

    def d(self, i: int, j: int) -> int:
        return self.a[j] - self.b[i]

    def grid(self) -> List[List[int]]:
        return [[self.d(i, j) for j in range(self.ncols)] for i in range(self.t)]

    @property
    def ell(self) -> int:
        return sum(self.a) - sum(self.b)

    @property
    def is_linear(self) -> bool:
        return all(self.d(i, j) == 1 for i in range(self.t) for j in range(self.ncols))


def degrees_from_grid(grid: Sequence[Sequence[Optional[int]]]) -> Tuple[List[int], List[int]]:
    """Recover (a, b) with d_ij = a_j - b_i and b_0 = 0.

    ``None`` marks an unknown entry (a zero polynomial).  Raises DegreeError
    naming the first offending row/column.
    """
    rows = [list(r) for r in grid]
    if not rows or not rows[0]:
        raise DegreeError("empty degree grid")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DegreeError(f"row {i} has {len(r)} entries, expected {width}")
    t = len(rows)
    if width < t:
        raise DegreeError(f"need at least {t} columns, got {width}")
    a: List[Optional[int]] = [None] * width
    b: List[Optional[int]] = [None] * t
    b[0] = 0
    changed = True
    while changed:
        changed = False
        for i in range(t):
            for j in range(width):
                d = rows[i][j]
                if d is None:
                    continue
                if b[i] is not None and a[j] is None:
                    a[j] = d + b[i]
                    changed = True
                elif a[j] is not None and b[i] is None:
                    b[i] = a[j] - d
                    changed = True
    for i in range(t):
        if b[i] is None:
            raise DegreeError(f"row {i} degrees are undetermined")
    for j in range(width):
        if a[j] is None:
            raise DegreeError(f"column {j} degrees are undetermined")
    for i in range(t):
        for j in range(width):
            d = rows[i][j]
            if d is not None and d != a[j] - b[i]:
                raise DegreeError(f"inconsistent degree at row {i}, column {j}: "
                                  f"{d} != {a[j] - b[i]}")
    shift = min(b)
    return [x - shift for x in a], [x - shift for x in b]


def parse_grid(text: str) -> List[List[int]]:
    rows = []
    for k, line in enumerate(text.strip().splitlines()):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(x) for x in line.replace(",", " ").split()])
        except ValueError as exc:
            raise DegreeError(f"row {len(rows)}: not a list of integers ({line!r})") from exc
    if not rows:
        raise DegreeError("empty degree grid")
    return rows


@dataclass
class DetScheme:
    """A determinantal scheme given by a concrete matrix."""

    degrees: DegreeMatrix
    ring: PolyRing
    matrix: List[List[Polynomial]]
    seed: Optional[int] = None
    minimal: bool = True
    _minors: Optional[Minors] = field(default=None, repr=False)
    _gens: Optional[List[Polynomial]] = field(default=None, repr=False)

    @property
    def t(self) -> int:
        return self.degrees.t

    @property
    def c(self) -> int:
        return self.degrees.c

    @property
    def n(self) -> int:
        return self.ring.nvars - 1

    @property
    def ell(self) -> int:
        return self.degrees.ell

    @property
    def F(self) -> GradedFreeModule:
        return GradedFreeModule(self.degrees.a)

    @property
    def G(self) -> GradedFreeModule:
        return GradedFreeModule(self.degrees.b)

    @property
    def phi(self) -> GradedMap:
        return GradedMap.from_rows(self.ring, self.F, self.G, self.matrix)

    @property
    def minor_engine(self) -> Minors:
        if self._minors is None:
            self._minors = Minors(self.ring, self.matrix)
        return self._minors

    def column_subsets(self) -> List[Tuple[int, ...]]:
        return list(combinations(range(self.degrees.ncols), self.t))

    def minor(self, cols: Sequence[int]) -> Polynomial:
        return self.minor_engine(tuple(range(self.t)), tuple(cols))

    @property
    def minor_ideal_gens(self) -> List[Polynomial]:
        """Maximal minors, columns in lex order of t-subsets."""
        if self._gens is None:
            self._gens = [self.minor(T) for T in self.column_subsets()]
        return self._gens

    def minor_degrees(self) -> List[int]:
        sb = sum(self.degrees.b)
        return [sum(self.degrees.a[j] for j in T) - sb for T in self.column_subsets()]

    def describe(self) -> Dict:
        d = self.degrees
        return {"t": d.t, "c": d.c, "n": self.n, "a": list(d.a), "b": list(d.b),
                "seed": self.seed, "prime": self.ring.field.p}


def _subseed(seed: int, i: int, j: int) -> int:
    return random.Random(f"{seed}:{i}:{j}").randrange(1 << 62)


def build_matrix(degrees: DegreeMatrix, mode: str = "generic", seed: int = 0,
                 entries: Optional[Sequence[Sequence[Union[Polynomial, str]]]] = None,
                 field: Optional[CoeffField] = None, ring: Optional[PolyRing] = None,
                 require_minimal: bool = False) -> DetScheme:
    """Build a DetScheme from degree data, either generic-random or explicit."""
    if ring is None:
        ring = PolyRing(degrees.n + 1, field or CoeffField())
    if ring.nvars != degrees.n + 1:
        raise DegreeError("ring does not match n")
    t, m = degrees.t, degrees.ncols
    rows: List[List[Polynomial]] = []
    if mode == "generic":
        for i in range(t):
            row = []
            for j in range(m):
                d = degrees.d(i, j)
                if d > 0:
                    row.append(random_form(ring, d, _subseed(seed, i, j)))
                elif d == 0:
                    rng = random.Random(_subseed(seed, i, j))
                    row.append(ring.const(ring.field.random(rng) or 1))
                else:
                    row.append(ring.zero())
            rows.append(row)
    elif mode == "explicit":
        if entries is None or len(entries) != t or any(len(r) != m for r in entries):
            raise DegreeError(f"explicit entries must form a {t}x{m} matrix")
        for i in range(t):
            row = []
            for j in range(m):
                e = entries[i][j]
                if isinstance(e, str):
                    e = ring.parse(e)
                if e.terms and e.degree != degrees.d(i, j):
                    raise DegreeError(f"entry ({i},{j}) has degree {e.degree}, "
                                      f"expected {degrees.d(i, j)}")
                row.append(e)
            rows.append(row)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    minimal = all(not (e.terms and e.degree == 0) for r in rows for e in r)
    if require_minimal and not minimal:
        raise DegreeError("matrix has nonzero constant entries (not minimal)")
    return DetScheme(degrees, ring, rows, seed if mode == "generic" else None, minimal)


def scheme_from_entries(ring: PolyRing, entries: Sequence[Sequence[Union[Polynomial, str]]],
                        positive_entries: bool = True) -> DetScheme:
    """Explicit matrix; degrees are inferred from the entries."""
    rows = [[ring.parse(e) if isinstance(e, str) else e for e in r] for r in entries]
    grid = [[e.degree if e.terms else None for e in r] for r in rows]
    a, b = degrees_from_grid(grid)
    corder = sorted(range(len(a)), key=lambda j: a[j])
    rorder = sorted(range(len(b)), key=lambda i: b[i])
    rows = [[rows[i][j] for j in corder] for i in rorder]
    t = len(b)
    deg = DegreeMatrix(t, len(a) - t + 1, ring.nvars - 1, tuple(a), tuple(b), positive_entries)
    return build_matrix(deg, "explicit", entries=rows, ring=ring)


def submaximal_minors(s: DetScheme) -> List[Polynomial]:
    t = s.t
    if t < 2:
        raise DegreeError("submaximal minors need t >= 2")
    eng = s.minor_engine
    out = []
    for R in combinations(range(t), t - 1):
        for C in combinations(range(s.degrees.ncols), t - 1):
            out.append(eng(R, C))
    return out


def expected_invariants(degrees: DegreeMatrix) -> Dict:
    t, c, n = degrees.t, degrees.c, degrees.n
    out = {
        "codim_I": c,
        "codim_J_generic": min(2 * (c + 1), n + 1),
        "ell": degrees.ell,
    }
    if degrees.is_linear:
        out["deg_linear_case"] = comb(t + c - 1, c)
    return out


def expected_depth_J(degrees: DegreeMatrix) -> int:
    """Generic value of depth_J A = codim J - codim I."""
    return min(degrees.c + 2, degrees.n + 1 - degrees.c)


def random_point_on_complement(s: DetScheme, which: str = "I", trials: int = 10,
                               seed: int = 0) -> Optional[List[int]]:
    """A random point where every generator of I (or J) is nonzero."""
    if s.ring.field.p is None:
        raise ValueError("random points need a prime field")
    gens = s.minor_ideal_gens if which == "I" else submaximal_minors(s)
    rng = random.Random(seed)
    p = s.ring.field.p
    for _ in range(trials):
        pt = [rng.randrange(p) for _ in range(s.ring.nvars)]
        if all(g.eval(pt) for g in gens):
            return pt
    return None
