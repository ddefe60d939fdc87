"""Determinants of polynomial submatrices by memoized Laplace expansion."""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .ring import PolyRing, Polynomial


class Minors:
    """Memoized minors of a fixed polynomial matrix (list of rows)."""

    def __init__(self, ring: PolyRing, rows: Sequence[Sequence[Polynomial]]):
        self.ring = ring
        self.rows = [list(r) for r in rows]
        self._cache: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Polynomial] = {}

    def __call__(self, R: Sequence[int], C: Sequence[int], along: int = 0) -> Polynomial:
        R, C = tuple(R), tuple(C)
        if len(R) != len(C):
            raise ValueError("minor needs a square selection")
        if along:
            return self._expand_row(R, C, along)
        return self._det(R, C)

    def _det(self, R, C) -> Polynomial:
        if not R:
            return self.ring.one()
        key = (R, C)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        val = self._expand_row(R, C, 0)
        self._cache[key] = val
        return val

    def _expand_row(self, R, C, pos) -> Polynomial:
        r = R[pos]
        rest = R[:pos] + R[pos + 1:]
        acc = None
        for k, c in enumerate(C):
            a = self.rows[r][c]
            if not a.terms:
                continue
            sub = self._det(rest, C[:k] + C[k + 1:])
            if not sub.terms:
                continue
            term = a * sub
            if (k + pos) % 2:
                term = -term
            acc = term if acc is None else acc + term
        return acc if acc is not None else self.ring.zero()


def minor_table(ring: PolyRing, rows: Sequence[Sequence[Polynomial]], R: Sequence[int],
                C: Sequence[int]) -> Polynomial:
    return Minors(ring, rows)(R, C)


def determinant(ring: PolyRing, rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    n = len(rows)
    return Minors(ring, rows)(range(n), range(n))


def cols_of(rows: Sequence[Sequence[Polynomial]]) -> List[List[Polynomial]]:
    return [list(c) for c in zip(*rows)]
