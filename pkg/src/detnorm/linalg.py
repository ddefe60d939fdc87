"""Exact linear algebra over F_p or QQ.

Prime fields go through the BLAS-backed elimination in :mod:`detnorm.fp`;
QQ goes through python-flint's ``fmpq_mat``.  Vectors are accepted as sparse
dicts ``{column: value}`` or dense lists; results are dense lists of python
ints (F_p, in [0, p)) or Fractions (QQ).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import flint
import numpy as np

from . import fp
from .ring import CoeffField

SparseRow = Dict[int, object]


def _items(row):
    return row.items() if isinstance(row, dict) else enumerate(row)


def dense_array(field: CoeffField, rows: Sequence, ncols: int) -> np.ndarray:
    """float64 array of residues from sparse or dense rows (prime fields only)."""
    p = field.p
    A = np.zeros((len(rows), ncols))
    for i, row in enumerate(rows):
        if isinstance(row, np.ndarray):
            A[i] = row
            continue
        for j, v in _items(row):
            if v:
                A[i, j] = int(v) % p
    return A


def _ints(A: np.ndarray) -> List[List[int]]:
    return A.astype(np.int64).tolist()


def _qq(rows: Sequence, ncols: int, transpose: bool = False):
    M = flint.fmpq_mat(ncols, len(rows)) if transpose else flint.fmpq_mat(len(rows), ncols)
    for i, row in enumerate(rows):
        for j, v in _items(row):
            if v:
                v = Fraction(v)
                q = flint.fmpq(v.numerator, v.denominator)
                if transpose:
                    M[j, i] = q
                else:
                    M[i, j] = q
    return M


def _qq_rows(M) -> List[List[Fraction]]:
    r, c = M.nrows(), M.ncols()
    ent = [Fraction(int(x.p), int(x.q)) for x in M.entries()] if r and c else []
    return [ent[i * c:(i + 1) * c] for i in range(r)]


def _qq_rref(M) -> Tuple[List[List[Fraction]], List[int]]:
    R, rk = M.rref()
    rows = _qq_rows(R)[:int(rk)]
    piv = [next(j for j, x in enumerate(row) if x) for row in rows]
    return rows, piv


def _qq_nullspace(M) -> List[List[Fraction]]:
    n = M.ncols()
    rows, piv = _qq_rref(M)
    out = []
    pset = set(piv)
    for f in range(n):
        if f in pset:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pj in enumerate(piv):
            v[pj] = -rows[i][f]
        out.append(v)
    return out


def rank(field: CoeffField, rows: Sequence, ncols: int) -> int:
    if not len(rows) or ncols == 0:
        return 0
    if field.p is None:
        return int(_qq(rows, ncols).rank())
    return fp.rank(dense_array(field, rows, ncols), field.p)


def row_basis(field: CoeffField, rows: Sequence, ncols: int) -> List[List]:
    """Reduced echelon basis of the row span."""
    if not len(rows) or ncols == 0:
        return []
    if field.p is None:
        return _qq_rref(_qq(rows, ncols))[0]
    E, _ = fp.rref(dense_array(field, rows, ncols), field.p)
    return _ints(E)


def left_kernel(field: CoeffField, rows: Sequence, ncols: int) -> List[List]:
    """Basis of {c : sum_i c_i rows[i] = 0}, as dense vectors of length len(rows)."""
    m = len(rows)
    if m == 0:
        return []
    if ncols == 0:
        return [[1 if k == i else 0 for k in range(m)] for i in range(m)]
    if field.p is None:
        return _qq_nullspace(_qq(rows, ncols, transpose=True))
    return _ints(fp.left_kernel(dense_array(field, rows, ncols), field.p))


def nullspace(field: CoeffField, rows: Sequence, ncols: int) -> List[List]:
    """Basis of {x : rows . x = 0}."""
    if ncols == 0:
        return []
    if not len(rows):
        return [[1 if k == i else 0 for k in range(ncols)] for i in range(ncols)]
    if field.p is None:
        return _qq_nullspace(_qq(rows, ncols))
    return _ints(fp.nullspace(dense_array(field, rows, ncols), field.p))


def independent_columns(field: CoeffField, vectors: Sequence, dim: int) -> List[int]:
    """Indices of the first maximal independent subfamily (greedy in order)."""
    if not len(vectors) or dim == 0:
        return []
    if field.p is None:
        return _qq_rref(_qq(vectors, dim, transpose=True))[1]
    return fp.independent_rows(dense_array(field, vectors, dim), field.p)


def extend_basis(field: CoeffField, base: Sequence, candidates: Sequence, dim: int) -> List[int]:
    """Indices of candidates completing an independent base family to a basis
    of span(base + candidates); base is assumed independent."""
    idx = independent_columns(field, list(base) + list(candidates), dim)
    nb = len(base)
    return [j - nb for j in idx if j >= nb]


def solve_rows(field: CoeffField, rows: Sequence, ncols: int, target):
    """Find c with sum_i c_i rows[i] = target, or None."""
    m = len(rows)
    if m == 0:
        return None if any(v for _, v in _items(target)) else []
    aug = list(rows) + [target]
    ker = left_kernel(field, aug, ncols)
    # need a kernel vector with nonzero last coordinate
    for v in ker:
        last = v[m]
        if last:
            if field.p is None:
                return [-x / last for x in v[:m]]
            inv = pow(int(last), -1, field.p)
            return [(-x * inv) % field.p for x in v[:m]]
    return None


def evaluate_rank(field: CoeffField, entries: Iterable[Tuple[int, int, object]], nrows: int, ncols: int) -> int:
    if nrows == 0 or ncols == 0:
        return 0
    if field.p is None:
        M = flint.fmpq_mat(nrows, ncols)
        for i, j, v in entries:
            if v:
                v = Fraction(v)
                M[i, j] = flint.fmpq(v.numerator, v.denominator)
        return int(M.rank())
    A = np.zeros((nrows, ncols))
    for i, j, v in entries:
        A[i, j] = int(v) % field.p
    return fp.rank(A, field.p)
