"""Dense linear algebra over F_p on top of BLAS.

Entries live in float64 arrays holding integers in [0, p).  Products of two
residues are below 2^30, so a BLAS matrix product with inner dimension up to
2^22 is exact before reduction.  Elimination is blocked by column panels:
pivots are found on a narrow panel with plain vector operations, and the
rest of the matrix is updated by one matrix product per panel.

Pivoting is deterministic: inside a panel, the pivot of a column is the
unused row of smallest current position with a nonzero entry.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

PANEL = 128


def as_fp(a, p: int) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    return np.mod(arr, p)


def red(x: np.ndarray, p: int) -> np.ndarray:
    """Reduce integral float64 entries into [0, p); much faster than np.mod.

    The half offset keeps exact multiples of p away from a rounding boundary;
    valid while |x| stays well below 2^53 / p.
    """
    return x - p * np.floor((x + 0.5) * (1.0 / p))


def _inv_mod(x: int, p: int) -> int:
    return pow(int(x), -1, p)


def _inverse(B: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a small invertible matrix over F_p (Gauss-Jordan)."""
    k = B.shape[0]
    M = np.concatenate([B.copy(), np.eye(k)], axis=1)
    for c in range(k):
        nz = np.nonzero(M[c:, c])[0]
        if len(nz) == 0:
            raise ZeroDivisionError("singular pivot block")
        piv = c + nz[0]
        if piv != c:
            M[[c, piv]] = M[[piv, c]]
        M[c] = red(M[c] * _inv_mod(M[c, c], p), p)
        col = M[:, c].copy()
        col[c] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            M[nzr] = red(M[nzr] - np.outer(col[nzr], M[c]), p)
    return M[:, k:]


def _panel_pivots(P: np.ndarray, p: int) -> Tuple[List[int], List[int]]:
    """Pivot rows and columns of a narrow matrix by unblocked elimination."""
    P = P.copy()
    used = np.zeros(P.shape[0], dtype=bool)
    sel: List[int] = []
    pcols: List[int] = []
    for c in range(P.shape[1]):
        cand = np.nonzero((P[:, c] != 0) & ~used)[0]
        if len(cand) == 0:
            continue
        i = int(cand[0])
        used[i] = True
        sel.append(i)
        pcols.append(c)
        row = red(P[i, c:] * _inv_mod(P[i, c], p), p)
        col = P[:, c].copy()
        col[i] = 0
        col[used] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            P[nzr, c:] = red(P[nzr, c:] - np.outer(col[nzr], row), p)
    return sel, pcols


def _echelon(A: np.ndarray, p: int, reduced: bool, width: int):
    m, n = A.shape
    order = np.arange(m)
    r = 0
    pivots: List[int] = []
    if m == 0 or n == 0:
        return A, pivots, order
    for j0 in range(0, n, width):
        if r >= m:
            break
        j1 = min(n, j0 + width)
        if width > 8:
            _, sub, perm = _echelon(A[r:, j0:j1].copy(), p, False, max(8, width // 4))
            sel = [int(x) for x in perm[:len(sub)]]
            pcols = [j0 + c for c in sub]
        else:
            sel, sub = _panel_pivots(A[r:, j0:j1], p)
            pcols = [j0 + c for c in sub]
        k = len(sel)
        if k == 0:
            continue
        sel_abs = np.array([r + i for i in sel])
        S = A[sel_abs, j0:]
        B = S[:, [c - j0 for c in pcols]]
        S = red(_inverse(B, p) @ S, p)
        others = np.ones(m, dtype=bool)
        others[sel_abs] = False
        if not reduced:
            others[:r] = False
        idx = np.nonzero(others)[0]
        if len(idx):
            coef = A[np.ix_(idx, pcols)]
            nzrows = np.nonzero(coef.any(axis=1))[0]
            if len(nzrows):
                rows = idx[nzrows]
                A[rows, j0:] = red(A[rows, j0:] - coef[nzrows] @ S, p)
        # move the pivot rows to positions r .. r+k-1, keeping the rest in order
        keep = np.ones(m, dtype=bool)
        keep[:r] = False
        keep[sel_abs] = False
        perm = np.concatenate([np.arange(r), sel_abs, np.nonzero(keep)[0]])
        A = A[perm]
        order = order[perm]
        A[r:r + k, j0:] = S
        A[r:r + k, :j0] = 0
        r += k
        pivots.extend(pcols)
    return A, pivots, order


def echelon(A: np.ndarray, p: int, reduced: bool = True) -> Tuple[np.ndarray, List[int]]:
    """Row echelon form of A over F_p.

    Returns (E, pivots): E has the same shape, its first len(pivots) rows are
    the echelon rows (reduced when ``reduced``), the remaining rows are zero.
    The input is not modified.
    """
    A = np.array(A, dtype=np.float64, copy=True)
    E, piv, _ = _echelon(A, p, reduced, PANEL)
    return E, piv


def rank(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    # eliminate along the shorter side
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(echelon(A, p, reduced=False)[1])


def rref(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    E, piv = echelon(A, p, reduced=True)
    return E[:len(piv)], piv


def nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} as rows of the returned array."""
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0))
    if m == 0:
        return np.eye(n)
    E, piv = rref(A, p)
    free = [j for j in range(n) if j not in set(piv)]
    N = np.zeros((len(free), n))
    if not free:
        return N
    N[np.arange(len(free)), free] = 1
    if piv:
        N[:, piv] = red(-E[:, free].T, p)
    return N


def left_kernel(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of {y : y A = 0} as rows."""
    return nullspace(A.T, p)


def independent_rows(A: np.ndarray, p: int) -> List[int]:
    """Indices of the greedy (first-come) maximal independent set of rows."""
    if A.shape[0] == 0:
        return []
    _, piv = echelon(A.T, p, reduced=False)
    return piv


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    k = A.shape[1]
    if k <= (1 << 22):
        return red(A @ B, p)
    out = np.zeros((A.shape[0], B.shape[1]))
    for s in range(0, k, 1 << 22):
        out = red(out + A[:, s:s + (1 << 22)] @ B[s:s + (1 << 22)], p)
    return out
