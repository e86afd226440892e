"""Gauss-Jordan linear algebra over any field object from ``finite_field``.

Matrices are 2-D int64 numpy arrays of field elements.  Row operations are
vectorised; only the pivot loop runs in Python.
"""

from __future__ import annotations

import numpy as np


class SingularMatrixError(ValueError):
    pass


def rref(F, A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (zero rows dropped)."""
    A = np.array(A, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ValueError("rref expects a matrix")
    rows, cols = A.shape
    if getattr(F, "p", None) == 2 and getattr(F, "n", 1) == 1:
        return _rref_gf2(A)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        if A[r, c] != 1:
            A[r] = F.mul(A[r], F.inv(A[r, c]))
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            # row r is zero left of c, so only columns c.. change
            A[hit, c:] = F.sub(A[hit, c:], F.mul(col[hit, None], A[r, c:][None, :]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _rref_gf2(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """GF(2) elimination on uint8 rows with XOR."""
    B = (A & 1).astype(np.uint8)
    rows, cols = B.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(B[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            B[[r, p]] = B[[p, r]]
        hit = np.flatnonzero(B[:, c])
        hit = hit[hit != r]
        if hit.size:
            B[hit, c:] ^= B[r, c:]
        pivots.append(c)
        r += 1
    return B[:r].astype(np.int64), pivots


def rank(F, A) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])


def nullspace(F, A) -> np.ndarray:
    """Basis of {x : A x = 0} as rows, itself in reduced row echelon form."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = rref(F, A)
    free = [c for c in range(cols) if c not in set(piv)]
    if not free:
        return np.zeros((0, cols), dtype=np.int64)
    N = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        N[k, f] = 1
        if piv:
            N[k, piv] = F.neg(R[:, f])
    return rref(F, N)[0]


def inverse(F, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse expects a square matrix")
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref(F, aug)
    if piv[:n] != list(range(n)) or len(R) < n:
        raise SingularMatrixError("matrix is singular")
    return R[:, n:]


def solve_affine(F, A, b) -> tuple[np.ndarray | None, np.ndarray]:
    """All solutions of A x = b: (particular solution or None, nullspace basis)."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    cols = A.shape[1]
    aug = np.concatenate([A, b], axis=1)
    R, piv = rref(F, aug)
    if cols in piv:
        return None, nullspace(F, A)
    x = np.zeros(cols, dtype=np.int64)
    for k, c in enumerate(piv):
        x[c] = R[k, cols]
    return x, nullspace(F, A)


def in_span(F, basis_rref: np.ndarray, pivots: list[int], X) -> np.ndarray:
    """Boolean mask: which rows of X lie in the row space of ``basis_rref``."""
    X = np.asarray(X, dtype=np.int64)
    if len(pivots) == 0:
        return ~np.any(X != 0, axis=1)
    resid = F.sub(X, F.matmul(X[:, pivots], basis_rref))
    return ~np.any(resid != 0, axis=1)


def intersect_rowspaces(F, A, B) -> np.ndarray:
    """Row-space intersection of A and B (rows are vectors)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if len(A) == 0 or len(B) == 0:
        return np.zeros((0, A.shape[1] if A.ndim == 2 else B.shape[1]), dtype=np.int64)
    # x A = y B  <=>  [A; -B]^T [x; y] = 0
    M = np.concatenate([A, F.neg(B)], axis=0).T
    ker = nullspace(F, M)
    if len(ker) == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64)
    vecs = F.matmul(ker[:, : len(A)], A)
    return rref(F, vecs)[0]
