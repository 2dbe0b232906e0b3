"""Quaternionic matrices and sparse complex kernels.

Vectors are plain complex numpy arrays and operators are scipy.sparse
matrices (or dense arrays); everything here treats them as immutable.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

# rows of the stacked system above which kernels are found by deflation
SVD_ROW_LIMIT = 20000


@dataclass(frozen=True)
class Tolerance:
    rank_tol: float = 1e-9
    residual_tol: float = 1e-8
    drop_tol: float = 1e-12

    def __post_init__(self):
        if not (0 < self.drop_tol <= self.residual_tol):
            raise ValueError("need 0 < drop_tol <= residual_tol")
        if not self.rank_tol > 0:
            raise ValueError("rank_tol must be positive")

    @classmethod
    def from_env(cls, default: float | None = None) -> "Tolerance":
        """Build a tolerance, letting ``SPINR_TOL`` override the residual bound."""
        raw = os.environ.get("SPINR_TOL")
        value = float(raw) if raw else default
        if value is None:
            return cls()
        return cls(residual_tol=value, drop_tol=min(1e-12, value))


DEFAULT_TOL = Tolerance()


class QuatMatrix:
    """Square quaternionic matrix stored as its 1, i, j, k real parts."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        parts = np.array(parts, dtype=float)
        if parts.ndim != 3 or parts.shape[0] != 4 or parts.shape[1] != parts.shape[2]:
            raise ValueError("parts must have shape (4, n, n)")
        if not np.all(np.isfinite(parts)):
            raise ValueError("non-finite entry")
        parts.setflags(write=False)
        self.parts = parts

    @classmethod
    def zeros(cls, n: int) -> "QuatMatrix":
        return cls(np.zeros((4, n, n)))

    @classmethod
    def from_real(cls, M, unit: str = "1") -> "QuatMatrix":
        """Embed a real matrix as the coefficient of one quaternion unit."""
        M = np.asarray(M, dtype=float)
        parts = np.zeros((4,) + M.shape)
        parts["1ijk".index(unit)] = M
        return cls(parts)

    @property
    def n(self) -> int:
        return self.parts.shape[1]

    def _check(self, other: "QuatMatrix"):
        if not isinstance(other, QuatMatrix):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return QuatMatrix(self.parts + other.parts)

    def __sub__(self, other):
        self._check(other)
        return QuatMatrix(self.parts - other.parts)

    def __neg__(self):
        return QuatMatrix(-self.parts)

    def __mul__(self, c):
        return QuatMatrix(float(c) * self.parts)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return QuatMatrix(self.parts / float(c))

    def __matmul__(self, other):
        self._check(other)
        a0, a1, a2, a3 = self.parts
        b0, b1, b2, b3 = other.parts
        return QuatMatrix([
            a0 @ b0 - a1 @ b1 - a2 @ b2 - a3 @ b3,
            a0 @ b1 + a1 @ b0 + a2 @ b3 - a3 @ b2,
            a0 @ b2 - a1 @ b3 + a2 @ b0 + a3 @ b1,
            a0 @ b3 + a1 @ b2 - a2 @ b1 + a3 @ b0,
        ])

    def unit_times(self, unit: str) -> "QuatMatrix":
        """Left multiplication by a scalar quaternion unit."""
        q = QuatMatrix.from_real(np.eye(self.n), unit)
        return q @ self

    def trace_real(self) -> float:
        return float(np.trace(self.parts[0]))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.parts**2)))

    def allclose(self, other: "QuatMatrix", atol: float = 1e-12) -> bool:
        return self.n == other.n and np.allclose(self.parts, other.parts, atol=atol, rtol=0)

    def flat(self) -> np.ndarray:
        return self.parts.reshape(-1)

    def __repr__(self):
        return f"QuatMatrix(n={self.n})"


def elementary(kind: str, n: int, i: int, j: int) -> QuatMatrix:
    """E_{i,j} (skew) or F_{i,j} (symmetric) with 1-based indices."""
    if kind == "E":
        if not 1 <= i < j <= n:
            raise IndexError(f"E needs 1 <= i < j <= n, got ({i}, {j}) for n={n}")
        M = np.zeros((n, n))
        M[i - 1, j - 1] = -1.0
        M[j - 1, i - 1] = 1.0
    elif kind == "F":
        if not 1 <= i <= j <= n:
            raise IndexError(f"F needs 1 <= i <= j <= n, got ({i}, {j}) for n={n}")
        M = np.zeros((n, n))
        M[i - 1, j - 1] = 1.0
        M[j - 1, i - 1] = 1.0
    else:
        raise ValueError(f"unknown elementary kind {kind!r}")
    return QuatMatrix.from_real(M)


def E(n: int, i: int, j: int, unit: str = "1") -> QuatMatrix:
    return elementary("E", n, i, j).unit_times(unit) if unit != "1" else elementary("E", n, i, j)


def F(n: int, i: int, j: int, unit: str = "1") -> QuatMatrix:
    return elementary("F", n, i, j).unit_times(unit) if unit != "1" else elementary("F", n, i, j)


def b0(X: QuatMatrix, Y: QuatMatrix) -> float:
    """-Re tr(XY)."""
    if X.n != Y.n:
        raise ValueError(f"size mismatch: {X.n} vs {Y.n}")
    # real part of the trace only needs the 1-component of XY
    a, b = X.parts, Y.parts
    re = np.einsum("ij,ji->", a[0], b[0]) - sum(np.einsum("ij,ji->", a[u], b[u]) for u in (1, 2, 3))
    return -float(re)


def bracket(X: QuatMatrix, Y: QuatMatrix) -> QuatMatrix:
    return X @ Y - Y @ X


# ---------------------------------------------------------------- kernels


def _as_dense(op) -> np.ndarray:
    return op.toarray() if sp.issparse(op) else np.asarray(op)


def _orth_kernel(A: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Orthonormal kernel basis of a dense matrix, as columns."""
    ncols = A.shape[1]
    if A.shape[0] == 0 or ncols == 0:
        return np.eye(ncols, dtype=complex)
    # tall matrices already give a square vh without the full left factor
    tall = A.shape[0] >= ncols
    _, s, vh = scipy.linalg.svd(A, full_matrices=not tall, lapack_driver="gesdd")
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol.rank_tol * scale))
    return vh[rank:].conj().T


def _canonical(K: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis for the column span of K.

    A pivoted QR on the transpose picks coordinates in a reproducible order;
    the basis is the reduced row echelon form orthonormalised in that order.
    """
    if K.shape[1] == 0:
        return K
    _, _, piv = scipy.linalg.qr(K.T, pivoting=True, mode="economic")
    k = K.shape[1]
    pivots = np.sort(piv[:k])
    # express span in echelon form w.r.t. pivot rows, then Gram-Schmidt
    R = K @ np.linalg.solve(K[pivots, :], np.eye(k))
    Q, _ = np.linalg.qr(R)
    # fix phases: first large entry of each vector real positive
    for c in range(k):
        col = Q[:, c]
        idx = int(np.argmax(np.abs(col) > 1e-8 * np.abs(col).max()))
        Q[:, c] = col * (abs(col[idx]) / col[idx])
    return Q


def joint_kernel(ops: Sequence, tol: Tolerance = DEFAULT_TOL, canonical: bool = True) -> np.ndarray:
    """Orthonormal basis of the common kernel of ``ops``.

    Returns an array of shape ``(k, dim)`` whose rows are the basis vectors.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("need at least one operator")
    dim = ops[0].shape[1]
    for op in ops:
        if op.shape[1] != dim:
            raise ValueError(f"column dimension mismatch: {op.shape[1]} vs {dim}")
    total_rows = sum(op.shape[0] for op in ops)
    if total_rows <= SVD_ROW_LIMIT:
        stacked = np.vstack([_as_dense(op) for op in ops]).astype(complex)
        K = _orth_kernel(stacked, tol)
    else:
        K = np.eye(dim, dtype=complex)
        for op in ops:
            if K.shape[1] == 0:
                break
            restricted = op @ K
            restricted = _as_dense(restricted)
            K = K @ _orth_kernel(restricted, tol)
            # re-orthonormalise to stop drift across deflation steps
            K, _ = np.linalg.qr(K)
    if canonical:
        K = _canonical(K)
    K[np.abs(K) < tol.drop_tol] = 0
    return K.T.copy()


def kernel_residual(ops: Sequence, basis: np.ndarray) -> float:
    """Largest ||A v|| / ||v|| over operators and basis rows."""
    worst = 0.0
    for v in basis:
        nv = np.linalg.norm(v)
        for op in ops:
            worst = max(worst, float(np.linalg.norm(op @ v)) / nv)
    return worst


def rank(vectors: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank of a stack of vectors (rows)."""
    vectors = np.atleast_2d(vectors)
    if vectors.size == 0:
        return 0
    s = np.linalg.svd(vectors, compute_uv=False)
    return int(np.sum(s > tol.rank_tol * max(1.0, s[0])))


def projection_residual(vectors: np.ndarray, basis: np.ndarray) -> float:
    """Largest distance of unit-normalised ``vectors`` from the row span of an orthonormal ``basis``."""
    worst = 0.0
    for v in np.atleast_2d(vectors):
        v = v / np.linalg.norm(v)
        proj = basis.T @ (basis.conj() @ v) if len(basis) else np.zeros_like(v)
        worst = max(worst, float(np.linalg.norm(v - proj)))
    return worst
