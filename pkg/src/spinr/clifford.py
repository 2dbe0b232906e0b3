"""Complex spin representations realised on exterior forms.

Sigma_n has basis y_{j1} ^ ... ^ y_{jl} (j1 < ... < jl <= floor(n/2)), stored
as a bitmask where bit j-1 stands for y_j.  For n = 2k the Clifford generators
carry labels 1..2k, for n = 2k+1 they carry labels 0..2k.  An element of so(n)
is an antisymmetric real n x n matrix ``A`` acting on column vectors; matrix
position p corresponds to label p+1 (even n) or p (odd n).  The wedge
e_i ^ e_j sends e_i to e_j, so its matrix has +1 at [j, i] and -1 at [i, j].

The Hermitian product ``herm(phi, psi)`` is linear in ``phi`` and
conjugate-linear in ``psi``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp


def spinor_dim(n: int) -> int:
    return 1 << (n // 2)


def labels(n: int) -> list[int]:
    """Clifford labels in matrix-position order."""
    return list(range(1, n + 1)) if n % 2 == 0 else list(range(n))


def label_to_pos(n: int, label: int) -> int:
    if n % 2 == 0:
        if not 1 <= label <= n:
            raise IndexError(f"label {label} invalid for even n={n}")
        return label - 1
    if not 0 <= label < n:
        raise IndexError(f"label {label} invalid for odd n={n}")
    return label


def _popcount_below(mask: int, j: int) -> int:
    return bin(mask & ((1 << (j - 1)) - 1)).count("1")


@lru_cache(maxsize=None)
def _gamma_cached(n: int, label: int) -> sp.csr_matrix:
    label_to_pos(n, label)
    dim = spinor_dim(n)
    rows, cols, vals = [], [], []
    for mask in range(dim):
        if label == 0:
            rows.append(mask)
            cols.append(mask)
            vals.append(1j if bin(mask).count("1") % 2 == 0 else -1j)
            continue
        j = (label + 1) // 2
        bit = 1 << (j - 1)
        sign = -1.0 if _popcount_below(mask, j) % 2 else 1.0
        if mask & bit:
            # contraction x_j
            coef = sign * (1j if label % 2 else -1.0)
        else:
            # wedge y_j
            coef = sign * (1j if label % 2 else 1.0)
        rows.append(mask ^ bit)
        cols.append(mask)
        vals.append(coef)
    M = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)
    M.sort_indices()
    return M


def gamma(n: int, label: int) -> sp.csr_matrix:
    """Matrix of Clifford multiplication by e_label on Sigma_n."""
    return _gamma_cached(n, label).copy()


def gammas(n: int) -> list[sp.csr_matrix]:
    """All Clifford generators, in matrix-position order."""
    return [_gamma_cached(n, l) for l in labels(n)]


def basis_spinor(n: int, js=()) -> np.ndarray:
    """The form y_{j1} ^ ... ^ y_{jl} (order of ``js`` is irrelevant up to sign; pass sorted)."""
    v = np.zeros(spinor_dim(n), dtype=complex)
    mask = 0
    for j in js:
        if not 1 <= j <= n // 2:
            raise IndexError(f"y_{j} not defined for n={n}")
        mask |= 1 << (j - 1)
    v[mask] = 1.0
    return v


def clifford_apply(n: int, label: int, psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.shape != (spinor_dim(n),):
        raise ValueError(f"spinor has shape {psi.shape}, expected ({spinor_dim(n)},)")
    return _gamma_cached(n, label) @ psi


def clifford_vector(n: int, v) -> sp.csr_matrix:
    """Clifford multiplication by the vector sum_p v[p] e_{label(p)}."""
    v = np.asarray(v)
    if v.shape != (n,):
        raise ValueError(f"vector has shape {v.shape}, expected ({n},)")
    dim = spinor_dim(n)
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for p, g in enumerate(gammas(n)):
        if v[p] != 0:
            out = out + v[p] * g
    return out


def check_so(A, n: int | None = None, atol: float = 1e-10) -> np.ndarray:
    """Validate an (possibly complexified) so(n) element."""
    A = np.asarray(A)
    A = A.astype(complex if np.iscomplexobj(A) else float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("so(n) element must be a square matrix")
    if n is not None and A.shape[0] != n:
        raise ValueError(f"so element has size {A.shape[0]}, expected {n}")
    if not np.allclose(A, -A.T, atol=atol):
        raise ValueError("so(n) element must be antisymmetric")
    return A


def wedge(n: int, i: int, j: int) -> np.ndarray:
    """so(n) matrix of e_i ^ e_j (labels)."""
    A = np.zeros((n, n))
    p, q = label_to_pos(n, i), label_to_pos(n, j)
    A[q, p] += 1.0
    A[p, q] -= 1.0
    return A


def lift(A) -> sp.csr_matrix:
    """Spin lift sum_{p<q} (A[q,p]/2) e_p e_q of an so(n) matrix to Sigma_n.

    Complex matrices are lifted complex-linearly.
    """
    A = check_so(A)
    n = A.shape[0]
    dim = spinor_dim(n)
    g = gammas(n)
    out = sp.csr_matrix((dim, dim), dtype=complex)
    qs, ps = np.nonzero(np.tril(A, -1))
    for q, p in zip(qs, ps):
        out = out + (A[q, p] / 2.0) * (g[p] @ g[q])
    out.sum_duplicates()
    out.eliminate_zeros()
    return out.tocsr()


def spin_lift_apply(A, psi: np.ndarray) -> np.ndarray:
    A = check_so(A)
    psi = np.asarray(psi)
    if psi.shape != (spinor_dim(A.shape[0]),):
        raise ValueError("dimension mismatch between so(n) element and spinor")
    return lift(A) @ psi


def herm(phi: np.ndarray, psi: np.ndarray) -> complex:
    phi, psi = np.asarray(phi), np.asarray(psi)
    if phi.shape != psi.shape:
        raise ValueError(f"dimension mismatch: {phi.shape} vs {psi.shape}")
    return complex(np.vdot(psi, phi))


def herm_norm(psi: np.ndarray) -> float:
    return float(np.linalg.norm(psi))


def wedge_forms(n: int, phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Exterior product of two forms in Sigma_n."""
    dim = spinor_dim(n)
    out = np.zeros(dim, dtype=complex)
    for a in np.nonzero(phi)[0]:
        for b in np.nonzero(psi)[0]:
            if a & b:
                continue
            # sign of merging the sorted index lists of a and b
            swaps = sum(bin(a >> (j + 1)).count("1") for j in range(dim.bit_length()) if b >> j & 1)
            out[a | b] += (-1) ** swaps * phi[a] * psi[b]
    return out


# ------------------------------------------------------------ twisted modules


class TwistedModule:
    """Sigma_n (x) Sigma_r^{(x) m}, tangent factor first, Kronecker ordering.

    A twisted spinor is a flat complex array; ``as_tensor`` exposes its
    (m+1)-index shape.
    """

    def __init__(self, n: int, r: int, m: int):
        if n < 1 or r < 1:
            raise ValueError("n and r must be positive")
        if m < 1 or m % 2 == 0:
            raise ValueError(f"twisting number m must be odd, got {m}")
        self.n, self.r, self.m = n, r, m
        self.dn, self.dr = spinor_dim(n), spinor_dim(r)
        self.shape = (self.dn,) + (self.dr,) * m
        self.dim = self.dn * self.dr**m

    def __repr__(self):
        return f"TwistedModule(n={self.n}, r={self.r}, m={self.m})"

    def index(self, tangent_mask: int, aux_masks) -> int:
        aux_masks = list(aux_masks)
        if len(aux_masks) != self.m:
            raise ValueError("need one aux mask per twisting factor")
        return int(np.ravel_multi_index((tangent_mask, *aux_masks), self.shape))

    def as_tensor(self, psi: np.ndarray) -> np.ndarray:
        return np.asarray(psi).reshape(self.shape)

    def product(self, tangent: np.ndarray, *aux: np.ndarray) -> np.ndarray:
        """Elementary tensor tangent (x) aux_1 (x) ... (x) aux_m."""
        if len(aux) != self.m:
            raise ValueError(f"need {self.m} aux factors")
        out = np.asarray(tangent, dtype=complex)
        for a in aux:
            out = np.kron(out, a)
        return out

    def _factor_ops(self, tangent, aux):
        T = None
        if tangent is not None:
            A = check_so(tangent, self.n)
            T = lift(A) if np.any(A) else None
        S = None
        if aux is not None:
            B = check_so(aux, self.r)
            S = lift(B) if np.any(B) else None
        return T, S

    def operator(self, tangent=None, aux=None) -> sp.csr_matrix:
        """Sparse matrix of the derived action of (tangent, aux)."""
        T, S = self._factor_ops(tangent, aux)
        return self.operator_from_lifts(T, S)

    def operator_from_lifts(self, T=None, S=None) -> sp.csr_matrix:
        out = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        Ir = sp.identity(self.dr, dtype=complex, format="csr")
        if T is not None:
            out = out + sp.kron(T, sp.identity(self.dr**self.m, format="csr"), format="csr")
        if S is not None:
            for j in range(self.m):
                f = sp.identity(self.dn, dtype=complex, format="csr")
                for k in range(self.m):
                    f = sp.kron(f, S if k == j else Ir, format="csr")
                out = out + f
        return out.tocsr()

    def apply_lifts(self, T, S, psi: np.ndarray) -> np.ndarray:
        """Apply lifted factor matrices without building the full operator."""
        X = self.as_tensor(psi)
        out = np.zeros(self.shape, dtype=complex)
        if T is not None:
            out += np.moveaxis(np.tensordot(_dense(T), X, axes=([1], [0])), 0, 0)
        if S is not None:
            Sd = _dense(S)
            for j in range(1, self.m + 1):
                out += np.moveaxis(np.tensordot(Sd, X, axes=([1], [j])), 0, j)
        return out.reshape(-1)

    def twisted_apply(self, tangent, aux, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi)
        if psi.shape != (self.dim,):
            raise ValueError(f"spinor has shape {psi.shape}, expected ({self.dim},)")
        T, S = self._factor_ops(tangent, aux)
        return self.apply_lifts(T, S, psi)

    def tangent_clifford(self, v) -> sp.csr_matrix:
        """Clifford multiplication by a tangent vector, acting on the first factor."""
        C = clifford_vector(self.n, v)
        return sp.kron(C, sp.identity(self.dr**self.m, format="csr"), format="csr")

    def aux_pair(self, k: int, l: int) -> sp.csr_matrix:
        """Action of e_k e_l of the auxiliary factor (positions k, l), Leibniz over the m copies."""
        B = np.zeros((self.r, self.r))
        B[l, k] = 2.0
        B[k, l] = -2.0
        return self.operator(None, B)

    def to_records(self, psi: np.ndarray, drop: float = 1e-12) -> list[dict]:
        """Serialisable list of nonzero coefficients, sorted by index sets."""
        out = []
        for flat in np.nonzero(np.abs(psi) > drop)[0]:
            idx = np.unravel_index(int(flat), self.shape)
            out.append({
                "tangent_mask": _mask_list(idx[0]),
                "aux_masks": [_mask_list(a) for a in idx[1:]],
                "re": float(psi[flat].real),
                "im": float(psi[flat].imag),
            })
        out.sort(key=lambda d: (d["tangent_mask"], d["aux_masks"]))
        return out


def _mask_list(mask: int) -> list[int]:
    return [j + 1 for j in range(int(mask).bit_length()) if mask >> j & 1]


def _dense(M) -> np.ndarray:
    return M.toarray() if sp.issparse(M) else np.asarray(M)
