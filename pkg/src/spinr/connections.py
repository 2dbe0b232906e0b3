"""Nomizu maps, auxiliary curvature and Ricci tensors of the homogeneous models.

Linear maps on m are stored as arrays indexed by the orthonormal m_basis:
``tangent[i]`` is the so(dim m) matrix of Lambda(e_i), ``aux[i]`` the so(r)
matrix of the auxiliary part.  A 2-form ``w`` becomes the endomorphism with
matrix ``T[j, i] = w(e_i, e_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numlin
from .numlin import Tolerance, DEFAULT_TOL
from .spaces import ReductiveModel, SpaceId, ModelError


@dataclass(frozen=True)
class NomizuMap:
    tangent: np.ndarray  # (dim_m, dim_m, dim_m)
    aux: np.ndarray  # (dim_m, r, r)

    def __post_init__(self):
        for name, arr in (("tangent", self.tangent), ("aux", self.aux)):
            if not np.allclose(arr, -np.swapaxes(arr, 1, 2), atol=1e-10):
                raise ValueError(f"{name} part of a Nomizu map must be skew")

    @classmethod
    def zero(cls, model: ReductiveModel) -> "NomizuMap":
        d, r = model.dim_m, model.r
        return cls(np.zeros((d, d, d)), np.zeros((d, r, r)))

    def with_aux(self, aux) -> "NomizuMap":
        return NomizuMap(self.tangent, np.asarray(aux, dtype=float))


def structure_constants(model: ReductiveModel):
    """C[i, j] = m-coordinates of [e_i, e_j] and Hc[i, j] = its h-coordinates."""
    d = model.dim_m
    if not model.is_matrix_model:
        raise ModelError("OP2 has no matrix realisation of [m, m]")
    C = np.zeros((d, d, d))
    Hc = np.zeros((d, d, model.dim_h))
    for i in range(d):
        for j in range(i + 1, d):
            h, m = model.bracket_split(i, j)
            C[i, j], C[j, i] = m, -m
            Hc[i, j], Hc[j, i] = h, -h
    return C, Hc


def levi_civita_nomizu(model: ReductiveModel) -> NomizuMap:
    """Tangent Nomizu map X -> (Y -> 1/2 [X,Y]_m + U(X,Y)); zero auxiliary part."""
    d, r = model.dim_m, model.r
    if not model.is_matrix_model:
        # symmetric presentation: [m, m] lies in h
        return NomizuMap.zero(model)
    C, _ = structure_constants(model)
    # U(e_i, e_j)_k = 1/2 (g([e_k, e_i]_m, e_j) + g(e_i, [e_k, e_j]_m))
    U = 0.5 * (np.einsum("kij->ijk", C) + np.einsum("kji->ijk", C))
    # Lambda(e_i)[k, j] = 1/2 C[i, j, k] + U[i, j, k]
    L = np.einsum("ijk->ikj", 0.5 * C + U)
    L[np.abs(L) < 1e-14] = 0.0
    return NomizuMap(L, np.zeros((d, r, r)))


def _spin_element(dim: int, terms) -> np.ndarray:
    """so matrix whose spin lift is sum c * e_x e_y (positions x, y)."""
    A = np.zeros((dim, dim))
    for c, x, y in terms:
        A[y, x] += 2 * c
        A[x, y] -= 2 * c
    return A


def symplectic_nomizu_closed_form(n: int, a: float, t: float) -> NomizuMap:
    """Closed-form Levi-Civita Nomizu map of the symplectic CP^{2n+1} model."""
    if not (a > 0 and t > 0):
        raise ValueError("a and t must be positive")
    d = 4 * n + 2
    X2, X3 = 0, 1

    def e(p, eps):
        return 2 + 4 * (p - 1) + eps

    c = (1 - t) / (2 * np.sqrt(2 * a * t))
    k = 0.5 * np.sqrt(t / (2 * a))
    L = np.zeros((d, d, d))
    ps = range(1, n + 1)
    L[X2] = _spin_element(d, [(c, e(p, 0), e(p, 2)) for p in ps] + [(-c, e(p, 1), e(p, 3)) for p in ps])
    L[X3] = _spin_element(d, [(c, e(p, 0), e(p, 3)) for p in ps] + [(c, e(p, 1), e(p, 2)) for p in ps])
    for p in ps:
        L[e(p, 0)] = _spin_element(d, [(-k, X2, e(p, 2)), (-k, X3, e(p, 3))])
        L[e(p, 1)] = _spin_element(d, [(k, X2, e(p, 3)), (-k, X3, e(p, 2))])
        L[e(p, 2)] = _spin_element(d, [(k, X2, e(p, 0)), (k, X3, e(p, 1))])
        L[e(p, 3)] = _spin_element(d, [(-k, X2, e(p, 1)), (k, X3, e(p, 0))])
    return NomizuMap(L, np.zeros((d, 2, 2)))


def _so_basis(r: int):
    out = []
    for k in range(r):
        for l in range(k + 1, r):
            A = np.zeros((r, r))
            A[l, k], A[k, l] = 1.0, -1.0
            out.append(A)
    return out


def invariant_aux_nomizu_space(model: ReductiveModel, tol: Tolerance = DEFAULT_TOL) -> list:
    """Basis of equivariant linear maps m -> so(r), as arrays of shape (dim_m, r, r)."""
    d, r = model.dim_m, model.r
    so = _so_basis(r)
    if not so:
        return []
    nu = d * len(so)
    S = np.array(so)  # (q, r, r)
    ops = []
    for X in model.h_basis:
        A = model.isotropy_so(X)
        B = model.aux_action(X)
        # unknown L[k] = sum_q x[k, q] S[q]; residual_j = sum_k A[k, j] L[k] - [B, L[j]]
        op = np.zeros((d * r * r, nu))
        for k in range(d):
            for q, Sq in enumerate(S):
                col = np.zeros((d, r, r))
                col += np.einsum("j,ab->jab", A[k, :], Sq)
                col[k] -= B @ Sq - Sq @ B
                op[:, k * len(so) + q] = col.reshape(-1)
        ops.append(op)
    K = numlin.joint_kernel(ops, tol, canonical=False)
    if K.shape[0] == 0:
        return []
    # the equations are real; pick a real orthonormal basis of the span
    Rk = np.vstack([K.real, K.imag])
    u, s, vh = np.linalg.svd(Rk, full_matrices=False)
    Rb = vh[: K.shape[0]]
    return [np.tensordot(v.reshape(d, len(so)), S, axes=1) for v in Rb]


def aux_curvature(model: ReductiveModel, aux) -> np.ndarray:
    """Omega[i, j] = [L(e_i), L(e_j)] - L([e_i, e_j]) with L = aux_action on h and ``aux`` on m."""
    d, r = model.dim_m, model.r
    aux = np.asarray(aux, dtype=float).reshape(d, r, r)
    C, Hc = structure_constants(model)
    hA = np.array(model.h_aux())  # (dim_h, r, r)
    comm = np.einsum("iab,jbc->ijac", aux, aux) - np.einsum("jab,ibc->ijac", aux, aux)
    lam = np.einsum("ijh,hab->ijab", Hc, hA) + np.einsum("ijk,kab->ijab", C, aux)
    return comm - lam


def form_to_endo(w: np.ndarray) -> np.ndarray:
    return np.asarray(w).T.copy()


def einstein_constant(Ric: np.ndarray, rel: float = 1e-8):
    """The constant c with Ric = c Id, or None."""
    c = np.trace(Ric) / Ric.shape[0]
    if np.abs(Ric - c * np.eye(Ric.shape[0])).max() <= rel * max(abs(c), 1e-300):
        return float(c)
    return None


def ricci_from_spinor(model: ReductiveModel, psi, Omega: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Ric = |psi|^-2 sum_{k<l} Theta_kl o eta_kl."""
    from .spinorcalc import eta_forms

    nrm2 = float(np.vdot(psi, psi).real)
    if nrm2 == 0:
        raise ValueError("zero spinor")
    eta = eta_forms(model, psi)
    d = model.dim_m
    Ric = np.zeros((d, d))
    for (k, l), w in eta.forms.items():
        theta = Omega[:, :, l, k]
        Ric += form_to_endo(theta) @ form_to_endo(w)
    return Ric / nrm2


def ricci_direct(model: ReductiveModel) -> np.ndarray:
    """Ricci endomorphism from the curvature of the Levi-Civita Nomizu map."""
    d = model.dim_m
    L = levi_civita_nomizu(model).tangent
    C, Hc = structure_constants(model)
    adh = np.array(model.h_isotropy())  # (dim_h, d, d)
    # R(e_i, e_j) = [L_i, L_j] - L([e_i, e_j]_m) - ad([e_i, e_j]_h)
    R = (np.einsum("iab,jbc->ijac", L, L) - np.einsum("jab,ibc->ijac", L, L)
         - np.einsum("ijk,kab->ijab", C, L) - np.einsum("ijh,hab->ijab", Hc, adh))
    # Ric(e_j) = sum_i R(e_j, e_i) e_i
    Ric = np.einsum("jiai->aj", R)
    if not np.allclose(Ric, Ric.T, atol=1e-9 * max(1.0, np.abs(Ric).max())):
        raise ModelError("Ricci endomorphism is not symmetric")
    return Ric
