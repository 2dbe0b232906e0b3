"""Invariant twisted spinors, eta-forms, purity, parallelism and generalised Killing spinors."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import clifford, numlin
from .clifford import TwistedModule, lift
from .connections import NomizuMap
from .numlin import Tolerance, DEFAULT_TOL
from .spaces import ReductiveModel, SpaceId, ModelError


def twisted_module(model: ReductiveModel) -> TwistedModule:
    return TwistedModule(model.dim_m, model.r, model.m_twists)


def h_lifts(model: ReductiveModel) -> list:
    """(tangent lift, aux lift) of every h_basis element."""
    out = []
    for X in model.h_basis:
        A = model.isotropy_so(X)
        B = model.aux_action(X)
        out.append((lift(A) if np.any(A) else None, lift(B) if np.any(B) else None))
    return out


def h_operators(model: ReductiveModel) -> list:
    mod = twisted_module(model)
    return [mod.operator_from_lifts(T, S) for T, S in h_lifts(model)]


def invariance_residual(model: ReductiveModel, psi: np.ndarray, lifts=None) -> float:
    """Largest |X . psi| / |psi| over the h basis."""
    mod = twisted_module(model)
    lifts = lifts if lifts is not None else h_lifts(model)
    nrm = np.linalg.norm(psi)
    return max((np.linalg.norm(mod.apply_lifts(T, S, psi)) / nrm for T, S in lifts), default=0.0)


# the full operator is assembled only below this module dimension
DIRECT_DIM_LIMIT = 1 << 13


def invariant_space(model: ReductiveModel, tol: Tolerance = DEFAULT_TOL, direct: bool = False,
                    table3_path=None) -> np.ndarray:
    """Orthonormal basis (rows) of the h-invariant twisted spinors, verified post hoc.

    For OP^2 with m >= 3 the spinors come from the explicit construction in
    :mod:`spinr.weights` unless ``direct`` is set.
    """
    mod = twisted_module(model)
    if model.space_id == SpaceId.OP2 and model.aux_param == "nontrivial" and model.m_twists >= 3 and not direct:
        from . import weights

        if model.r != 9 or model.m_twists != 3:
            raise ModelError("the OP2 construction is available for r = 9, m = 3")
        vecs = weights.build_op2_spinors(table3_path, tol=tol)
        basis = _orthonormalise(np.array(vecs), tol)
    else:
        if mod.dim > DIRECT_DIM_LIMIT:
            raise ModelError(f"module of dimension {mod.dim} is too large for a direct kernel")
        if model.space_id == SpaceId.OP2 and model.aux_param == "trivial":
            basis = _trivial_aux_invariants(model, mod, tol)
        else:
            basis = numlin.joint_kernel(h_operators(model), tol)
    lifts = h_lifts(model)
    for v in basis:
        res = invariance_residual(model, v, lifts)
        if res > tol.residual_tol:
            raise ModelError(f"invariant spinor fails verification (residual {res:.2e})")
    return basis


def _trivial_aux_invariants(model, mod, tol):
    # with trivial auxiliary action only the tangent factor is constrained
    ops = [T for T, _ in h_lifts(model) if T is not None]
    K = numlin.joint_kernel(ops, tol)
    aux_dim = mod.dr**mod.m
    out = [np.kron(k, np.eye(aux_dim)[j]) for k in K for j in range(aux_dim)]
    return np.array(out).reshape(-1, mod.dim)


def _orthonormalise(vecs: np.ndarray, tol: Tolerance) -> np.ndarray:
    q, rr = np.linalg.qr(vecs.T)
    keep = np.abs(np.diag(rr)) > tol.rank_tol * max(1.0, np.abs(rr).max())
    return q[:, keep].T.copy()


# ------------------------------------------------------------------ eta forms


@dataclass
class EtaData:
    forms: dict = field(default_factory=dict)  # (k, l) -> antisymmetric dim_m x dim_m

    def endo(self, k: int, l: int) -> np.ndarray:
        return self.forms[(k, l)].T.copy()


def eta_forms(model: ReductiveModel, psi: np.ndarray) -> EtaData:
    """eta_kl(X, Y) = Re <(X.Y + <X,Y>) . (e_k . e_l) . psi, psi> for aux positions k < l."""
    psi = np.asarray(psi)
    if not np.any(psi):
        raise ValueError("zero spinor")
    mod = twisted_module(model)
    d = model.dim_m
    G = [mod.tangent_clifford(np.eye(d)[i]) for i in range(d)]
    Gpsi = [g @ psi for g in G]
    out = EtaData()
    for k in range(model.r):
        for l in range(k + 1, model.r):
            phi = mod.aux_pair(k, l) @ psi
            Gphi = [g @ phi for g in G]
            # <X.Y.phi, psi> = -<Y.phi, X.psi> by skewness of Clifford multiplication
            W = -np.array([[np.vdot(Gpsi[i], Gphi[j]).real for j in range(d)] for i in range(d)])
            # X.X = -|X|^2 cancels against <X, X>
            np.fill_diagonal(W, 0.0)
            out.forms[(k, l)] = W
    return out


def two_form_clifford(model: ReductiveModel, w: np.ndarray) -> sp.csr_matrix:
    """Clifford action sum_{i<j} w(e_i, e_j) e_i e_j on the tangent factor."""
    mod = twisted_module(model)
    d = model.dim_m
    # sum_{i<j} w_ij e_i e_j is the spin lift of the so element 2 w_ij e_i ^ e_j
    A = np.zeros((d, d))
    iu = np.triu_indices(d, 1)
    A[iu[1], iu[0]] = 2 * w[iu]
    A = A - A.T
    return mod.operator(A, None)


@dataclass(frozen=True)
class PurityResult:
    pure_up_to_scale: bool
    scale: float | None
    lambdas: tuple
    residual: float


def purity_check(model: ReductiveModel, psi: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> PurityResult:
    eta = eta_forms(model, psi)
    d = model.dim_m
    lams = []
    for key in sorted(eta.forms):
        J = eta.endo(*key)
        J2 = J @ J
        lam = np.trace(J2) / d
        if np.abs(J2 - lam * np.eye(d)).max() > 1e-8 * max(1.0, abs(lam)):
            return PurityResult(False, None, tuple(lams), float("inf"))
        lams.append(float(lam))
    if not lams:
        return PurityResult(False, None, (), float("inf"))
    lam = lams[0]
    if lam >= 0 or any(abs(x - lam) > 1e-8 * abs(lam) for x in lams):
        return PurityResult(False, None, tuple(lams), float("inf"))
    c = abs(lam) ** -0.25
    residual = 0.0
    if model.r >= 3:
        mod = twisted_module(model)
        cpsi = c * psi
        for (k, l), w in eta.forms.items():
            op = two_form_clifford(model, c**2 * w) + 2 * mod.aux_pair(k, l)
            residual = max(residual, float(np.linalg.norm(op @ cpsi)) / np.linalg.norm(cpsi))
        if residual > tol.residual_tol:
            return PurityResult(False, c, tuple(lams), residual)
    return PurityResult(True, c, tuple(lams), residual)


# ----------------------------------------------------------------- parallel


@dataclass(frozen=True)
class ParallelResult:
    parallel: bool
    max_residual: float


def parallel_check(model: ReductiveModel, psi: np.ndarray, nomizu: NomizuMap,
                   tol: Tolerance = DEFAULT_TOL) -> ParallelResult:
    mod = twisted_module(model)
    nrm = np.linalg.norm(psi)
    worst = 0.0
    for i in range(model.dim_m):
        A, B = nomizu.tangent[i], nomizu.aux[i]
        T = lift(A) if np.any(A) else None
        S = lift(B) if np.any(B) else None
        worst = max(worst, float(np.linalg.norm(mod.apply_lifts(T, S, psi))) / nrm)
    return ParallelResult(worst <= tol.residual_tol, worst)


# ---------------------------------------------------------- generalised Killing


@dataclass(frozen=True)
class KillingSolution:
    A: np.ndarray
    residual: float


def killing_residual(model: ReductiveModel, psi: np.ndarray, nomizu: NomizuMap):
    """Least-squares fit of Lambda(X) psi = A(X) . psi over symmetric A; returns (A, relative residual)."""
    psi = np.asarray(psi)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("zero spinor")
    mod = twisted_module(model)
    d = model.dim_m
    G = [mod.tangent_clifford(np.eye(d)[j]) @ psi for j in range(d)]
    pairs = [(j, i) for i in range(d) for j in range(i, d)]
    cols = []
    for j, i in pairs:
        # A[j, i] = A[i, j] contributes e_j . psi to equation i and e_i . psi to equation j
        col = np.zeros((d, mod.dim), dtype=complex)
        col[i] += G[j]
        if i != j:
            col[j] += G[i]
        cols.append(col.reshape(-1))
    M = np.array(cols).T
    rhs = np.concatenate([
        mod.apply_lifts(lift(nomizu.tangent[i]) if np.any(nomizu.tangent[i]) else None,
                        lift(nomizu.aux[i]) if np.any(nomizu.aux[i]) else None, psi)
        for i in range(d)])
    Mr = np.vstack([M.real, M.imag])
    br = np.concatenate([rhs.real, rhs.imag])
    x, *_ = np.linalg.lstsq(Mr, br, rcond=None)
    A = np.zeros((d, d))
    for (j, i), v in zip(pairs, x):
        A[j, i] = A[i, j] = v
    res = (Mr @ x - br).reshape(2, d, mod.dim)
    per_eq = np.sqrt((res**2).sum(axis=(0, 2)))
    return A, float(per_eq.max() / nrm)


def generalized_killing_solve(model: ReductiveModel, psi: np.ndarray, nomizu: NomizuMap,
                              tol: Tolerance = DEFAULT_TOL) -> KillingSolution | None:
    A, res = killing_residual(model, psi, nomizu)
    if res <= tol.residual_tol:
        A[np.abs(A) < tol.drop_tol] = 0.0
        return KillingSolution(A, res)
    return None


def projective_sample(count: int = 32) -> list:
    """Deterministic points (alpha, beta) of CP^1 plus the two points (1, +-i)."""
    pts = []
    rows = count // 8
    for k in range(rows):
        phi = (k + 0.5) * np.pi / (2 * rows)
        for j in range(8):
            theta = 2 * np.pi * j / 8
            pts.append((np.cos(phi), np.sin(phi) * np.exp(1j * theta)))
    pts += [(1.0, 1j), (1.0, -1j)]
    return pts


def killing_family_scan(model: ReductiveModel, psi_plus, psi_minus, nomizu: NomizuMap,
                        tol: Tolerance = DEFAULT_TOL):
    """Residuals of the generalised Killing equation over the sampled family alpha psi+ + beta psi-."""
    out = []
    for alpha, beta in projective_sample():
        psi = alpha * psi_plus + beta * psi_minus
        _, res = killing_residual(model, psi, nomizu)
        out.append(((complex(alpha), complex(beta)), res))
    return out


# ----------------------------------------------------------- named spinors


def omega_power(n_tangent: int, k: int, pairs) -> np.ndarray:
    """(sum over pairs of y_a ^ y_b)^k in Sigma_{n_tangent}."""
    w = np.zeros(clifford.spinor_dim(n_tangent), dtype=complex)
    for a, b in pairs:
        w[(1 << (a - 1)) | (1 << (b - 1))] += 1.0
    out = clifford.basis_spinor(n_tangent)
    for _ in range(k):
        out = clifford.wedge_forms(n_tangent, out, w)
    return out


def symplectic_omega(n: int, k: int) -> np.ndarray:
    """omega^k for omega = sum_p y_{2p} ^ y_{2p+1} on Sigma_{4n+2}."""
    return omega_power(4 * n + 2, k, [(2 * p, 2 * p + 1) for p in range(1, n + 1)])


def hpn_omega(n: int, k: int) -> np.ndarray:
    """omega^k for the HP^n model, omega = sum_p y_{2p-1} ^ y_{2p} on Sigma_{4n}."""
    return omega_power(4 * n, k, [(2 * p - 1, 2 * p) for p in range(1, n + 1)])


def y1_wedge(n_tangent: int, phi: np.ndarray) -> np.ndarray:
    return clifford.wedge_forms(n_tangent, clifford.basis_spinor(n_tangent, [1]), phi)
