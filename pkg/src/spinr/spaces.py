"""Homogeneous models of CP^n, CP^{2n+1}, HP^n and OP^2.

A model carries bases of the isotropy algebra h and of its reductive
complement m (orthonormal for the invariant metric), and returns isotropy and
auxiliary actions as so(dim m) and so(r) matrices.  For the matrix models,
elements of h and m are QuatMatrix values.  For OP^2, elements of h = spin(9)
are antisymmetric 9 x 9 matrices (positions 0..8 = e_0..e_8), and the
isotropy action is read from the 16 x 16 images of e_0 e_i.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import numlin
from .numlin import QuatMatrix, E, F, b0, bracket, Tolerance, DEFAULT_TOL


class SpaceId(str, Enum):
    CPN_HERMITIAN = "cpn-hermitian"
    CPN_SYMPLECTIC = "cpn-symplectic"
    HPN = "hpn"
    OP2 = "op2"


GROUPS = {
    SpaceId.CPN_HERMITIAN: "SU(n+1)",
    SpaceId.CPN_SYMPLECTIC: "Sp(n+1)",
    SpaceId.HPN: "Sp(n+1)",
    SpaceId.OP2: "F4",
}


@dataclass(frozen=True)
class MetricParams:
    a: float = 0.5
    t: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.t > 0):
            raise ValueError(f"metric parameters must be positive, got a={self.a}, t={self.t}")


class ModelError(ValueError):
    pass


def rotation(r: int, c: float = 1.0, k: int = 0, l: int = 1) -> np.ndarray:
    """c * (e_k ^ e_l) in so(r), by matrix position."""
    A = np.zeros((r, r))
    A[l, k] = c
    A[k, l] = -c
    return A


def _so_coeffs(A: np.ndarray) -> np.ndarray:
    i, j = np.triu_indices(A.shape[0], 1)
    return A[j, i]


# ----------------------------------------------------------------- OP^2 data

# sigma(e_0 e_i), i = 1..8, as signed sums of elementary skew matrices E_{a,b}
_OP2_E0EI = {
    1: "-1,5 +2,6 +3,7 -4,8 +9,13 -10,14 -11,15 +12,16",
    2: "-1,13 +2,14 +3,15 -4,16 +5,9 -6,10 -7,11 +8,12",
    3: "-1,7 -2,8 -3,5 -4,6 -9,15 -10,16 -11,13 -12,14",
    4: "+1,6 +2,5 -3,8 -4,7 +9,14 +10,13 -11,16 -12,15",
    5: "-1,4 +2,3 +5,8 -6,7 -9,12 +10,11 +13,16 -14,15",
    6: "-1,8 +2,7 -3,6 +4,5 -9,16 +10,15 -11,14 +12,13",
    7: "-1,2 +3,4 -5,6 +7,8 -9,10 +11,12 -13,14 +15,16",
    8: "-1,3 -2,4 -5,7 -6,8 -9,11 -10,12 -13,15 -14,16",
}


def parse_skew_terms(text: str, size: int = 16) -> np.ndarray:
    """Parse tokens like ``-1,5`` or ``+i3,7`` into a complex sum of E_{a,b}."""
    M = np.zeros((size, size), dtype=complex)
    for tok in text.split():
        sign = -1.0 if tok[0] == "-" else 1.0
        body = tok[1:] if tok[0] in "+-" else tok
        coef = 1.0
        if "i" in body:
            pre, body = body.split("i")
            coef = (float(pre) if pre else 1.0) * 1j
        a, b = (int(x) for x in body.split(","))
        M[a - 1, b - 1] -= sign * coef
        M[b - 1, a - 1] += sign * coef
    return M


def op2_generators() -> dict:
    """sigma(e_a e_b) for 0 <= a < b <= 8, as real 16 x 16 matrices."""
    s0 = {i: parse_skew_terms(t).real for i, t in _OP2_E0EI.items()}
    out = {}
    for a, b in itertools.combinations(range(9), 2):
        out[(a, b)] = s0[b] if a == 0 else s0[a] @ s0[b]
    return out


_OP2_SIGMA = None


def op2_sigma(A) -> np.ndarray:
    """Image in so(16) (complexified if A is complex) of a spin(9) element given as a 9 x 9 matrix."""
    global _OP2_SIGMA
    if _OP2_SIGMA is None:
        gens = op2_generators()
        _OP2_SIGMA = np.array([gens[k] for k in itertools.combinations(range(9), 2)])
    A = np.asarray(A)
    if A.shape != (9, 9) or not np.allclose(A, -A.T, atol=1e-10):
        raise ModelError("spin(9) element must be an antisymmetric 9 x 9 matrix")
    # e_a ^ e_b corresponds to (1/2) e_a e_b
    return np.tensordot(_so_coeffs(A) / 2.0, _OP2_SIGMA, axes=1)


# -------------------------------------------------------------------- models


@dataclass
class ReductiveModel:
    space_id: SpaceId
    n: int
    params: MetricParams
    r: int
    m_twists: int
    aux_param: object
    h_basis: list
    m_basis: list
    h_names: list = field(default_factory=list)
    m_names: list = field(default_factory=list)
    # unscaled complement basis and the metric weight of each vector (g = w * B0)
    m_raw: list = field(default_factory=list)
    m_weights: np.ndarray | None = None
    _aux_images: list = field(default_factory=list, repr=False)
    _gram_inv: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim_m(self) -> int:
        return len(self.m_basis)

    @property
    def dim_h(self) -> int:
        return len(self.h_basis)

    @property
    def is_matrix_model(self) -> bool:
        return self.space_id != SpaceId.OP2

    @property
    def group(self) -> str:
        """The isometry group with n substituted, e.g. SU(3) for CP^2."""
        name = GROUPS[self.space_id]
        return name.replace("n+1", str(self.n + 1)) if self.n is not None else name

    def __repr__(self):
        return (f"ReductiveModel({self.space_id.value}, n={self.n}, r={self.r}, "
                f"m={self.m_twists}, aux={self.aux_param}, a={self.params.a}, t={self.params.t})")

    # -- decomposition of g into h + m (matrix models)

    def _full_basis(self):
        return list(self.h_basis) + list(self.m_basis)

    def split(self, Z: QuatMatrix):
        """Coefficients of Z in h_basis and in the orthonormal m_basis."""
        if not self.is_matrix_model:
            raise ModelError("OP2 has no matrix realisation of its complement")
        basis = self._full_basis()
        if self._gram_inv is None:
            G = np.array([[b0(x, y) for y in basis] for x in basis])
            self._gram_inv = np.linalg.inv(G)
        rhs = np.array([b0(Z, y) for y in basis])
        c = self._gram_inv @ rhs
        recon = sum((ci * bi for ci, bi in zip(c, basis)), QuatMatrix.zeros(Z.n))
        if not recon.allclose(Z, atol=1e-9 * max(1.0, Z.norm())):
            raise ModelError("element lies outside the Lie algebra of the model")
        return c[: self.dim_h], c[self.dim_h:]

    def h_coords(self, X) -> np.ndarray:
        if not self.is_matrix_model:
            A = np.asarray(X)
            if A.shape != (9, 9) or not np.allclose(A, -A.T, atol=1e-10):
                raise ModelError("element is not in spin(9)")
            # h_basis consists of 2 e_a ^ e_b
            return _so_coeffs(A) / 2.0
        hc, mc = self.split(X)
        if np.abs(mc).max(initial=0.0) > 1e-9 * max(1.0, X.norm()):
            raise ModelError("element is not in the isotropy algebra")
        return hc

    def m_coords(self, Z: QuatMatrix) -> np.ndarray:
        return self.split(Z)[1]

    def from_m_coords(self, c) -> QuatMatrix:
        return sum((ci * bi for ci, bi in zip(c, self.m_basis)), QuatMatrix.zeros(self.m_basis[0].n))

    def from_h_coords(self, c):
        return sum((ci * bi for ci, bi in zip(c, self.h_basis)), 0 * self.h_basis[0])

    def metric_gram(self) -> np.ndarray:
        """g(e_i, e_j) = w_i B0(e_i, e_j) on the m_basis; the identity when orthonormal."""
        if not self.is_matrix_model:
            return np.eye(self.dim_m)
        return np.array([[w * b0(x, y) for y in self.m_basis] for x, w in zip(self.m_basis, self.m_weights)])

    def bracket_split(self, i: int, j: int):
        """[e_i, e_j] for m_basis indices, split into (h coeffs, m coeffs)."""
        return self.split(bracket(self.m_basis[i], self.m_basis[j]))

    # -- actions

    def isotropy_so(self, X) -> np.ndarray:
        """ad(X) restricted to m, as an so(dim m) matrix in the orthonormal basis."""
        if not self.is_matrix_model:
            return op2_sigma(X)
        self.h_coords(X)
        M = np.column_stack([self.m_coords(bracket(X, e)) for e in self.m_basis])
        if not np.allclose(M, -M.T, atol=1e-10):
            raise ModelError("isotropy action is not skew; basis is not orthonormal")
        return M

    def aux_action(self, X) -> np.ndarray:
        c = self.h_coords(X)
        out = np.zeros((self.r, self.r))
        for ci, A in zip(c, self._aux_images):
            out = out + ci * A
        return out

    def h_isotropy(self) -> list:
        return [self.isotropy_so(X) for X in self.h_basis]

    def h_aux(self) -> list:
        return [self.aux_action(X) for X in self.h_basis]


def _aux_embed(r: int, A2: np.ndarray) -> np.ndarray:
    """Block inclusion so(k) -> so(r)."""
    out = np.zeros((r, r))
    k = A2.shape[0]
    out[:k, :k] = A2
    return out


def _sun_basis(N: int):
    """su(n) in the lower right block of su(n+1), i.e. indices 2..N."""
    basis, names = [], []
    for p, q in itertools.combinations(range(2, N + 1), 2):
        basis.append(F(N, p, q, "i"))
        names.append(f"iF{p},{q}")
        basis.append(E(N, p, q))
        names.append(f"E{p},{q}")
    for r in range(2, N):
        basis.append(F(N, r, r, "i") - F(N, r + 1, r + 1, "i"))
        names.append(f"i(F{r},{r}-F{r+1},{r+1})")
    return basis, names


def _spn_basis(N: int):
    """sp(n) in the lower right block of sp(n+1)."""
    basis, names = [], []
    for p in range(2, N + 1):
        for u in "ijk":
            basis.append(F(N, p, p, u))
            names.append(f"{u}F{p},{p}")
    for r, s in itertools.combinations(range(2, N + 1), 2):
        for u in "ijk":
            basis.append(F(N, r, s, u))
            names.append(f"{u}F{r},{s}")
        basis.append(E(N, r, s))
        names.append(f"E{r},{s}")
    return basis, names


def _check_m(m: int):
    if m < 1 or m % 2 == 0:
        raise ModelError(f"twisting number m must be a positive odd integer, got {m}")


def build_model(space_id, n: int | None = None, params: MetricParams | None = None,
                aux_param=None, r: int | None = None, m: int = 1) -> ReductiveModel:
    """Build one of the four homogeneous models.

    ``aux_param`` is the integer s for the CP models and "trivial" or
    "nontrivial" for HP^n and OP^2.  ``r`` defaults to the rank carrying the
    auxiliary homomorphism (2 for CP with s != 0, 3 for HP^n, 9 for OP^2).
    """
    space_id = SpaceId(space_id)
    params = params or MetricParams()
    _check_m(m)
    if space_id == SpaceId.CPN_HERMITIAN:
        return _build_hermitian(n, params, aux_param, r, m)
    if space_id == SpaceId.CPN_SYMPLECTIC:
        return _build_symplectic(n, params, aux_param, r, m)
    if space_id == SpaceId.HPN:
        return _build_hpn(n, params, aux_param, r, m)
    return _build_op2(aux_param, r, m)


def _cp_rank(s: int, r: int | None) -> int:
    if r is None:
        r = 1 if s == 0 else 2
    if r < 1:
        raise ModelError("r must be positive")
    if r == 1 and s != 0:
        raise ModelError("a nontrivial circle homomorphism needs r >= 2")
    return r


def _build_hermitian(n, params, s, r, m, check=True):
    if n is None or n < 1:
        raise ModelError("hermitian CP^n needs n >= 1")
    s = 0 if s is None else int(s)
    r = _cp_rank(s, r)
    if check and n >= 2 and not lift_parity(SpaceId.CPN_HERMITIAN, n, s):
        raise ModelError(f"s={s} does not lift for n={n} (need n and s of different parity)")
    N = n + 1
    a = params.a
    xi = F(N, 1, 1, "i") * (-n) + sum((F(N, l, l, "i") for l in range(2, N + 1)), QuatMatrix.zeros(N))
    hp, hp_names = _sun_basis(N)
    h_basis = [xi] + hp
    raw, names = [], []
    for p in range(1, n + 1):
        raw += [F(N, 1, p + 1, "i"), E(N, 1, p + 1)]
        names += [f"e{2*p-1}", f"e{2*p}"]
    scale = 1 / np.sqrt(2 * a)
    model = ReductiveModel(SpaceId.CPN_HERMITIAN, n, params, r, m, s, h_basis,
                           [u * scale for u in raw], ["xi"] + hp_names, names,
                           raw, np.full(len(raw), a))
    aux2 = rotation(2, s * n) if r >= 2 else np.zeros((1, 1))
    model._aux_images = [_aux_embed(r, aux2) if r >= 2 else np.zeros((1, 1))] + [np.zeros((r, r))] * len(hp)
    return model


def _build_symplectic(n, params, s, r, m, check=True):
    if n is None or n < 1:
        raise ModelError("symplectic CP^{2n+1} needs n >= 1")
    s = 0 if s is None else int(s)
    r = _cp_rank(s, r)
    if check and not lift_parity(SpaceId.CPN_SYMPLECTIC, n, s):
        raise ModelError(f"s={s} does not lift (need s even)")
    N = n + 1
    a, t = params.a, params.t
    xi1 = F(N, 1, 1, "i")
    hp, hp_names = _spn_basis(N)
    h_basis = [xi1] + hp
    raw = [-F(N, 1, 1, "k"), F(N, 1, 1, "j")]
    names = ["xi2", "xi3"]
    weights = [2 * a * t, 2 * a * t]
    for p in range(1, n + 1):
        raw += [F(N, 1, p + 1, "j"), F(N, 1, p + 1, "k"), F(N, 1, p + 1, "i"), E(N, 1, p + 1)]
        names += [f"e{4*p+eps}" for eps in range(4)]
        weights += [a] * 4
    weights = np.array(weights)
    # g = w B0 on each summand
    m_basis = [u / np.sqrt(w * b0(u, u)) for u, w in zip(raw, weights)]
    model = ReductiveModel(SpaceId.CPN_SYMPLECTIC, n, params, r, m, s, h_basis, m_basis,
                           ["xi1"] + hp_names, names, raw, weights)
    first = _aux_embed(r, rotation(2, s)) if r >= 2 else np.zeros((1, 1))
    model._aux_images = [first] + [np.zeros((r, r))] * len(hp)
    return model


def _build_hpn(n, params, aux, r, m):
    if n is None or n < 2:
        raise ModelError("HP^n needs n > 1")
    aux = "nontrivial" if aux is None else str(aux)
    if aux not in ("trivial", "nontrivial"):
        raise ModelError(f"HP^n auxiliary parameter must be trivial or nontrivial, got {aux!r}")
    if r is None:
        r = 3 if aux == "nontrivial" else 1
    if aux == "nontrivial" and r < 3:
        raise ModelError("the nontrivial HP^n structure needs r >= 3")
    N = n + 1
    a = params.a
    sp1 = [F(N, 1, 1, "i"), -F(N, 1, 1, "k"), F(N, 1, 1, "j")]
    hp, hp_names = _spn_basis(N)
    raw, names = [], []
    for p in range(1, n + 1):
        raw += [F(N, 1, p + 1, "j"), F(N, 1, p + 1, "k"), F(N, 1, p + 1, "i"), E(N, 1, p + 1)]
        names += [f"e{4*p+eps}" for eps in range(4)]
    scale = 1 / np.sqrt(2 * a)
    model = ReductiveModel(SpaceId.HPN, n, params, r, m, aux, sp1 + hp,
                           [u * scale for u in raw], ["xi1", "xi2", "xi3"] + hp_names, names,
                           raw, np.full(len(raw), a))
    if aux == "nontrivial":
        # spin lifts on Sigma_3: e1e2, -e0e1, -e0e2 (positions 0,1,2 = e_0,e_1,e_2)
        imgs = [rotation(3, 2.0, 1, 2), rotation(3, -2.0, 0, 1), rotation(3, -2.0, 0, 2)]
        model._aux_images = [_aux_embed(r, A) for A in imgs] + [np.zeros((r, r))] * len(hp)
    else:
        model._aux_images = [np.zeros((r, r))] * (3 + len(hp))
    return model


def _build_op2(aux, r, m):
    aux = "nontrivial" if aux is None else str(aux)
    if aux not in ("trivial", "nontrivial"):
        raise ModelError(f"OP2 auxiliary parameter must be trivial or nontrivial, got {aux!r}")
    if r is None:
        r = 9 if aux == "nontrivial" else 1
    if aux == "nontrivial" and r < 9:
        raise ModelError("the nontrivial OP2 structure needs r >= 9")
    h_basis, h_names = [], []
    for a_, b_ in itertools.combinations(range(9), 2):
        h_basis.append(rotation(9, 2.0, a_, b_))
        h_names.append(f"e{a_}e{b_}")
    m_basis = [np.eye(16)[i] for i in range(16)]
    model = ReductiveModel(SpaceId.OP2, 2, MetricParams(), r, m, aux, h_basis, m_basis,
                           h_names, [f"e{i+1}" for i in range(16)], m_basis, np.ones(16))
    if aux == "nontrivial":
        model._aux_images = [_aux_embed(r, A) for A in h_basis]
    else:
        model._aux_images = [np.zeros((r, r))] * len(h_basis)
    return model


# ------------------------------------------------------------- lift parity


def rotation_speeds(A: np.ndarray) -> np.ndarray:
    """Nonnegative rotation speeds of an so(k) matrix (one per 2-plane)."""
    ev = np.linalg.eigvals(np.asarray(A, dtype=float))
    im = np.sort(np.abs(ev.imag))[::-1]
    return im[0::2][: A.shape[0] // 2]


def _integral(x: np.ndarray, what: str) -> np.ndarray:
    k = np.rint(x)
    if not np.allclose(x, k, atol=1e-8):
        raise ModelError(f"{what} speeds are not integral: {x}")
    return k.astype(int)


def lift_parity(space_id, n: int, s: int) -> bool:
    """Whether sigma x phi_s lifts to Spin^c, from windings of the generating loop of pi_1(H)."""
    space_id = SpaceId(space_id)
    if space_id not in (SpaceId.CPN_HERMITIAN, SpaceId.CPN_SYMPLECTIC):
        raise ModelError(f"lift parity is only modelled for the CP spaces, not {space_id.value}")
    if space_id == SpaceId.CPN_HERMITIAN and n < 2:
        raise ModelError("the case n = 1 is not supported")
    N = n + 1
    r = 2 if s != 0 else 1
    if space_id == SpaceId.CPN_HERMITIAN:
        model = _build_hermitian(n, MetricParams(), s, r, 1, check=False)
        # exp(2 pi t gen) = diag(e^{-2 pi i t}, 1, ..., 1, e^{2 pi i t})
        gen = F(N, 1, 1, "i") * -1 + F(N, N, N, "i")
    else:
        model = _build_symplectic(n, MetricParams(), s, r, 1, check=False)
        gen = F(N, 1, 1, "i")
    w_iso = int(_integral(rotation_speeds(model.isotropy_so(gen)), "isotropy").sum())
    w_aux = int(_integral(rotation_speeds(model.aux_action(gen)), "auxiliary").sum()) if r > 1 else 0
    return (w_iso + w_aux) % 2 == 0


# ----------------------------------------------------------- commutant


def isotropy_commutant_dim(model: ReductiveModel, tol: Tolerance = DEFAULT_TOL) -> int:
    """Real dimension of the commutant of the isotropy representation."""
    d = model.dim_m
    Id = np.eye(d)
    ops = []
    for A in model.h_isotropy():
        # vec(TA - AT) = (A^T kron I - I kron A) vec(T)
        ops.append(np.kron(A.T, Id) - np.kron(Id, A))
    K = numlin.joint_kernel(ops, tol, canonical=False)
    # the operators are real, so the complex kernel dimension equals the real one
    return K.shape[0]
