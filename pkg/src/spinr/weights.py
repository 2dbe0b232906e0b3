"""Root data of so(9, C) and sl(2, C), weight censuses and the explicit
invariant spinors of HP^n and OP^2.

Weights of so(9, C) are written in the coordinates v_1..v_4 dual to the
Cartan elements h_j = -i E_{2j-1,2j}; simple roots are v1-v2, v2-v3, v3-v4, v4.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from . import clifford, numlin
from .numlin import Tolerance, DEFAULT_TOL
from .spaces import ModelError, SpaceId, build_model, op2_sigma

# --------------------------------------------------------------- root data


@dataclass
class RootDatum:
    """Cartan, raising and lowering operators of a representation.

    ``simple_roots`` and ``fundamental_weights`` are rows in Cartan
    coordinates.  A tensor power keeps a reference to its factor so that the
    weight decomposition can be done factorwise.
    """

    name: str
    rank: int
    dim: int
    cartan_ops: list
    raising_ops: list
    lowering_ops: list
    simple_roots: np.ndarray
    fundamental_weights: np.ndarray
    base: "RootDatum | None" = None
    power: int = 1

    def __post_init__(self):
        for op in self.cartan_ops + self.raising_ops + self.lowering_ops:
            if op.shape != (self.dim, self.dim):
                raise ValueError(f"operator of shape {op.shape} in a {self.dim}-dimensional representation")

    def dynkin(self, mu) -> tuple:
        """Coefficients of mu in the fundamental weights."""
        a = np.linalg.solve(self.fundamental_weights.T.astype(float), np.asarray(mu, dtype=float))
        return tuple(int(round(x)) if abs(x - round(x)) < 1e-9 else float(x) for x in a)

    def is_dominant(self, mu) -> bool:
        return all(isinstance(x, int) and x >= 0 for x in self.dynkin(mu))

    @cached_property
    def eigenbasis(self):
        """(U, weights) with U unitary and U^H h_j U diagonal; factor data for tensor powers."""
        return _eigen_frame(self.base if self.base is not None else self)

    @cached_property
    def frame(self):
        """(raising ops, lowering ops, weights) in a joint Cartan eigenbasis."""
        return _weight_frame(self)

    def to_original(self, coords: np.ndarray) -> np.ndarray:
        """Map a vector from weight-frame coordinates back to the representation."""
        return _from_frame(self, coords)


def _dense(M):
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def _eigen_frame(datum: RootDatum):
    H = [_dense(h) for h in datum.cartan_ops]
    for h in H:
        if not np.allclose(h, h.conj().T, atol=1e-10):
            raise ModelError("Cartan operators must be Hermitian")
    # a generic combination separates distinct weights
    coeffs = [1.0, np.pi / 10, np.e / 100, np.sqrt(2) / 1000, np.sqrt(3) / 10000][: datum.rank]
    _, U = np.linalg.eigh(sum(c * h for c, h in zip(coeffs, H)))
    wts = []
    for h in H:
        D = U.conj().T @ h @ U
        if np.abs(D - np.diag(np.diag(D))).max() > 1e-8:
            raise ModelError("Cartan operators do not commute")
        wts.append(np.diag(D).real)
    W = np.array(wts).T
    half = np.round(2 * W) / 2
    if np.abs(W - half).max() > 1e-8:
        raise ModelError("weights are not half-integral")
    return U, half


def _leibniz(S, d: int, m: int) -> sp.csr_matrix:
    """S acting on each factor of a tensor power, summed."""
    S = sp.csr_matrix(S)
    Id = sp.identity(d, dtype=complex, format="csr")
    out = sp.csr_matrix((d**m, d**m), dtype=complex)
    for j in range(m):
        f = sp.identity(1, dtype=complex, format="csr")
        for k in range(m):
            f = sp.kron(f, S if k == j else Id, format="csr")
        out = out + f
    return out.tocsr()


def _weight_frame(datum: RootDatum):
    if datum.base is None:
        U, W = datum.eigenbasis
        Uh = U.conj().T
        X = [Uh @ _dense(x) @ U for x in datum.raising_ops]
        Y = [Uh @ _dense(y) @ U for y in datum.lowering_ops]
        return X, Y, W
    bX, bY, bW = datum.base.frame
    d, m = datum.base.dim, datum.power
    X = [_leibniz(_chop(x), d, m) for x in bX]
    Y = [_leibniz(_chop(y), d, m) for y in bY]
    W = np.zeros((d**m, datum.rank))
    for idx in np.ndindex(*(d,) * m):
        W[np.ravel_multi_index(idx, (d,) * m)] = bW[list(idx)].sum(axis=0)
    return X, Y, W


def _chop(M, drop=1e-13):
    M = np.array(M)
    M[np.abs(M) < drop] = 0
    return M


def _from_frame(datum: RootDatum, coords: np.ndarray) -> np.ndarray:
    U, _ = datum.eigenbasis
    if datum.base is None:
        return U @ coords
    d, m = datum.base.dim, datum.power
    T = np.asarray(coords, dtype=complex).reshape((d,) * m)
    for j in range(m):
        T = np.moveaxis(np.tensordot(U, T, axes=([1], [j])), 0, j)
    return T.reshape(-1)


def tensor_power(datum: RootDatum, m: int) -> RootDatum:
    """The m-th tensor power with the Leibniz action."""
    if m < 1:
        raise ValueError("tensor power needs m >= 1")
    if m == 1:
        return datum
    d = datum.dim
    lf = [_leibniz(op, d, m) for op in datum.cartan_ops]
    return RootDatum(f"{datum.name}^{m}", datum.rank, d**m, lf,
                     [_leibniz(op, d, m) for op in datum.raising_ops],
                     [_leibniz(op, d, m) for op in datum.lowering_ops],
                     datum.simple_roots, datum.fundamental_weights, base=datum, power=m)


def check_root_datum(datum: RootDatum) -> float:
    """Largest residual of [h_i, h_j] = 0 and [h_j, X_i] = alpha_i(h_j) X_i."""
    H = [sp.csr_matrix(h) for h in datum.cartan_ops]
    worst = 0.0
    for a in H:
        for b in H:
            worst = max(worst, abs(a @ b - b @ a).max())
    for i, X in enumerate(datum.raising_ops):
        X = sp.csr_matrix(X)
        for j, h in enumerate(H):
            R = h @ X - X @ h - datum.simple_roots[i][j] * X
            worst = max(worst, abs(R).max() if R.nnz else 0.0)
    return float(worst)


# ------------------------------------------------------------- so(9) data

B4_SIMPLE_ROOTS = np.array([[1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1], [0, 0, 0, 1]], dtype=float)
B4_FUNDAMENTAL = np.array([[1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 0], [0.5, 0.5, 0.5, 0.5]])


def _E9(a: int, b: int) -> np.ndarray:
    M = np.zeros((9, 9), dtype=complex)
    M[a - 1, b - 1] = -1.0
    M[b - 1, a - 1] = 1.0
    return M


def so9_cartan() -> list:
    """h_j = -i E_{2j-1, 2j} as complex 9 x 9 matrices."""
    return [-1j * _E9(2 * j - 1, 2 * j) for j in range(1, 5)]


def so9_raising() -> list:
    X = []
    for i in range(1, 4):
        a = 2 * i - 1
        X.append(_E9(a, a + 2) + _E9(a + 1, a + 3) + 1j * (-_E9(a + 1, a + 2) + _E9(a, a + 3)))
    X.append(_E9(7, 9) - 1j * _E9(8, 9))
    return X


def so9_lowering() -> list:
    return [x.conj() for x in so9_raising()]


SO9_REPS = ("sigma9", "sigma9-forms", "sigma16")


def so9_root_datum(rep: str = "sigma9") -> RootDatum:
    """so(9, C) acting on one of its spin representations.

    ``sigma9``: the 16-dimensional spin representation in the octonionic basis
    used for OP^2; ``sigma9-forms``: the same representation on the exterior
    forms model Sigma_9 (the auxiliary factor); ``sigma16``: the spin lift of
    the octonionic one to the 256-dimensional Sigma_16 (the tangent factor).
    """
    if rep == "sigma9":
        conv = op2_sigma
        dim = 16
    elif rep == "sigma9-forms":
        def conv(A):
            return clifford.lift(A).toarray()
        dim = 16
    elif rep == "sigma16":
        def conv(A):
            return clifford.lift(op2_sigma(A))
        dim = 256
    else:
        raise ValueError(f"unknown representation {rep!r}; choose from {SO9_REPS}")
    return RootDatum(rep, 4, dim, [conv(h) for h in so9_cartan()], [conv(x) for x in so9_raising()],
                     [conv(y) for y in so9_lowering()], B4_SIMPLE_ROOTS, B4_FUNDAMENTAL)


# ---------------------------------------------------------------- sl(2) data


@dataclass(frozen=True)
class Sl2Rep:
    H: np.ndarray
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        if self.residual() > 1e-10:
            raise ValueError("operators do not satisfy the sl2 relations")

    def residual(self) -> float:
        H, X, Y = (_dense(m) for m in (self.H, self.X, self.Y))
        return float(max(np.abs(H @ X - X @ H - 2 * X).max(), np.abs(H @ Y - Y @ H + 2 * Y).max(),
                         np.abs(X @ Y - Y @ X - H).max()))

    def datum(self, name: str = "sl2") -> RootDatum:
        d = self.H.shape[0]
        return RootDatum(name, 1, d, [self.H], [self.X], [self.Y], np.array([[2.0]]), np.array([[1.0]]))


def sl2_from_sp1(xi1, xi2, xi3) -> Sl2Rep:
    """H = -i xi1, X = (xi2 - i xi3)/2, Y = -(xi2 + i xi3)/2."""
    xi1, xi2, xi3 = (_dense(m) for m in (xi1, xi2, xi3))
    return Sl2Rep(-1j * xi1, 0.5 * (xi2 - 1j * xi3), -0.5 * (xi2 + 1j * xi3))


def sl2_sigma3() -> Sl2Rep:
    """sl2 acting on Sigma_3 through the HP^n auxiliary spin lifts."""
    model = build_model(SpaceId.HPN, 2)
    lifts = [clifford.lift(model.aux_action(X)) for X in model.h_basis[:3]]
    return sl2_from_sp1(*lifts)


def sl2_omega_module(n: int) -> Sl2Rep:
    """sl2 acting on S = span{omega^k} by the tangent spin lifts, in the basis omega^0..omega^n."""
    from .spinorcalc import hpn_omega

    model = build_model(SpaceId.HPN, n)
    basis = np.array([hpn_omega(n, k) for k in range(n + 1)]).T
    mats = []
    for X in model.h_basis[:3]:
        img = clifford.lift(model.isotropy_so(X)) @ basis
        c, *_ = np.linalg.lstsq(basis, img, rcond=None)
        if np.abs(basis @ c - img).max() > 1e-9:
            raise ModelError("span of omega powers is not sp(1)-stable")
        mats.append(c)
    return sl2_from_sp1(*mats)


# --------------------------------------------------------------- censuses


def weight_space(datum: RootDatum, mu, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the joint eigenspace with eigenvalues mu."""
    _, _, W = datum.frame
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (datum.rank,):
        raise ValueError(f"weight must have {datum.rank} coordinates")
    idx = np.nonzero(np.all(np.abs(W - mu) < 1e-9, axis=1))[0]
    out = np.zeros((len(idx), datum.dim), dtype=complex)
    for r, k in enumerate(idx):
        e = np.zeros(datum.dim, dtype=complex)
        e[k] = 1.0
        out[r] = datum.to_original(e)
    return out


class CensusEntry(NamedTuple):
    weight: tuple
    dynkin: tuple
    multiplicity: int


def _frac(x: float) -> Fraction:
    return Fraction(x).limit_denominator(4)


def highest_weight_vectors(datum: RootDatum, mu, tol: Tolerance = DEFAULT_TOL, rng=None) -> np.ndarray:
    """Basis (rows, frame coordinates) of the raising-op kernel in the mu weight space.

    ``rng`` applies a random unitary change of basis inside the weight space
    first; the dimension of the result does not depend on it.
    """
    X, _, W = datum.frame
    mu = np.asarray(mu, dtype=float)
    cols = np.nonzero(np.all(np.abs(W - mu) < 1e-9, axis=1))[0]
    if len(cols) == 0:
        return np.zeros((0, datum.dim), dtype=complex)
    Q = np.eye(len(cols), dtype=complex)
    if rng is not None:
        Z = rng.standard_normal((len(cols),) * 2) + 1j * rng.standard_normal((len(cols),) * 2)
        Q, _ = np.linalg.qr(Z)
    blocks = []
    for i, Xi in enumerate(X):
        rows = np.nonzero(np.all(np.abs(W - mu - datum.simple_roots[i]) < 1e-9, axis=1))[0]
        if len(rows):
            blocks.append(_dense(Xi[rows][:, cols]) @ Q)
    if not blocks:
        K = np.eye(len(cols), dtype=complex)
    else:
        K = numlin.joint_kernel(blocks, tol).T
    out = np.zeros((K.shape[1], datum.dim), dtype=complex)
    out[:, cols] = (Q @ K).T
    return out


def hwv_census(datum: RootDatum, tol: Tolerance = DEFAULT_TOL, rng=None) -> list:
    """Highest weights of the irreducible summands, with multiplicities."""
    _, _, W = datum.frame
    out = []
    for mu in np.unique(W, axis=0)[::-1]:
        if not datum.is_dominant(mu):
            continue
        mult = highest_weight_vectors(datum, mu, tol, rng).shape[0]
        if mult:
            out.append(CensusEntry(tuple(_frac(x) for x in mu), datum.dynkin(mu), mult))
    return sorted(out, key=lambda e: e.dynkin)


def hom_dimension(census_a: list, census_b: list) -> int:
    """dim Hom between two completely reducible representations."""
    mb = {e.dynkin: e.multiplicity for e in census_b}
    return sum(e.multiplicity * mb.get(e.dynkin, 0) for e in census_a)


def apply_word(lowering_ops, word, v: np.ndarray) -> np.ndarray:
    """Y_{i1}(Y_{i2}(...Y_{ik}(v))) for word = (i1, ..., ik), 1-based."""
    out = np.asarray(v)
    for i in reversed(tuple(word)):
        if not 1 <= i <= len(lowering_ops):
            raise IndexError(f"lowering index {i} out of range")
        out = lowering_ops[i - 1] @ out
    return out


# ---------------------------------------------------------- lowering words


@dataclass(frozen=True)
class LoweringTable:
    words: dict  # (k, l) -> tuple of indices
    counts: dict  # k -> mu_k

    def __post_init__(self):
        for (k, _), w in self.words.items():
            if len(w) != k:
                raise ValueError(f"word {k} has length {len(w)}")
            if any(not 1 <= i <= 4 for i in w):
                raise ValueError(f"word {w} has an index outside 1..4")

    def __len__(self):
        return len(self.words)

    def ordered(self) -> list:
        return [self.words[key] for key in sorted(self.words)]


_LINE = re.compile(r"^(\d+),(\d+):((?:[1-9](?: [1-9])*)?)$")


def parse_table3(text: str, total: int = 128) -> LoweringTable:
    """Parse the ``k,l:i1 i2 ...`` record format."""
    words, keys = {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        mt = _LINE.match(line)
        if not mt:
            raise ValueError(f"line {lineno}: malformed record {line!r}")
        k, l = int(mt.group(1)), int(mt.group(2))
        w = tuple(int(x) for x in mt.group(3).split()) if mt.group(3) else ()
        if (k, l) in words:
            raise ValueError(f"line {lineno}: duplicate key {(k, l)}")
        words[(k, l)] = w
        keys.append((k, l))
    if keys != sorted(keys):
        raise ValueError("records are not sorted by (k, l)")
    counts = {}
    for k, l in keys:
        counts[k] = counts.get(k, 0) + 1
        if l != counts[k]:
            raise ValueError(f"index l={l} out of sequence at k={k}")
    if total is not None and len(words) != total:
        raise ValueError(f"expected {total} words, found {len(words)}")
    return LoweringTable(words, counts)


def format_table3(table: LoweringTable) -> str:
    return "".join(f"{k},{l}:{' '.join(map(str, table.words[(k, l)]))}\n" for k, l in sorted(table.words))


def load_table3(path=None) -> LoweringTable:
    if path is None:
        text = resources.files("spinr").joinpath("data/table3.txt").read_text()
    else:
        text = Path(path).read_text()
    return parse_table3(text)


def word_weight(datum: RootDatum, top, word) -> np.ndarray:
    return np.asarray(top, dtype=float) - sum((datum.simple_roots[i - 1] for i in word), np.zeros(datum.rank))


# -------------------------------------------------------- bilinear forms


@dataclass(frozen=True)
class BilinearFormMatrix:
    matrix: np.ndarray
    symmetry_type: str  # "symmetric" or "antisymmetric"

    def __call__(self, v, w) -> complex:
        return complex(np.asarray(v) @ self.matrix @ np.asarray(w))


def invariant_bilinear_form(generators, weights=None, tol: Tolerance = DEFAULT_TOL) -> BilinearFormMatrix:
    """The invariant form beta(v, w) = v^T B w, unique up to scale.

    ``generators`` are the module's operator matrices in its basis; when
    ``weights`` (one row per basis vector) are given only entries with
    opposite weights are unknowns.
    """
    G = [_dense(g) for g in generators]
    d = G[0].shape[0]
    if weights is None:
        pairs = [(i, j) for i in range(d) for j in range(d)]
    else:
        W = np.asarray(weights, dtype=float).reshape(d, -1)
        pairs = [(i, j) for i in range(d) for j in range(d) if np.all(np.abs(W[i] + W[j]) < 1e-9)]
    if not pairs:
        raise ModelError("no weight-paired entries; the module is not self-dual")
    cols = np.array([i * d + j for i, j in pairs])
    ops = [_invariance_columns(g, pairs) for g in G]
    K = numlin.joint_kernel(ops, tol)
    if K.shape[0] != 1:
        raise ModelError(f"invariant form space has dimension {K.shape[0]}, expected 1")
    B = np.zeros(d * d, dtype=complex)
    B[cols] = K[0]
    B = B.reshape(d, d)
    B = B / B.flat[np.argmax(np.abs(B) > 1e-8 * np.abs(B).max())]
    B[np.abs(B) < tol.drop_tol] = 0
    if np.allclose(B, B.T, atol=1e-9):
        kind = "symmetric"
    elif np.allclose(B, -B.T, atol=1e-9):
        kind = "antisymmetric"
    else:
        raise ModelError("invariant form has no definite symmetry type")
    if np.linalg.svd(B, compute_uv=False).min() <= tol.rank_tol:
        raise ModelError("invariant form is degenerate")
    return BilinearFormMatrix(B, kind)


def _invariance_columns(g: np.ndarray, pairs) -> sp.csr_matrix:
    """Sparse matrix sending the unknowns B_ij to vec(g^T B + B g), row-major."""
    d = g.shape[0]
    rows, cols, vals = [], [], []
    ar = np.arange(d)
    for c, (i, j) in enumerate(pairs):
        # (g^T E_ij)[a, j] = g[i, a] and (E_ij g)[i, b] = g[j, b]
        rows += [ar * d + j, i * d + ar]
        cols += [np.full(d, c), np.full(d, c)]
        vals += [g[i], g[j]]
    M = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(d * d, len(pairs)), dtype=complex)
    M.eliminate_zeros()
    return M


def form_residual(form: BilinearFormMatrix, generators) -> float:
    B = form.matrix
    return float(max(np.abs(_dense(g).T @ B + B @ _dense(g)).max() for g in generators))


# ---------------------------------------------------------- HP^n spinor


def rho_lowering_power(m: int, p: int) -> np.ndarray:
    """rho(Y)^p applied to 1^ (x) ... (x) 1^ in Sigma_3^{(x) m}."""
    Y = sl2_sigma3().Y
    op = _leibniz(Y, 2, m)
    v = np.zeros(2**m, dtype=complex)
    v[0] = 1.0
    for _ in range(p):
        v = op @ v
    return v


def build_hpn_spinor(n: int) -> np.ndarray:
    """psi = sum_j (-1)^j omega^j (x) rho(Y)^{n-j} 1 in Sigma_{4n} (x) Sigma_3^{(x) n}."""
    from .spinorcalc import hpn_omega

    if n < 2 or n % 2 == 0:
        raise ModelError("the HP^n spinor is defined for odd n > 1")
    psi = np.zeros((1 << (2 * n)) * 2**n, dtype=complex)
    for j in range(n + 1):
        psi += (-1) ** j * np.kron(hpn_omega(n, j), rho_lowering_power(n, n - j))
    return psi


# ----------------------------------------------------------- OP^2 spinors

OP2_TOP = np.array([1.5, 0.5, 0.5, 0.5])  # omega_1 + omega_4


@dataclass(frozen=True)
class Op2Construction:
    w0: np.ndarray
    w: np.ndarray  # (4, 4096) highest weight vectors of the auxiliary factor
    module: np.ndarray  # (128, 256) rows Y_I w0
    form: BilinearFormMatrix
    spinors: np.ndarray  # (4, 256 * 4096)
    residuals: tuple


def _unique_hwv(datum: RootDatum, mu, expected: int, tol: Tolerance) -> np.ndarray:
    K = highest_weight_vectors(datum, mu, tol)
    if K.shape[0] != expected:
        raise ModelError(f"{datum.name}: found {K.shape[0]} highest weight vectors of weight {tuple(mu)}, "
                         f"expected {expected}")
    V = np.array([datum.to_original(k) for k in K])
    # fixed orthonormal basis, independent of the eigen-solver's choices
    return numlin._canonical(V.T).T


def generate_module(datum: RootDatum, w0: np.ndarray, table: LoweringTable, top, tol: Tolerance = DEFAULT_TOL):
    """Apply every word to w0, checking weights; returns (vectors, weights)."""
    H = datum.cartan_ops
    vecs, wts = [], []
    for word in table.ordered():
        v = apply_word(datum.lowering_ops, word, w0)
        nv = np.linalg.norm(v)
        if nv < tol.rank_tol:
            raise ModelError(f"word {word} annihilates the highest weight vector")
        mu = word_weight(datum, top, word)
        for j, h in enumerate(H):
            if np.linalg.norm(h @ v - mu[j] * v) > tol.residual_tol * nv:
                raise ModelError(f"word {word} does not produce weight {tuple(mu)}")
        vecs.append(v)
        wts.append(mu)
    return np.array(vecs), np.array(wts)


def _matrix_in_basis(V: np.ndarray, images: np.ndarray, tol: Tolerance) -> np.ndarray:
    """C with images[J] = sum_I C[I, J] V[I]."""
    C, *_ = np.linalg.lstsq(V.T, images.T, rcond=None)
    if np.abs(V.T @ C - images.T).max() > tol.residual_tol * max(1.0, np.abs(images).max()):
        raise ModelError("module is not stable under the generators")
    return C


@lru_cache(maxsize=4)
def _op2_construction(table3_path, tol: Tolerance) -> Op2Construction:
    table = load_table3(table3_path)
    tan = so9_root_datum("sigma16")
    aux = tensor_power(so9_root_datum("sigma9-forms"), 3)
    w0 = _unique_hwv(tan, OP2_TOP, 1, tol)[0]
    w = _unique_hwv(aux, OP2_TOP, 4, tol)
    V, wts = generate_module(tan, w0, table, OP2_TOP, tol)
    if numlin.rank(V, tol) != len(table):
        raise ModelError("lowering words do not span a module of the expected dimension")
    gens = [_matrix_in_basis(V, (g @ V.T).T, tol) for g in tan.raising_ops + tan.lowering_ops]
    form = invariant_bilinear_form(gens, wts, tol)
    # dual basis v^I = sum_J (B^-1)_{IJ} v_J
    dual = np.linalg.solve(form.matrix, np.eye(len(V))) @ V
    model = build_model(SpaceId.OP2, r=9, m=3)
    from .spinorcalc import h_lifts, invariance_residual

    lifts = h_lifts(model)
    spinors, residuals = [], []
    for wp in w:
        U = np.array([apply_word(aux.lowering_ops, word, wp) for word in table.ordered()])
        psi = np.einsum("ia,ib->ab", dual, U).reshape(-1)
        psi /= np.linalg.norm(psi)
        res = invariance_residual(model, psi, lifts)
        if res > tol.residual_tol:
            raise ModelError(f"OP2 spinor fails invariance (residual {res:.2e})")
        spinors.append(psi)
        residuals.append(float(res))
    return Op2Construction(w0, w, V, form, np.array(spinors), tuple(residuals))


def op2_construction(table3_path=None, tol: Tolerance = DEFAULT_TOL) -> Op2Construction:
    return _op2_construction(None if table3_path is None else str(table3_path), tol)


def build_op2_spinors(table3_path=None, tol: Tolerance = DEFAULT_TOL) -> list:
    """The four Spin(9)-invariant spinors of OP^2 in Sigma_16 (x) Sigma_9^{(x) 3}."""
    return [v.copy() for v in op2_construction(table3_path, tol).spinors]
