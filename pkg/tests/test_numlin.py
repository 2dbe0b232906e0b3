import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from spinr import numlin
from spinr.numlin import QuatMatrix, Tolerance, E, F, b0, bracket

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def quat(n):
    return arrays(float, (4, n, n), elements=finite).map(QuatMatrix)


def test_tolerance_defaults_and_validation():
    t = Tolerance()
    assert (t.rank_tol, t.residual_tol, t.drop_tol) == (1e-9, 1e-8, 1e-12)
    with pytest.raises(ValueError):
        Tolerance(residual_tol=1e-14, drop_tol=1e-12)
    with pytest.raises(ValueError):
        Tolerance(rank_tol=0)


def test_tolerance_env(monkeypatch):
    monkeypatch.setenv("SPINR_TOL", "1e-6")
    assert Tolerance.from_env().residual_tol == 1e-6
    monkeypatch.delenv("SPINR_TOL")
    assert Tolerance.from_env() == Tolerance()


def test_quaternion_units():
    one = QuatMatrix.from_real(np.eye(1))
    i, j, k = (QuatMatrix.from_real(np.eye(1), u) for u in "ijk")
    assert (i @ j).allclose(k) and (j @ k).allclose(i) and (k @ i).allclose(j)
    assert (i @ i).allclose(-one) and (i @ j @ k).allclose(-one)


def test_quat_immutable():
    q = QuatMatrix.zeros(2)
    with pytest.raises(ValueError):
        q.parts[0, 0, 0] = 1.0


def test_quat_rejects_bad_shapes():
    with pytest.raises(ValueError):
        QuatMatrix(np.zeros((3, 2, 2)))
    with pytest.raises(ValueError):
        QuatMatrix.zeros(2) + QuatMatrix.zeros(3)


@given(quat(2), quat(2), quat(2))
@settings(max_examples=50, deadline=None)
def test_product_associative(a, b, c):
    assert ((a @ b) @ c).allclose(a @ (b @ c), atol=1e-9)


@given(quat(3), quat(3))
@settings(max_examples=50, deadline=None)
def test_b0_symmetric_and_bracket_antisymmetric(a, b):
    assert abs(b0(a, b) - b0(b, a)) < 1e-9
    assert bracket(a, b).allclose(-bracket(b, a), atol=1e-9)


@given(quat(2), quat(2), quat(2))
@settings(max_examples=30, deadline=None)
def test_jacobi(a, b, c):
    s = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
    assert s.allclose(QuatMatrix.zeros(2), atol=1e-8)


@given(quat(3), quat(3), quat(3))
@settings(max_examples=30, deadline=None)
def test_b0_ad_invariant(x, y, z):
    assert abs(b0(bracket(x, y), z) + b0(y, bracket(x, z))) < 1e-7


def test_elementary_values():
    assert b0(F(3, 1, 1, "i"), F(3, 1, 1, "i")) == 1.0
    assert b0(F(3, 1, 2, "i"), F(3, 1, 2, "i")) == 2.0
    assert b0(E(3, 1, 2), E(3, 1, 2)) == 2.0
    with pytest.raises(IndexError):
        E(3, 2, 2)
    with pytest.raises(IndexError):
        F(3, 0, 1)
    with pytest.raises(ValueError):
        numlin.elementary("G", 3, 1, 2)


def test_joint_kernel_known_answer():
    # diag(0, 1, 2) and diag(0, 0, 5) share the kernel e_0
    A = np.diag([0.0, 1.0, 2.0])
    B = sp.csr_matrix(np.diag([0.0, 0.0, 5.0]))
    K = numlin.joint_kernel([A, B])
    assert K.shape == (1, 3)
    assert np.allclose(np.abs(K[0]), [1, 0, 0])
    assert numlin.kernel_residual([A, B], K) == 0.0


def test_joint_kernel_deflation_matches_svd(monkeypatch, rng):
    ops = [rng.standard_normal((3, 8)) for _ in range(2)]
    direct = numlin.joint_kernel(ops)
    monkeypatch.setattr(numlin, "SVD_ROW_LIMIT", 1)
    deflated = numlin.joint_kernel(ops)
    assert direct.shape == deflated.shape == (2, 8)
    assert numlin.projection_residual(direct, deflated) < 1e-10


def test_joint_kernel_is_deterministic(rng):
    ops = [rng.standard_normal((2, 6)) + 1j * rng.standard_normal((2, 6))]
    assert np.array_equal(numlin.joint_kernel(ops), numlin.joint_kernel(ops))


def test_joint_kernel_errors():
    with pytest.raises(ValueError):
        numlin.joint_kernel([])
    with pytest.raises(ValueError):
        numlin.joint_kernel([np.eye(2), np.eye(3)])


@given(arrays(float, (4, 6), elements=finite))
@settings(max_examples=50, deadline=None)
def test_kernel_is_orthonormal_and_annihilated(A):
    K = numlin.joint_kernel([A])
    assert K.shape[0] == 6 - numlin.rank(A)
    if len(K):
        assert np.allclose(K @ K.conj().T, np.eye(len(K)), atol=1e-9)
        assert numlin.kernel_residual([A], K) < 1e-7


def test_projection_residual():
    basis = np.eye(3)[:2].astype(complex)
    assert numlin.projection_residual(np.array([1.0, 1.0, 0.0]), basis) < 1e-15
    assert abs(numlin.projection_residual(np.array([0.0, 0.0, 2.0]), basis) - 1.0) < 1e-15
