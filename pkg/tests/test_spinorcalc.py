from math import comb, factorial

import numpy as np
import pytest

from spinr import clifford, connections as conn, numlin, spinorcalc as sc, verify
from spinr.spaces import MetricParams, build_model
from spinr.verify import hermitian_spinor, symplectic_omega_spinor, symplectic_pm


@pytest.mark.parametrize("n", [2, 3])
def test_hermitian_invariant_spaces(n):
    for sign in (1, -1):
        B = sc.invariant_space(build_model("cpn-hermitian", n, aux_param=sign * (n + 1)))
        expect = np.array([hermitian_spinor(n, t, a) for t, a in verify.HERMITIAN_PARALLEL[sign]])
        assert B.shape[0] == 2
        assert numlin.projection_residual(expect, B) < 1e-10
    for s in (n + 3, -(n + 3), n - 1, -(n - 1)):
        assert sc.invariant_space(build_model("cpn-hermitian", n, aux_param=s)).shape[0] == 0


def test_hermitian_odd_spin_has_no_invariants():
    assert sc.invariant_space(build_model("cpn-hermitian", 3, aux_param=0, r=1)).shape[0] == 0


@pytest.mark.parametrize("n", [1, 3])
def test_symplectic_spin_invariants(n):
    B = sc.invariant_space(build_model("cpn-symplectic", n, aux_param=0))
    assert B.shape[0] == 2
    assert numlin.projection_residual(np.array(symplectic_pm(n)), B) < 1e-10


def test_symplectic_cp5_dimensions():
    dims = {s: sc.invariant_space(build_model("cpn-symplectic", 2, aux_param=s)).shape[0] for s in (6, -6, 2, -2, -4)}
    assert dims == {6: 2, -6: 2, 2: 4, -2: 4, -4: 0}


def test_invariant_space_verified_post_hoc():
    model = build_model("cpn-hermitian", 2, aux_param=3)
    B = sc.invariant_space(model)
    assert numlin.kernel_residual(sc.h_operators(model), B) < 1e-12
    assert all(sc.invariance_residual(model, v) < 1e-12 for v in B)


@pytest.mark.parametrize("n", [2, 3])
def test_eta_hermitian_display(n):
    model = build_model("cpn-hermitian", n, aux_param=-(n + 1))
    J = sc.eta_forms(model, hermitian_spinor(n, "top", "1")).endo(0, 1)
    for p in range(n):
        # positions 2p, 2p+1 are e_{2p+1}, e_{2p+2}
        assert np.allclose(J[:, 2 * p + 1], -np.eye(2 * n)[2 * p])
        assert np.allclose(J[:, 2 * p], np.eye(2 * n)[2 * p + 1])


@pytest.mark.parametrize("n", [2, 3])
def test_eta_symplectic_display(n):
    model = build_model("cpn-symplectic", n, aux_param=-2 * (n + 1))
    d = model.dim_m
    xi = clifford.wedge(d, 1, 2)
    rest = sum(clifford.wedge(d, 3 + 4 * p, 4 + 4 * p) + clifford.wedge(d, 5 + 4 * p, 6 + 4 * p) for p in range(n))
    for k in range(n + 1):
        J = sc.eta_forms(model, symplectic_omega_spinor(n, k)).endo(0, 1)
        c = comb(n, k) - 2 * (comb(n - 1, k - 1) if k else 0)
        assert np.allclose(J, -factorial(k) ** 2 * (comb(n, k) * xi + c * rest))


def test_eta_forms_antisymmetric_and_invariant(rng):
    model = build_model("cpn-hermitian", 2, aux_param=3)
    B = sc.invariant_space(model)
    psi = B.T @ (rng.standard_normal(2) + 1j * rng.standard_normal(2))
    eta = sc.eta_forms(model, psi)
    for (k, l), w in eta.forms.items():
        assert np.allclose(w, -w.T, atol=1e-12)
    # h-invariance: ad(X) acts on both slots, the aux image rotates the (k, l) index
    w = eta.forms[(0, 1)]
    for X in model.h_basis:
        A = model.isotropy_so(X)
        assert np.abs(A.T @ w + w @ A).max() < 1e-9  # the aux so(2) rotation fixes e_1 e_2


def test_zero_spinor_rejected():
    model = build_model("cpn-hermitian", 2, aux_param=3)
    with pytest.raises(ValueError):
        sc.eta_forms(model, np.zeros(8))
    with pytest.raises(ValueError):
        sc.killing_residual(model, np.zeros(8), conn.NomizuMap.zero(model))


@pytest.mark.parametrize("n", [2, 3])
def test_symplectic_purity_only_extreme_powers(n):
    model = build_model("cpn-symplectic", n, aux_param=-2 * (n + 1))
    pure = [sc.purity_check(model, symplectic_omega_spinor(n, k)).pure_up_to_scale for k in range(n + 1)]
    assert pure == [k in (0, n) for k in range(n + 1)]


def test_purity_scale_is_analytic():
    model = build_model("cpn-hermitian", 2, aux_param=3)
    psi = hermitian_spinor(2, "1", "1")
    res1 = sc.purity_check(model, psi)
    res3 = sc.purity_check(model, 3 * psi)
    assert res1.pure_up_to_scale and res3.pure_up_to_scale
    assert np.isclose(res3.scale, res1.scale / 3)


def test_parallel_symplectic_only_at_t_one():
    psi = symplectic_omega_spinor(2, 0)
    for t, want in ((1.0, True), (2.0, False), (0.5, False)):
        model = build_model("cpn-symplectic", 2, MetricParams(t=t), -6)
        assert sc.parallel_check(model, psi, conn.levi_civita_nomizu(model)).parallel == want


def test_killing_on_cp3():
    model = build_model("cpn-symplectic", 1, MetricParams(a=1.0, t=0.5))
    lc = conn.levi_civita_nomizu(model)
    plus, minus = symplectic_pm(1)
    for sign in (1, -1):
        sol = sc.generalized_killing_solve(model, plus + sign * 1j * minus, lc)
        assert sol is not None and np.allclose(sol.A, sol.A.T)
    assert sc.generalized_killing_solve(model, plus + minus, lc) is None


def test_parallel_spinor_is_killing_with_zero_a():
    model = build_model("cpn-hermitian", 2, aux_param=3)
    sol = sc.generalized_killing_solve(model, hermitian_spinor(2, "1", "1"), conn.NomizuMap.zero(model))
    assert sol is not None and not np.any(sol.A)


def test_projective_sample():
    pts = sc.projective_sample()
    assert len(pts) == 34 and pts[-2:] == [(1.0, 1j), (1.0, -1j)]
    assert all(abs(abs(a) ** 2 + abs(b) ** 2 - 1) < 1e-12 for a, b in pts[:32])


def test_lineage_monotonicity():
    dims = {(r, m): sc.invariant_space(build_model("cpn-hermitian", 2, aux_param=3, r=r, m=m)).shape[0]
            for r, m in ((2, 1), (3, 1), (2, 3))}
    assert dims[(2, 1)] <= dims[(3, 1)] and dims[(2, 1)] <= dims[(2, 3)]


def test_omega_power_norms():
    for n in (2, 3):
        for k in range(n + 1):
            assert np.isclose(np.vdot(sc.symplectic_omega(n, k), sc.symplectic_omega(n, k)).real,
                              factorial(k) ** 2 * comb(n, k))
