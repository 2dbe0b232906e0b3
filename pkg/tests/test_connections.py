import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinr import connections as conn, verify
from spinr.spaces import MetricParams, ModelError, build_model


@pytest.mark.parametrize("n,a,t", verify.NOMIZU_GRID)
def test_closed_form_matches_levi_civita(n, a, t):
    model = build_model("cpn-symplectic", n, MetricParams(a=a, t=t))
    diff = conn.symplectic_nomizu_closed_form(n, a, t).tangent - conn.levi_civita_nomizu(model).tangent
    assert np.abs(diff).max() < 1e-9


@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0))
@settings(max_examples=10, deadline=None)
def test_levi_civita_is_torsion_free(a, t):
    # Lambda(X)Y - Lambda(Y)X = [X, Y]_m
    model = build_model("cpn-symplectic", 1, MetricParams(a=a, t=t))
    L = conn.levi_civita_nomizu(model).tangent
    C, _ = conn.structure_constants(model)
    for i in range(model.dim_m):
        for j in range(model.dim_m):
            assert np.allclose(L[i][:, j] - L[j][:, i], C[i, j], atol=1e-10)


def test_symmetric_spaces_have_zero_nomizu_map():
    for space, n, s in (("cpn-hermitian", 2, 3), ("hpn", 2, None), ("op2", None, None)):
        model = build_model(space, n, aux_param=s)
        assert not np.any(conn.levi_civita_nomizu(model).tangent)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("a", [0.5, 1.5])
def test_hermitian_ricci(n, a):
    model = build_model("cpn-hermitian", n, MetricParams(a=a), n + 1)
    assert abs(conn.einstein_constant(conn.ricci_direct(model)) - (n + 1) / a) < 1e-9 * (n + 1) / a


def test_symplectic_ricci_einstein_only_for_special_t():
    model = build_model("cpn-symplectic", 2, MetricParams(a=0.5, t=1.0), -6)
    assert abs(conn.einstein_constant(conn.ricci_direct(model)) - 12.0) < 1e-9
    model = build_model("cpn-symplectic", 2, MetricParams(a=0.5, t=2.0), -6)
    assert conn.einstein_constant(conn.ricci_direct(model)) is None


def test_hpn_ricci_is_einstein():
    assert conn.einstein_constant(conn.ricci_direct(build_model("hpn", 2))) is not None


@pytest.mark.parametrize("space,n,s", [("cpn-hermitian", 2, 3), ("cpn-symplectic", 1, -4), ("hpn", 2, None)])
def test_no_invariant_aux_nomizu_maps(space, n, s):
    assert conn.invariant_aux_nomizu_space(build_model(space, n, aux_param=s)) == []


def test_aux_curvature_hermitian():
    # Omega(e_1, e_2) = (s/a) e^_1 ^ e^_2 for the zero auxiliary map
    n, s, a = 2, -3, 0.5
    model = build_model("cpn-hermitian", n, MetricParams(a=a), s)
    Om = conn.aux_curvature(model, np.zeros((model.dim_m, 2, 2)))
    expected = np.array([[0.0, -1.0], [1.0, 0.0]]) * s / a
    assert np.allclose(Om[0, 1], expected)
    assert np.allclose(Om, -np.swapaxes(Om, 0, 1))


def test_nomizu_map_validation():
    with pytest.raises(ValueError):
        conn.NomizuMap(np.ones((2, 2, 2)), np.zeros((2, 1, 1)))
    z = conn.NomizuMap.zero(build_model("cpn-hermitian", 2, aux_param=3))
    assert z.tangent.shape == (4, 4, 4) and z.aux.shape == (4, 2, 2)


def test_closed_form_rejects_bad_parameters():
    with pytest.raises(ValueError):
        conn.symplectic_nomizu_closed_form(1, -1.0, 1.0)


def test_op2_has_no_structure_constants():
    with pytest.raises(ModelError):
        conn.structure_constants(build_model("op2"))


def test_einstein_constant():
    assert conn.einstein_constant(3 * np.eye(3)) == 3.0
    assert conn.einstein_constant(np.diag([1.0, 2.0])) is None
