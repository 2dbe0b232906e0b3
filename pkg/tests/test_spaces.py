import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinr import spaces, weights
from spinr.numlin import QuatMatrix, bracket
from spinr.spaces import MetricParams, ModelError, build_model, op2_sigma, parse_skew_terms

# displayed images of the so(9) Cartan and raising elements in the octonionic
# spin representation: sigma(h_j) = -(i/2) R_j and 2 sigma(X_j) = D_j
H_DISPLAY = {
    1: "-1,5 +2,6 +3,7 -4,8 +9,13 -10,14 -11,15 +12,16",
    2: "+1,11 -2,12 -3,9 +4,10 +5,15 -6,16 -7,13 +8,14",
    3: "+1,7 -2,8 -3,5 +4,6 +9,15 -10,16 -11,13 +12,14",
    4: "-1,7 -2,8 +3,5 +4,6 -9,15 -10,16 +11,13 +12,14",
}
X_DISPLAY = {
    1: "+1,3 -i1,7 -i1,9 -1,13 -2,4 -i2,8 -i2,10 +2,14 -i3,5 -i3,11 +3,15 -i4,6 -i4,12 -4,16 +5,7 +5,9 "
       "-i5,13 -6,8 -6,10 -i6,14 -7,11 -i7,15 +8,12 -i8,16 -9,11 -i9,15 +10,12 -i10,16 -i11,13 -i12,14 -13,15 +14,16",
    2: "-i1,4 +1,6 -1,10 +i1,16 -i2,3 -2,5 +2,9 +i2,15 +3,8 -3,12 -i3,14 -4,7 +4,11 -i4,13 -i5,8 +i5,12 -5,14 "
       "-i6,7 +i6,11 +6,13 -i7,10 -7,16 -i8,9 +8,15 -i9,12 +9,14 -i10,11 -10,13 +11,16 -12,15 -i13,16 -i14,15",
    3: "-2,1,3 -2i1,5 -2i3,7 +2,5,7 -2,9,11 -2i9,13 -2i11,15 +2,13,15",
    4: "+i1,4 +1,6 -i2,3 -2,5 -3,8 +4,7 +i5,8 -i6,7 +i9,12 +9,14 -i10,11 -10,13 -11,16 +12,15 +i13,16 -i14,15",
}

MODELS = [("cpn-hermitian", 2, 3), ("cpn-hermitian", 3, 4), ("cpn-symplectic", 1, 0), ("cpn-symplectic", 2, -6),
          ("hpn", 2, None), ("hpn", 3, None)]


def _parse_scaled(text):
    # tokens "-2,1,3" carry an explicit real factor in front of the index pair
    out = np.zeros((16, 16), dtype=complex)
    for tok in text.split():
        body = tok[1:]
        if body.count(",") == 2:
            c, a, b = body.split(",")
            out += parse_skew_terms(f"{tok[0]}{a},{b}") * float(c)
        else:
            out += parse_skew_terms(tok)
    return out


@pytest.mark.parametrize("space,n,s", MODELS)
def test_complement_orthonormal_and_ad_invariant(space, n, s):
    model = build_model(space, n, MetricParams(a=0.7, t=1.3) if space == "cpn-symplectic" else MetricParams(a=0.7), s)
    assert np.allclose(model.metric_gram(), np.eye(model.dim_m), atol=1e-12)
    for X in model.h_basis:
        A = model.isotropy_so(X)
        assert np.allclose(A, -A.T, atol=1e-12)
        for Y in model.m_basis:
            assert np.abs(model.split(bracket(X, Y))[0]).max() < 1e-10


def test_dimensions():
    assert build_model("cpn-hermitian", 3, aux_param=4).dim_m == 6
    assert build_model("cpn-symplectic", 2, aux_param=0).dim_m == 10
    assert build_model("hpn", 3).dim_m == 12
    assert build_model("op2").dim_m == 16
    assert build_model("op2").dim_h == 36


def test_isotropy_representation_is_a_homomorphism():
    model = build_model("cpn-symplectic", 2, aux_param=-6)
    X, Y = model.h_basis[3], model.h_basis[5]
    lhs = model.isotropy_so(bracket(X, Y))
    A, B = model.isotropy_so(X), model.isotropy_so(Y)
    assert np.allclose(lhs, A @ B - B @ A, atol=1e-10)


def test_hpn_aux_images():
    model = build_model("hpn", 2)
    imgs = [model.aux_action(X) for X in model.h_basis[:3]]
    assert np.allclose(imgs[0], spaces.rotation(3, 2.0, 1, 2))
    assert np.allclose(imgs[1], spaces.rotation(3, -2.0, 0, 1))
    assert np.allclose(imgs[2], spaces.rotation(3, -2.0, 0, 2))
    assert all(not np.any(model.aux_action(X)) for X in model.h_basis[3:])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hermitian_lift_parity(n):
    for s in range(-6, 7):
        assert spaces.lift_parity("cpn-hermitian", n, s) == ((n - s) % 2 == 1)


@pytest.mark.parametrize("n", [1, 2])
def test_symplectic_lift_parity(n):
    for s in range(-5, 6):
        assert spaces.lift_parity("cpn-symplectic", n, s) == (s % 2 == 0)


def test_parity_failure_rejected():
    with pytest.raises(ModelError):
        build_model("cpn-hermitian", 2, aux_param=2)
    with pytest.raises(ModelError):
        build_model("cpn-symplectic", 2, aux_param=3)


@pytest.mark.parametrize("space,n,s,dim", [("cpn-hermitian", 2, 3, 2), ("cpn-symplectic", 2, -6, 4), ("hpn", 3, None, 1)])
def test_isotropy_commutant(space, n, s, dim):
    assert spaces.isotropy_commutant_dim(build_model(space, n, aux_param=s)) == dim


def test_model_errors():
    with pytest.raises(ModelError):
        build_model("hpn", 1)
    with pytest.raises(ModelError):
        build_model("op2", r=8)
    with pytest.raises(ValueError):
        build_model("cpn-hermitian", 2, aux_param=3, m=2)
    with pytest.raises(ModelError):
        build_model("cpn-hermitian", 2, aux_param=3, r=1)
    with pytest.raises(ValueError):
        MetricParams(a=-1.0)
    model = build_model("cpn-hermitian", 2, aux_param=3)
    with pytest.raises(ModelError):
        model.split(QuatMatrix.from_real(np.eye(3)))  # symmetric real part is not in sp(3)


def test_op2_generators_are_anticommuting_complex_structures():
    gens = spaces.op2_generators()
    s0 = [gens[(0, i)] for i in range(1, 9)]
    for a, b in itertools.combinations_with_replacement(range(8), 2):
        prod = s0[a] @ s0[b] + s0[b] @ s0[a]
        assert np.allclose(prod, -2 * np.eye(16) if a == b else 0)


def test_op2_sigma_is_a_homomorphism(rng):
    A, B = rng.standard_normal((2, 9, 9))
    A, B = A - A.T, B - B.T
    sa, sb = op2_sigma(A), op2_sigma(B)
    assert np.allclose(op2_sigma(A @ B - B @ A), sa @ sb - sb @ sa, atol=1e-12)


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_displayed_cartan_images(j):
    assert np.allclose(op2_sigma(weights.so9_cartan()[j - 1]), -0.5j * parse_skew_terms(H_DISPLAY[j]))


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_displayed_raising_images(j):
    assert np.allclose(2 * op2_sigma(weights.so9_raising()[j - 1]), _parse_scaled(X_DISPLAY[j]))


def test_parse_skew_terms():
    M = parse_skew_terms("+1,2 -2i1,3", size=3)
    assert M[1, 0] == 1 and M[0, 1] == -1
    assert M[2, 0] == -2j and M[0, 2] == 2j


@given(st.integers(2, 4), st.floats(0.1, 5.0))
@settings(max_examples=15, deadline=None)
def test_hermitian_orthonormal_for_any_scale(n, a):
    model = build_model("cpn-hermitian", n, MetricParams(a=a), n + 1)
    assert np.allclose(model.metric_gram(), np.eye(2 * n), atol=1e-10)
