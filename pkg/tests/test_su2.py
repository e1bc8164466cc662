import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.spatial.transform import Rotation

from filament import su2
from filament.errors import NonFiniteError, ValidationError

vec = st.lists(st.floats(-10, 10), min_size=3, max_size=3).map(np.array)


def test_quaternion_relations():
    I, J, K = su2.I, su2.J, su2.K
    for e in (I, J, K):
        assert np.allclose(e @ e, -su2.ID2)
    assert np.allclose(I @ J, K)
    assert np.allclose(J @ K, I)
    assert np.allclose(K @ I, J)


def test_basis_is_orthonormal():
    gram = np.array([[su2.scalar(a, b) for b in su2.BASIS] for a in su2.BASIS])
    assert np.allclose(gram, np.eye(3))


@given(vec)
def test_vector_matrix_round_trip(w):
    m = su2.vec_to_mat(w)
    assert su2.is_skew_hermitian(m)
    assert np.allclose(su2.mat_to_vec(m), w, atol=1e-12)


@given(vec, vec)
def test_scalar_product_is_dot_and_commutator_is_cross(u, v):
    a, b = su2.vec_to_mat(u), su2.vec_to_mat(v)
    assert np.isclose(su2.scalar(a, b).real, u @ v, atol=1e-9)
    assert np.allclose(a @ b - b @ a, 2 * su2.vec_to_mat(np.cross(u, v)), atol=1e-9)


@settings(max_examples=50)
@given(vec, vec)
def test_conjugation_acts_as_rotation(w, v):
    g = su2.expm_traceless(su2.vec_to_mat(0.3 * w))
    assert su2.is_unitary(g) and su2.is_unimodular(g)
    image = su2.mat_to_vec(su2.conjugate(g, su2.vec_to_mat(v)), tol=1e-8)
    assert np.isclose(np.linalg.norm(image), np.linalg.norm(v), rtol=1e-10, atol=1e-10)


def test_conjugation_by_exp_i_is_rotation_about_first_axis():
    # g = exp(t I / 2) rotates R^3 about e1 by the angle t
    t = 0.7
    g = expm(t / 2 * su2.I)
    img = su2.mat_to_vec(su2.conjugate(g, su2.J))
    assert any(np.allclose(img, Rotation.from_rotvec([sign * t, 0, 0]).apply([0, 1, 0]))
               for sign in (1, -1))


@given(vec)
def test_expm_traceless_matches_scipy(w):
    a = su2.vec_to_mat(w) + 0.1j * np.array([[1, 2], [3, -1]])
    assert np.allclose(su2.expm_traceless(a), expm(a), rtol=1e-9, atol=1e-9)


def test_validation():
    with pytest.raises(NonFiniteError):
        su2.vec_to_mat([np.nan, 0, 0])
    with pytest.raises(ValidationError):
        su2.vec_to_mat([1, 2])
    with pytest.raises(ValidationError):
        su2.mat_to_vec(np.eye(2))
    with pytest.raises(ValidationError):
        su2.conjugate(2 * su2.ID2, su2.I)


def test_polar_unitary_projects():
    m = su2.ID2 + 1e-3 * np.array([[1, 2j], [0.5, -1]])
    assert su2.is_unitary(su2.polar_unitary(m))
