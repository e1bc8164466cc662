"""
2x2 complex matrix algebra: the quaternion basis I, J, K and the isometry
between R^3 and skew-hermitian 2x2 matrices.

Matrices are plain ``numpy`` arrays of shape ``(..., 2, 2)`` and vectors are
arrays of shape ``(..., 3)``; every function broadcasts over leading axes.
"""

import numpy as np

from .errors import NonFiniteError, ValidationError

DEFAULT_TOL = 1e-10

ID2 = np.eye(2, dtype=complex)
I = np.array([[1j, 0], [0, -1j]])
J = np.array([[0, -1], [1, 0]], dtype=complex)
K = np.array([[0, -1j], [-1j, 0]])
BASIS = np.stack([I, J, K])


def _finite(x, name="input"):
    x = np.asarray(x)
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return x


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def scalar(a, b):
    """Scalar product -1/2 tr(AB) on skew-hermitian matrices."""
    return -0.5 * np.trace(a @ b, axis1=-2, axis2=-1)


def is_unitary(m, tol=DEFAULT_TOL):
    m = np.asarray(m)
    return bool(np.max(np.abs(m @ dagger(m) - ID2)) < tol)


def is_skew_hermitian(m, tol=DEFAULT_TOL):
    m = np.asarray(m)
    return bool(np.max(np.abs(m + dagger(m))) < tol)


def is_unimodular(m, tol=DEFAULT_TOL):
    return bool(np.max(np.abs(np.linalg.det(np.asarray(m)) - 1)) < tol)


def vec_to_mat(w):
    """w1*I + w2*J + w3*K."""
    w = _finite(w, "vector")
    if w.shape[-1] != 3:
        raise ValidationError("vector must have 3 components")
    return np.tensordot(w.astype(float), BASIS, axes=([-1], [0]))


def mat_to_vec(m, tol=DEFAULT_TOL):
    """Inverse of :func:`vec_to_mat`; rejects non skew-hermitian input."""
    m = _finite(m, "matrix")
    if not is_skew_hermitian(m, tol):
        raise ValidationError("matrix is not skew-hermitian within tolerance")
    return np.stack([scalar(m, e).real for e in BASIS], axis=-1)


def conjugate(g, x, tol=DEFAULT_TOL):
    """g x g^{-1} for unitary g (so g^{-1} = g^*)."""
    g = _finite(g, "g")
    x = _finite(x, "x")
    if not is_unitary(g, tol):
        raise ValidationError("conjugating matrix is not unitary within tolerance")
    return g @ x @ dagger(g)


def polar_unitary(m):
    """Nearest unitary matrix (polar factor), batched."""
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def expm_traceless(a):
    """exp(A) for traceless 2x2 A via cosh(s) + sinh(s)/s A with s^2 = -det A."""
    s = np.sqrt(-np.linalg.det(a) + 0j)
    small = np.abs(s) < 1e-8
    s_safe = np.where(small, 1.0, s)
    c = np.where(small, 1 + s**2 / 2, np.cosh(s_safe))
    sh = np.where(small, 1 + s**2 / 6, np.sinh(s_safe) / s_safe)
    return c[..., None, None] * ID2 + sh[..., None, None] * a
