"""
Fixed-step RK4 propagation of the Zakharov-Shabat system

    dF/dx = U(x, lam) F,   U = [[-i lam/2, i q/2], [i conj(q)/2, i lam/2]]

over one period [0, 2pi].  Because the system is linear, each RK4 step is a
matrix M_n (a polynomial in the generator at the step start, midpoint and end),
so all steps are built at once and multiplied together.  The potential is
evaluated between grid nodes through its trigonometric interpolant.  Accuracy
is controlled by Richardson extrapolation between m and 2m substeps per grid
interval.
"""

import math

import numpy as np

from .errors import NumericalError, ValidationError

# phase advance per substep; with Richardson the error is ~ L*w*(w*h)^5/720
PHASE_PER_STEP = 0.015
MAX_SUBSTEPS = 256
# elements of the (batch, steps, n, n) work array allowed in memory at once
_CHUNK = 2_000_000


def trig_resample(samples, m):
    """Values of the trigonometric interpolant of ``samples`` on a grid m times finer."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.size
    if m == 1:
        return samples.copy()
    c = np.fft.fft(samples)
    big = np.zeros(n * m, dtype=complex)
    if n % 2 == 0:
        h = n // 2
        big[:h] = c[:h]
        if h > 1:
            big[-(h - 1):] = c[h + 1:]
        # split the Nyquist mode symmetrically so real input stays real
        big[h] = 0.5 * c[h]
        big[-h] = 0.5 * c[h]
    else:
        h = (n + 1) // 2
        big[:h] = c[:h]
        big[-(n - h):] = c[h:]
    return np.fft.ifft(big) * m


def generator(qv, lam):
    """U(x, lam) for potential values qv (shape S) and spectral points lam (shape B)."""
    lam = np.asarray(lam, dtype=complex)[:, None]
    qv = np.asarray(qv, dtype=complex)[None, :]
    u = np.empty(np.broadcast_shapes(lam.shape, qv.shape) + (2, 2), dtype=complex)
    u[..., 0, 0] = -0.5j * lam
    u[..., 1, 1] = 0.5j * lam
    u[..., 0, 1] = 0.5j * qv
    u[..., 1, 0] = 0.5j * np.conj(qv)
    return u


def augmented_generator(qv, lam):
    """4x4 generator of (F, dF/dlam) for the variational equation."""
    u = generator(qv, lam)
    du = np.zeros_like(u)
    du[..., 0, 0] = -0.5j
    du[..., 1, 1] = 0.5j
    a = np.zeros(u.shape[:-2] + (4, 4), dtype=complex)
    a[..., :2, :2] = u
    a[..., 2:, 2:] = u
    a[..., 2:, :2] = du
    return a


def rk4_step_matrices(a0, am, a1, h):
    """Transition matrix of one classical RK4 step for the linear ODE y' = A(x) y."""
    n = a0.shape[-1]
    eye = np.eye(n, dtype=complex)
    am2 = am @ am
    return (eye + h / 6 * (a0 + 4 * am + a1)
            + h**2 / 6 * (am @ a0 + am2 + a1 @ am)
            + h**3 / 12 * (am2 @ a0 + a1 @ am2)
            + h**4 / 24 * (a1 @ am2 @ a0))


def chain(ms):
    """Ordered product M_{S-1} ... M_1 M_0 along axis -3, by pairwise reduction."""
    while ms.shape[-3] > 1:
        s = ms.shape[-3]
        head = ms[..., 1:s - s % 2:2, :, :] @ ms[..., 0:s - s % 2:2, :, :]
        if s % 2:
            head = np.concatenate([head, ms[..., -1:, :, :]], axis=-3)
        ms = head
    return ms[..., 0, :, :]


def substeps_for(q, lam, phase_per_step=PHASE_PER_STEP):
    """Substeps per grid interval so that the local phase advance stays small."""
    q = np.asarray(q)
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    n = q.size
    omega = 0.5 * math.sqrt(float(np.max(np.abs(lam))) ** 2 + float(np.max(np.abs(q))) ** 2)
    omega = max(omega, 0.5)
    h_grid = 2 * np.pi / n
    return max(1, math.ceil(h_grid * omega / phase_per_step))


def _propagate(q, lam, m, derivative, nodes):
    n = q.size
    s = n * m
    h = 2 * np.pi / s
    qf = trig_resample(q, 2 * m)  # values at x_k = k h / 2
    q0, qm = qf[0::2], qf[1::2]
    q1 = np.roll(q0, -1)
    gen = augmented_generator if derivative else generator
    dim = 4 if derivative else 2
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    per_lam = s * dim * dim
    chunk = max(1, _CHUNK // per_lam)
    out = []
    for start in range(0, lam.size, chunk):
        lb = lam[start:start + chunk]
        ms = rk4_step_matrices(gen(q0, lb), gen(qm, lb), gen(q1, lb), h)
        if nodes:
            ms = chain(ms.reshape(lb.size, n, m, dim, dim))
            acc = np.empty((lb.size, n + 1, dim, dim), dtype=complex)
            acc[:, 0] = np.eye(dim)
            for j in range(n):
                acc[:, j + 1] = ms[:, j] @ acc[:, j]
            out.append(acc)
        else:
            out.append(chain(ms))
    return np.concatenate(out, axis=0)


def propagate(q, lam, *, derivative=False, nodes=False, substeps=None):
    """
    Fundamental matrix of the ZS system started from the identity.

    Returns ``(phi, err)`` where ``phi`` has shape (B, 2, 2) (or (B, N+1, 2, 2)
    with ``nodes=True``; 4x4 blocks with ``derivative=True`` whose lower-left
    block is dPhi/dlam) and ``err`` is the Richardson error estimate.
    """
    q = np.asarray(q, dtype=complex)
    if q.ndim != 1 or q.size < 2:
        raise ValidationError("potential must be a 1-D array of samples")
    m = substeps if substeps is not None else substeps_for(q, lam)
    if m > MAX_SUBSTEPS:
        raise NumericalError(
            f"|lambda| = {np.max(np.abs(lam)):.3g} needs {m} RK4 substeps per grid "
            f"interval at N = {q.size} (limit {MAX_SUBSTEPS}); "
            f"stiffness estimate |lambda|/2 = {np.max(np.abs(lam)) / 2:.3g}")
    coarse = _propagate(q, lam, m, derivative, nodes)
    fine = _propagate(q, lam, 2 * m, derivative, nodes)
    err = float(np.max(np.abs(fine - coarse))) / 15
    return (16 * fine - coarse) / 15, err
