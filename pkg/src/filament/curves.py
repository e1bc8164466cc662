"""
Sampled space curves: arclength reparameterization, Frenet data and the
rotated (parallel) frame.

Closed curves are differentiated spectrally on the uniform periodic grid.
Open curves (e.g. reconstructions that fail to close) fall back to a
high-degree interpolating spline, which is accurate away from the ends.
"""

import csv
import re
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import NonFiniteError, NumericalError, ValidationError

TWO_PI = 2 * np.pi
CURVATURE_FLOOR = 1e-10
MIN_NODES = 16


def grid(n):
    return TWO_PI * np.arange(n) / n


@dataclass(frozen=True)
class SampledCurve:
    points: np.ndarray
    closed: bool = True
    scale: float = 1.0  # original length / 2pi when rescaled

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError("points must have shape (N, 3)")
        if pts.shape[0] < MIN_NODES:
            raise ValidationError(f"need at least {MIN_NODES} nodes, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise NonFiniteError("curve contains NaN or Inf")
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def s(self):
        return grid(self.n)


@dataclass(frozen=True)
class FrameField:
    """Orthonormal frames along a curve.

    ``kind`` is ``"frenet"`` for (v, n, b) or ``"rotated"`` for (e1, e2, e3);
    ``frames`` has shape (N, 3, 3) with the triple along axis 1.
    """
    kind: str
    frames: np.ndarray
    curvature: np.ndarray
    torsion: np.ndarray
    theta: np.ndarray = field(default=None)
    closed: bool = True

    @property
    def first(self):
        return self.frames[:, 0]

    @property
    def second(self):
        return self.frames[:, 1]

    @property
    def third(self):
        return self.frames[:, 2]


def spectral_derivative(values, order=1):
    """d^order/ds^order of 2pi-periodic samples along axis 0."""
    values = np.asarray(values)
    n = values.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0 and order % 2 == 1:
        k[n // 2] = 0.0
    mult = (1j * k) ** order
    coeffs = np.fft.fft(values, axis=0)
    out = np.fft.ifft(coeffs * mult.reshape((n,) + (1,) * (values.ndim - 1)), axis=0)
    return out.real if np.isrealobj(values) else out


def spectral_antiderivative(values):
    """Integral from 0 of periodic samples: mean*s plus the periodic primitive."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    c = np.fft.fft(values) / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    s = grid(n)
    prim = np.zeros(n, dtype=complex)
    nz = k != 0
    if n % 2 == 0:
        nz[n // 2] = False
    prim[nz] = c[nz] / (1j * k[nz])
    periodic = np.fft.ifft(prim * n).real
    return c[0].real * s + periodic - periodic[0]


def fourier_eval(values, t):
    """Trigonometric interpolant of periodic samples at arbitrary points t."""
    values = np.asarray(values)
    n = values.shape[0]
    c = np.fft.fft(values, axis=0) / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    w = np.ones(n)
    if n % 2 == 0:
        w[n // 2] = 0.5
        basis = np.exp(1j * np.outer(t, k)) * w
        # cos part of the Nyquist mode counted from both +-N/2
        basis[:, n // 2] = np.cos(n / 2 * np.asarray(t))
    else:
        basis = np.exp(1j * np.outer(t, k))
    out = basis @ c
    return out.real if np.isrealobj(values) else out


def _open_derivatives(points, orders):
    s = grid(points.shape[0])
    spl = make_interp_spline(s, points, k=7)
    return [spl.derivative(o)(s) for o in orders]


def derivatives(curve, orders=(1, 2, 3)):
    if curve.closed:
        return [spectral_derivative(curve.points, o) for o in orders]
    return _open_derivatives(curve.points, orders)


def resample_arclength(curve):
    """Redistribute the nodes uniformly in arclength and rescale the length to 2pi."""
    if not curve.closed:
        raise ValidationError("arclength resampling needs a closed curve")
    d1 = spectral_derivative(curve.points)
    speed = np.linalg.norm(d1, axis=1)
    if np.min(speed) < 1e-12:
        raise NumericalError("tangent vanishes at some node; curve is not regular")
    arc = spectral_antiderivative(speed)
    length = float(np.mean(speed) * TWO_PI)
    n = curve.n
    target = grid(n) * length / TWO_PI
    # Newton on the spectral arclength function, started from the linear guess
    t = grid(n).copy()
    c_speed = speed
    for _ in range(50):
        s_t = fourier_eval(arc - np.mean(speed) * grid(n), t) + np.mean(speed) * t
        v_t = fourier_eval(c_speed, t)
        step = (s_t - target) / v_t
        t = t - step
        if np.max(np.abs(step)) < 1e-15:
            break
    pts = fourier_eval(curve.points, t)
    factor = length / TWO_PI
    return SampledCurve(pts / factor, closed=True, scale=curve.scale * factor)


def frenet_data(curve, speed_tol=1e-6):
    """Frenet frame (v, n, b), curvature and torsion at the nodes."""
    d1, d2, d3 = derivatives(curve, (1, 2, 3))
    speed = np.linalg.norm(d1, axis=1)
    if np.max(np.abs(speed - 1)) > speed_tol:
        raise ValidationError(
            f"curve is not unit speed (max | |v| - 1 | = {np.max(np.abs(speed - 1)):.2e}); "
            "call resample_arclength first")
    k = np.linalg.norm(d2, axis=1)
    if np.min(k) <= CURVATURE_FLOOR:
        raise ValidationError("curvature vanishes at some node; Frenet frame undefined")
    v = d1 / speed[:, None]
    n = d2 - np.sum(d2 * v, axis=1)[:, None] * v
    n /= np.linalg.norm(n, axis=1)[:, None]
    b = np.cross(v, n)
    torsion = np.einsum("ij,ij->i", np.cross(d1, d2), d3) / k**2
    frames = np.stack([v, n, b], axis=1)
    return FrameField("frenet", frames, k, torsion, closed=curve.closed)


def curve_invariants(points, s):
    """Curvature and torsion of an open curve sampled at parameters s (any speed)."""
    spl = make_interp_spline(s, points, k=7)
    d1, d2, d3 = (spl.derivative(o)(s) for o in (1, 2, 3))
    cross = np.cross(d1, d2)
    speed = np.linalg.norm(d1, axis=1)
    k = np.linalg.norm(cross, axis=1) / speed**3
    torsion = np.einsum("ij,ij->i", cross, d3) / np.linalg.norm(cross, axis=1) ** 2
    return k, torsion


def integrate_torsion(torsion, closed):
    """theta(s) - theta(0) at the nodes and the total over one period."""
    torsion = np.asarray(torsion, dtype=float)
    n = torsion.size
    if closed:
        theta = spectral_antiderivative(torsion)
        return theta, float(np.mean(torsion) * TWO_PI)
    s = grid(n)
    prim = make_interp_spline(s, torsion, k=7).antiderivative()
    return prim(s) - prim(0.0), float(prim(TWO_PI) - prim(0.0))


def rotated_frame(frames, theta0=0.0):
    """(e1, e2, e3) with e2 = cos(theta) n - sin(theta) b, theta = theta0 + int torsion."""
    if frames.kind != "frenet":
        raise ValidationError("rotated_frame expects a Frenet frame field")
    rel, _ = integrate_torsion(frames.torsion, frames.closed)
    theta = theta0 + rel
    c, s = np.cos(theta)[:, None], np.sin(theta)[:, None]
    v, n, b = frames.first, frames.second, frames.third
    e2 = c * n - s * b
    e3 = s * n + c * b
    return replace(frames, kind="rotated", frames=np.stack([v, e2, e3], axis=1), theta=theta)


def looks_closed(points, tail_tol=1e-8):
    """Heuristic closure test: a periodic smooth curve has a negligible Fourier tail."""
    points = np.asarray(points, dtype=float)
    c = np.abs(np.fft.fft(points - points.mean(axis=0), axis=0))
    n = points.shape[0]
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    tail = c[k > n // 4].max(initial=0.0)
    return bool(tail <= tail_tol * max(c.max(), 1e-300))


def read_curve_csv(path, closed=None, tol=1e-12):
    """Read ``s,x,y,z`` rows; s must be the uniform grid 2pi j / N."""
    flag = None
    with open(path, newline="") as fh:
        rows = []
        for r in csv.reader(fh):
            if r and r[0].startswith("#"):
                m = re.match(r"#\s*closed\s*=\s*(\w+)", r[0])
                if m:
                    flag = m.group(1).lower() in ("1", "true", "yes")
            elif r:
                rows.append(r)
    header = [h.strip() for h in rows[0]]
    if header != ["s", "x", "y", "z"]:
        raise ValidationError(f"{path}: header must be s,x,y,z, got {','.join(header)}")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValidationError(f"{path}: every row needs 4 columns")
    s = data[:, 0]
    n = s.size
    if n < MIN_NODES:
        raise ValidationError(f"{path}: need at least {MIN_NODES} rows")
    if np.any(np.diff(s) <= 0):
        raise ValidationError(f"{path}: s must be strictly increasing")
    if np.max(np.abs(s - grid(n))) > tol * max(1.0, n):
        raise ValidationError(f"{path}: s is not the uniform grid 2*pi*j/N")
    if closed is None:
        closed = flag if flag is not None else looks_closed(data[:, 1:])
    return SampledCurve(data[:, 1:], closed=closed)


def write_curve_csv(path, curve):
    rows = [(s, *p) for s, p in zip(curve.s, curve.points)]
    with open(path, "w", newline="") as fh:
        fh.write(f"# closed={'true' if curve.closed else 'false'}\n")
        fh.write("s,x,y,z\n")
        for r in rows:
            fh.write(",".join(format(float(v), ".17g") for v in r) + "\n")
