"""
Hasimoto correspondence between curves and Zakharov-Shabat potentials.

Forward: q(s) = k(s) exp(i theta(s)), theta' = torsion.  Backward: integrate
the frame equation L(lam0) Omega = 0, set E1 = Omega^{-1} I Omega and
Gamma = Gamma(0) + int E1.  The reconstructed curve has Hasimoto image
exp(i phi0 + i lam0 x) q(x); with lam0 = -alpha this undoes gauge_shift(., alpha).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import su2
from .curves import (CURVATURE_FLOOR, TWO_PI, FrameField, SampledCurve,
                     curve_invariants, grid, integrate_torsion)
from .errors import NonFiniteError, NumericalError, ValidationError
from .transfer import propagate, substeps_for, trig_resample

PHASE_TOL = 1e-12
PHASE_SNAP = 1e-7


def reduce_phase(phi_total):
    """Split a total phase into phi in (-pi, pi] and an integer winding."""
    winding = round(phi_total / TWO_PI)
    phi = phi_total - TWO_PI * winding
    # -pi and pi are the same phase; values within PHASE_SNAP of -pi are
    # reported near +pi so that round-off does not flip the representative
    if phi <= -math.pi + PHASE_SNAP:
        phi += TWO_PI
        winding -= 1
    return phi, winding


@dataclass(frozen=True)
class PotentialSignal:
    """Samples q(x_j) on x_j = 2 pi j / N with q(x + 2pi) = exp(i phase) q(x).

    ``winding`` keeps the unreduced total phase = phase + 2 pi winding;
    ``gauge_shift`` accumulates every alpha applied by :func:`gauge_shift`.
    """
    samples: np.ndarray
    phase: float = 0.0
    winding: int = 0
    gauge_shift: float = 0.0

    def __post_init__(self):
        q = np.asarray(self.samples, dtype=complex)
        if q.ndim != 1 or q.size < 2:
            raise ValidationError("potential samples must be a 1-D array")
        if not np.all(np.isfinite(q)):
            raise NonFiniteError("potential contains NaN or Inf")
        object.__setattr__(self, "samples", q)

    @property
    def n(self):
        return self.samples.size

    @property
    def x(self):
        return grid(self.n)

    @property
    def total_phase(self):
        return self.phase + TWO_PI * self.winding

    @property
    def periodic(self):
        return abs(self.phase) < PHASE_TOL

    @classmethod
    def constant(cls, c, n=512):
        return cls(np.full(n, c, dtype=complex))


def require_periodic(q):
    if not q.periodic:
        alpha = -q.phase / TWO_PI
        raise ValidationError(
            f"potential is quasi-periodic (phase {q.phase:.17g}); apply gauge first "
            f"with alpha = {alpha:.17g}")


def require_nonvanishing(q):
    if np.min(np.abs(q.samples)) <= CURVATURE_FLOOR:
        raise ValidationError("potential vanishes at some node (zero curvature)")


def hasimoto_forward(frames, theta0=0.0):
    if np.min(frames.curvature) <= CURVATURE_FLOOR:
        raise ValidationError("curvature below floor; Hasimoto image undefined")
    rel, total = integrate_torsion(frames.torsion, frames.closed)
    q = frames.curvature * np.exp(1j * (theta0 + rel))
    phi, winding = reduce_phase(total)
    return PotentialSignal(q, phi, winding)


def gauge_shift(q, alpha):
    """q(x) -> exp(i alpha x) q(x); spectral parameter moves lam -> lam - alpha."""
    alpha = float(alpha)
    phi, winding = reduce_phase(q.total_phase + TWO_PI * alpha)
    return PotentialSignal(q.samples * np.exp(1j * alpha * q.x), phi, winding,
                           q.gauge_shift + alpha)


def periodizing_shift(q):
    """The alpha = -phi / 2pi that makes the potential strictly periodic."""
    return -q.phase / TWO_PI


@dataclass(frozen=True)
class ReconstructionConfig:
    lambda0: float = 0.0
    omega0: np.ndarray = field(default_factory=lambda: su2.ID2.copy())
    gamma0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tol: float = 1e-10

    def __post_init__(self):
        if not np.isfinite(self.lambda0) or np.iscomplexobj(self.lambda0):
            raise ValidationError("lambda0 must be a finite real number")
        om = np.asarray(self.omega0, dtype=complex)
        if om.shape != (2, 2) or not su2.is_unitary(om, self.tol):
            raise ValidationError("omega0 must be a unitary 2x2 matrix")
        object.__setattr__(self, "omega0", om)
        object.__setattr__(self, "gamma0", np.asarray(self.gamma0, dtype=float))


@dataclass(frozen=True)
class Reconstruction:
    curve: SampledCurve
    frames: FrameField
    end: np.ndarray            # gamma(2pi)
    gap: np.ndarray            # gamma(2pi) - gamma(0)
    omega: np.ndarray          # Omega at the N + 1 nodes of [0, 2pi]
    monodromy: np.ndarray      # T(lambda0)
    unitarity_drift: float
    error_estimate: float

    def __iter__(self):
        return iter((self.curve, self.frames))


# Boole weights for one panel of four fine steps
_BOOLE = np.array([7, 32, 12, 32, 7]) * 2 / 45


def _cumulative_boole(values, refine, h):
    """Integral from 0 to each grid node; ``refine`` fine steps (multiple of 4) per node."""
    n_fine = values.shape[0] - 1
    panels = n_fine // 4
    idx = 4 * np.arange(panels)[:, None] + np.arange(5)
    per_panel = np.tensordot(values[idx], _BOOLE, axes=([1], [0])) * h
    per_grid = per_panel.reshape(n_fine // refine, refine // 4, -1).sum(axis=1)
    out = np.zeros((per_grid.shape[0] + 1,) + values.shape[1:])
    out[1:] = np.cumsum(per_grid, axis=0)
    return out


def reconstruct_curve(q, cfg=None):
    """Curve and rotated frame for a periodic potential at the real point lam0."""
    cfg = cfg or ReconstructionConfig()
    require_periodic(q)
    require_nonvanishing(q)
    n = q.n
    m = substeps_for(q.samples, [cfg.lambda0])
    refine = 4 * max(1, math.ceil(m / 2))
    qf = trig_resample(q.samples, refine)
    phi, err = propagate(qf, [cfg.lambda0], nodes=True, substeps=2)
    phi = phi[0]
    drift = float(np.max(np.abs(phi @ su2.dagger(phi) - su2.ID2)))
    if drift > 10 * cfg.tol:
        raise NumericalError(f"frame lost unitarity: drift {drift:.2e}")
    omega = su2.polar_unitary(phi) @ cfg.omega0
    inv = su2.dagger(omega)
    e = [inv @ b @ omega for b in su2.BASIS]
    e1 = np.stack([su2.scalar(e[0], b).real for b in su2.BASIS], axis=-1)
    h = TWO_PI / (n * refine)
    # positions at every Boole panel end; the grid nodes are every (refine/4)-th
    panel_pts = cfg.gamma0 + _cumulative_boole(e1, 4, h)
    per = refine // 4
    gamma = panel_pts[::per]
    nodes = slice(0, None, refine)
    vecs = np.stack([np.stack([su2.scalar(ei[nodes], b).real for b in su2.BASIS], axis=-1)
                     for ei in e], axis=1)
    qs = q.samples
    # invariants measured on the reconstructed curve itself (fine grid, then subsampled)
    k_geo, torsion = curve_invariants(panel_pts, 4 * h * np.arange(panel_pts.shape[0]))
    k_geo, torsion = k_geo[::per][:-1], torsion[::per][:-1]
    q_rec = qs * np.exp(1j * cfg.lambda0 * q.x)
    theta = np.unwrap(np.angle(q_rec))
    frames = FrameField("rotated", vecs[:-1], k_geo, torsion, theta, closed=False)
    curve = SampledCurve(gamma[:-1], closed=False)
    omega_nodes = omega[nodes]
    return Reconstruction(curve, frames, gamma[-1], gamma[-1] - gamma[0], omega_nodes,
                          phi[-1], drift, err)


@dataclass(frozen=True)
class FrameClosure:
    frame_periodic: bool
    curve_closed: bool
    gap: np.ndarray
    frame_defect: float

    def __iter__(self):
        return iter((self.frame_periodic, self.curve_closed, self.gap))


def closure_test_frame(q, cfg=None, tol=1e-8):
    """Geometric closure test: periodicity of E1 and vanishing of int E1.

    E1(x + 2pi) is obtained from E1(x) through the monodromy, so only one
    period is integrated.
    """
    cfg = cfg or ReconstructionConfig()
    rec = reconstruct_curve(q, cfg)
    t = rec.monodromy
    base = su2.dagger(rec.omega) @ su2.I @ rec.omega
    shifted_omega = rec.omega @ su2.dagger(cfg.omega0) @ t @ cfg.omega0
    shifted = np.linalg.inv(shifted_omega) @ su2.I @ shifted_omega
    defect = float(np.max(np.abs(shifted - base)))
    periodic = defect < tol
    closed = periodic and float(np.linalg.norm(rec.gap)) < tol
    return FrameClosure(periodic, closed, rec.gap, defect)


def potential_to_json(q):
    return {
        "n": q.n,
        "period": TWO_PI,
        "phase": q.phase,
        "winding": q.winding,
        "gauge_shift": q.gauge_shift,
        "samples": [[float(z.real), float(z.imag)] for z in q.samples],
    }


def potential_from_json(obj):
    try:
        samples = np.array([complex(re, im) for re, im in obj["samples"]])
        n = int(obj["n"])
        phase = float(obj.get("phase", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed potential file: {exc}") from None
    if samples.size != n:
        raise ValidationError(f"potential file declares n={n} but has {samples.size} samples")
    if abs(float(obj.get("period", TWO_PI)) - TWO_PI) > 1e-12:
        raise ValidationError("potential period must be 2*pi")
    return PotentialSignal(samples, phase, int(obj.get("winding", 0)),
                           float(obj.get("gauge_shift", 0.0)))


def read_potential(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return potential_from_json(obj)
