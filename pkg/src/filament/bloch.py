"""
Floquet theory of the Zakharov-Shabat operator on a 2pi-periodic potential:
monodromy, discriminant, real double points, Bloch solutions, the derivative
of the quasimomentum p = log(w) / (2 pi i) and the spectral closure test.

Sheet convention: on the real axis the sheet-1 Bloch vector is the eigenvector
whose first component dominates.  For |lam| -> infinity this is the branch
with p ~ -lam / 2.
"""

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import jsonio, su2
from .errors import NumericalError, ValidationError
from .hasimoto import require_nonvanishing, require_periodic
from .transfer import propagate, substeps_for

TWO_PI = 2 * np.pi
DOUBLE_POINT_TOL = 1e-6


@dataclass(frozen=True)
class MonodromyResult:
    lam: complex
    T: np.ndarray
    delta: complex
    multipliers: tuple
    error: float
    dT: np.ndarray = None

    @property
    def regular(self):
        # |w1 - w2| ~ sqrt(|Delta -+ 2|) amplifies round-off, so test T itself
        sign = 1 if self.delta.real >= 0 else -1
        near_identity = np.max(np.abs(self.T - sign * su2.ID2)) < DOUBLE_POINT_TOL
        return not near_identity and abs(self.multipliers[0] - self.multipliers[1]) > 1e-10


def _multipliers(delta):
    # roots of w^2 - delta w + 1, ordered so that |w1| >= |w2|
    r = np.sqrt(delta * delta - 4 + 0j)
    w1, w2 = (delta + r) / 2, (delta - r) / 2
    if abs(w1) < abs(w2):
        w1, w2 = w2, w1
    return complex(w1), complex(w2)


def monodromy(q, lam, derivative=False):
    require_periodic(q)
    lam = complex(lam)
    if not np.isfinite(lam):
        raise ValidationError("spectral parameter must be finite")
    phi, err = propagate(q.samples, [lam], derivative=derivative)
    block = phi[0]
    t = block[:2, :2]
    delta = complex(np.trace(t))
    return MonodromyResult(lam if lam.imag else lam.real, t, delta, _multipliers(delta),
                           err, block[2:, :2] if derivative else None)


def _threads(threads):
    if threads is None:
        threads = int(os.environ.get("FILAMENT_THREADS", "1") or 1)
    return max(1, threads)


def _batched(q, lams, derivative=False, threads=None, substeps=None):
    lams = np.asarray(lams, dtype=complex)
    # fixed across workers so results do not depend on the thread count
    m = substeps if substeps is not None else substeps_for(q.samples, lams)
    workers = _threads(threads)
    if workers == 1 or lams.size < 2 * workers:
        return propagate(q.samples, lams, derivative=derivative, substeps=m)
    parts = np.array_split(lams, workers)
    with ThreadPoolExecutor(workers) as pool:
        res = list(pool.map(
            lambda p: propagate(q.samples, p, derivative=derivative, substeps=m), parts))
    return np.concatenate([r[0] for r in res]), max(r[1] for r in res)


def discriminant_scan(q, lambdas, threads=None):
    """(lam, Delta(lam)) rows sorted by lam."""
    require_periodic(q)
    lams = np.sort(np.asarray(lambdas, dtype=float))
    t, _ = _batched(q, lams, threads=threads)
    return lams, np.trace(t, axis1=-2, axis2=-1)


class PointKind(str, Enum):
    REGULAR = "Regular"
    REMOVABLE_DOUBLE = "RemovableDouble"


@dataclass(frozen=True)
class RealPointClass:
    lam: float
    kind: PointKind
    sign: int
    dp_dlambda: float
    residual: float  # ||T -+ Id||
    at_endpoint: bool = False


def _delta_prime(q, lam, substeps):
    blk, _ = propagate(q.samples, [lam], derivative=True, substeps=substeps)
    return float(np.trace(blk[0, 2:, :2]).real)


def _dT(q, lam, substeps):
    blk, _ = propagate(q.samples, np.atleast_1d(lam), derivative=True, substeps=substeps)
    return blk[:, 2:, :2]


def _polish_flat(q, lam, substeps, step=1e-4, iters=4):
    """Refine a double point where dT vanishes too (dp = 0 there).

    Delta' then has a triple zero and is useless for locating the point, but
    dT itself has a simple zero, found by Gauss-Newton on its entries.
    """
    for _ in range(iters):
        d0, dp, dm = _dT(q, [lam, lam + step, lam - step], substeps)
        slope = (dp - dm) / (2 * step)
        shift = np.vdot(slope, d0).real / np.vdot(slope, slope).real
        lam -= shift
        if abs(shift) < 1e-15:
            break
    return lam


def classify_real_point(q, lam, tol=DOUBLE_POINT_TOL):
    m = monodromy(q, lam, derivative=True)
    sign = 1 if m.delta.real >= 0 else -1
    resid = float(np.max(np.abs(m.T - sign * su2.ID2)))
    if resid < tol:
        dp = _dp_double(m)[0]
        return RealPointClass(float(lam), PointKind.REMOVABLE_DOUBLE, sign, dp, resid)
    dp = quasimomentum_derivative(q, lam)[0]
    return RealPointClass(float(lam), PointKind.REGULAR, 0, dp, resid)


def find_real_double_points(q, interval, n_scan=None, tol=DOUBLE_POINT_TOL, threads=None):
    """Real lam in [lo, hi] with T(lam) = +-Id, located as critical points of Delta."""
    require_periodic(q)
    lo, hi = map(float, interval)
    if not lo < hi:
        raise ValidationError("interval must satisfy lo < hi")
    ends = []
    for end in (lo, hi):
        c = classify_real_point(q, end, tol)
        if c.kind is PointKind.REMOVABLE_DOUBLE:
            warnings.warn(f"interval endpoint {end:.17g} is a double point; "
                          "it is included and flagged", stacklevel=2)
            ends.append(RealPointClass(c.lam, c.kind, c.sign, c.dp_dlambda, c.residual, True))
    if n_scan is None:
        n_scan = max(201, int(50 * (hi - lo)) + 1)
    grid = np.linspace(lo, hi, n_scan)
    # one substep count for the scan and the refinement keeps the signs consistent
    m = substeps_for(q.samples, [lo, hi])
    blocks, _ = _batched(q, grid, derivative=True, threads=threads, substeps=m)
    dd = np.trace(blocks[:, 2:, :2], axis1=-2, axis2=-1).real
    roots = []
    for i in range(n_scan - 1):
        a, b = dd[i], dd[i + 1]
        if a == 0.0:
            roots.append(grid[i])
        elif a * b < 0:
            roots.append(brentq(lambda x: _delta_prime(q, x, m), grid[i], grid[i + 1],
                                xtol=1e-14, rtol=4 * np.finfo(float).eps))
    refined = []
    for r in roots:
        if np.max(np.abs(_dT(q, r, m))) < 1e-2:
            r = _polish_flat(q, r, m)
        refined.append(r)
    found = []
    for r in sorted(refined):
        if found and abs(r - found[-1].lam) < 1e-9:
            continue
        if any(abs(r - e.lam) < 1e-9 for e in ends):
            continue
        c = classify_real_point(q, r, tol)
        if c.kind is PointKind.REMOVABLE_DOUBLE:
            found.append(c)
    return sorted(found + ends, key=lambda c: c.lam)


@dataclass(frozen=True)
class BlochPair:
    vectors: np.ndarray      # (2, 2): row i is the initial vector of sheet i
    multipliers: tuple
    bloch_normalized: bool   # False when the component-sum rule degenerated


def _sheet_order(vecs):
    # rows are eigenvectors; sheet 1 has the dominant first component
    if abs(vecs[0, 0]) < abs(vecs[1, 0]):
        return vecs[::-1], True
    return vecs, False


def bloch_eigenvectors(m, degenerate_tol=1e-8):
    """Eigenvectors of T with component sum 1 (unit norm when that is impossible)."""
    if not m.regular:
        raise ValidationError("double point: eigenvectors coincide, use the double-point path")
    w, v = np.linalg.eig(m.T)
    vecs = v.T.copy()
    vecs, swapped = _sheet_order(vecs)
    mult = (complex(w[1]), complex(w[0])) if swapped else (complex(w[0]), complex(w[1]))
    ok = True
    for i in range(2):
        s = vecs[i].sum()
        if abs(s) < degenerate_tol:
            ok = False
            vecs[i] /= np.linalg.norm(vecs[i])
        else:
            vecs[i] /= s
    return BlochPair(vecs, mult, ok)


def _double_point_vectors(m):
    # at T = +-Id the Bloch vectors are the limits of the eigenvectors of
    # T(lam) as lam -> lam*, i.e. eigenvectors of dT T^{-1} (anti-hermitian)
    gen = m.dT @ np.linalg.inv(m.T)
    herm = -1j * 0.5 * (gen - su2.dagger(gen))
    vals, vecs = np.linalg.eigh(herm)
    vecs = vecs.T.copy()
    order = [0, 1]
    if abs(vecs[0, 0]) < abs(vecs[1, 0]):
        order = [1, 0]
    return vecs[order], vals[order] / TWO_PI


def _dp_double(m):
    _, dp = _double_point_vectors(m)
    return tuple(float(x) for x in dp)


def _trap(f):
    # trapezoid over the N + 1 nodes of [0, 2pi]
    h = TWO_PI / (f.shape[0] - 1)
    return h * (f[1:-1].sum(axis=0) + 0.5 * (f[0] + f[-1]))


def _solutions(q, lam):
    phi, err = propagate(q.samples, [lam], derivative=True, nodes=True)
    phi = phi[0]
    t = phi[-1, :2, :2]
    delta = complex(np.trace(t))
    m = MonodromyResult(lam, t, delta, _multipliers(delta), err, phi[-1, 2:, :2])
    return m, phi[:, :2, :2]


def bloch_solutions(q, lam, tol=DOUBLE_POINT_TOL):
    """Monodromy data and the two Bloch solutions at the N + 1 nodes (unit initial norm)."""
    m, phi = _solutions(q, lam)
    sign = 1 if m.delta.real >= 0 else -1
    double = float(np.max(np.abs(m.T - sign * su2.ID2))) < tol
    if double:
        vecs, _ = _double_point_vectors(m)
    else:
        vecs = bloch_eigenvectors(m).vectors
        vecs = vecs / np.linalg.norm(vecs, axis=1)[:, None]
    psi = np.einsum("nij,kj->kni", phi, vecs)  # (sheet, node, component)
    return m, psi, double


def dp_formula(psi_a, psi_b):
    """Derivative of the quasimomentum on the sheet of psi_a from the two Bloch solutions."""
    num = _trap(psi_a[:, 0] * psi_b[:, 1] + psi_a[:, 1] * psi_b[:, 0])
    wr = psi_a[0, 0] * psi_b[0, 1] - psi_a[0, 1] * psi_b[0, 0]
    return -num / (4 * np.pi * wr), abs(wr)


def quasimomentum_derivative(q, lam, wronskian_tol=1e-10):
    """dp/dlam on sheets 1 and 2 at a real regular point or a double point."""
    require_periodic(q)
    lam = float(lam)
    _, psi, _ = bloch_solutions(q, lam)
    d1, w = dp_formula(psi[0], psi[1])
    d2, _ = dp_formula(psi[1], psi[0])
    if w < wronskian_tol:
        raise NumericalError(f"Wronskian {w:.2e} below tolerance at lam = {lam:.17g}")
    return float(d1.real), float(d2.real)


def quasimomentum_fd(q, lam, step=1e-3):
    """dp/dlam on sheet 1 from finite differences of log(w) / (2 pi i) (regular points only)."""
    lam = float(lam)
    pts = lam + step * np.array([-2, -1, 0, 1, 2])
    t, _ = propagate(q.samples, pts)
    w0 = bloch_eigenvectors(monodromy(q, lam)).multipliers[0]
    ws = []
    for tk in t:
        ev = np.linalg.eigvals(tk)
        ws.append(ev[np.argmin(np.abs(ev - w0))])
    f = np.angle(np.array(ws) / w0) / TWO_PI
    return float((8 * (f[3] - f[1]) - (f[4] - f[0])) / (12 * step))


def double_point_integral_check(q, lam, tol=DOUBLE_POINT_TOL):
    """|int psi1 psi2| over a period at a double point (vanishes exactly in theory)."""
    require_periodic(q)
    m, psi, double = bloch_solutions(q, float(lam), tol)
    if not double:
        raise ValidationError(f"lam = {lam:.17g} is not a double point")
    return max(float(abs(_trap(psi[k][:, 0] * psi[k][:, 1]))) for k in range(2))


class Verdict(str, Enum):
    NOT_FRAME_PERIODIC = "NotFramePeriodic"
    FRAME_PERIODIC_NOT_CLOSED = "FramePeriodicNotClosed"
    CLOSED = "Closed"


@dataclass(frozen=True)
class ClosureReport:
    lambda0: float
    is_double_point: bool
    sign: int
    a: complex
    b: complex
    dp_dlambda: float
    verdict: Verdict

    @property
    def gap(self):
        """Norm of int E1 over a period; equals |a| at double points where b = 0."""
        return float(np.hypot(abs(self.a), abs(self.b)))


def closure_check(q, lambda0, tol=1e-8, double_tol=DOUBLE_POINT_TOL, require_curve=True):
    """Spectral closure verdict for the curve generated by (q, lambda0).

    ``require_curve=False`` skips the nonvanishing check so that a and b can be
    reported for potentials that do not come from a regular curve.
    """
    require_periodic(q)
    if require_curve:
        require_nonvanishing(q)
    lam = float(lambda0)
    m, psi, double = bloch_solutions(q, lam, double_tol)
    p0 = psi[0]
    a = 1j * _trap(np.abs(p0[:, 0]) ** 2 - np.abs(p0[:, 1]) ** 2)
    b = -2j * _trap(p0[:, 0] * p0[:, 1])
    dp, _ = dp_formula(psi[0], psi[1])
    sign = (1 if m.delta.real >= 0 else -1) if double else 0
    if not double:
        verdict = Verdict.NOT_FRAME_PERIODIC
    elif abs(a) < tol and abs(b) < tol:
        verdict = Verdict.CLOSED
    else:
        verdict = Verdict.FRAME_PERIODIC_NOT_CLOSED
    return ClosureReport(lam, double, sign, complex(a), complex(b), float(dp.real), verdict)


def spectrum_report(q, interval, n_scan=None, threads=None):
    """Double points in the interval with their quasimomentum derivative and closure gap."""
    out = []
    for pt in find_real_double_points(q, interval, n_scan=n_scan, threads=threads):
        rep = closure_check(q, pt.lam, require_curve=False)
        out.append({"lambda": pt.lam, "sign": pt.sign, "dp_dlambda": pt.dp_dlambda,
                    "closure_gap": rep.gap})
    return out


def write_scan_csv(path, lams, delta):
    with open(path, "w") as fh:
        fh.write("lambda,re_delta,im_delta\n")
        for lam, d in zip(lams, delta):
            fh.write(f"{lam:.17g},{d.real:.17g},{d.imag:.17g}\n")


def write_spectrum_json(path, report):
    jsonio.dump(report, path)
