"""
Hyperelliptic spectral surfaces with conjugation symmetry, the normalized
quasimomentum differential

    dp = -1/2 q(lam) / R(lam) dlam,   R^2 = prod (lam - lam_j),

its periods, and the isoperiodic deformation flow in the rational form

    dlam_j/dxi  = -sum_k c_k / (lam_j - alpha_k)
    dalpha_m/dxi = sum_{k != m} (c_k + c_m) / (alpha_k - alpha_m)
                   - 1/2 sum_j c_m / (lam_j - alpha_m)

(j over the 2g + 2 branch points, k and m over the g + 1 zeros of q).

Cuts are vertical segments [conj(E_k), E_k].  R is the product of
z sqrt(1 + b^2 / z^2) with z = lam - Re E_k, b = Im E_k, which is analytic off
the cuts, real on the real axis and ~ lam^(g+1) at infinity on sheet +.
"""

import json
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.optimize import linear_sum_assignment, root

from .errors import DegenerateSurfaceError, NumericalError, ValidationError

NORMALIZATION_TOL = 1e-8
REAL_TOL = 1e-9
COLLISION_TOL = 1e-8
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class SpectralSurface:
    """Conjugation-symmetric surface given by its upper branch points E_k (Im E_k > 0)."""
    upper: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.upper, dtype=complex))
        if e.ndim != 1 or e.size == 0:
            raise ValidationError("need at least one upper branch point")
        if not np.all(np.isfinite(e)):
            raise ValidationError("branch points must be finite")
        if np.any(e.imag <= 0):
            raise ValidationError("upper branch points need Im > 0 (real branch points unsupported)")
        e = e[np.argsort(e.real, kind="stable")]
        if e.size > 1 and np.min(np.diff(e.real)) < COLLISION_TOL:
            raise DegenerateSurfaceError("surface degenerate: two cuts share a real part")
        object.__setattr__(self, "upper", e)

    @property
    def genus(self):
        return self.upper.size - 1

    @property
    def branch_points(self):
        """lam_1, ..., lam_{2g+2} with lam_{2k+2} = conj(lam_{2k+1})."""
        out = np.empty(2 * self.upper.size, dtype=complex)
        out[0::2] = self.upper
        out[1::2] = np.conj(self.upper)
        return out

    @property
    def scale(self):
        return max(1.0, float(np.max(np.abs(self.upper))))

    @cached_property
    def half_widths(self):
        """Half-width of the box around each cut that stays clear of the others."""
        a, b = self.upper.real, self.upper.imag
        out = np.empty(a.size)
        for k in range(a.size):
            others = np.delete(a, k)
            dist = np.min(np.abs(others - a[k])) if others.size else np.inf
            out[k] = min(0.5 * dist, max(b[k], 1.0))
        return out


def sqrt_R(surface, lam):
    """Cut-respecting branch of sqrt(prod (lam - lam_j)), ~ lam^(g+1) on sheet +."""
    lam = np.asarray(lam, dtype=complex)
    out = np.ones_like(lam)
    for e in surface.upper:
        z = lam - e.real
        with np.errstate(divide="ignore", invalid="ignore"):
            s = z * np.sqrt(1 + (e.imag / z) ** 2)
        # on the real axis at the crossing point take the right-hand limit
        s = np.where(z == 0, e.imag, s)
        out = out * s
    return out


def _poly(coeffs, lam):
    """Monic q(lam) = lam^(g+1) + q_g lam^g + ... + q_0."""
    return np.polyval(np.concatenate([[1.0], np.asarray(coeffs)[::-1]]), lam)


def _gl_panels(z0, z1, panels):
    t = np.linspace(0.0, 1.0, panels + 1)
    lo, hi = t[:-1, None], t[1:, None]
    s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * _GL_X
    w = 0.5 * (hi - lo) * _GL_W
    return (z0 + (z1 - z0) * s).ravel(), ((z1 - z0) * w).ravel()


def _box(surface, k):
    e = surface.upper[k]
    a, b, A = e.real, e.imag, surface.half_widths[k]
    h = b + A
    return [complex(a + A, -h), complex(a + A, h), complex(a - A, h), complex(a - A, -h)]


def _contour(surface, k, level):
    """Nodes and weights (dz included) of the counterclockwise box around cut k."""
    corners = _box(surface, k)
    A = surface.half_widths[k]
    zs, ws = [], []
    for c0, c1 in zip(corners, corners[1:] + corners[:1]):
        n = (int(np.ceil(abs(c1 - c0) / A)) + 1) * 2 ** level
        z, w = _gl_panels(c0, c1, n)
        zs.append(z)
        ws.append(w)
    return np.concatenate(zs), np.concatenate(ws)


def cycle_moments(surface, k, degree, tol=1e-13, max_level=10):
    """[oint lam^j / R dlam for j = 0..degree] around cut k, by node doubling."""
    prev = None
    for level in range(max_level):
        z, w = _contour(surface, k, level)
        vals = (z[None, :] ** np.arange(degree + 1)[:, None]) / sqrt_R(surface, z)
        cur = vals @ w
        if prev is not None and np.max(np.abs(cur - prev)) < tol * max(1.0, np.max(np.abs(cur))):
            return cur
        prev = cur
    raise NumericalError(f"cycle quadrature around cut {k} did not converge")


def _adaptive_segment(f, z0, z1, tol=1e-14, depth=0):
    z, w = _gl_panels(z0, z1, 1)
    whole = f(z) @ w
    z, w = _gl_panels(z0, z1, 2)
    halves = f(z) @ w
    if abs(whole - halves) < tol * max(1.0, abs(halves)) or depth > 40:
        return halves
    mid = 0.5 * (z0 + z1)
    return (_adaptive_segment(f, z0, mid, tol, depth + 1)
            + _adaptive_segment(f, mid, z1, tol, depth + 1))


@dataclass(frozen=True)
class QuasimomentumDiff:
    """Normalized dp on a surface: real coefficients q_0..q_g of the monic q and its zeros."""
    surface: SpectralSurface
    coeffs: np.ndarray
    alphas: np.ndarray
    residuals: np.ndarray = field(default=None)

    @property
    def genus(self):
        return self.surface.genus

    def q(self, lam):
        return _poly(self.coeffs, lam)

    def density(self, lam):
        """dp / dlam on sheet +."""
        lam = np.asarray(lam, dtype=complex)
        return -0.5 * self.q(lam) / sqrt_R(self.surface, lam)

    @cached_property
    def laurent(self):
        """c_n with q / R = 1 + sum_{n >= 2} c_n lam^-n (index n = position)."""
        m, nterms = 256, 40
        rho = 3 * self.surface.scale
        t = np.exp(2j * np.pi * np.arange(m) / m)
        f = self.q(rho * t) / sqrt_R(self.surface, rho * t)
        n = np.arange(nterms)
        return (f[None, :] * t[None, :] ** n[:, None]).mean(axis=1) * rho ** n

    def _p_far(self, lam):
        c = self.laurent
        n = np.arange(2, c.size)
        return float((-0.5 * lam + 0.5 * np.sum(c[2:] * lam ** (1.0 - n) / (n - 1))).real)

    @cached_property
    def _stations(self):
        """p_+ at R0 and at both feet of the detour box of every cut, walking leftward."""
        s = self.surface
        f = self.density
        r0 = 10 * s.scale
        right, left = [], []
        x, val = r0, self._p_far(r0)
        for k in range(s.upper.size - 1, -1, -1):
            a, b, A = s.upper[k].real, s.upper[k].imag, s.half_widths[k]
            val += _adaptive_segment(f, x, a + A).real
            right.append(val)
            top = b + A
            path = [complex(a + A, 0), complex(a + A, top), complex(a - A, top), complex(a - A, 0)]
            for z0, z1 in zip(path, path[1:]):
                val += _adaptive_segment(f, z0, z1)
            if abs(val.imag) > 1e-8:
                raise NumericalError("quasimomentum not real after a cut detour; is dp normalized?")
            val = val.real
            left.append(val)
            x = a - A
        return r0, self._p_far(r0), right[::-1], left[::-1]

    def p_plus(self, lam, side=1):
        """p on sheet + at real lam, with p ~ -lam/2 + O(1/lam) as lam -> +inf.

        ``side`` picks the limit from the right (+1) or left (-1) at a cut crossing.
        """
        lam = float(np.real(lam))
        s = self.surface
        r0, p0, right, left = self._stations
        if lam >= r0:
            return self._p_far(lam)
        a, A = s.upper.real, s.half_widths
        for k in range(a.size - 1, -1, -1):
            if lam > a[k] + A[k]:
                start, val = (a[k + 1] - A[k + 1], left[k + 1]) if k + 1 < a.size else (r0, p0)
                break
            if lam > a[k] or (lam == a[k] and side > 0):
                start, val = a[k] + A[k], right[k]
                break
            if lam > a[k] - A[k]:
                start, val = a[k] - A[k], left[k]
                break
        else:
            start, val = a[0] - A[0], left[0]
        if lam == start:
            return val
        return float(val + _adaptive_segment(self.density, start, lam).real)

    @cached_property
    def intersheet_constants(self):
        """C_k = p_+(a_k^+) + p_+(a_k^-) = 2 p_+(E_k) for each cut."""
        a = self.surface.upper.real
        return np.array([self.p_plus(x, 1) + self.p_plus(x, -1) for x in a])


def _classify_roots(r, tol=REAL_TOL):
    r = np.asarray(r, dtype=complex)
    out = r.copy()
    real = np.abs(r.imag) < tol * max(1.0, float(np.max(np.abs(r))))
    out[real] = r[real].real
    # exact conjugate pairs for the rest
    cplx = np.flatnonzero(~real)
    used = set()
    for i in cplx:
        if i in used:
            continue
        j = min((j for j in cplx if j != i and j not in used), key=lambda j: abs(r[j] - np.conj(r[i])))
        z = 0.5 * (r[i] + np.conj(r[j]))
        out[i], out[j] = z, np.conj(z)
        used.update((i, j))
    return out


def normalize_quasimomentum(surface, cycles=None, tol=NORMALIZATION_TOL):
    """Coefficients of q fixed by the vanishing residue at infinity and oint dp = 0 on g cuts.

    ``cycles`` lists the cut indices carrying the cycle conditions; the default
    uses every cut but the first.
    """
    g = surface.genus
    cycles = list(range(1, g + 1)) if cycles is None else list(cycles)
    if len(cycles) != g or len(set(cycles)) != g or not all(0 <= c <= g for c in cycles):
        raise ValidationError(f"need {g} distinct cut indices in 0..{g}")
    qg = -float(np.sum(surface.upper.real))
    moments = [cycle_moments(surface, k, g + 1) for k in range(g + 1)]
    coeffs = np.zeros(g + 1)
    coeffs[g] = qg
    if g:
        mat = np.array([moments[k][:g].imag for k in cycles])
        rhs = -np.array([(moments[k][g + 1] + qg * moments[k][g]).imag for k in cycles])
        if np.linalg.cond(mat) > 1e12:
            raise DegenerateSurfaceError("surface degenerate: singular normalization system")
        coeffs[:g] = np.linalg.solve(mat, rhs)
    full = np.concatenate([coeffs, [1.0]])
    residuals = np.array([abs(moments[k] @ full) for k in range(g + 1)])
    if np.max(residuals) > tol:
        raise NumericalError(f"normalization residual {np.max(residuals):.2e} above {tol:.0e}")
    alphas = _classify_roots(np.roots(full[::-1]))
    alphas = alphas[np.lexsort((alphas.imag, alphas.real))]
    return QuasimomentumDiff(surface, coeffs, alphas, residuals)


@dataclass(frozen=True)
class PeriodicityReport:
    cycle_periods: np.ndarray      # oint dp around each cut
    b_periods: np.ndarray          # C_{k+1} - C_k between neighbouring cuts
    k: float                       # p_- = lam/2 + k + O(1/lam) at infinity
    constants: np.ndarray          # C_k for each cut
    distances: np.ndarray          # to the nearest integer, same order as above
    periodic: bool


def _dist(x):
    x = np.asarray(x)
    return np.abs(x - np.round(x.real))


def check_periodicity(diff, tol=1e-8):
    s = diff.surface
    g = s.genus
    full = np.concatenate([diff.coeffs, [1.0]])
    cyc = np.array([-0.5 * cycle_moments(s, j, g + 1) @ full for j in range(g + 1)])
    c = diff.intersheet_constants
    b = np.diff(c)
    k = float(c[-1])
    d = np.concatenate([_dist(cyc), _dist(b), _dist([k])])
    return PeriodicityReport(cyc, b, k, c, d, bool(np.all(d < tol)))


def surface_from_constant_potential(c):
    """The genus-0 surface {ic, -ic} of the constant potential c, with its dp."""
    c = float(c)
    if not c > 0 or not np.isfinite(c):
        raise ValidationError("constant potential modulus must be positive")
    surf = SpectralSurface([1j * c])
    return surf, normalize_quasimomentum(surf)


# --- deformation flow -------------------------------------------------------

VARIANTS = ("reference", "branch_alpha_index", "pair_numerator_k", "pair_numerator_m",
            "pair_denominator", "branch_term_order")


def deformation_rhs(branch, alphas, controls, variant="reference"):
    """d(lam_j)/dxi and d(alpha_m)/dxi; ``variant`` selects a single-index-swap audit form."""
    lam = np.asarray(branch, dtype=complex)
    al = np.asarray(alphas, dtype=complex)
    c = np.asarray(controls, dtype=complex)
    n = al.size
    if np.all(c == 0):
        return np.zeros_like(lam), np.zeros_like(al)
    dl = lam[:, None] - al[None, :]
    da = al[None, :] - al[:, None]  # da[m, k] = alpha_k - alpha_m
    off = ~np.eye(n, dtype=bool)
    if np.min(np.abs(dl)) < COLLISION_TOL or (n > 1 and np.min(np.abs(da[off])) < COLLISION_TOL):
        raise NumericalError("surface degenerate: zero of dp collides with a branch point or zero")
    if variant == "branch_alpha_index":
        # alpha index tied to the cut of lam_j instead of the summation index
        cut = np.arange(lam.size) // 2
        dlam = -np.sum(c) / (lam - al[np.minimum(cut, n - 1)])
    else:
        dlam = -np.sum(c[None, :] / dl, axis=1)
    cm, ck = c[:, None], c[None, :]
    num = {"pair_numerator_k": 2 * ck, "pair_numerator_m": 2 * cm}.get(variant, ck + cm)
    den = -da if variant == "pair_denominator" else da
    with np.errstate(divide="ignore", invalid="ignore"):
        pair = np.where(off, num / np.where(off, den, 1), 0).sum(axis=1)
    bsum = np.sum(1.0 / dl, axis=0)
    if variant == "branch_term_order":
        bsum = -bsum
    dalpha = pair - 0.5 * c * bsum
    return dlam, dalpha


def _match(tracked, roots):
    cost = np.abs(np.asarray(tracked)[:, None] - np.asarray(roots)[None, :])
    row, col = linear_sum_assignment(cost)
    out = np.empty_like(tracked)
    out[row] = roots[col]
    return out


def check_controls(alphas, controls, tol=REAL_TOL):
    """Reality conditions: real c for a real zero, conjugate c for a conjugate pair."""
    al = np.asarray(alphas, dtype=complex)
    c = np.asarray(controls, dtype=complex)
    if c.shape != al.shape:
        raise ValidationError(f"need {al.size} controls, got {c.size}")
    for i, a in enumerate(al):
        if abs(a.imag) < tol:
            if abs(c[i].imag) > tol:
                raise ValidationError(f"control {i + 1} must be real (alpha_{i + 1} is real)")
        else:
            j = int(np.argmin(np.abs(al - np.conj(a))))
            if abs(c[j] - np.conj(c[i])) > tol:
                raise ValidationError(
                    f"controls {i + 1}, {j + 1} must be conjugate (conjugate zeros)")


@dataclass(frozen=True)
class DeformationState:
    xi: float
    diff: QuasimomentumDiff
    alphas: np.ndarray           # tracked zeros; in filament mode Lambda0 is the last one
    controls: np.ndarray
    filament_mode: bool = False
    monitors: dict = field(default_factory=dict)

    @property
    def surface(self):
        return self.diff.surface

    def to_json(self):
        pair = lambda z: [float(np.real(z)), float(np.imag(z))]
        return {
            "xi": float(self.xi),
            "genus": self.surface.genus,
            "branch_points_upper": [pair(e) for e in self.surface.upper],
            "coeffs": [float(x) for x in self.diff.coeffs],
            "alphas": [pair(a) for a in self.alphas],
            "controls": [pair(x) for x in self.controls],
            "filament_mode": self.filament_mode,
            "monitors": {k: float(v) for k, v in self.monitors.items()},
        }


def _p_at(diff, x):
    return diff.p_plus(float(np.real(x)))


def _invariants(diff, alphas, filament):
    rep = check_periodicity(diff)
    out = {"constants": rep.constants}
    if filament:
        out["p_mu0"] = _p_at(diff, alphas[-1])
    return out


def initial_state(diff, alphas=None, controls=None, filament=False):
    alphas = diff.alphas if alphas is None else np.asarray(alphas, dtype=complex)
    alphas = _match(alphas, diff.alphas)
    g1 = diff.genus + 1
    c = np.zeros(g1, dtype=complex) if controls is None else np.array(controls, dtype=complex)
    if filament:
        if abs(alphas[-1].imag) > REAL_TOL:
            raise ValidationError("no real quasimomentum zero designated (alpha_{g+1} must be real)")
        p0 = _p_at(diff, alphas[-1])
        if abs(2 * p0 - round(2 * p0)) > 1e-6:
            raise ValidationError(
                f"alpha_{{g+1}} is not a double point: p = {p0:.17g} is not a half-integer")
        c[-1] = 0.0
    check_controls(alphas, c)
    return DeformationState(0.0, diff, alphas, c, filament)


def integrate_flow(state0, xi_end, steps, *, renormalize=True, variant="reference",
                   tol=1e-6, adaptive=True, max_halvings=6, callback=None):
    """Integrate the deformation with RK4; one state per accepted outer step.

    Each step is retried with halved substeps while an invariant monitor drifts
    beyond ``tol``; a drift still above ``10 * tol`` at the finest level aborts.
    With ``adaptive=False`` the monitors are only recorded (used by the audit).
    """
    if steps < 1:
        raise ValidationError("steps must be positive")
    filament = state0.filament_mode
    ref = _invariants(state0.diff, state0.alphas, filament)
    g1 = state0.diff.genus + 1
    h = (float(xi_end) - state0.xi) / steps

    def rhs(e, al, c):
        surf_b = np.empty(2 * g1, dtype=complex)
        surf_b[0::2], surf_b[1::2] = e, np.conj(e)
        dl, da = deformation_rhs(surf_b, al, c, variant)
        return dl[0::2], da

    def rk4(e, al, c, dt):
        k1 = rhs(e, al, c)
        k2 = rhs(e + dt / 2 * k1[0], al + dt / 2 * k1[1], c)
        k3 = rhs(e + dt / 2 * k2[0], al + dt / 2 * k2[1], c)
        k4 = rhs(e + dt * k3[0], al + dt * k3[1], c)
        return (e + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                al + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))

    def advance(state, dt, sub):
        e, al = state.surface.upper.copy(), state.alphas.copy()
        c = state.controls
        for _ in range(sub):
            e, al = rk4(e, al, c, dt / sub)
        diff = normalize_quasimomentum(SpectralSurface(e))
        matched = _match(al, diff.alphas)
        drift = float(np.max(np.abs(matched - al)))
        if renormalize:
            al = matched
        inv = _invariants(diff, matched if renormalize else al, filament)
        mon = {
            "period_drift": float(np.max(np.abs(inv["constants"] - ref["constants"]))),
            "alpha_drift": drift,
        }
        if filament:
            mon["p_mu0_drift"] = abs(inv["p_mu0"] - ref["p_mu0"])
            mon["im_lambda0"] = abs(float(np.imag(al[-1])))
        real_type = np.abs(state0.alphas.imag) < REAL_TOL
        mon["reality_defect"] = float(np.max(np.abs(np.imag(al[real_type])), initial=0.0))
        return DeformationState(state.xi + dt, diff, al, c, filament, mon)

    def worst(mon):
        keys = ("period_drift", "p_mu0_drift")
        return max(mon.get(k, 0.0) for k in keys)

    traj = [replace(state0, monitors={"period_drift": 0.0, "alpha_drift": 0.0})]
    state = state0
    for i in range(steps):
        controls = callback(state.xi, state) if callback else state.controls
        if callback:
            controls = np.array(controls, dtype=complex)
            if filament:
                controls[-1] = 0.0
            check_controls(state.alphas, controls)
            state = replace(state, controls=controls)
        sub = 1
        nxt = advance(state, h, sub)
        while adaptive and worst(nxt.monitors) > tol and sub < 2 ** max_halvings:
            sub *= 2
            nxt = advance(state, h, sub)
        if adaptive and worst(nxt.monitors) > 10 * tol:
            raise NumericalError(
                f"invariant monitor breach at xi = {state.xi + h:.17g}: "
                f"drift {worst(nxt.monitors):.2e} > {10 * tol:.0e}")
        if filament and nxt.monitors["im_lambda0"] > 1e-10 and adaptive:
            raise NumericalError(f"Lambda0 left the real axis at xi = {nxt.xi:.17g}")
        nxt = replace(nxt, xi=state0.xi + (i + 1) * h)
        traj.append(nxt)
        state = nxt
    return traj


def index_audit(state0, xi_end, steps, tol=1e-6):
    """Maximal period drift of each right-hand-side variant without renormalization."""
    out = {}
    for v in VARIANTS:
        try:
            traj = integrate_flow(state0, xi_end, steps, renormalize=False, variant=v,
                                  adaptive=False)
            out[v] = max(max(s.monitors["period_drift"], s.monitors["alpha_drift"]) for s in traj)
        except (NumericalError, ValidationError):
            out[v] = np.inf
    return out


def genus1_filament_start(c=1.0, n=2, eps=0.1, seed=None, tol=1e-12):
    """A g = 1 surface near the constant potential c with a gap opened at the double point
    lam = sqrt(n^2 - c^2), projected onto the periodic locus with Lambda0 ~ 0 a double point.

    ``seed`` jitters the starting guess of the projection (by ~1e-3).
    Returns the normalized differential and the zeros with Lambda0 last.
    """
    c = float(c)
    lam_n = np.sqrt(n * n - c * c)

    def build(x):
        return normalize_quasimomentum(SpectralSurface([x[0] + 1j * x[1], x[2] + 1j * eps]))

    def designated(diff):
        real = diff.alphas[np.abs(diff.alphas.imag) < REAL_TOL].real
        if real.size == 0:
            raise NumericalError("no real zero of dp near Lambda0")
        return real[np.argmin(np.abs(real))]

    x0 = np.array([0.0, c, lam_n])
    if seed is not None:
        x0 = x0 + 1e-3 * np.random.default_rng(seed).standard_normal(3)
    d0 = build(x0)
    p_target = round(2 * d0.p_plus(designated(d0))) / 2

    def resid(x):
        d = build(x)
        C = d.intersheet_constants
        return [C[0], C[1] + n, d.p_plus(designated(d)) - p_target]

    sol = root(resid, x0, method="hybr", tol=tol)
    if not sol.success or np.max(np.abs(resid(sol.x))) > 1e-10:
        raise NumericalError(f"projection onto the periodic locus failed: {sol.message}")
    diff = build(sol.x)
    lam0 = designated(diff)
    others = diff.alphas[np.abs(diff.alphas - lam0) > 0]
    return diff, np.concatenate([others, [lam0]])


# --- surface file -----------------------------------------------------------

def surface_to_json(diff, alphas=None):
    pair = lambda z: [float(np.real(z)), float(np.imag(z))]
    return {
        "genus": diff.genus,
        "branch_points_upper": [pair(e) for e in diff.surface.upper],
        "coeffs": [float(x) for x in diff.coeffs],
        "alphas": [pair(a) for a in (diff.alphas if alphas is None else alphas)],
    }


def surface_from_json(obj):
    """(diff, alphas) from a surface file; stored coeffs must agree with the normalization."""
    try:
        g = int(obj["genus"])
        upper = [complex(re, im) for re, im in obj["branch_points_upper"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed surface file: {exc}") from None
    if len(upper) != g + 1:
        raise ValidationError(f"genus {g} needs {g + 1} upper branch points, got {len(upper)}")
    diff = normalize_quasimomentum(SpectralSurface(upper))
    if obj.get("coeffs") is not None:
        stored = np.asarray(obj["coeffs"], dtype=float)
        if stored.shape != diff.coeffs.shape or np.max(np.abs(stored - diff.coeffs)) > 1e-6:
            raise ValidationError("stored coeffs disagree with the normalized differential")
    alphas = diff.alphas
    if obj.get("alphas") is not None:
        given = np.array([complex(re, im) for re, im in obj["alphas"]])
        if given.size != g + 1:
            raise ValidationError(f"need {g + 1} alphas, got {given.size}")
        alphas = _match(given, diff.alphas)
        if np.max(np.abs(alphas - given)) > 1e-6:
            raise ValidationError("stored alphas are not the zeros of dp")
    return diff, alphas


def read_surface(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return surface_from_json(obj)
