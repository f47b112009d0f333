"""Phase functions ``g`` (genus 0) and ``g_hat`` (genus 1), the band curves and sign maps.

``g_hat`` is evaluated with straight auxiliary cuts ``[E, d]`` and
``[conj E, conj d]`` for the radical.  The true band ``gamma_d`` is a curved
level line of ``Im g_hat``; between it and the straight cut the two branches
differ by a sign, which :func:`g_hat` corrects when a traced band is supplied.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import SpectralConstants, big_X, theta_phase
from .quadrature import QuadratureError, gauss_legendre_segment, segment_integral
from .whitham import Genus0Roots, Genus1Params, dg_hat_factored

__all__ = [
    "g_genus0",
    "dg_genus0",
    "dg_hat",
    "radical_hat",
    "abel_condition",
    "g_hat",
    "admissible_path",
    "BandContours",
    "TraceError",
    "trace_band",
    "SignMap",
    "sign_map",
    "write_csv_points",
]


# --------------------------------------------------------------------------
# genus 0
# --------------------------------------------------------------------------

def g_genus0(k, xi: float, c: SpectralConstants):
    """``g = (omega/(2k) + 1/(4 xi^2)) X(k)``."""
    k = np.asarray(k, dtype=complex)
    if np.any(k == 0):
        raise ZeroDivisionError("g has a pole at k = 0")
    return (c.omega / (2 * k) + 1 / (4 * xi * xi)) * big_X(k, c)


def dg_genus0(k, roots: Genus0Roots, c: SpectralConstants):
    """``(k - lam_-)(k - lam)(k - lam_+) / (4 xi^2 k^2 X(k))``."""
    k = np.asarray(k, dtype=complex)
    lm, la, lp = roots.as_tuple()
    xi = roots.xi
    return (k - lm) * (k - la) * (k - lp) / (4 * xi * xi * k * k * big_X(k, c))


# --------------------------------------------------------------------------
# genus 1
# --------------------------------------------------------------------------

def radical_hat(k, gp: Genus1Params, c: SpectralConstants):
    """``sqrt((k-d)(k-conj d)/((k-E)(k-conj E)))`` with straight cuts, ``-> 1`` at infinity."""
    k = np.asarray(k, dtype=complex)
    E, d = c.E, gp.d
    return np.sqrt((k - d) / (k - E)) * np.sqrt((k - np.conj(d)) / (k - np.conj(E)))


def dg_hat(k, gp: Genus1Params, c: SpectralConstants):
    k = np.asarray(k, dtype=complex)
    return dg_hat_factored(gp, c)(k, 0.0)


def abel_condition(gp: Genus1Params, c: SpectralConstants, s0: float | None = None, tol: float = 1e-12):
    """``int_E^{conj E} dg_hat`` along ``E -> s0 -> conj E``; ``s0`` real in ``(0, lambda_+)``."""
    if s0 is None:
        s0 = 0.5 * gp.lambda_plus
    if not 0 < s0 < gp.lambda_plus:
        raise ValueError("s0 must lie in (0, lambda_+)")
    f = dg_hat_factored(gp, c)
    a, _ = segment_integral(f, c.E, s0, tol / 2, singular_start=True)
    b, _ = segment_integral(f, s0, np.conj(c.E), tol / 2, singular_end=True)
    return a + b


def _band_polylines(gp, c, band):
    # the radical is evaluated with the straight cut [E, d]; gamma_lambda only
    # carries a real jump of g_hat, so its traced shape is used when available
    gl = np.asarray(band.gamma_lambda) if band is not None else np.array([gp.d, gp.lambda_minus])
    up = [np.array([c.E, gp.d]), gl]
    return up + [np.conj(p) for p in up]


def _seg_cross(p0, p1, q0, q1):
    # proper or touching intersection of segment p with the segments q (arrays)
    d1 = p1 - p0
    d2 = q1 - q0
    den = (d1.real * d2.imag - d1.imag * d2.real)
    w = q0 - p0
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (w.real * d2.imag - w.imag * d2.real) / den
        u = (w.real * d1.imag - w.imag * d1.real) / den
    hit = (den != 0) & (s > 1e-12) & (s < 1 - 1e-12) & (u > 1e-9) & (u < 1 - 1e-9)
    return bool(np.any(hit))


def _dist_to_segment(z, a, b):
    ab = b - a
    t = np.clip(((z - a) * np.conj(ab)).real / abs(ab) ** 2, 0, 1)
    return abs(z - (a + t * ab))


def admissible_path(k, gp: Genus1Params, c: SpectralConstants, band=None, s0=None):
    """Polyline from ``E`` to ``k`` not crossing the band and staying away from ``k = 0``."""
    k = complex(k)
    if s0 is None:
        s0 = 0.5 * gp.lambda_plus
    lines = _band_polylines(gp, c, band)
    H = 2.0 * max(abs(c.E), abs(gp.d), abs(k.imag), 1.0) + 1.0
    Xl = 2.0 * max(abs(gp.lambda_minus), abs(k.real), 1.0) + 1.0
    sgn = 1.0 if k.imag >= 0 else -1.0
    m = complex(k.real, 0.5 * k.imag)
    candidates = [
        [c.E, s0, k],
        [c.E, s0, m, k],
        [c.E, s0, s0 + 1j * sgn * H, k],
        [c.E, s0, s0 + 1j * sgn * H, -Xl + 1j * sgn * H, k],
        [c.E, s0, s0 + 1j * sgn * H, -Xl + 1j * sgn * H, -Xl + 1j * k.imag, k],
    ]
    rmin = 0.25 * min(abs(gp.lambda_minus), s0)
    # small detours over (or under) the pole at zero, for targets near the real axis
    for h in (2.5 * rmin, 0.5 * abs(gp.d.imag)):
        candidates.append([c.E, s0, s0 + 1j * sgn * h, k.real + 1j * sgn * h, k])
    for cand in candidates:
        ok = True
        for a, b in zip(cand[1:-1], cand[2:]):
            if a == b:
                continue
            if _dist_to_segment(0j, a, b) < min(rmin, 0.5 * abs(k) if b == k else rmin):
                ok = False
                break
            for pl in lines:
                if _seg_cross(a, b, pl[:-1], pl[1:]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return cand
    raise ValueError(f"no admissible path found to k = {k}")


def _point_in_polygon(z, poly):
    # winding-number test against a closed polyline
    v = poly - z
    if np.any(v == 0):
        return False  # on the curve itself
    ang = np.angle(v[1:] / v[:-1])
    return abs(ang.sum()) > np.pi


def g_hat(k, gp: Genus1Params, c: SpectralConstants, tol: float = 1e-11, band=None, s0=None):
    """``g_hat(k) = int_E^k dg_hat`` along an admissible path.

    With a traced ``band`` the sign is corrected in the thin lens between the
    straight cut and the curved ``gamma_d`` (and its conjugate), so the result is
    the branch whose cuts are the true band curves.
    """
    k = complex(k)
    if k == c.E:
        return 0j
    path = admissible_path(k, gp, c, band, s0)
    f = dg_hat_factored(gp, c)
    total = 0j
    n = len(path) - 1
    for i in range(n):
        a, b = path[i], path[i + 1]
        # the end substitution also resolves targets on or next to a branch point
        v, _ = segment_integral(f, a, b, tol / n, singular_start=(i == 0), singular_end=(i == n - 1))
        total += v
    if band is not None and _in_lens(k, gp, c, band):
        total = -total
    return total


def _in_lens(k, gp, c, band):
    gd = np.asarray(band.gamma_d)
    if k.imag < 0:
        gd = np.conj(gd)
        k = k.conjugate()
    poly = np.concatenate([gd, gd[:1]])
    return _point_in_polygon(k, poly)


# --------------------------------------------------------------------------
# band tracing
# --------------------------------------------------------------------------

class TraceError(RuntimeError):
    pass


@dataclass
class BandContours:
    gamma_d: np.ndarray
    gamma_lambda: np.ndarray
    miss_d: float
    miss_lambda: float
    g_hat_d: complex

    @property
    def gamma_d_conj(self):
        return np.conj(self.gamma_d)

    @property
    def gamma_lambda_conj(self):
        return np.conj(self.gamma_lambda)


class _Tracer:
    """Continues ``g_hat`` and its radical along a polyline in short Gauss-Legendre steps."""

    def __init__(self, gp, c):
        self.gp, self.c = gp, c
        self.E, self.d = c.E, gp.d
        self.pref = 1 / (4 * gp.xi * gp.xi)
        # branch points, plus the saddle at lambda_- where the real axis is also a level line
        self.bpts = np.array([c.E, np.conj(c.E), gp.d, np.conj(gp.d), gp.lambda_minus])

    def Q(self, z):
        E, d = self.E, self.d
        return (z - d) * (z - np.conj(d)) / ((z - E) * (z - np.conj(E)))

    def poly(self, z):
        gp = self.gp
        return self.pref * (z - gp.lambda_minus) * (z - gp.lambda_plus) / (z * z)

    def deriv(self, z, R):
        return self.poly(z) * R

    def advance(self, k, g, R, k1):
        """Return ``(g(k1), R(k1))`` continued from ``(k, g, R)``."""
        Qk = self.Q(k)

        def f(z0, off):
            z = z0 + off
            return self.poly(z) * R * np.sqrt(self.Q(z) / Qk)

        g1 = g + gauss_legendre_segment(f, k, k1, 20)
        R1 = R * np.sqrt(self.Q(k1) / Qk)
        return g1, R1

    def safe_step(self, k, hmax):
        dist = np.min(np.abs(self.bpts - k))
        return min(hmax, 0.2 * dist, 0.2 * abs(k))

    def step(self, k, g, R, direction, h, target_im=0.0):
        gp_ = self.deriv(k, R)
        t = np.conj(gp_) / abs(gp_)
        if (t * np.conj(direction)).real < 0:
            t = -t
        kn = k + h * t
        gn, Rn = self.advance(k, g, R, kn)
        for _ in range(6):
            dn = self.deriv(kn, Rn)
            nrm = 1j * t
            den = (dn * nrm).imag
            if den == 0:
                break
            s = -(gn.imag - target_im) / den
            kn2 = kn + s * nrm
            gn, Rn = self.advance(k, g, R, kn2)
            kn = kn2
            if abs(s) < 1e-15 * max(1.0, abs(kn)):
                break
        return kn, gn, Rn, t


def _start_at_E(tr: _Tracer, h0: float):
    gp, c = tr.gp, tr.c
    E = c.E
    # dg_hat ~ a / sqrt(k - E) near E
    a = tr.poly(E) * np.sqrt((E - gp.d) * (E - np.conj(gp.d)) / (E - np.conj(E)))
    th = -2 * np.angle(a)
    k0 = E + h0 * np.exp(1j * th)
    sq = np.sqrt(k0 - E)
    g0 = 2 * a * sq
    R0 = np.sqrt(tr.Q(k0))
    # match the radical sign to the local expansion
    if abs(tr.deriv(k0, R0) - a / sq) > abs(tr.deriv(k0, -R0) - a / sq):
        R0 = -R0
    return k0, g0, R0, np.exp(1j * th)


def _trace(tr: _Tracer, k, g, R, direction, hmax, stop, max_steps, target_im=0.0):
    pts = [k]
    gs = [g]
    for _ in range(max_steps):
        h = tr.safe_step(k, hmax)
        h = stop.limit(k, h)
        if h < 1e-14 * max(1.0, abs(k)):
            raise TraceError(f"step underflow at k = {k}")
        k, g, R, direction = tr.step(k, g, R, direction, h, target_im)
        if not (np.isfinite(k) and np.isfinite(g)):
            raise TraceError("trace lost the level line")
        pts.append(k)
        gs.append(g)
        if stop.done(k):
            return np.array(pts), np.array(gs), R, direction
    raise TraceError("band tracing did not reach its endpoint")


class _StopAt:
    def __init__(self, target, radius):
        self.target, self.radius = target, radius

    def limit(self, k, h):
        return min(h, max(0.5 * abs(k - self.target), 0.5 * self.radius))

    def done(self, k):
        return abs(k - self.target) < self.radius


def trace_band(gp: Genus1Params, c: SpectralConstants, step: float = 1e-3, end_tol: float = 1e-7,
               max_steps: int = 200000) -> BandContours:
    """Trace ``gamma_d`` (``E -> d``) and ``gamma_lambda`` (``d -> lambda_-``) as level lines ``Im g_hat = 0``.

    The predictor moves along ``conj(g_hat')``, the corrector applies Newton steps
    normal to the curve.  Steps shrink near branch points and near the saddle
    ``lambda_-``.  Both traces run towards ``d`` and must end within ``end_tol``
    of it; ``miss_d`` and ``miss_lambda`` record the two gaps.
    """
    tr = _Tracer(gp, c)
    k0, g0, R0, dir0 = _start_at_E(tr, 1e-10)
    pts_d, gs_d, Rd, dir_d = _trace(tr, k0, g0, R0, dir0, step, _StopAt(gp.d, end_tol), max_steps)
    miss_d = abs(pts_d[-1] - gp.d)
    g_d = gs_d[-1]
    gamma_d = np.concatenate([[c.E], pts_d[:-1], [gp.d]])

    # gamma_lambda is traced backwards from the saddle at lambda_-, where it leaves the
    # real axis vertically.  Tracing into the saddle instead is ill-conditioned: a level
    # error delta moves the arrival point by sqrt(delta).
    lm = gp.lambda_minus
    rho = 1e-10 * max(1.0, abs(lm))
    k1 = complex(lm, rho)
    R1 = np.sqrt(tr.Q(k1))
    if (dg_hat(k1, gp, c) * np.conj(tr.deriv(k1, R1))).real < 0:
        R1 = -R1
    curv = 0.5 * tr.pref * (lm - gp.lambda_plus) / (lm * lm) * R1
    g1 = -curv * rho * rho
    pts_l, _, _, _ = _trace(tr, k1, g1, R1, 1j, step, _StopAt(gp.d, end_tol), max_steps)
    miss_l = abs(pts_l[-1] - gp.d)
    pts_l = pts_l[::-1]
    gamma_lambda = np.concatenate([[gp.d], pts_l[1:], [complex(lm)]])
    return BandContours(gamma_d=gamma_d, gamma_lambda=gamma_lambda, miss_d=float(miss_d),
                        miss_lambda=float(miss_l), g_hat_d=complex(g_d))


# --------------------------------------------------------------------------
# sign maps
# --------------------------------------------------------------------------

@dataclass
class SignMap:
    selector: str
    k: np.ndarray      # complex grid, shape (n, n)
    values: np.ndarray  # Im of the phase
    signs: np.ndarray   # -1, 0, +1

    def points(self):
        return self.k.ravel(), self.values.ravel(), self.signs.ravel()


def _phase_im(selector, z, params):
    if selector == "theta":
        return theta_phase(z, params["xi"]).imag
    if selector == "g":
        return g_genus0(z, params["xi"], params["c"]).imag
    if selector == "g_hat":
        return g_hat(z, params["gp"], params["c"], tol=1e-9, band=params.get("band")).imag
    raise ValueError(f"unknown phase selector {selector!r}")


def phase_sign(selector: str, k: complex, params: dict, zero_band: float = 1e-12) -> int:
    v = float(_phase_im(selector, complex(k), params))
    return 0 if abs(v) <= zero_band else int(math.copysign(1, v))


def sign_map(selector: str, params: dict, window, n: int = 41, zero_band: float = 1e-12) -> SignMap:
    """``n x n`` signs of ``Im`` of ``theta``, ``g`` or ``g_hat`` over ``window = (re0, re1, im0, im1)``.

    For a window symmetric about the real axis only the upper rows are
    evaluated and the lower ones are filled by conjugation, which is exact for
    all three phases and keeps the map antisymmetric on the arc cut.
    """
    re0, re1, im0, im1 = window
    xs = np.linspace(re0, re1, n)
    ys = np.linspace(im0, im1, n)
    symmetric = im0 == -im1
    if symmetric:
        ys[: n // 2] = -ys[n - n // 2:][::-1]
    K = xs[None, :] + 1j * ys[:, None]
    vals = np.full(K.shape, np.nan)
    rows = range(n // 2, n) if symmetric else range(n)
    for i in rows:
        for j in range(n):
            z = K[i, j]
            if z == 0:
                continue
            try:
                vals[i, j] = _phase_im(selector, z, params)
            except (ZeroDivisionError, ValueError, QuadratureError):
                vals[i, j] = np.nan
    if symmetric:
        vals[: n // 2] = -vals[n - n // 2:][::-1]
    signs = np.where(np.isnan(vals), 0, np.sign(vals) * (np.abs(vals) > zero_band)).astype(int)
    return SignMap(selector, K, vals, signs)


def write_csv_points(path, k, values):
    """Write ``(k_re, k_im, value)`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k_re", "k_im", "value"])
        for z, v in zip(np.ravel(k), np.ravel(values)):
            w.writerow([f"{z.real:.17g}", f"{z.imag:.17g}", f"{float(np.real(v)):.17g}"])
