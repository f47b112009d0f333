"""Genus-1 model data: periods, Abel map, theta function and the real constants of the elliptic wave.

The curve is ``w^2 = (k-E)(k-conj E)(k-d)(k-conj d)``.  Its cuts are the band
arcs ``gamma_d`` (``E -> d``) and ``conj gamma_d``.  Integrals along a cut are
taken on the straight chord with explicit one-sided boundary values.  This is
legitimate because every integrand used here is analytic in the thin lens
between the chord and the curved arc.

The band is oriented as one arc ``E -> d -> lambda_- -> conj d -> conj E``;
its ``+`` side is on the left.  With this orientation the ``+`` sides of
``gamma_d`` and ``conj gamma_d`` are mirror images, which is what makes
``B_g``, ``Delta`` and ``phi_hat`` real.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, Region, SpectralConstants, classify_region, kappa_chord, scattering_functions
from .gfun import admissible_path
from .quadrature import gauss_kronrod, integral_to_infinity, segment_integral, tanh_sinh_unit
from .whitham import Genus1Params, dg_hat_factored, solve_genus1

__all__ = [
    "EllipticFrame",
    "RealityError",
    "w_radical",
    "w_on_chord",
    "periods_and_tau",
    "U_map",
    "theta3",
    "log_one_minus_rho2",
    "log_delta",
    "delta_cauchy",
    "e0_from_a_period",
    "zeta_inf",
    "g_hat_inf_display",
    "g_hat_0",
    "B_g_value",
    "B_zeta_value",
    "Delta_value",
    "phi_hat_value",
    "kappa_tilde_real",
    "h_on_band",
    "build_frame",
    "NEAR_BORDER",
]

NEAR_BORDER = 1e-4
REALITY_TOL = 1e-6


class RealityError(RuntimeError):
    """A quantity asserted real came out with a sizeable imaginary part."""


def _real(v, name, tol=REALITY_TOL):
    v = complex(v)
    if abs(v.imag) > tol * max(1.0, abs(v.real)):
        raise RealityError(f"{name} has imaginary part {v.imag:.3e}")
    return v.real


# --------------------------------------------------------------------------
# the radical
# --------------------------------------------------------------------------

def _w_factored(gp: Genus1Params, c: SpectralConstants):
    E, Eb, d, db = c.E, np.conj(c.E), gp.d, np.conj(gp.d)

    def w(base, off):
        return ((base - E) + off) * ((base - Eb) + off) * np.sqrt(((base - d) + off) / ((base - E) + off)) \
            * np.sqrt(((base - db) + off) / ((base - Eb) + off))

    return w


def w_radical(k, gp: Genus1Params, c: SpectralConstants):
    """``w(k)`` with ``w ~ k^2`` at infinity and straight cuts ``[E, d]``, ``[conj E, conj d]``."""
    k = np.asarray(k, dtype=complex)
    return _w_factored(gp, c)(k, 0.0)


def _chord_sign(a, b, normal):
    # sign s with sqrt((z-b)/(z-a)) = s * i * sqrt((1-u)/u) on the chord side given by `normal`
    zm = 0.5 * (a + b) + 1e-7 * abs(b - a) * normal
    val = np.sqrt((zm - b) / (zm - a))
    return 1.0 if val.imag > 0 else -1.0


def w_on_chord(u, v, gp: Genus1Params, c: SpectralConstants, lower: bool = False, side: int = +1):
    """One-sided ``w`` on the chord ``E -> d`` (or ``conj E -> conj d`` when ``lower``).

    ``u`` is the chord parameter and ``v = 1 - u`` (passed separately for
    accuracy).  ``side=+1`` is the ``+`` side of the band orientation: the left
    of ``E -> d`` and, for the lower chord, the mirror image of that side.
    Returns ``(z, w)``.
    """
    E, d = c.E, gp.d
    if lower:
        a, b, oa, ob = np.conj(E), np.conj(d), E, d
    else:
        a, b, oa, ob = E, d, np.conj(E), np.conj(d)
    nrm = 1j * (d - E) / abs(d - E)  # left of E -> d
    if lower:
        nrm = np.conj(nrm)
    nrm = nrm * side
    s = _chord_sign(a, b, nrm)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    z = a + (b - a) * u
    zo = z - oa
    w = s * 1j * (b - a) * np.sqrt(u * v) * zo * np.sqrt((z - ob) / zo)
    return z, w


# --------------------------------------------------------------------------
# periods and the Abel map
# --------------------------------------------------------------------------

def _a_period_raw(f, gp: Genus1Params, tol=1e-13):
    d = gp.d
    v, _ = segment_integral(f, np.conj(d), d, tol, singular_start=True, singular_end=True)
    return v


def _inv_w(gp, c):
    wf = _w_factored(gp, c)

    def f(base, off):
        return 1.0 / wf(base, off)

    return f


def _path_integral_from_E(f, k, gp, c, tol=1e-13):
    path = admissible_path(k, gp, c, None, None) if not _real_right(k, gp) else [c.E, 0.5 * gp.lambda_plus, k]
    total = 0j
    n = len(path) - 1
    for i in range(n):
        a, b = path[i], path[i + 1]
        if a == b:
            continue
        v, _ = segment_integral(f, a, b, tol / n, singular_start=(i == 0), singular_end=(b in (gp.d, np.conj(gp.d), np.conj(c.E))))
        total += v
    return total


def _real_right(k, gp):
    # real points right of lambda_- are reached along the real axis from s0
    k = complex(k)
    return k.imag == 0 and k.real > gp.lambda_minus


def _J_plus(gp, c, level=6):
    # int_E^d dz / w_+ along the + face of gamma_d
    u, v, wts = tanh_sinh_unit(level)
    z, w = w_on_chord(u, v, gp, c, False, +1)
    return np.sum(wts * (gp.d - c.E) / w)


def periods_and_tau(gp: Genus1Params, c: SpectralConstants):
    """``(period_a, period_EtoD, tau)``.

    ``period_a = int_{conj d}^{d} dz/w`` on the vertical segment ``Re z = d1``
    and ``period_EtoD = int_E^d dz/w_+`` on the ``+`` face of ``gamma_d``.  If
    ``Im tau < 0`` the a-cycle is reversed, so ``period_a`` carries the
    orientation actually used.
    """
    f = _inv_w(gp, c)
    Pa = _a_period_raw(f, gp)
    Jb = _J_plus(gp, c)
    tau = Jb / Pa
    if tau.imag < 0:
        Pa = -Pa
        tau = -tau
    if not tau.imag > 0:
        raise DomainError("degenerate torus: Im tau = 0")
    return Pa, Jb, tau


def U_map(k, frame: "EllipticFrame"):
    """``U(k) = (2 period_a)^{-1} int_E^k dz/w`` along a path avoiding the band.

    At ``k = d`` the limit from the ``+`` face, ``tau / 2``, is returned.
    """
    k = complex(k)
    if k == frame.gp.d:
        return frame.period_EtoD / (2 * frame.period_a)
    if k == frame.c.E:
        return 0j
    if np.isinf(abs(k)):
        return frame.U_inf
    v = _path_integral_from_E(_inv_w(frame.gp, frame.c), k, frame.gp, frame.c)
    return v / (2 * frame.period_a)


def _U_inf(gp, c, Pa):
    f = _inv_w(gp, c)
    s0 = 0.5 * gp.lambda_plus
    a, _ = segment_integral(f, c.E, s0, 1e-13, singular_start=True)
    b, _ = integral_to_infinity(f, s0, 1.0, 1e-13)
    return (a + b) / (2 * Pa)


# --------------------------------------------------------------------------
# theta function
# --------------------------------------------------------------------------

def theta3(z, tau):
    """``sum_m exp(pi i tau m^2 + 2 pi i m z)``.

    The argument is reduced to ``|Re z| <= 1/2``, ``|Im z| <= Im tau / 2`` by the
    lattice, and the quasi-periodicity factor is applied afterwards.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError("theta3 needs Im tau > 0")
    z = np.asarray(z, dtype=complex)
    n = np.round(z.imag / tau.imag)
    z1 = z - n * tau
    m0 = np.round(z1.real)
    z1 = z1 - m0
    M = int(math.ceil(math.sqrt(40.0 / (math.pi * tau.imag)))) + 2
    # the reduced argument satisfies |Im z1| <= Im tau / 2, so terms decay like exp(-pi Im tau (m^2 - |m|))
    while math.exp(-math.pi * tau.imag * (M * M - M)) > 1e-17:
        M += 1
    m = np.arange(-M, M + 1)
    terms = np.exp(1j * math.pi * tau * m[:, None] ** 2 + 2j * math.pi * m[:, None] * z1.ravel()[None, :])
    s = terms.sum(axis=0).reshape(z.shape)
    # theta(z1 + n tau) = exp(-pi i n^2 tau - 2 pi i n z1) theta(z1)
    return s * np.exp(-1j * math.pi * n * n * tau - 2j * math.pi * n * z1)


# --------------------------------------------------------------------------
# delta and h
# --------------------------------------------------------------------------

def log_one_minus_rho2(s, c: SpectralConstants):
    """``log(1 - rho(s)^2) = -2 log |A(s)|`` on the real axis (branch of ``kappa`` cut on the arc)."""
    s = np.asarray(s, dtype=float)
    _, A, _, _ = scattering_functions(s + 0j, c)
    return -2.0 * np.log(np.abs(A))


def _rho_breaks(gp, c):
    # the arc of Sigma meets the real axis at |E|^2 / E1; log(1 - rho^2) jumps there
    x_arc = c.absE**2 / c.E1
    pts = [gp.lambda_minus]
    if gp.lambda_minus < x_arc < gp.lambda_plus:
        pts.append(x_arc)
    pts.append(gp.lambda_plus)
    return pts


def log_delta(k, gp: Genus1Params, c: SpectralConstants, tol=1e-13):
    """``(1/(2 pi i)) int_{lambda_-}^{lambda_+} log(1 - rho^2(s)) / (s - k) ds`` for each ``k``."""
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    out = np.empty(k.shape, dtype=complex)
    brk = _rho_breaks(gp, c)
    for i, kk in enumerate(k.ravel()):
        if kk.imag == 0 and gp.lambda_minus <= kk.real <= gp.lambda_plus:
            raise DomainError("delta is not defined on [lambda_-, lambda_+]")
        tot = 0j
        for a, b in zip(brk[:-1], brk[1:]):
            v, _ = gauss_kronrod(lambda s: log_one_minus_rho2(s, c) / (s - kk), a, b, tol)
            tot += v
        out.flat[i] = tot / (2j * math.pi)
    return out.reshape(k.shape)


def delta_cauchy(k, gp: Genus1Params, c: SpectralConstants):
    return np.exp(log_delta(k, gp, c))


def h_on_band(z, gp: Genus1Params, c: SpectralConstants, lower: bool = False):
    """``h = -i f`` on ``gamma_d`` and ``i / f`` on its conjugate, ``f = i/(A_- A_+)``.

    With ``A_- A_+ = i A B`` (chord branch) and ``A B = i E2 / (2 X)`` this is
    ``-2 X / E2`` on ``gamma_d`` and ``-E2 / (2 X)`` on the conjugate arc, where
    ``X = (k - E) kappa_chord^2``.
    """
    z = np.asarray(z, dtype=complex)
    X = (z - c.E) * kappa_chord(z, c) ** 2
    return -c.E2 / (2 * X) if lower else -2 * X / c.E2


def _log_h_chord(u, v, gp, c, lower):
    # log h along the chord from its E-end, continuous, with exact distances to E (or conj E)
    E, d = c.E, gp.d
    if lower:
        dzEb = (np.conj(d) - np.conj(E)) * u  # z - conj E
        z = np.conj(E) + dzEb
        dzE = z - E
        X = dzE * np.sqrt(dzEb / dzE)
        lg = np.log(complex(-c.E2 / 2)) - np.log(X)
    else:
        dzE = (d - E) * u
        z = E + dzE
        X = dzE * np.sqrt((z - np.conj(E)) / dzE)
        lg = np.log(complex(-2 / c.E2)) + np.log(X)
    im = np.unwrap(lg.imag)
    if np.max(np.abs(np.diff(im))) > 0.5 * math.pi:
        raise RuntimeError("log h jumps by more than pi/2 between nodes; refine")
    return lg.real + 1j * im


def _L_chord(gp, c, lower, level):
    u, v, _ = tanh_sinh_unit(level)
    z, _ = w_on_chord(u, v, gp, c, lower, +1)
    return _log_h_chord(u, v, gp, c, lower) - 2 * log_delta(z, gp, c)


def _band_integral(weight, gp, c, level=6, zeta=None):
    """``int_{gamma_d u conj gamma_d} weight(z) L(z) dz / w_+`` with ``L = log(h delta^-2)``.

    The lower arc is oriented ``conj d -> conj E``.
    """
    total = 0j
    u, v, wts = tanh_sinh_unit(level)
    for lower in (False, True):
        z, w = w_on_chord(u, v, gp, c, lower, +1)
        a, b = (np.conj(c.E), np.conj(gp.d)) if lower else (c.E, gp.d)
        L = _L_chord(gp, c, lower, level)
        val = np.sum(wts * weight(z) * L * (b - a) / w)
        total += -val if lower else val
    return total


# --------------------------------------------------------------------------
# e0, zeta_inf, B's, Delta, phi_hat
# --------------------------------------------------------------------------

def _poly_over_w(gp, c, e1, e0):
    wf = _w_factored(gp, c)

    def f(base, off):
        z = base + off
        return (z * z - e1 * z + e0) / wf(base, off)

    return f


def e0_from_a_period(gp: Genus1Params, c: SpectralConstants):
    """``e0`` with ``int_{conj d}^{d} (z^2 - e1 z + e0) dz / w = 0``; ``e1 = Re(E + d)``."""
    e1 = (c.E + gp.d).real
    wf = _w_factored(gp, c)
    J = [_a_period_raw(lambda b, o, n=n: (b + o) ** n / wf(b, o), gp) for n in range(3)]
    if abs(J[0]) < 1e-14:
        raise RuntimeError("a-period of dz/w vanishes; e0 undetermined")
    e0 = -(J[2] - e1 * J[1]) / J[0]
    return e1, _real(e0, "e0")


def _mul(*ps):
    out = np.array([1.0])
    for p in ps:
        out = np.convolve(out, p)
    return out


def _cancelled_difference(a, b, n):
    """``a - b`` (descending coefficients of equal length) with its ``n`` leading terms set to zero.

    Those terms cancel analytically, so they are removed rather than left as roundoff.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("coefficient arrays must have equal length")
    return np.poly1d((a - b)[n:])


def _zeta_tail(gp, c, e1, e0):
    """``(z^2 - e1 z + e0)/w - 1 = q / (w (N + w))`` with ``q = N^2 - w^2`` of degree 2."""
    Nc = [1.0, -e1, e0]
    dd = [1.0, -2 * gp.d.real, abs(gp.d) ** 2]
    EE = [1.0, -2 * c.E1, c.absE**2]
    q = _cancelled_difference(_mul(Nc, Nc), _mul(EE, dd), 2)
    N = np.poly1d(Nc)
    wf = _w_factored(gp, c)

    def g(base, off):
        z = base + off
        w = wf(base, off)
        return q(z) / (w * (N(z) + w))

    return g


def zeta_inf(gp, c, e1, e0, direction=1.0):
    """``lim (int_E^k (z^2 - e1 z + e0)/w dz - k)`` along ``E -> lambda_+/2 -> inf``.

    ``direction`` selects the ray ``lambda_+/2 + direction * [0, inf)`` of the tail.
    """
    f = _poly_over_w(gp, c, e1, e0)
    s0 = 0.5 * gp.lambda_plus
    a, _ = segment_integral(f, c.E, s0, 1e-13, singular_start=True)
    b, _ = integral_to_infinity(_zeta_tail(gp, c, e1, e0), s0, direction, 1e-13)
    # the tail integrates (f - 1); the straight part from s0 to infinity contributes -s0 relative to k
    return a + b - s0


def _dg_tail(gp, c):
    """``dg_hat - 1/(4 xi^2)`` without cancellation at large ``k``.

    ``P R - k^2 = [P^2 (k-d)(k-conj d) - k^4 (k-E)(k-conj E)] / [(k-E)(k-conj E)(P R + k^2)]``;
    the numerator has its two leading coefficients cancelled.
    """
    P = [1.0, -(gp.lambda_minus + gp.lambda_plus), gp.lambda_minus * gp.lambda_plus]
    dd = [1.0, -2 * gp.d.real, abs(gp.d) ** 2]
    EEc = [1.0, -2 * c.E1, c.absE**2]
    num = _cancelled_difference(_mul(P, P, dd), _mul([1.0, 0, 0, 0, 0], EEc), 2)
    EE = np.poly1d(EEc)
    s = 1 / (4 * gp.xi**2)
    dgh = dg_hat_factored(gp, c)

    def g(base, off):
        k = base + off
        PR = dgh(base, off) * k * k / s
        return s * num(k) / (k * k * EE(k) * (PR + k * k))

    return g


def g_hat_inf_display(gp, c):
    """``(1/2)(int_E^inf + int_{conj E}^inf)[dg_hat - 1/(4 xi^2)] - l/(8 omega xi^2)``."""
    f = dg_hat_factored(gp, c)
    s = 1 / (4 * gp.xi**2)

    def g(base, off):
        return f(base, off) - s

    s0 = 0.5 * gp.lambda_plus
    tail, _ = integral_to_infinity(_dg_tail(gp, c), s0, 1.0, 1e-13)
    tot = 0j
    for start in (c.E, np.conj(c.E)):
        a, _ = segment_integral(g, start, s0, 1e-13, singular_start=True)
        tot += a + tail
    return 0.5 * tot - c.l / (8 * c.omega * gp.xi**2)


def _regular_at_zero(gp, c):
    """``dg_hat + 1/(4 z^2)`` written without cancellation near ``z = 0``.

    With ``P = (z - lam_-)(z - lam_+)`` and ``T = P^2 (z-d)(z-conj d) - xi^4 (z-E)(z-conj E)``,
    ``dg_hat + 1/(4 z^2) = (T / z^2) / (4 xi^2 (z-E)(z-conj E)(P R - xi^2))``.  The two
    lowest coefficients of ``T`` vanish by the algebraic equations and are dropped.
    """
    xi = gp.xi
    P = np.poly1d([1.0, -(gp.lambda_minus + gp.lambda_plus), gp.lambda_minus * gp.lambda_plus])
    dd = np.poly1d([1.0, -2 * gp.d.real, abs(gp.d) ** 2])
    EE = np.poly1d([1.0, -2 * c.E1, c.absE**2])
    T = P * P * dd - xi**4 * EE
    tc = T.coeffs[::-1]  # ascending
    T2 = np.poly1d(tc[2:][::-1])
    dgh = dg_hat_factored(gp, c)

    def f(base, off):
        z = base + off
        PR = dgh(base, off) * 4 * xi * xi * z * z
        return T2(z) / (4 * xi * xi * EE(z) * (PR - xi * xi))

    return f, tc[:2]


def g_hat_0(gp, c, direction=None):
    """Regularised value ``lim_{k -> 0} (g_hat(k) - theta(k))``, via the real axis from ``lambda_+/2``.

    ``direction`` (a unit complex number) routes the last leg through
    ``(lambda_+/4) * direction`` instead, for the direction-independence check.
    """
    f = dg_hat_factored(gp, c)
    s0 = 0.5 * gp.lambda_plus
    gs0, _ = segment_integral(f, c.E, s0, 1e-13, singular_start=True)
    reg, _ = _regular_at_zero(gp, c)
    if direction is None:
        tail, _ = segment_integral(reg, s0, 0.0, 1e-13)
    else:
        mid = 0.25 * gp.lambda_plus * direction
        t1, _ = segment_integral(reg, s0, mid, 1e-13)
        t2, _ = segment_integral(reg, mid, 0.0, 1e-13)
        tail = t1 + t2
    return gs0 - 1 / (4 * s0) + tail


def B_g_value(gp, c):
    """``(1/2)[int_E^d + int_{conj E}^{conj d}] dg_hat`` on the mirrored ``+`` sides."""
    f = dg_hat_factored(gp, c)
    pref = 1 / (4 * gp.xi**2)
    tot = 0j
    for lower in (False, True):
        u, v, wts = tanh_sinh_unit(6)
        z, w = w_on_chord(u, v, gp, c, lower, +1)
        a, b = (np.conj(c.E), np.conj(gp.d)) if lower else (c.E, gp.d)
        poly = pref * (z - gp.lambda_minus) * (z - gp.lambda_plus) / (z * z)
        # dg_hat = poly * w / ((z - E)(z - conj E))
        dzE = (gp.d - c.E) * u if not lower else z - c.E
        dzEb = z - np.conj(c.E) if not lower else (np.conj(gp.d) - np.conj(c.E)) * u
        val = poly * w / (dzE * dzEb)
        tot += np.sum(wts * val) * (b - a)
    return 0.5 * tot


def B_zeta_value(gp, c, e1, e0):
    """``2 int_E^d (z^2 - e1 z + e0) dz / w`` on the ``+`` side of ``gamma_d``."""
    u, v, wts = tanh_sinh_unit(6)
    z, w = w_on_chord(u, v, gp, c, False, +1)
    return 2 * np.sum(wts * (z * z - e1 * z + e0) * (gp.d - c.E) / w)


def Delta_value(gp, c, level=6):
    """``(1/(2 pi)) int_{gamma_d + conj gamma_d} log[h delta^-2] ds / w_+``."""
    return _band_integral(lambda z: np.ones_like(z), gp, c, level) / (2 * math.pi)


def phi_hat_value(gp, c, e1, zinf, level=6):
    """``(1/(2 pi)) int_{gamma_d + conj gamma_d} (k - e1 - zeta_inf) log[h delta^-2] dk / w_+``."""
    return _band_integral(lambda z: z - e1 - zinf, gp, c, level) / (2 * math.pi)


def kappa_tilde_real(s, gp: Genus1Params, c: SpectralConstants):
    """``((k - conj E)(k - conj d)/((k - E)(k - d)))^(1/4)`` on the real axis right of ``lambda_-``.

    Continued from ``+inf`` (value 1) without crossing the band:
    ``exp(-i (arg(s - E) + arg(s - d)) / 2)``.
    """
    s = np.asarray(s, dtype=float)
    return np.exp(-0.5j * (np.angle(s - c.E) + np.angle(s - gp.d)))


# --------------------------------------------------------------------------
# the frame
# --------------------------------------------------------------------------

@dataclass
class EllipticFrame:
    gp: Genus1Params
    c: SpectralConstants = field(repr=False)
    tau: complex
    period_a: complex
    period_EtoD: complex
    B_g: float
    B_zeta: float
    Delta: float
    zeta_inf: float
    e1: float
    e0: float
    E0: float
    g_hat_inf: float
    g_hat_0: float
    phi_hat: float
    U_inf: complex
    U_0: complex
    U_E0: complex
    kappa_tilde_0: complex
    imag_parts: dict = field(default_factory=dict)

    @property
    def xi(self):
        return self.gp.xi

    def to_dict(self):
        def enc(v):
            if isinstance(v, complex):
                return {"re": v.real, "im": v.imag}
            return v
        out = {"xi": self.gp.xi, "lambda_minus": self.gp.lambda_minus, "lambda_plus": self.gp.lambda_plus,
               "d": enc(complex(self.gp.d))}
        for key in ("tau", "period_a", "period_EtoD", "B_g", "B_zeta", "Delta", "zeta_inf", "e1", "e0", "E0",
                    "g_hat_inf", "g_hat_0", "phi_hat", "U_inf", "U_0", "U_E0", "kappa_tilde_0"):
            v = getattr(self, key)
            out[key] = enc(complex(v)) if isinstance(v, (complex, np.complexfloating)) else float(v)
        out["imag_parts"] = {k: float(v) for k, v in self.imag_parts.items()}
        out["e0_normalisation"] = "vanishing a-period"
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)


def build_frame(xi: float, c: SpectralConstants, gp: Genus1Params | None = None, level: int = 6,
                strict_reality: bool = True) -> EllipticFrame:
    """All genus-1 constants at one interior ``xi`` of the elliptic region."""
    lab = classify_region(xi, c)
    if lab.region is not Region.ELLIPTIC:
        raise DomainError(f"xi = {xi} is not in the elliptic region")
    lo, hi = c.xi_disp, c.xi0
    if (xi - lo) < NEAR_BORDER * lo or (hi - xi) < NEAR_BORDER * hi:
        raise DomainError(f"xi = {xi} is within {NEAR_BORDER} (relative) of a border")
    if gp is None:
        gp = solve_genus1(xi, c)
    Pa, Jb, tau = periods_and_tau(gp, c)
    e1, e0 = e0_from_a_period(gp, c)
    zinf = zeta_inf(gp, c, e1, e0)
    Bg = B_g_value(gp, c)
    Bz = B_zeta_value(gp, c, e1, e0)
    Dl = Delta_value(gp, c, level)
    ph = phi_hat_value(gp, c, e1, zinf.real, level)
    ginf = g_hat_inf_display(gp, c)
    g0 = g_hat_0(gp, c)
    imag = {"B_g": Bg.imag, "B_zeta": Bz.imag, "Delta": Dl.imag, "phi_hat": ph.imag,
            "zeta_inf": zinf.imag, "g_hat_inf": ginf.imag, "g_hat_0": g0.imag}
    tol = REALITY_TOL if strict_reality else np.inf
    vals = {k: _real(v, k, tol) for k, v in
            dict(B_g=Bg, B_zeta=Bz, Delta=Dl, phi_hat=ph, zeta_inf=zinf, g_hat_inf=ginf, g_hat_0=g0).items()}
    E, d = c.E, gp.d
    E0 = (E.real * d.imag + E.imag * d.real) / (E.imag + d.imag)
    f = _inv_w(gp, c)
    U0 = _path_integral_from_E(f, 0.0, gp, c) / (2 * Pa)
    UE0 = _path_integral_from_E(f, E0, gp, c) / (2 * Pa)
    Uinf = _U_inf(gp, c, Pa)
    return EllipticFrame(gp=gp, c=c, tau=complex(tau), period_a=complex(Pa), period_EtoD=complex(Jb),
                         B_g=vals["B_g"], B_zeta=vals["B_zeta"], Delta=vals["Delta"], zeta_inf=vals["zeta_inf"],
                         e1=float(e1), e0=float(e0), E0=float(E0), g_hat_inf=vals["g_hat_inf"],
                         g_hat_0=vals["g_hat_0"], phi_hat=vals["phi_hat"], U_inf=complex(Uinf),
                         U_0=complex(U0), U_E0=complex(UE0),
                         kappa_tilde_0=complex(kappa_tilde_real(0.0, gp, c)), imag_parts=imag)
