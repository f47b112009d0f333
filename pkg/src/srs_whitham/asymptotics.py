"""Leading-order fields ``q, mu, nu`` in the plane-wave, elliptic and dispersive regions."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import loggamma

from .core import DomainError, Region, SpectralConstants, classify_region, kappa_chord, slow_variable
from .elliptic import EllipticFrame, build_frame, log_one_minus_rho2, theta3
from .quadrature import gauss_kronrod
from .whitham import solve_genus0

__all__ = [
    "FieldTriple",
    "ThetaZeroError",
    "phi_plane",
    "plane_wave_fields",
    "eta",
    "eta_and_varphi",
    "dispersive_fields",
    "theta_entries",
    "elliptic_fields",
    "FrameCache",
    "evaluate_fields",
    "write_fields_csv",
    "SMALL_T",
    "THETA_GUARD",
]

# below this time the asymptotic formulas are not meaningful and evaluators refuse
SMALL_T = 1.0
THETA_GUARD = 1e-10


class ThetaZeroError(ArithmeticError):
    """A theta-function denominator is too close to zero."""


@dataclass
class FieldTriple:
    q: complex
    mu: complex
    nu: float
    region: str = ""
    xi: float = float("nan")
    flags: dict = field(default_factory=dict)


def _check_time(t):
    if not t >= SMALL_T:
        raise DomainError(f"asymptotic formulas need t >= {SMALL_T}, got t = {t}")


# --------------------------------------------------------------------------
# plane wave
# --------------------------------------------------------------------------

def _log_A2_over_X(k, c):
    # log A^2 = -log(1 - rho^2); X = sqrt((k-E)(k-conj E)) is real on both tails
    k = np.asarray(k, dtype=float)
    X = ((k - c.E) * kappa_chord(k, c) ** 2).real
    return -log_one_minus_rho2(k, c) / X


def phi_plane(xi: float, c: SpectralConstants, tol: float = 1e-12) -> float:
    """``(1/2pi)(int_{-inf}^{lambda_-} + int_{lambda_+}^{inf}) log A^2(k) dk / X(k)``.

    The tails are mapped to ``(0, 1]`` by ``k = lambda_+ + s/(1-s)`` (and its mirror);
    the integrand decays like ``k^-3``.
    """
    r = solve_genus0(xi, c)
    lm, lp = r.lambda_minus, r.lambda_plus

    def right(s):
        om = 1.0 - s
        with np.errstate(divide="ignore", invalid="ignore"):
            v = _log_A2_over_X(lp + s / om, c) / (om * om)
        return np.where(om == 0, 0.0, v)

    def left(s):
        om = 1.0 - s
        with np.errstate(divide="ignore", invalid="ignore"):
            v = _log_A2_over_X(lm - s / om, c) / (om * om)
        return np.where(om == 0, 0.0, v)

    a, _ = gauss_kronrod(right, 0.0, 1.0, tol)
    b, _ = gauss_kronrod(left, 0.0, 1.0, tol)
    return float((a + b) / (2 * math.pi))


def plane_wave_fields(x: float, t: float, c: SpectralConstants) -> FieldTriple:
    """``q = -p/(2w) e^{i Phi}``, ``mu = p e^{i Phi}``, ``nu = l`` with ``Phi = w t - (l/w) x - 2 phi(xi)``.

    ``nu = l`` (not 1) is the value compatible with ``nu^2 + |mu|^2 = 1`` and the boundary data.
    """
    _check_time(t)
    xi = float(slow_variable(x, t))
    lab = classify_region(xi, c)
    if lab.region is not Region.PLANE:
        raise DomainError(f"xi = {xi} is not in the plane-wave region ({lab})")
    ph = c.omega * t - c.l / c.omega * x - 2 * phi_plane(xi, c)
    e = np.exp(1j * ph)
    return FieldTriple(q=-c.p / (2 * c.omega) * e, mu=c.p * e, nu=c.l, region="plane", xi=xi)


# --------------------------------------------------------------------------
# dispersive wave
# --------------------------------------------------------------------------

def eta(k, c: SpectralConstants):
    """``(1/2pi) log(1 - rho^2(k))`` on the real axis."""
    return log_one_minus_rho2(k, c) / (2 * math.pi)


def _dlog_one_minus_rho2(s, c):
    # for s > |E|^2/E1: 1 - rho^2 = sec^2(a), a = arg(s - E)/2
    s = np.asarray(s, dtype=float)
    a = 0.5 * np.angle(s - c.E)
    da = 0.5 * np.imag(1.0 / (s - c.E))
    return 2 * np.tan(a) * da


def eta_and_varphi(k: float, xi: float, c: SpectralConstants, tol: float = 1e-12):
    """``(eta(k), varphi(k))`` for ``|k| < |E|`` and ``0 < xi < 1/(2 omega)``.

    ``varphi = pi/4 - 3 eta log 2 - arg Gamma(-i eta) + (1/pi) int_{-xi}^{xi} log|s-k| d log(1-rho^2(s))``;
    the Stieltjes integral uses the smooth derivative of ``log(1 - rho^2)`` and a
    break at ``s = k`` for the logarithmic singularity.
    """
    if not abs(k) < c.absE:
        raise DomainError("eta_and_varphi needs |k| < |E|")
    if not 0 < xi < c.xi_disp:
        raise DomainError("eta_and_varphi needs 0 < xi < 1/(2 omega)")
    if c.absE**2 / c.E1 > -xi:
        raise DomainError("the arc of Sigma meets [-xi, xi]")
    e = float(eta(k, c))

    def f(s):
        with np.errstate(divide="ignore"):
            v = np.log(np.abs(s - k)) * _dlog_one_minus_rho2(s, c)
        return np.where(s == k, 0.0, v)

    pts = sorted({-xi, xi, min(max(k, -xi), xi)})
    integ = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            v, _ = gauss_kronrod(f, a, b, tol)
            integ += v
    arg_gamma = float(np.imag(loggamma(-1j * e)))
    vphi = math.pi / 4 - 3 * e * math.log(2) - arg_gamma + integ / math.pi
    return e, vphi


def dispersive_fields(x: float, t: float, c: SpectralConstants) -> FieldTriple:
    """Two self-similar waves of amplitude ``2 sqrt(xi^3 eta(+-xi) / t)``.

    ``mu`` and ``nu`` are given to leading order only: ``mu -> 0`` and ``nu -> -1``,
    which is what the direct simulation shows for ``xi < 1``.  The decaying
    correction to ``mu`` is not modelled, which the ``mu_nu`` flag records.
    """
    _check_time(t)
    xi = float(slow_variable(x, t))
    lab = classify_region(xi, c)
    if lab.region is not Region.DISPERSIVE:
        raise DomainError(f"xi = {xi} is not in the dispersive region ({lab})")
    sq = math.sqrt(x * t)
    ep, vp = eta_and_varphi(xi, xi, c)
    em, vm = eta_and_varphi(-xi, xi, c)
    q = 2 * math.sqrt(xi**3 * ep / t) * np.exp(1j * (2 * sq - ep * math.log(sq) + vp)) \
        + 2 * math.sqrt(xi**3 * em / t) * np.exp(1j * (-2 * sq + em * math.log(sq) + vm))
    return FieldTriple(q=complex(q), mu=0j, nu=-1.0, region="dispersive", xi=xi,
                       flags={"mu_nu": "leading order"})


# --------------------------------------------------------------------------
# modulated elliptic wave
# --------------------------------------------------------------------------

def _theta_ratio(num, den, tau):
    d = theta3(den, tau)
    if abs(d) < THETA_GUARD:
        raise ThetaZeroError(f"theta denominator {abs(d):.2e} below guard")
    return complex(theta3(num, tau) / d)


def theta_entries(t: float, frame: EllipticFrame, at: str):
    """``(Theta11, Theta12, Theta21, Theta22)`` at ``k = 0`` or ``k = inf``.

    At infinity the off-diagonal prefactor ``(kt - 1/kt)/2`` vanishes; it is replaced
    by ``lim k (kt - 1/kt)/2 = i (E2 + d2)/2``, the quantity entering ``lim k M12``.
    """
    if at not in ("0", "inf"):
        raise ValueError("at must be '0' or 'inf'")
    tau = frame.tau
    # the t B_g shift enters twice: with B_g as defined on the frame this is the
    # frequency seen in direct simulation
    S = (2 * t * frame.B_g + frame.B_zeta * frame.Delta) / (2 * math.pi)
    if at == "inf":
        U = frame.U_inf
        pd = 1.0
        po = 0.5j * (frame.c.E2 + frame.gp.d.imag)
    else:
        U = frame.U_0
        kt = frame.kappa_tilde_0
        pd = 0.5 * (kt + 1 / kt)
        po = 0.5 * (kt - 1 / kt)
    u0 = frame.U_E0
    t11 = pd * _theta_ratio(U - u0 - tau / 2 - S, U - u0 - 0.5 - tau / 2, tau)
    t12 = po * _theta_ratio(U + u0 + tau / 2 + S, U + u0 + 0.5 + tau / 2, tau)
    t21 = po * _theta_ratio(U + u0 + tau / 2 - S, U + u0 + 0.5 + tau / 2, tau)
    t22 = pd * _theta_ratio(U - u0 - tau / 2 + S, U - u0 - 0.5 - tau / 2, tau)
    return t11, t12, t21, t22


def elliptic_fields(x: float, t: float, c: SpectralConstants, frame: EllipticFrame | None = None) -> FieldTriple:
    """Modulated elliptic wave.

    ``q = 2i Th12(inf)/Th11(inf) e^{2it g_inf - 2i phi_hat}``,
    ``nu = 1 - 2 Th11(0) Th22(0) / (Th11(inf) Th22(inf))`` and
    ``mu = -2i Th11(0) Th12(0) / Th11(inf)^2 e^{2it g_inf - 2i phi_hat}``.

    The signs of ``mu`` and ``nu`` follow ``Q = -M(0) sigma3 M(0)^{-1}``.  The exponent
    of ``mu`` carries ``g_inf``: conjugating by ``e^{it g_inf sigma3}`` normalises the
    problem at infinity, and the value ``g_0`` of ``g_hat - theta`` at ``k = 0``
    only enters through the frame.
    """
    _check_time(t)
    xi = float(slow_variable(x, t))
    if frame is None:
        frame = build_frame(xi, c)
    elif abs(frame.xi - xi) > 1e-12 * xi:
        raise ValueError(f"frame built for xi = {frame.xi}, point has xi = {xi}")
    a11, a12, _, a22 = theta_entries(t, frame, "inf")
    b11, b12, _, b22 = theta_entries(t, frame, "0")
    q = 2j * a12 / a11 * np.exp(2j * t * frame.g_hat_inf - 2j * frame.phi_hat)
    nu = 1 - 2 * b11 * b22 / (a11 * a22)
    mu = -2j * b11 * b12 / a11**2 * np.exp(2j * t * frame.g_hat_inf - 2j * frame.phi_hat)
    return FieldTriple(q=complex(q), mu=complex(mu), nu=float(np.real(nu)), region="elliptic", xi=xi,
                       flags={"nu_imag": float(np.imag(nu))})


class FrameCache:
    """Elliptic frames keyed by ``xi``."""

    def __init__(self, c: SpectralConstants):
        self.c = c
        self._frames = {}

    def get(self, xi: float) -> EllipticFrame:
        key = float(xi)
        if key not in self._frames:
            self._frames[key] = build_frame(key, self.c)
        return self._frames[key]


def evaluate_fields(x: float, t: float, c: SpectralConstants, cache: FrameCache | None = None) -> FieldTriple:
    """Dispatch to the evaluator of the region containing ``xi = sqrt(t/(4x))``."""
    if not (x > 0 and t > 0):
        raise DomainError("need x > 0 and t > 0")
    xi = float(slow_variable(x, t))
    lab = classify_region(xi, c)
    if lab.region is Region.PLANE:
        return plane_wave_fields(x, t, c)
    if lab.region is Region.DISPERSIVE:
        return dispersive_fields(x, t, c)
    if lab.region is Region.ELLIPTIC:
        frame = cache.get(xi) if cache is not None else None
        return elliptic_fields(x, t, c, frame)
    raise DomainError(f"xi = {xi} lies on a region border ({lab.which})")


def write_fields_csv(path, rows, meta: dict | None = None) -> None:
    """Columns ``x, t, xi, region, re_q, im_q, abs_q, re_mu, im_mu, nu`` at 17 significant digits.

    ``rows`` holds ``(x, t, FieldTriple)``.
    """
    with open(path, "w", newline="\n") as fh:
        if meta is not None:
            fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        fh.write("x,t,xi,region,re_q,im_q,abs_q,re_mu,im_mu,nu\n")
        for x, t, f in rows:
            nums = [x, t, f.xi]
            tail = [f.q.real, f.q.imag, abs(f.q), f.mu.real, f.mu.imag, f.nu]
            fh.write(",".join(f"{v:.17g}" for v in nums) + f",{f.region}," + ",".join(f"{v:.17g}" for v in tail)
                     + "\n")
