"""Genus-0 and genus-1 modulation equations and the closed forms of their solvability proof."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import DomainError, Region, SpectralConstants, classify_region
from .quadrature import segment_integral

__all__ = [
    "Genus0Roots",
    "Genus1Params",
    "NormalizedVars",
    "BorderError",
    "SolveError",
    "solve_genus0",
    "genus0_border_values",
    "cos_phi",
    "lambda_pm_from",
    "genus1_from_r",
    "dg_hat_factored",
    "moduli_residual_F",
    "abel_integral_half",
    "solve_genus1",
    "algebraic_residuals",
    "normalized_vars",
    "polynomial_P",
    "polynomial_P_z_form",
    "polynomial_Px",
    "alpha0_x0",
    "stationarity_data",
    "biquadratic_roots_x2",
    "alpha1_redundancy",
]


class BorderError(ValueError):
    """``xi`` sits on (or within the guard band of) a region border."""


class SolveError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# genus 0 (plane-wave region)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Genus0Roots:
    lambda_minus: float
    lambda_mid: float
    lambda_plus: float
    xi: float

    def as_tuple(self):
        return self.lambda_minus, self.lambda_mid, self.lambda_plus


def genus0_border_values(c: SpectralConstants):
    """``(lambda_- = lambda, lambda_+)`` at ``xi = xi0`` where the two lower roots merge."""
    l, om = c.l, c.omega
    S = math.sqrt((1 - l * l) * (9 - l * l))
    lm = (3 + l * l + S) / (8 * l * om)
    lp = (3 - l * l + S) / (-4 * l * om)
    return lm, lp


def solve_genus0(xi: float, c: SpectralConstants, strict: bool = True) -> Genus0Roots:
    """Real roots of ``k^3 - l/(2w) k^2 + l xi^2 k - xi^2/(2w)``, sorted.

    Only defined for ``xi > xi0``; at ``xi0`` the two lower roots collide.
    """
    lab = classify_region(xi, c)
    if strict and lab.region is not Region.PLANE:
        if lab.region is Region.BORDER:
            raise BorderError(f"xi = {xi} is on the border {lab.which}")
        raise DomainError(f"genus-0 roots are real only for xi > xi0 = {c.xi0}")
    l, om = c.l, c.omega
    coeffs = [1.0, -l / (2 * om), l * xi * xi, -xi * xi / (2 * om)]
    roots = np.roots(coeffs)
    if np.max(np.abs(roots.imag)) > 1e-7 * max(1.0, np.max(np.abs(roots))):
        raise DomainError(f"complex roots at xi = {xi}")
    r = np.sort(roots.real)
    # polish each root by Newton on the cubic
    for i in range(3):
        for _ in range(3):
            f = np.polyval(coeffs, r[i])
            fp = np.polyval(np.polyder(coeffs), r[i])
            if fp != 0:
                r[i] -= f / fp
    return Genus0Roots(float(r[0]), float(r[1]), float(r[2]), float(xi))


# --------------------------------------------------------------------------
# genus 1 (modulated elliptic region)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Genus1Params:
    lambda_minus: float
    lambda_plus: float
    d: complex
    xi: float

    @property
    def r(self) -> float:
        return abs(self.d)

    @property
    def cos_phi(self) -> float:
        return self.d.real / abs(self.d)

    @property
    def d1(self) -> float:
        return self.d.real

    @property
    def d2(self) -> float:
        return self.d.imag


@dataclass(frozen=True)
class NormalizedVars:
    x: float
    alpha: float
    beta: float


def normalized_vars(r: float, xi: float, c: SpectralConstants) -> NormalizedVars:
    """``x = r/|E|``, ``alpha = xi^2/|E|^2``, ``beta = E1^2/|E|^2 = l^2``."""
    return NormalizedVars(r / c.absE, (xi / c.absE) ** 2, c.l * c.l)


def cos_phi(x, alpha, beta, check: bool = True):
    """``-sqrt(beta) (x^2 + x alpha) / (x^3 + alpha)``, the cosine of ``arg d``."""
    val = -np.sqrt(beta) * (x * x + x * alpha) / (x**3 + alpha)
    if check and np.any(np.abs(val) > 1 + 1e-12):
        raise DomainError("|cos phi| > 1: alpha outside the admissible range")
    return val


def lambda_pm_from(r: float, cphi: float, xi: float, c: SpectralConstants):
    """Roots of ``lam^2 - (E1 - r cos phi) lam - xi^2/(2 r w) = 0``, ``lam_- < 0 < lam_+``."""
    s = c.E1 - r * cphi
    prod = -xi * xi / (2 * r * c.omega)
    disc = s * s - 4 * prod
    assert disc > 0
    sq = math.sqrt(disc)
    # stable pairing: compute the larger-magnitude root first
    big = 0.5 * (s + math.copysign(sq, s)) if s != 0 else 0.5 * sq
    small = prod / big
    lm, lp = sorted((big, small))
    return lm, lp


def genus1_from_r(r: float, xi: float, c: SpectralConstants) -> Genus1Params:
    """Parameters ``(lambda_-, lambda_+, d)`` fixed by the algebraic equations for a trial ``|d| = r``."""
    nv = normalized_vars(r, xi, c)
    cp = float(cos_phi(nv.x, nv.alpha, nv.beta))
    sp = math.sqrt(max(0.0, (1 - cp) * (1 + cp)))
    lm, lp = lambda_pm_from(r, cp, xi, c)
    return Genus1Params(lm, lp, complex(r * cp, r * sp), float(xi))


def dg_hat_factored(gp: Genus1Params, c: SpectralConstants):
    """``dg_hat/dk`` in the ``(base, off)`` protocol of :mod:`srs_whitham.quadrature`.

    The radical ``sqrt((k-d)(k-conj d)/((k-E)(k-conj E)))`` is the product of two
    principal square roots of Moebius ratios: it tends to 1 at infinity and its
    cuts are the straight segments ``[E, d]`` and ``[conj E, conj d]``.
    """
    E, Eb = c.E, np.conj(c.E)
    d, db = gp.d, np.conj(gp.d)
    lm, lp = gp.lambda_minus, gp.lambda_plus
    s = 1.0 / (4.0 * gp.xi * gp.xi)

    def f(base, off):
        k = base + off
        rad = np.sqrt(((base - d) + off) / ((base - E) + off)) * np.sqrt(((base - db) + off) / ((base - Eb) + off))
        return s * ((base - lm) + off) * ((base - lp) + off) / (k * k) * rad

    return f


def abel_integral_half(gp: Genus1Params, c: SpectralConstants, s0: float | None = None, tol: float = 1e-13):
    """``int_E^{s0} dg_hat`` along the straight segment; ``s0`` real, defaults to ``lambda_+/2``.

    The full Abel integral ``E -> s0 -> conj E`` equals ``2i Im`` of this value.
    """
    if s0 is None:
        s0 = 0.5 * gp.lambda_plus
    v, _ = segment_integral(dg_hat_factored(gp, c), c.E, s0, tol, singular_start=True)
    return v


def moduli_residual_F(r: float, xi: float, c: SpectralConstants, s0_frac: float = 0.5) -> float:
    """Imaginary part of ``int_E^{s0} dg_hat`` for the parameters generated by ``r``.

    By conjugation symmetry ``int_E^{conj E} dg_hat = 2i F``; ``F = 0`` is the
    single real equation left after the algebraic ones are solved.
    """
    gp = genus1_from_r(r, xi, c)
    return abel_integral_half(gp, c, s0_frac * gp.lambda_plus).imag


def solve_genus1(xi: float, c: SpectralConstants, n_scan: int = 64, rtol: float = 1e-12) -> Genus1Params:
    """Solve the genus-1 system at a strictly interior ``xi`` of the elliptic region.

    Scans ``r`` over ``[|E|(1 + 1e-9), x0 |E| (1 + 1e-3)]`` for a sign change of
    :func:`moduli_residual_F`, then refines with Brent's method.
    """
    lab = classify_region(xi, c)
    if lab.region is Region.BORDER:
        raise BorderError(f"xi = {xi} is on the border {lab.which}")
    if lab.region is not Region.ELLIPTIC:
        raise DomainError(f"xi = {xi} is outside the elliptic region ({c.xi_disp}, {c.xi0})")
    _, x0 = alpha0_x0(c.l * c.l)
    lo, hi = c.absE * (1 + 1e-9), x0 * c.absE * (1 + 1e-3)
    rs = np.linspace(lo, hi, n_scan)
    Fs = np.array([moduli_residual_F(r, xi, c) for r in rs])
    idx = np.nonzero(np.sign(Fs[:-1]) != np.sign(Fs[1:]))[0]
    if idx.size == 0:
        raise SolveError(f"no sign change of F on the r-bracket at xi = {xi}")
    if idx.size > 1:
        raise SolveError(f"{idx.size} sign changes of F at xi = {xi}; uniqueness violated")
    i = idx[0]
    r, info = brentq(moduli_residual_F, rs[i], rs[i + 1], args=(xi, c), xtol=rtol * c.absE,
                     rtol=4 * np.finfo(float).eps, full_output=True)
    if not info.converged:
        raise SolveError(f"Brent iteration failed at xi = {xi}")
    return genus1_from_r(r, xi, c)


def algebraic_residuals(gp: Genus1Params, c: SpectralConstants):
    """Residuals of the three algebraic equations, each evaluated independently.

    ``lam_- + lam_+ = E1 - d1``;  ``lam_- lam_+ = -xi^2 |E| / |d|``;
    ``2 lam_- lam_+ d1 + (lam_- + lam_+)|d|^2 = -xi^2 (E1 |d| / |E| + d1 |E| / |d|)``.
    """
    lm, lp, d, xi = gp.lambda_minus, gp.lambda_plus, gp.d, gp.xi
    r = abs(d)
    E1, aE = c.E1, c.absE
    e1 = lm + lp - (E1 - d.real)
    e2 = lm * lp + xi * xi * aE / r
    e3 = 2 * lm * lp * d.real + (lm + lp) * r * r + xi * xi * (E1 * r / aE + d.real * aE / r)
    return np.array([e1, e2, e3])


# --------------------------------------------------------------------------
# positivity of the degree-12 polynomial
# --------------------------------------------------------------------------

def polynomial_P(x, alpha, beta):
    """Degree-12 polynomial whose positivity gives ``F_r != 0`` (Horner in ``alpha``)."""
    x2 = x * x
    x3 = x2 * x
    c3 = x3 * (4 + 2 * beta - 6 * beta * x2)
    c2 = x2 * x2 * (3 * beta + (6 - 14 * beta) * x2 + 3 * beta * x2 * x2)
    c1 = x3 * x2 * x2 * (-6 * beta + (4 + 2 * beta) * x2)
    c0 = x3 * x3 * x3 * x3
    return (((alpha + c3) * alpha + c2) * alpha + c1) * alpha + c0


def polynomial_P_z_form(x, z, beta):
    """``P(x, z x^3) / x^12`` written as the quartic in ``z``."""
    x2 = x * x
    return (z**4 + (4 + 2 * beta - 6 * beta * x2) * z**3
            + (3 * beta / x2 + 6 - 14 * beta + 3 * beta * x2) * z**2
            + (-6 * beta / x2 + 4 + 2 * beta) * z + 1)


def polynomial_Px(x, alpha, beta):
    """``dP/dx``."""
    return (alpha**3 * (12 * x**2 + 6 * beta * x**2 - 30 * beta * x**4)
            + alpha**2 * (12 * beta * x**3 + 36 * x**5 - 84 * beta * x**5 + 24 * beta * x**7)
            + alpha * (-42 * beta * x**6 + 36 * x**8 + 18 * beta * x**8)
            + 12 * x**11)


def _check_beta(beta):
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie in (0, 1), got {beta}")


def alpha0_x0(beta: float):
    """Minimum point ``(alpha0, x0)`` of ``alpha`` over ``{x > 1, alpha > 1, P <= 0}``."""
    _check_beta(beta)
    S = math.sqrt((1 - beta) * (9 - beta))
    sb = math.sqrt(beta)
    alpha0 = (27 - 18 * beta - beta * beta + (9 - beta) * S) / (8 * beta * sb)
    x0 = (3 + beta + S) / (4 * sb)
    return alpha0, x0


def stationarity_data(beta: float) -> dict:
    """Candidate stationary values of ``z = alpha / x^3`` on the boundary of the set ``P <= 0``."""
    _check_beta(beta)
    w1 = (5 - beta) / 2
    w2 = 2 * (13 - 2 * beta) / 5
    s1 = math.sqrt((1 - beta) * (9 - beta))
    s2 = 2 * math.sqrt((9 - beta) * (4 - beta))
    z1p, z1m = (5 - beta + s1) / 4, (5 - beta - s1) / 4
    z2p, z2m = (13 - 2 * beta + s2) / 5, (13 - 2 * beta - s2) / 5

    def p_lemma(w):
        return (w + 2) ** 2 + 2 * beta * (w + 2) - 18 * beta

    out = dict(w1=w1, w2=w2, z1_plus=z1p, z1_minus=z1m, z2_plus=z2p, z2_minus=z2m,
               p_at_w1=p_lemma(w1), p_closed_form=-0.75 * (beta * beta + 18 * beta - 27),
               sign_w1=3 * w1 - 2 * (6 - beta), sign_w2=3 * w2 - 2 * (6 - beta))
    out["p_lemma"] = p_lemma
    assert z2m < 0.5, "z_{2,-} must lie below 1/2"
    assert z1p > 1.0
    return out


def biquadratic_roots_x2(z, beta: float, check: bool = True):
    """Roots ``(x_+^2, x_-^2)`` of ``3b(1-2z)X^2 + (w^2 + (4+2b)w + 4 - 14b) X + 3b(1 - 2/z)`` in ``X = x^2``."""
    _check_beta(beta)
    z = float(z)
    if z <= 0:
        raise DomainError("z must be positive")
    if abs(z - 0.5) < 1e-14:
        raise ZeroDivisionError("z = 1/2 is a singular value of the biquadratic")
    w = z + 1 / z
    p = (w + 2) ** 2 + 2 * beta * (w + 2) - 18 * beta
    disc = p * p + 36 * beta * beta * (2 * w - 5)
    sq = math.sqrt(disc)
    den = 6 * beta * (2 * z - 1)
    xp2, xm2 = (p + sq) / den, (p - sq) / den
    if check:
        if z < 0.5:
            assert xp2 < 0 < xm2 < 1
        else:
            assert xp2 > 1 and xm2 < 1
            if z >= 2:
                assert xm2 <= 1e-14 * max(1.0, abs(xp2))
    return xp2, xm2


def alpha1_redundancy(u, beta):
    """``(u+2)^2((u-1)^4 + beta(2u - 5))``: ``P(x, 1)/x^6`` in ``u = x + 1/x``."""
    return (u + 2) ** 2 * ((u - 1) ** 4 + beta * (2 * u - 5))
