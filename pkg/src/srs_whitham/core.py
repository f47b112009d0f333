"""Physical constants, spectral functions and phases of the SRS boundary problem.

The boundary data ``mu(0, t) = p exp(i omega t)``, ``nu(0, t) = l`` fix the
branch points ``E = (l + i p) / (2 omega)`` and its conjugate.  Everything in
this module is a closed form in ``l`` and ``omega``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainError",
    "PhysicalParams",
    "SpectralConstants",
    "Region",
    "RegionLabel",
    "ContourSigma",
    "derive_spectral_constants",
    "scattering_functions",
    "kappa",
    "kappa_chord",
    "kappa_real",
    "jump_f",
    "arc_boundary_values",
    "theta_phase",
    "theta_hat",
    "slow_variable",
    "big_X",
    "big_Omega",
    "classify_region",
    "sigma_contour",
    "BORDER_GUARD",
]

BORDER_GUARD = 1e-9


class DomainError(ValueError):
    """Input outside the parameter domain of the problem."""


@dataclass(frozen=True)
class PhysicalParams:
    """Boundary constants ``l`` and ``omega``; ``p`` is always derived."""

    l: float
    omega: float
    p: float = field(init=False)

    def __post_init__(self):
        if not (-1.0 < self.l < 0.0):
            raise DomainError(f"l must lie in (-1, 0), got {self.l}")
        if not self.omega > 0.0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        object.__setattr__(self, "p", math.sqrt((1.0 - self.l) * (1.0 + self.l)))

    @property
    def beta(self) -> float:
        return self.l * self.l


@dataclass(frozen=True)
class SpectralConstants:
    params: PhysicalParams
    E: complex
    absE: float
    omega0: float
    xi0: float
    psi: float

    @property
    def l(self) -> float:
        return self.params.l

    @property
    def p(self) -> float:
        return self.params.p

    @property
    def omega(self) -> float:
        return self.params.omega

    @property
    def E1(self) -> float:
        return self.E.real

    @property
    def E2(self) -> float:
        return self.E.imag

    @property
    def xi_disp(self) -> float:
        """Border between the dispersive and the elliptic regions, ``1/(2 omega)``."""
        return 0.5 / self.params.omega

    @property
    def circle_center(self) -> float:
        return self.absE**2 / (2.0 * self.E1)

    @property
    def circle_radius(self) -> float:
        return self.absE**2 / (2.0 * abs(self.E1))


def _radical_term(beta: float) -> float:
    return math.sqrt((1.0 - beta) * (9.0 - beta))


def derive_spectral_constants(params: PhysicalParams | None = None, *, l=None, omega=None) -> SpectralConstants:
    """Branch point ``E`` and the two region borders for the given boundary data.

    ``omega0`` solves ``omega0^2 = -8 l^3 omega^2 / (27 - 18 l^2 - l^4 + (9 - l^2) S)``
    with ``S = sqrt((1 - l^2)(9 - l^2))``; ``xi0 = 1 / (2 omega0)``.
    """
    if params is None:
        params = PhysicalParams(l, omega)
    l, om, p = params.l, params.omega, params.p
    E = complex(l, p) / (2.0 * om)
    b = l * l
    denom = 27.0 - 18.0 * b - b * b + (9.0 - b) * _radical_term(b)
    omega0 = math.sqrt(-8.0 * l**3 * om**2 / denom)
    return SpectralConstants(
        params=params,
        E=E,
        absE=0.5 / om,
        omega0=omega0,
        xi0=0.5 / omega0,
        psi=math.atan2(p, l),
    )


# --------------------------------------------------------------------------
# kappa and the scattering functions
# --------------------------------------------------------------------------

def kappa_chord(k, c: SpectralConstants):
    """Principal fourth root of ``(k - conj E) / (k - E)``.

    Its cut is the vertical chord joining ``E`` and ``conj E``.
    """
    k = np.asarray(k, dtype=complex)
    E = c.E
    return ((k - np.conj(E)) / (k - E)) ** 0.25


def _in_arc_lens(k, c: SpectralConstants):
    # region between the chord Re k = E1 and the arc of Sigma
    z = np.asarray(k, dtype=complex)
    inside = np.abs(z - c.circle_center) < c.circle_radius
    return inside & (z.real < c.E1)


def kappa(k, c: SpectralConstants):
    """``kappa(k) = ((k - conj E)/(k - E))^(1/4)``, ``kappa -> 1`` at infinity, cut on the arc.

    The arc is the part of the circle ``|k - c0| = |c0|`` (``c0 = |E|^2/(2 E1)``)
    with ``|k| >= |E|``.
    """
    kc = kappa_chord(k, c)
    return np.where(_in_arc_lens(k, c), 1j * kc, kc)


def kappa_real(s, c: SpectralConstants):
    """Branch of kappa on the real axis continued from ``+inf`` without crossing it.

    Equals ``exp(-i arg(s - E) / 2)``; unimodular and continuous on the whole
    real line.  It agrees with :func:`kappa` for ``s > |E|^2 / E1``.
    """
    s = np.asarray(s, dtype=float)
    return np.exp(-0.5j * np.angle(s - c.E))


def _abr(kap):
    A = 0.5 * (kap + 1.0 / kap)
    B = 0.5 * (kap - 1.0 / kap)
    return A, B


def scattering_functions(k, c: SpectralConstants):
    """Return ``(kappa, A, B, rho)`` at points off the arc cut."""
    kap = kappa(k, c)
    A, B = _abr(kap)
    return kap, A, B, B / A


def arc_boundary_values(k, c: SpectralConstants):
    """One-sided values ``(A_minus, A_plus)`` on the arc.

    ``+`` is the side inside the circle (left of the orientation ``E -> conj E``).
    Computed from the chord branch, which is analytic across the arc.
    """
    kc = kappa_chord(k, c)
    A_out, B_out = _abr(kc)
    # inside the lens kappa = i * kappa_chord, so A_+ = i B_chord
    return A_out, 1j * B_out


def jump_f(k, c: SpectralConstants):
    """``f = i / (A_- A_+)`` continued analytically off the arc.

    With ``A_- A_+ = i A B`` (chord branch) this is ``1 / (A B)``, a form that
    is Schwarz symmetric in the product ``A_- A_+``.
    """
    A_m, A_p = arc_boundary_values(k, c)
    return 1j / (A_m * A_p)


# --------------------------------------------------------------------------
# phases
# --------------------------------------------------------------------------

def theta_phase(k, xi):
    """Regularised phase ``theta(k, xi) = 1/(4k) + k/(4 xi^2)``."""
    k = np.asarray(k, dtype=complex)
    if np.any(k == 0):
        raise ZeroDivisionError("theta has a pole at k = 0")
    return 0.25 / k + k / (4.0 * xi * xi)


def slow_variable(x, t):
    return np.sqrt(np.asarray(t, dtype=float) / (4.0 * np.asarray(x, dtype=float)))


def theta_hat(x, t, k):
    """``t/(4k) + k x``, equal to ``t * theta(k, xi)`` with ``xi = sqrt(t/(4x))``."""
    return t * theta_phase(k, slow_variable(x, t))


def big_X(k, c: SpectralConstants):
    """``sqrt((k - E)(k - conj E))`` with ``X ~ k`` at infinity and cut along the arc."""
    k = np.asarray(k, dtype=complex)
    at_branch = (k == c.E) | (k == np.conj(c.E))
    with np.errstate(divide="ignore", invalid="ignore"):
        X = (k - c.E) * kappa(k, c) ** 2
    return np.where(at_branch, 0j, X)


def big_Omega(k, c: SpectralConstants):
    k = np.asarray(k, dtype=complex)
    if np.any(k == 0):
        raise ZeroDivisionError("Omega has a pole at k = 0")
    return c.omega / (2.0 * k) * big_X(k, c)


# --------------------------------------------------------------------------
# regions and the contour Sigma
# --------------------------------------------------------------------------

class Region(enum.Enum):
    DISPERSIVE = "dispersive"
    ELLIPTIC = "elliptic"
    PLANE = "plane"
    BORDER = "border"


@dataclass(frozen=True)
class RegionLabel:
    region: Region
    which: str | None = None  # "dispersive|elliptic" or "elliptic|plane" for borders

    def __str__(self):
        return self.region.value if self.which is None else f"border({self.which})"


def classify_region(xi: float, c: SpectralConstants, guard: float = BORDER_GUARD) -> RegionLabel:
    if not xi > 0:
        raise DomainError("xi must be positive")
    a, b = c.xi_disp, c.xi0
    if abs(xi - a) <= guard * max(1.0, a):
        return RegionLabel(Region.BORDER, "dispersive|elliptic")
    if abs(xi - b) <= guard * max(1.0, b):
        return RegionLabel(Region.BORDER, "elliptic|plane")
    if xi < a:
        return RegionLabel(Region.DISPERSIVE)
    if xi < b:
        return RegionLabel(Region.ELLIPTIC)
    return RegionLabel(Region.PLANE)


@dataclass(frozen=True)
class ContourSigma:
    center: float
    radius: float
    arc: np.ndarray  # upper arc gamma from E to the real axis, then conj arc to conj E
    E: complex

    @property
    def upper(self):
        n = len(self.arc)
        return self.arc[: (n + 1) // 2]

    # Sigma = real line (left to right) + arc (E -> conj E)
    orientation = ("real: -inf -> +inf", "arc: E -> conj E")


def sigma_contour(c: SpectralConstants, n: int = 201) -> ContourSigma:
    """Sampled arc of Sigma from ``E`` through ``|E|^2/E1`` to ``conj E``."""
    if n < 2:
        raise ValueError("n >= 2 required")
    c0, R = c.circle_center, c.circle_radius
    a0 = np.angle(c.E - c0)  # angle of E seen from the centre
    ang = np.linspace(a0, 2.0 * np.pi - a0, n)
    arc = c0 + R * np.exp(1j * ang)
    arc[0] = c.E
    arc[-1] = np.conj(c.E)
    return ContourSigma(center=c0, radius=R, arc=arc, E=c.E)
