"""Long-time asymptotics of the stimulated Raman scattering (SRS) boundary problem.

Solves the Whitham-type parameter equations, certifies their solvability,
evaluates the asymptotic fields in the plane-wave, elliptic and dispersive
regions and integrates the SRS system directly for comparison.
"""

from .core import (DomainError, PhysicalParams, Region, SpectralConstants, classify_region,
                   derive_spectral_constants, slow_variable)
from .whitham import Genus0Roots, Genus1Params, alpha0_x0, polynomial_P, solve_genus0, solve_genus1
from .certify import PositivityCertificate, certify_positivity
from .gfun import BandContours, SignMap, abel_condition, g_hat, sign_map, trace_band
from .elliptic import EllipticFrame, build_frame, theta3
from .asymptotics import FieldTriple, FrameCache, evaluate_fields
from .pde import FieldGrid, PDERun, integrate

__version__ = "0.1.0"

__all__ = [
    "DomainError", "PhysicalParams", "Region", "SpectralConstants", "classify_region",
    "derive_spectral_constants", "slow_variable", "Genus0Roots", "Genus1Params", "alpha0_x0",
    "polynomial_P", "solve_genus0", "solve_genus1", "PositivityCertificate", "certify_positivity",
    "BandContours", "SignMap", "abel_condition", "g_hat", "sign_map", "trace_band",
    "EllipticFrame", "build_frame", "theta3", "FieldTriple", "FrameCache", "evaluate_fields",
    "FieldGrid", "PDERun", "integrate", "__version__",
]
