"""|q| across the three asymptotic regions at one time.

    python demos/three_regions.py [t]

Prints a coarse profile of the leading-order |q(x, t)| against x, showing
the constant plane wave near the boundary, the modulated elliptic wave and
the decaying dispersive tail.
"""

import math
import sys

import numpy as np

from srs_whitham import FrameCache, PhysicalParams, derive_spectral_constants, evaluate_fields
from srs_whitham.core import DomainError


def main(t=200.0):
    c = derive_spectral_constants(PhysicalParams(l=-0.5, omega=0.5))
    cache = FrameCache(c)
    x_lo = t / (4 * (1.2 * c.xi0) ** 2)
    x_hi = t / (4 * (0.8 * c.xi_disp) ** 2)
    for x in np.geomspace(x_lo, x_hi, 30):
        try:
            f = evaluate_fields(float(x), t, c, cache)
        except DomainError:
            print(f"x = {x:9.3f}  border")
            continue
        bar = "#" * int(round(40 * abs(f.q)))
        print(f"x = {x:9.3f}  xi = {math.sqrt(t / (4 * x)):6.3f}  {f.region:10s} |q| = {abs(f.q):.4f}  {bar}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 200.0)
