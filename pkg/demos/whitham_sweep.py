"""Branch points and elliptic frame across the elliptic region.

    python demos/whitham_sweep.py [n]
"""

import sys

import numpy as np

from srs_whitham import PhysicalParams, build_frame, derive_spectral_constants, solve_genus1


def main(n=8):
    c = derive_spectral_constants(PhysicalParams(l=-0.5, omega=0.5))
    print(f"E = {c.E:.6f}  dispersive|elliptic at xi = {c.xi_disp:g}  elliptic|plane at xi0 = {c.xi0:.6f}")
    print(f"{'xi':>8} {'lambda_-':>10} {'lambda_+':>10} {'d':>22} {'Im tau':>8} {'B_g':>9} {'g_hat_inf':>10}")
    for xi in np.linspace(c.xi_disp, c.xi0, n + 2)[1:-1]:
        gp = solve_genus1(float(xi), c)
        fr = build_frame(float(xi), c, gp=gp)
        print(f"{xi:8.4f} {gp.lambda_minus:10.5f} {gp.lambda_plus:10.5f} {gp.d:22.5f} "
              f"{fr.tau.imag:8.4f} {fr.B_g:9.5f} {fr.g_hat_inf:10.6f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 8)
