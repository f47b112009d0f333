"""Direct simulation against the plane-wave amplitude p/(2 omega).

    python demos/pde_vs_plane_wave.py

Integrates the SRS system on a short x interval and reports the amplitude
error at xi = 1.5 xi0 for t = 25, 100, 400.  The error at t = 25 is still
dominated by the boundary transient, since x = t/(4 xi^2) is then only 0.06.
"""

from srs_whitham import PhysicalParams, derive_spectral_constants, integrate
from srs_whitham.pde import interp_field


def main():
    pp = PhysicalParams(l=-0.5, omega=0.5)
    c = derive_spectral_constants(pp)
    amp = pp.p / (2 * pp.omega)
    xi = 1.5 * c.xi0
    times = [25.0, 100.0, 400.0]
    run = integrate(pp, 1.5, max(times), 0.01, 0.05, snapshot_times=times, warmup=2.0)
    print(f"max conservation residual {run.max_residual:.2e}")
    prev = None
    for t in times:
        x = t / (4 * xi * xi)
        err = abs(abs(complex(interp_field(run.at(t), [x])[0])) - amp)
        ratio = "" if prev is None else f"  ratio {err / prev:.3f}"
        print(f"t = {t:5g}  x = {x:.4f}  | |q| - p/(2 omega) | = {err:.4f}{ratio}")
        prev = err


if __name__ == "__main__":
    main()
