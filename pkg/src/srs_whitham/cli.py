"""Command-line driver.

    srs-whitham params-sweep --xi-steps 50
    srs-whitham certify --beta 0.25
    srs-whitham field-eval --t 200 --x-min 1 --x-max 40 --x-steps 40
    srs-whitham pde-run --t-max 50
    srs-whitham sign-map --phase g_hat --xi 3
    srs-whitham validate

Settings come from defaults, then a JSON file given by ``--config``, then the
environment variable ``SRS_WHITHAM_OUT`` (output directory only), then flags.
Exit codes are 0 on success, 1 on a numerical failure and 2 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import FrameCache, ThetaZeroError, evaluate_fields
from .certify import certify_positivity
from .core import (DomainError, PhysicalParams, Region, classify_region, derive_spectral_constants,
                   scattering_functions)
from .elliptic import RealityError, build_frame, theta3
from .gfun import TraceError, abel_condition, sign_map, trace_band
from .pde import ConservationError, integrate, interp_field, snapshot_csv
from .quadrature import QuadratureError
from .whitham import BorderError, SolveError, alpha0_x0, solve_genus0, solve_genus1

OUT_ENV = "SRS_WHITHAM_OUT"
EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
# measured cost of one RK4 step per grid cell, with headroom
SECONDS_PER_CELL_STEP = 8e-6

NUMERIC_ERRORS = (SolveError, QuadratureError, RealityError, ThetaZeroError, TraceError,
                  ConservationError, ArithmeticError, RuntimeError)


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    l: float = -0.5
    omega: float = 0.5
    # xi grid; None means the open elliptic interval
    xi_min: float | None = None
    xi_max: float | None = None
    xi_steps: int = 50
    out: str = "out"
    tol_quad: float = 1e-12
    seed: int | None = None
    jobs: int = 1
    # certify
    betas: list = field(default_factory=lambda: [0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.75, 0.9])
    cert_eps: float = 1e-3
    # field-eval window
    x_min: float = 1.0
    x_max: float = 40.0
    x_steps: int = 40
    times: list = field(default_factory=lambda: [200.0])
    # pde-run
    pde_x_max: float = 40.0
    pde_t_max: float = 50.0
    pde_dx: float = 0.05
    pde_dt: float = 0.05
    pde_warmup: float = 2.0
    pde_snapshots: list = field(default_factory=lambda: [10.0, 25.0, 50.0])
    budget_seconds: float = 600.0
    # sign-map
    phase: str = "g_hat"
    xi: float = 3.0
    window: list | None = None
    n: int = 41
    # validate
    validate_t: float = 100.0
    validate_points: int = 200

    def validate(self) -> "RunConfig":
        if not (-1.0 < self.l < 0.0):
            raise UsageError(f"l must lie in (-1, 0), got {self.l}")
        if not self.omega > 0:
            raise UsageError(f"omega must be positive, got {self.omega}")
        if self.xi_steps < 1 or self.x_steps < 1 or self.n < 2 or self.validate_points < 1:
            raise UsageError("grids must be nonempty")
        for name in ("tol_quad", "cert_eps", "pde_dx", "pde_dt", "pde_x_max", "budget_seconds", "validate_t"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if self.pde_t_max < 0:
            raise UsageError("pde_t_max must be non-negative")
        if not self.times or any(not t > 0 for t in self.times):
            raise UsageError("times must be a nonempty list of positive values")
        if not self.betas or any(not 0.0 < b < 1.0 for b in self.betas):
            raise UsageError(f"every beta must lie in (0, 1), got {self.betas}")
        if self.x_min <= 0 or self.x_max < self.x_min:
            raise UsageError("need 0 < x_min <= x_max")
        if self.xi_min is not None and self.xi_max is not None and self.xi_max < self.xi_min:
            raise UsageError("xi_max < xi_min")
        if self.phase not in ("theta", "g", "g_hat"):
            raise UsageError(f"phase must be theta, g or g_hat, got {self.phase!r}")
        if self.window is not None and (len(self.window) != 4 or self.window[0] >= self.window[1]
                                        or self.window[2] >= self.window[3]):
            raise UsageError("window is [re_min, re_max, im_min, im_max]")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        return self

    def config_hash(self) -> str:
        # where results go and how many workers compute them does not change them
        d = {k: v for k, v in asdict(self).items() if k not in ("out", "jobs")}
        text = json.dumps(d, sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def params(self) -> PhysicalParams:
        return PhysicalParams(l=self.l, omega=self.omega)


def metadata(cfg: RunConfig, command: str, **extra) -> dict:
    meta = {"package": "srs_whitham", "version": __version__, "command": command,
            "config_hash": cfg.config_hash(), "l": cfg.l, "omega": cfg.omega,
            "tolerances": {"tol_quad": cfg.tol_quad}}
    meta.update(extra)
    return meta


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return "nan"
    return f"{float(v):.17g}"


def write_csv(path: Path, header, rows, meta: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _outdir(cfg: RunConfig) -> Path:
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def xi_grid(cfg: RunConfig, c) -> np.ndarray:
    if cfg.xi_min is None or cfg.xi_max is None:
        # open elliptic interval, borders excluded
        h = (c.xi0 - c.xi_disp) / (cfg.xi_steps + 1)
        lo = c.xi_disp + h if cfg.xi_min is None else cfg.xi_min
        hi = c.xi0 - h if cfg.xi_max is None else cfg.xi_max
    else:
        lo, hi = cfg.xi_min, cfg.xi_max
    xs = np.linspace(lo, hi, cfg.xi_steps)
    if cfg.seed is not None and cfg.xi_steps > 1:
        rng = np.random.default_rng(cfg.seed)
        xs = xs + (rng.random(xs.size) - 0.5) * 0.5 * (hi - lo) / (cfg.xi_steps - 1)
        xs = np.clip(xs, lo, hi)
    if np.any(xs <= 0):
        raise UsageError("xi grid must be positive")
    return xs


# --------------------------------------------------------------------------
# params-sweep
# --------------------------------------------------------------------------

SWEEP_HEADER = ["xi", "status", "lambda_minus", "lambda_plus", "re_d", "im_d", "re_tau", "im_tau",
                "B_g", "B_zeta", "Delta", "g_hat_inf", "phi_hat", "abel_residual"]


def sweep_row(xi: float, l: float, omega: float, tol: float = 1e-12) -> list:
    c = derive_spectral_constants(PhysicalParams(l=l, omega=omega))
    nan = float("nan")
    row = [xi, "ok"] + [nan] * (len(SWEEP_HEADER) - 2)
    try:
        lab = classify_region(xi, c)
        if lab.region is Region.BORDER:
            row[1] = "border"
            return row
        if lab.region is not Region.ELLIPTIC:
            row[1] = "outside"
            return row
        gp = solve_genus1(xi, c)
        row[2:6] = [gp.lambda_minus, gp.lambda_plus, gp.d.real, gp.d.imag]
        row[13] = abs(abel_condition(gp, c, tol=tol))
        try:
            fr = build_frame(xi, c, gp=gp)
        except DomainError:
            row[1] = "border"
            return row
        row[6:13] = [fr.tau.real, fr.tau.imag, fr.B_g, fr.B_zeta, fr.Delta, fr.g_hat_inf, fr.phi_hat]
    except BorderError:
        row[1] = "border"
    except NUMERIC_ERRORS as exc:
        row[1] = f"error:{type(exc).__name__}"
    return row


def cmd_params_sweep(cfg: RunConfig) -> int:
    c = derive_spectral_constants(cfg.params())
    xs = xi_grid(cfg, c)
    args = [(float(x), cfg.l, cfg.omega, cfg.tol_quad) for x in xs]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            rows = list(ex.map(sweep_row, *zip(*args)))  # map keeps input order
    else:
        rows = [sweep_row(*a) for a in args]
    path = _outdir(cfg) / "params_sweep.csv"
    write_csv(path, SWEEP_HEADER, rows, metadata(cfg, "params-sweep", xi0=c.xi0, xi_disp=c.xi_disp))
    counts = {}
    for r in rows:
        counts[r[1]] = counts.get(r[1], 0) + 1
    print(f"params-sweep: {len(rows)} rows -> {path}  " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    return EXIT_NUMERIC if any(r[1].startswith("error") for r in rows) else EXIT_OK


# --------------------------------------------------------------------------
# certify
# --------------------------------------------------------------------------

def cmd_certify(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    failed = False
    summary = []
    for beta in cfg.betas:
        t0 = time.perf_counter()
        cert = certify_positivity(beta, eps=cfg.cert_eps)
        alpha0, x0 = alpha0_x0(beta)
        doc = {"metadata": metadata(cfg, "certify", beta=beta), "alpha0": alpha0, "x0": x0,
               "certificate": json.loads(cert.to_json())}
        path = out / f"certificate_beta_{beta:.6g}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        line = (f"beta={beta:<6g} status={cert.status:<14s} alpha0={alpha0:.10g} "
                f"grid_min_alpha={cert.min_alpha_found:.6g} boxes={len(cert.boxes)} depth={cert.max_depth} "
                f"({time.perf_counter() - t0:.1f}s)")
        print(line)
        summary.append({"beta": beta, "status": cert.status, "alpha0": alpha0, "min_alpha_found": cert.min_alpha_found})
        failed |= not cert.proved
    (out / "certify_summary.json").write_text(json.dumps({"metadata": metadata(cfg, "certify"), "results": summary},
                                                         indent=1) + "\n")
    return EXIT_NUMERIC if failed else EXIT_OK


# --------------------------------------------------------------------------
# field-eval
# --------------------------------------------------------------------------

FIELD_HEADER = ["x", "t", "xi", "region", "status", "re_q", "im_q", "abs_q", "re_mu", "im_mu", "nu"]


def cmd_field_eval(cfg: RunConfig) -> int:
    c = derive_spectral_constants(cfg.params())
    cache = FrameCache(c)
    xs = np.linspace(cfg.x_min, cfg.x_max, cfg.x_steps)
    rows = []
    nan = float("nan")
    for t in cfg.times:
        for x in xs:
            xi = math.sqrt(t / (4 * x))
            try:
                f = evaluate_fields(x, t, c, cache)
                rows.append([x, t, xi, f.region, "ok", f.q.real, f.q.imag, abs(f.q), f.mu.real, f.mu.imag, f.nu])
            except DomainError as exc:
                rows.append([x, t, xi, "border", f"skipped:{exc.__class__.__name__}"] + [nan] * 6)
            except NUMERIC_ERRORS as exc:
                rows.append([x, t, xi, "elliptic", f"error:{exc.__class__.__name__}"] + [nan] * 6)
    path = _outdir(cfg) / "fields.csv"
    write_csv(path, FIELD_HEADER, rows, metadata(cfg, "field-eval"))
    n_err = sum(r[4].startswith("error") for r in rows)
    print(f"field-eval: {len(rows)} points -> {path}  errors={n_err}")
    return EXIT_NUMERIC if n_err else EXIT_OK


# --------------------------------------------------------------------------
# pde-run
# --------------------------------------------------------------------------

def pde_cost_estimate(x_max, t_max, dx, dt, warmup=0.0) -> float:
    cells = x_max / dx
    steps = t_max / dt + 7 * min(warmup, t_max) / dt
    return SECONDS_PER_CELL_STEP * cells * steps


def _check_budget(cfg: RunConfig, x_max, t_max):
    est = pde_cost_estimate(x_max, t_max, cfg.pde_dx, cfg.pde_dt, cfg.pde_warmup)
    if est > cfg.budget_seconds:
        raise UsageError(f"estimated run time {est:.0f}s exceeds the budget of {cfg.budget_seconds:.0f}s; "
                         "lower t_max or x_max, or raise budget_seconds")
    return est


def cmd_pde_run(cfg: RunConfig) -> int:
    est = _check_budget(cfg, cfg.pde_x_max, cfg.pde_t_max)
    snaps = sorted({t for t in cfg.pde_snapshots if t <= cfg.pde_t_max} | {cfg.pde_t_max})
    t0 = time.perf_counter()
    run = integrate(cfg.params(), cfg.pde_x_max, cfg.pde_t_max, cfg.pde_dx, cfg.pde_dt,
                    snapshot_times=snaps, warmup=cfg.pde_warmup)
    out = _outdir(cfg)
    for g in run.snapshots:
        snapshot_csv(g, out / f"pde_t{g.t:g}.csv")
    meta = metadata(cfg, "pde-run", estimated_seconds=est, elapsed_seconds=time.perf_counter() - t0, **run.metadata())
    (out / "pde_run.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    print(f"pde-run: {len(run.snapshots)} snapshots -> {out}  max conservation residual {run.max_residual:.3e}")
    return EXIT_OK


# --------------------------------------------------------------------------
# sign-map
# --------------------------------------------------------------------------

def cmd_sign_map(cfg: RunConfig) -> int:
    c = derive_spectral_constants(cfg.params())
    lab = classify_region(cfg.xi, c)
    need = {"theta": Region.DISPERSIVE, "g": Region.PLANE, "g_hat": Region.ELLIPTIC}[cfg.phase]
    if lab.region is not need:
        raise UsageError(f"phase {cfg.phase} needs xi in the {need.value} region, xi = {cfg.xi} is {lab.region.value}")
    params = {"xi": cfg.xi, "c": c}
    band = None
    if cfg.phase == "g":
        r = solve_genus0(cfg.xi, c)
        scale = 1.3 * max(abs(r.lambda_minus), abs(r.lambda_plus))
    elif cfg.phase == "g_hat":
        gp = solve_genus1(cfg.xi, c)
        band = trace_band(gp, c)
        params.update(gp=gp, band=band)
        scale = 1.5 * max(abs(gp.lambda_minus), abs(gp.lambda_plus))
    else:
        scale = 2.0 * max(cfg.xi, c.absE)
    window = cfg.window if cfg.window is not None else [-scale, scale, -scale, scale]
    m = sign_map(cfg.phase, params, tuple(window), n=cfg.n)
    out = _outdir(cfg)
    meta = metadata(cfg, "sign-map", phase=cfg.phase, xi=cfg.xi, window=list(window), n=cfg.n)
    k, v, s = m.points()
    write_csv(out / f"sign_map_{cfg.phase}.csv", ["k_re", "k_im", "value", "sign"],
              zip(k.real, k.imag, v, s), meta)
    if band is not None:
        rows = [(z.real, z.imag, 0.0) for z in band.gamma_d] + [(z.real, z.imag, 1.0) for z in band.gamma_lambda]
        write_csv(out / "band.csv", ["k_re", "k_im", "value"], rows,
                  {**meta, "value": "0 on gamma_d, 1 on gamma_lambda", "miss_d": band.miss_d,
                   "miss_lambda": band.miss_lambda})
    print(f"sign-map: {m.signs.size} points -> {out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# validate
# --------------------------------------------------------------------------

def _check(name, value, threshold, ok):
    return {"check": name, "value": float(value), "threshold": float(threshold), "status": "pass" if ok else "fail"}


def run_validation(cfg: RunConfig) -> list:
    """Deterministic property suite plus a short integrator and asymptotics comparison."""
    pp = cfg.params()
    c = derive_spectral_constants(pp)
    rng = np.random.default_rng(0 if cfg.seed is None else cfg.seed)
    checks = []

    k = rng.normal(size=cfg.validate_points) * 2 + 1j * rng.normal(size=cfg.validate_points) * 2
    _, A, B, _ = scattering_functions(k, c)
    v = float(np.max(np.abs(A * A - B * B - 1)))
    checks.append(_check("A^2 - B^2 = 1", v, 1e-12, v < 1e-12))

    tau = 0.3 + 0.9j
    z = rng.normal(size=16) + 1j * rng.normal(size=16)
    per = float(np.max(np.abs(theta3(z + 1, tau) - theta3(z, tau)) / np.abs(theta3(z, tau))))
    quasi = float(np.max(np.abs(theta3(z + tau, tau) - np.exp(-1j * np.pi * tau - 2j * np.pi * z) * theta3(z, tau))
                         / np.abs(theta3(z + tau, tau))))
    checks.append(_check("theta3 period (relative)", per, 1e-12, per < 1e-12))
    checks.append(_check("theta3 quasi-period (relative)", quasi, 1e-12, quasi < 1e-12))

    # integrator conservation, and the plane-wave amplitude error at t and 4t
    t1 = cfg.validate_t
    x_hi = 1.2 * (4 * t1) / (4 * (1.4 * c.xi0) ** 2) + 0.1
    _check_budget(cfg, x_hi, 4 * t1)
    run = integrate(pp, x_hi, 4 * t1, min(cfg.pde_dx, x_hi / 200), cfg.pde_dt,
                    snapshot_times=[t1, 4 * t1], warmup=cfg.pde_warmup)
    checks.append(_check("conservation residual", run.max_residual, 1e-6, run.max_residual < 1e-6))
    amp = pp.p / (2 * pp.omega)
    errs = []
    for t in (t1, 4 * t1):
        xq = t / (4 * (np.linspace(1.4, 1.6, 41) * c.xi0) ** 2)
        errs.append(float(np.max(np.abs(np.abs(interp_field(run.at(t), xq)) - amp))))
    checks.append(_check(f"plane-wave error ratio t={t1:g}->{4 * t1:g}", errs[1] / errs[0], 0.7, errs[1] <= 0.7 * errs[0]))
    return checks


def cmd_validate(cfg: RunConfig) -> int:
    checks = run_validation(cfg)
    out = _outdir(cfg)
    write_csv(out / "validation.csv", ["check", "value", "threshold", "status"],
              [[ch["check"], ch["value"], ch["threshold"], ch["status"]] for ch in checks], metadata(cfg, "validate"))
    for ch in checks:
        print(f"{ch['status'].upper():4s}  {ch['check']}: {ch['value']:.3e} (threshold {ch['threshold']:g})")
    return EXIT_OK if all(ch["status"] == "pass" for ch in checks) else EXIT_NUMERIC


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

COMMANDS = {
    "params-sweep": cmd_params_sweep,
    "certify": cmd_certify,
    "field-eval": cmd_field_eval,
    "pde-run": cmd_pde_run,
    "sign-map": cmd_sign_map,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with RunConfig fields")
    common.add_argument("--l", type=float)
    common.add_argument("--omega", type=float)
    common.add_argument("--xi-min", type=float)
    common.add_argument("--xi-max", type=float)
    common.add_argument("--xi-steps", type=int)
    common.add_argument("--out", help=f"output directory (also ${OUT_ENV})")
    common.add_argument("--tol-quad", type=float)
    common.add_argument("--seed", type=int, help="jitter the xi grid (robustness runs only)")
    common.add_argument("--jobs", type=int)

    ap = argparse.ArgumentParser(prog="srs-whitham", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("params-sweep", parents=[common], help="Whitham parameters and elliptic frame over a xi grid")
    p = sub.add_parser("certify", parents=[common], help="positivity certificates")
    p.add_argument("--beta", type=float, action="append", dest="betas")
    p.add_argument("--eps", type=float, dest="cert_eps")
    p = sub.add_parser("field-eval", parents=[common], help="asymptotic q, mu, nu on an (x, t) window")
    p.add_argument("--t", type=float, action="append", dest="times")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--x-steps", type=int)
    p = sub.add_parser("pde-run", parents=[common], help="direct integration of the SRS system")
    p.add_argument("--x-max", type=float, dest="pde_x_max")
    p.add_argument("--t-max", type=float, dest="pde_t_max")
    p.add_argument("--dx", type=float, dest="pde_dx")
    p.add_argument("--dt", type=float, dest="pde_dt")
    p.add_argument("--snapshot", type=float, action="append", dest="pde_snapshots")
    p.add_argument("--budget", type=float, dest="budget_seconds")
    p = sub.add_parser("sign-map", parents=[common], help="signs of Im theta, Im g or Im g_hat")
    p.add_argument("--phase", choices=["theta", "g", "g_hat"])
    p.add_argument("--xi", type=float)
    p.add_argument("--window", type=float, nargs=4, metavar=("RE0", "RE1", "IM0", "IM1"))
    p.add_argument("--n", type=int)
    p = sub.add_parser("validate", parents=[common], help="property suite and integrator cross-check")
    p.add_argument("--t", type=float, dest="validate_t")
    p.add_argument("--budget", type=float, dest="budget_seconds")
    return ap


def resolve_config(ns: argparse.Namespace, environ=os.environ) -> RunConfig:
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    if ns.config is not None:
        try:
            data = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for k, v in data.items():
            setattr(cfg, k, v)
    if environ.get(OUT_ENV):
        cfg.out = environ[OUT_ENV]
    for k, v in vars(ns).items():
        if k in known and v is not None:
            setattr(cfg, k, v)
    return cfg.validate()


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(ns)
        return COMMANDS[ns.command](cfg)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
