import json
import math

import numpy as np
import pytest

from srs_whitham.core import PhysicalParams
from srs_whitham.pde import (ConservationError, FieldGrid, compare_asymptotic, conservation_residual, integrate,
                             interp_field, snapshot_csv, sweep_x)

PP = PhysicalParams(-0.5, 0.5)


@pytest.fixture(scope="module")
def run50():
    return integrate(PP, 20.0, 50.0, 0.05, 0.05, snapshot_times=[0.0, 10.0, 50.0], warmup=2.0)


def test_initial_slice(run50):
    g = run50.at(0.0)
    assert np.all(g.q == 0)
    assert np.all(g.mu == PP.p) and np.all(g.nu == PP.l)


def test_small_t_taylor():
    errs = []
    for t in (1e-2, 5e-3):
        g = integrate(PP, 2.0, t, 0.05, t / 4, snapshot_times=[t]).at(t)
        errs.append(np.max(np.abs(g.q + 0.5j * PP.p * t)))
    assert errs[0] < (1e-2) ** 2
    assert 3.5 < errs[0] / errs[1] < 4.5  # O(t^2) remainder


def test_conservation_to_t50(run50):
    assert run50.max_residual < 1e-6
    assert conservation_residual(run50.at(50.0)) < 1e-6


def test_conservation_residual_synthetic():
    x = np.linspace(0, 1, 11)
    g = FieldGrid(x=x, t=0.0, q=np.zeros(11, complex), mu=np.full(11, PP.p + 0j), nu=np.full(11, PP.l), params=PP)
    assert conservation_residual(g) < 1e-15
    g.nu = g.nu + 1e-3
    assert abs(conservation_residual(g) - 2 * abs(PP.l) * 1e-3) < 1e-5


def test_boundary_reproduction(run50):
    for t in (10.0, 50.0):
        g = run50.at(t)
        assert g.mu[0] == PP.p * np.exp(1j * PP.omega * t)
        assert g.nu[0] == PP.l


def test_sweep_preserves_norm_for_any_q():
    rng = np.random.default_rng(0)
    q = rng.normal(size=200) + 1j * rng.normal(size=200)
    mu, nu = sweep_x(q, 0.01, 0.6 + 0.0j, 0.8)
    assert np.max(np.abs(nu**2 + np.abs(mu) ** 2 - 1)) < 1e-13


def test_sweep_constant_q_exact():
    # for constant q the x-system is a rotation about a fixed axis with angular speed 2|q|
    q0 = 0.3 + 0.4j
    x = np.linspace(0, 2, 201)
    mu, nu = sweep_x(np.full(x.size, q0), x[1] - x[0], 0j, 1.0)
    assert np.allclose(nu, np.cos(2 * abs(q0) * x), atol=1e-12)
    assert np.allclose(np.abs(mu), np.abs(np.sin(2 * abs(q0) * x)), atol=1e-12)


def _solution(dx, dt):
    g = integrate(PP, 2.0, 2.0, dx, dt, snapshot_times=[2.0]).at(2.0)
    return g.x, g.q


def test_richardson():
    xr, qr = _solution(0.0125, 0.0125)
    errs = []
    for h in (0.1, 0.05):
        x, q = _solution(h, h)
        ref = qr[np.searchsorted(xr, x - 1e-12)]
        errs.append(np.max(np.abs(q - ref)))
    assert errs[0] / errs[1] >= 8


def test_gauge_symmetry():
    c0 = 0.7
    a = integrate(PP, 5.0, 10.0, 0.05, 0.05, snapshot_times=[10.0], warmup=1.0).at(10.0)
    b = integrate(PP, 5.0, 10.0, 0.05, 0.05, snapshot_times=[10.0], warmup=1.0, phase_shift=c0).at(10.0)
    rot = np.exp(1j * c0)
    assert np.max(np.abs(b.q - rot * a.q)) < 1e-10
    assert np.max(np.abs(b.mu - rot * a.mu)) < 1e-10
    assert np.max(np.abs(b.nu - a.nu)) < 1e-10


def test_abort_on_breach():
    with pytest.raises(ConservationError):
        integrate(PP, 2.0, 1.0, 0.05, 0.05, abort=-1.0)


def test_bad_arguments():
    with pytest.raises(ValueError):
        integrate(PP, 2.0, 1.0, 0.0, 0.05)
    with pytest.raises(ValueError):
        integrate(PP, 2.0, 1.0, 0.05, 0.05, snapshot_times=[2.0])
    with pytest.raises(KeyError):
        integrate(PP, 2.0, 1.0, 0.05, 0.05).at(0.5)


def test_interp_exact_for_cubics(run50):
    g = run50.at(10.0)
    cub = FieldGrid(x=g.x, t=0.0, q=(g.x**3 - 2 * g.x + 1).astype(complex), mu=g.mu, nu=g.nu, params=PP)
    xq = np.array([0.013, 3.3337, 19.97])
    assert np.allclose(interp_field(cub, xq), xq**3 - 2 * xq + 1, rtol=1e-12)


def test_snapshot_csv(tmp_path, run50):
    p = tmp_path / "s.csv"
    snapshot_csv(run50.at(10.0), p)
    lines = p.read_text().splitlines()
    assert json.loads(lines[0][2:])["t"] == 10.0
    assert lines[1] == "x,re_q,im_q,re_mu,im_mu,nu"
    vals = [float(v) for v in lines[2 + 37].split(",")]
    g = run50.at(10.0)
    assert vals[0] == g.x[37] and vals[1] == g.q[37].real and vals[5] == g.nu[37]


def test_compare_asymptotic_rows(c, run50):
    from srs_whitham.asymptotics import evaluate_fields

    def ev(x, t):
        f = evaluate_fields(x, t, c)
        return {"q": f.q, "region": f.region}
    t = 50.0
    xs = [t / (4 * (1.5 * c.xi0) ** 2), 15.0]
    rows = compare_asymptotic(run50, ev, [(x, t) for x in xs])
    assert [r["region"] for r in rows] == ["plane", "dispersive"]
    assert abs(rows[0]["abs_q_asym"] - math.sqrt(3) / 2) < 1e-12
    assert all(r["abs_err"] <= r["err"] + 1e-15 for r in rows)
    assert abs(rows[0]["xi"] - 1.5 * c.xi0) < 1e-12


def test_asymptotics_refused_at_small_t(c, run50):
    from srs_whitham.asymptotics import evaluate_fields
    from srs_whitham.core import DomainError
    with pytest.raises(DomainError):
        compare_asymptotic(run50, lambda x, t: {"q": evaluate_fields(x, t, c).q}, [(0.01, 0.0)])
