"""Comparison ODE closed forms, the adaptive integrator, and sweeps."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from tricomi_lab.blowup_lab import (ComparisonODE, CriticalReport,
                                    LifespanRecord, _fit_loglog,
                                    default_eps_ladder, lifespan_sweep,
                                    measure_lifespan, ode_blowup_point,
                                    ode_integrate, ode_solution)
from tricomi_lab.errors import DomainError, SolverError
from tricomi_lab.fd_solver import DetectionConfig, GridConfig, ModelParams
from tricomi_lab.functional import K_constant, l1_data_norm
from tricomi_lab.profiles import DataProfile

_RNG = np.random.default_rng(20260819)


def _nl_params(p=2.0, eps=1.5):
    u0 = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=1.0)
    u1 = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=0.5)
    return ModelParams(n=1, ell=1.0, R=1.0, eps=eps, u0=u0, u1=u1, p=p)


def _random_ode():
    return ComparisonODE(
        C=float(_RNG.uniform(0.2, 3.0)),
        M=float(_RNG.uniform(0.05, 2.0)),
        p=float(_RNG.uniform(1.3, 4.0)),
        R=float(_RNG.uniform(0.3, 2.0)),
        a=float(_RNG.uniform(0.2, 1.6)),
    )


def test_ode_validation():
    good = dict(C=1.0, M=0.5, p=2.0, R=1.0, a=0.75)
    ComparisonODE(**good)
    for bad in (dict(C=0.0), dict(M=-1.0), dict(p=1.0), dict(R=0.0),
                dict(a=float("inf"))):
        with pytest.raises(DomainError):
            ComparisonODE(**{**good, **bad})


def test_critical_flag():
    assert ComparisonODE(C=1.0, M=0.5, p=2.0, R=1.0, a=1.0).critical
    assert not ComparisonODE(C=1.0, M=0.5, p=2.0, R=1.0, a=0.9).critical


def test_from_params_weight_exponent():
    params = _nl_params(p=2.0)
    ode = ComparisonODE.from_params(params)
    # (n-1)(p-1)/2 + gamma (p+1) with n=1, gamma=1/4, p=2
    assert ode.a == pytest.approx(0.75, rel=1e-15)
    assert ode.M == pytest.approx(K_constant(params) * l1_data_norm(params),
                                  rel=1e-14)
    assert ode.R == 1.0
    with pytest.raises(DomainError):
        ComparisonODE.from_params(
            ModelParams(n=1, ell=1.0, R=1.0, eps=0.1,
                        u0=DataProfile.zero(0.5), u1=DataProfile.zero(0.5),
                        linear=True))


def test_blowup_point_satisfies_separated_relation():
    from tricomi_lab.blowup_lab import _weight_primitive
    for _ in range(25):
        ode = _random_ode()
        eps = float(_RNG.uniform(0.2, 3.0))
        z_star = ode_blowup_point(ode, eps)
        if not math.isfinite(z_star):
            continue
        S = (ode.M * eps) ** (1.0 - ode.p) / (ode.C * (ode.p - 1.0))
        assert _weight_primitive(ode, z_star) == pytest.approx(S, rel=1e-10)


def test_blowup_point_critical_branch():
    ode = ComparisonODE(C=2.0, M=0.5, p=3.0, R=1.5, a=1.0)
    S = (0.5 * 0.8) ** (-2.0) / (2.0 * 2.0)
    assert ode_blowup_point(ode, 0.8) == pytest.approx(
        2.0 * 1.5 * math.exp(S) - 1.5, rel=1e-14)


def test_blowup_point_supercritical_can_be_infinite():
    # a > 1: finite total weight mass; small eps pushes S beyond it
    ode = ComparisonODE(C=1.0, M=1.0, p=2.0, R=1.0, a=1.5)
    assert math.isfinite(ode_blowup_point(ode, eps=10.0))
    assert ode_blowup_point(ode, eps=1e-4) == math.inf


def test_blowup_point_overflow_maps_to_inf():
    ode = ComparisonODE(C=1.0, M=1.0, p=2.0, R=1.0, a=1.0)
    assert ode_blowup_point(ode, eps=1e-300) == math.inf


def test_blowup_point_eps_validation():
    ode = ComparisonODE(C=1.0, M=1.0, p=2.0, R=1.0, a=0.5)
    with pytest.raises(DomainError):
        ode_blowup_point(ode, 0.0)


def test_solution_against_scipy():
    for _ in range(6):
        ode = _random_ode()
        eps = 1.0
        z_star = ode_blowup_point(ode, eps)
        z_hi = ode.R + 0.8 * (min(z_star, ode.R + 50.0) - ode.R)
        zs = np.linspace(ode.R, z_hi, 7)[1:]
        ivp = solve_ivp(
            lambda z, y: ode.C * (ode.R + z) ** (-ode.a) * y[0] ** ode.p,
            (ode.R, float(zs[-1])), [ode.M * eps], t_eval=zs,
            rtol=1e-11, atol=1e-13, method="RK45")
        assert ivp.success
        assert np.allclose(ode_solution(ode, zs, eps), ivp.y[0],
                           rtol=1e-7)


def test_solution_diverges_at_blowup_point():
    ode = ComparisonODE(C=1.0, M=0.5, p=2.0, R=1.0, a=0.75)
    z_star = ode_blowup_point(ode)
    assert ode_solution(ode, z_star * (1.0 - 1e-10)) > 1e7
    with pytest.raises(DomainError):
        ode_solution(ode, z_star * 1.01)
    with pytest.raises(DomainError):
        ode_solution(ode, 0.5 * ode.R)


def test_integrator_completes_below_blowup():
    ode = ComparisonODE(C=1.0, M=0.5, p=2.0, R=1.0, a=0.75)
    z_star = ode_blowup_point(ode)
    traj = ode_integrate(ode, z_max=ode.R + 0.9 * (z_star - ode.R))
    assert traj.status == "completed"
    assert traj.values[-1] == pytest.approx(
        ode_solution(ode, traj.zs[-1]), rel=1e-8)


def test_integrator_locates_blowup():
    worst_abs = 0.0
    worst_pt = 0.0
    for _ in range(10):
        ode = _random_ode()
        z_star = ode_blowup_point(ode, 1.0)
        if not (math.isfinite(z_star) and z_star < ode.R + 1e6):
            continue
        traj = ode_integrate(ode, z_max=ode.R + 3.0 * (z_star - ode.R))
        assert traj.status == "diverged"
        worst_abs = max(worst_abs, abs(traj.z_event - z_star) / z_star)
        # compare half-way in z, away from the ill-conditioned blow-up
        # layer where the closed-form inversion itself cancels digits
        mid = int(np.searchsorted(traj.zs,
                                  ode.R + 0.5 * (z_star - ode.R)))
        mid = min(mid, len(traj.zs) - 2)
        exact = ode_solution(ode, float(traj.zs[mid]))
        worst_pt = max(worst_pt, abs(traj.values[mid] - exact) / exact)
    assert worst_abs <= 1e-4
    assert worst_pt <= 1e-6


def test_integrator_event_scaling():
    """Measured abscissae reproduce the asymptotic eps power law."""
    ode = ComparisonODE(C=1.0, M=0.2, p=2.0, R=1.0, a=0.75)
    events = []
    for eps in (4e-3, 4e-4):
        z_star = ode_blowup_point(ode, eps)
        traj = ode_integrate(ode, z_max=3.0 * z_star, eps=eps)
        assert traj.status == "diverged"
        events.append(traj.z_event)
    # R + z* = (c + (1-a) S)^(1/(1-a)) with S ~ eps^(1-p): in the shifted
    # variable the secant slope approaches (p-1)/(1-a) = 4 with a relative
    # deficit c/((1-a)S) ~ 4e-4 at the larger eps
    measured = (math.log((ode.R + events[1]) / (ode.R + events[0]))
                / math.log(10.0))
    expected = (ode.p - 1.0) / (1.0 - ode.a)
    assert measured == pytest.approx(expected, rel=5e-3)


def test_integrator_validation():
    ode = ComparisonODE(C=1.0, M=0.5, p=2.0, R=1.0, a=0.75)
    with pytest.raises(DomainError):
        ode_integrate(ode, z_max=0.5)
    with pytest.raises(DomainError):
        ode_integrate(ode, z_max=5.0, eps=-1.0)


def test_eps_ladder():
    ladder = default_eps_ladder(2.0, count=5, ratio=2.0)
    assert np.allclose(ladder, [2.0, 1.0, 0.5, 0.25, 0.125])
    with pytest.raises(DomainError):
        default_eps_ladder(0.0)
    with pytest.raises(DomainError):
        default_eps_ladder(1.0, count=1)
    with pytest.raises(DomainError):
        default_eps_ladder(1.0, ratio=1.0)


def test_lifespan_record_bracket():
    r = LifespanRecord(eps=1.0, status="blew_up", t_lower=1.0, t_upper=1.2,
                       dx=0.02, threshold=1e6, horizon=4.0,
                       trigger="derivative_threshold")
    assert r.usable
    assert r.t_mid == pytest.approx(1.1)
    bad = LifespanRecord(eps=1.0, status="completed", t_lower=None,
                         t_upper=None, dx=0.02, threshold=1e6, horizon=4.0)
    assert not bad.usable
    with pytest.raises(SolverError):
        bad.t_mid


def test_fit_recovers_synthetic_power_law():
    records = []
    for eps in default_eps_ladder(1.0, count=6):
        t = 2.5 * eps ** -2.0
        records.append(LifespanRecord(
            eps=float(eps), status="blew_up", t_lower=t * 0.9999,
            t_upper=t * 1.0001, dx=0.01, threshold=1e6, horizon=100.0))
    slope, stderr, intercept = _fit_loglog(records)
    assert slope == pytest.approx(-2.0, abs=1e-6)
    assert intercept == pytest.approx(math.log(2.5), abs=1e-6)
    assert stderr < 0.01


def test_measure_lifespan_extends_horizon():
    params = _nl_params(eps=1.5)
    grid = GridConfig(dx=0.05, horizon=0.4, store_slices=8)
    rec = measure_lifespan(params, grid, DetectionConfig(), 1.5)
    assert rec.usable
    assert rec.horizon > 0.4
    assert 0.4 < rec.t_mid < rec.horizon


def test_lifespan_sweep_micro():
    params = _nl_params()
    grid = GridConfig(dx=0.05, horizon=2.5, store_slices=8)
    ladder = np.array([3.0, 2.5, 2.0, 1.6])
    report = lifespan_sweep(params, grid, DetectionConfig(), ladder,
                            compute_sensitivities=False, threads=2)
    assert not report.insufficient_data
    assert len(report.records) == 4
    assert all(r.usable for r in report.records)
    assert math.isfinite(report.slope)
    assert report.slope < 0.0
    assert report.theoretical_slope == pytest.approx(-2.0)


def test_sweep_validation():
    params = _nl_params()
    grid = GridConfig(dx=0.05, horizon=2.0)
    det = DetectionConfig()
    with pytest.raises(DomainError):
        lifespan_sweep(params, grid, det, [1.0, 0.5, 0.25])
    linear = ModelParams(n=1, ell=1.0, R=1.0, eps=0.1, u0=params.u0,
                         u1=params.u1, linear=True)
    with pytest.raises(DomainError):
        lifespan_sweep(linear, grid, det, [1.0, 0.5, 0.25, 0.125])
    # p = 3 is the conjectured critical exponent at n = 1, ell = 1
    with pytest.raises(DomainError):
        lifespan_sweep(_nl_params(p=3.0), grid, det,
                       [1.0, 0.5, 0.25, 0.125])


def test_critical_sweep_validation():
    from tricomi_lab.blowup_lab import critical_sweep
    grid = GridConfig(dx=0.05, horizon=2.0)
    with pytest.raises(DomainError):
        critical_sweep(_nl_params(p=2.5), grid, DetectionConfig(),
                       [1.0, 0.5, 0.25, 0.125])
    with pytest.raises(DomainError):
        critical_sweep(_nl_params(p=3.0), grid, DetectionConfig(),
                       [1.0, 0.5])
