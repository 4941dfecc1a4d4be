"""Weighted characteristic trace and the explicit-constant lower bound."""

import numpy as np
import pytest

from tricomi_lab.errors import DomainError
from tricomi_lab.fd_solver import GridConfig, ModelParams, run
from tricomi_lab.functional import (CharacteristicTrace, K_constant,
                                    check_data_term_bound, evaluate_U,
                                    l1_data_norm)
from tricomi_lab.kernel import constants, phi_inverse
from tricomi_lab.linear_solver import homogeneous_value
from tricomi_lab.profiles import DataProfile


def _params(amp1=0.5, linear=True, n=1, geometry="line"):
    u0 = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=1.0)
    u1 = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=amp1)
    return ModelParams(n=n, ell=1.0, R=1.0, eps=0.1, u0=u0, u1=u1,
                       linear=linear, geometry=geometry)


@pytest.fixture(scope="module")
def traced_run():
    params = _params()
    field, verdict = run(params, GridConfig(dx=0.04, horizon=2.4,
                                            store_slices=60))
    assert verdict.status == "completed"
    zs = np.linspace(1.0, 1.6, 13)
    return params, field, evaluate_U(field, params, zs)


def test_k_constant_frozen_oracle():
    # frozen from mpmath 1.3 at 50 dps: n=1, ell=1, R=1
    assert K_constant(_params()) == pytest.approx(0.06741907514854746,
                                                  rel=1e-14)


def test_k_constant_is_branch_minimum():
    for R in (0.25, 1.0, 4.0):
        u0 = DataProfile(kind="compact_bump", support_radius=0.2)
        p = ModelParams(n=1, ell=2.0, R=R, eps=0.1, u0=u0, u1=u0,
                        linear=True)
        k = constants(2.0)
        first = 2.0 ** (2.0 * (k.gamma - 1.0)) * k.a_ell * R ** (k.gamma - 1.0)
        second = 2.0 ** (-2.0 * k.gamma) * k.b_ell * R ** (-k.gamma)
        assert K_constant(p) == pytest.approx(min(first, second), rel=1e-14)
        assert K_constant(p) > 0.0


def test_l1_data_norm_nonnegative_pair():
    # sum of the closed forms: (1 + 0.5) * 0.6 * 256/315
    assert l1_data_norm(_params()) == pytest.approx(1.5 * 0.6 * 256 / 315,
                                                    rel=1e-14)


def test_l1_data_norm_cancellation():
    # u1 = -0.5 u0: |u0 + u1| = 0.5 u0 pointwise
    assert l1_data_norm(_params(amp1=-0.5)) == pytest.approx(
        0.5 * 0.6 * 256 / 315, rel=1e-11)


def test_l1_data_norm_zero():
    u0 = DataProfile.zero(0.5)
    p = ModelParams(n=1, ell=1.0, R=1.0, eps=0.1, u0=u0, u1=u0, linear=True)
    assert l1_data_norm(p) == 0.0


def test_l1_data_norm_radial():
    p = _params(n=3, geometry="radial")
    expected = p.u0.l1_norm(3) + p.u1.l1_norm(3)
    assert l1_data_norm(p) == pytest.approx(expected, rel=1e-14)


def test_trace_times_follow_characteristic(traced_run):
    params, _, trace = traced_run
    for z, t in zip(trace.zs, trace.times):
        assert t == pytest.approx(phi_inverse(params.ell, z + params.R),
                                  rel=1e-13)
    assert trace.gamma == pytest.approx(0.25)


def test_trace_matches_formula(traced_run):
    params, _, trace = traced_run
    for z, t, u_weighted in zip(trace.zs, trace.times, trace.U):
        exact = homogeneous_value(params.u0, params.u1, params.eps,
                                  float(t), float(z), params.ell)
        expected = (params.R + z) ** trace.gamma * exact
        assert u_weighted == pytest.approx(expected, rel=5e-3)


def test_trace_lower_bound_scaling(traced_run):
    params, _, trace = traced_run
    bound = K_constant(params) * params.eps * l1_data_norm(params)
    for z, jl in zip(trace.zs, trace.j_lower):
        assert jl == pytest.approx(bound * (params.R + z) ** -trace.gamma,
                                   rel=1e-13)


def test_bound_check_passes_on_real_run(traced_run):
    params, _, trace = traced_run
    report = check_data_term_bound(trace, params, tol=1e-5)
    assert report.passed
    assert report.worst_margin > 0.0
    assert report.bound == pytest.approx(
        K_constant(params) * params.eps * l1_data_norm(params), rel=1e-14)


def test_bound_check_synthetic_failure():
    params = _params()
    bound = K_constant(params) * params.eps * l1_data_norm(params)
    zs = np.linspace(1.0, 2.0, 5)
    g = 0.25
    ok = CharacteristicTrace(
        zs=zs, times=zs, U=np.full(5, 1.1 * bound),
        j_lower=bound * (1.0 + zs) ** -g, R=1.0, ell=1.0, gamma=g)
    assert check_data_term_bound(ok, params).passed

    dipped = np.full(5, 1.1 * bound)
    dipped[3] = 0.9 * bound
    bad = CharacteristicTrace(
        zs=zs, times=zs, U=dipped,
        j_lower=bound * (1.0 + zs) ** -g, R=1.0, ell=1.0, gamma=g)
    report = check_data_term_bound(bad, params)
    assert not report.passed
    assert report.worst_z == zs[3]
    assert report.worst_margin == pytest.approx(-0.1 * bound, rel=1e-12)
    # a generous allowance turns the dip into a pass
    assert check_data_term_bound(bad, params,
                                 tol=0.2 * bound / max(bound, 1.0)).passed


def test_trace_validation(traced_run):
    params, field, _ = traced_run
    with pytest.raises(DomainError):
        evaluate_U(field, params, np.array([]))
    with pytest.raises(DomainError):
        evaluate_U(field, params, np.array([1.2, 1.1]))
    with pytest.raises(DomainError):
        evaluate_U(field, params, np.array([0.5]))  # below z = R
    with pytest.raises(DomainError):
        evaluate_U(field, params, np.array([50.0]))  # beyond stored range


def test_trace_rejects_edp_field():
    params = _params()
    efield, _ = run(ModelParams(n=1, ell=1.0, R=1.0, eps=0.1, u0=params.u0,
                                u1=params.u1, mode="edp", linear=True),
                    GridConfig(dx=0.05, horizon=2.4, store_slices=20))
    with pytest.raises(DomainError):
        evaluate_U(efield, params, np.array([1.0, 1.1]))


def test_trace_length_mismatch():
    with pytest.raises(DomainError):
        CharacteristicTrace(zs=np.arange(3.0), times=np.arange(3.0),
                            U=np.arange(2.0), j_lower=np.arange(3.0),
                            R=1.0, ell=1.0, gamma=0.25)
