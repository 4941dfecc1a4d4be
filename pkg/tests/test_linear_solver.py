"""Solution formula evaluation: exact identities and frozen oracles."""

import math

import numpy as np
import pytest

from tricomi_lab.errors import DomainError, QuadratureError
from tricomi_lab.kernel import phi
from tricomi_lab.linear_solver import (duhamel_value,
                                       duhamel_value_with_error,
                                       homogeneous_value,
                                       homogeneous_value_with_error,
                                       linear_solution_slice)
from tricomi_lab.profiles import DataProfile

_SPOTS = [(0.5, 0.7, 0.0), (1.0, 1.3, 0.4), (2.0, 0.7, -0.2),
          (3.5, 1.1, 0.3)]

# frozen from mpmath 1.3 direct quadrature at 30 dps: bump pair
# u0 = compact_bump(R=0.6, A=1), u1 = compact_bump(R=0.6, A=0.5), eps=0.1
_HOMOGENEOUS_ORACLE = [
    (1.0, 1.3, 0.2, 0.028233988180553467),
    (2.5, 0.9, -0.35, 0.043678866785275222),
    (0.4, 2.1, 0.55, 0.014812146465196102),
]


def _plateau(c, radius=40.0):
    return DataProfile(kind="constant_on_interval", support_radius=radius,
                       amplitude=c)


def test_constant_data_is_preserved():
    """With u0 = c on a wide plateau the formula returns eps*c exactly:
    the data kernel has unit mass."""
    zero = DataProfile.zero()
    for ell, t, x in _SPOTS:
        got = homogeneous_value(_plateau(3.0), zero, 0.25, t, x, ell)
        assert got == pytest.approx(0.75, rel=1e-11)


def test_velocity_data_gives_linear_ramp():
    """With d_t u(0) = c the solution is eps*c*t: the velocity kernel
    integrates to t after the phi^(1-2g) rescaling."""
    zero = DataProfile.zero()
    for ell, t, x in _SPOTS:
        got = homogeneous_value(zero, _plateau(2.0), 0.5, t, x, ell)
        assert got == pytest.approx(t, rel=1e-11)


def test_combined_plateau_data():
    got = homogeneous_value(_plateau(1.0), _plateau(4.0), 0.5, 1.2, 0.1, 1.0)
    assert got == pytest.approx(0.5 * (1.0 + 4.0 * 1.2), rel=1e-11)


def test_homogeneous_frozen_oracle(bump_pair):
    u0, u1 = bump_pair
    for ell, t, x, expected in _HOMOGENEOUS_ORACLE:
        got = homogeneous_value(u0, u1, 0.1, t, x, ell, tol=1e-11)
        assert got == pytest.approx(expected, rel=5e-10)


def test_homogeneous_linearity_and_symmetry(bump_pair):
    u0, u1 = bump_pair
    v1 = homogeneous_value(u0, u1, 0.1, 0.9, 0.3, 1.0)
    v3 = homogeneous_value(u0, u1, 0.3, 0.9, 0.3, 1.0)
    assert v3 == pytest.approx(3.0 * v1, rel=1e-12)
    # even data: the solution is even in x
    left = homogeneous_value(u0, u1, 0.1, 0.9, -0.3, 1.0)
    assert left == pytest.approx(v1, rel=1e-10)


def test_homogeneous_vanishes_outside_cone(bump_pair):
    u0, u1 = bump_pair
    t, ell = 1.0, 1.0
    x = 0.6 + phi(ell, t) + 1e-6
    assert homogeneous_value(u0, u1, 0.1, t, x, ell) == 0.0


def test_homogeneous_error_estimate_is_honest(bump_pair):
    u0, u1 = bump_pair
    ell, t, x, expected = _HOMOGENEOUS_ORACLE[0]
    val, err = homogeneous_value_with_error(u0, u1, 0.1, t, x, ell)
    assert abs(val - expected) <= 10.0 * max(err, 1e-13)


def test_constant_source_gives_t_squared():
    """Zero data, source g = 2: the unique solution is t^2 for every ell,
    so the Duhamel integral must reproduce it pointwise."""

    def g(b, ys):
        return np.full_like(ys, 2.0)

    for ell, t, x in _SPOTS:
        assert duhamel_value(g, t, x, ell) == pytest.approx(t * t,
                                                            rel=1e-9)


def test_power_source_gives_power_solution():
    """Source (l+2)(l+1) b^l with zero data solves to t^(l+2)."""
    for ell, t, x in _SPOTS:
        coef = (ell + 2.0) * (ell + 1.0)

        def g(b, ys, coef=coef, ell=ell):
            return np.full_like(ys, coef * b ** ell)

        assert duhamel_value(g, t, x, ell) == pytest.approx(
            t ** (ell + 2.0), rel=1e-9)


def test_duhamel_frozen_oracle():
    def g(b, ys):
        return (1.0 + b) * np.cos(ys)

    got = duhamel_value(g, 1.0, 0.1, 1.0, tol=1e-11)
    assert got == pytest.approx(0.643023253499971, rel=1e-9)


def test_duhamel_unreachable_tolerance_degrades_gracefully():
    def g(b, ys):
        return (1.0 + b) * np.cos(ys)

    with pytest.raises(QuadratureError) as exc:
        duhamel_value_with_error(g, 0.6, 0.0, 1.0, tol=1e-17)
    assert exc.value.best_estimate == pytest.approx(
        duhamel_value(g, 0.6, 0.0, 1.0), rel=1e-8)
    assert exc.value.error_bound >= 0.0


def test_point_validation(bump_pair):
    u0, u1 = bump_pair
    with pytest.raises(DomainError):
        homogeneous_value(u0, u1, 0.1, 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        homogeneous_value(u0, u1, 0.1, 1.0, 0.0, 1.0, tol=0.0)
    with pytest.raises(DomainError):
        duhamel_value(lambda b, ys: ys, -1.0, 0.0, 1.0)


def test_slice_matches_pointwise(bump_pair, linear_params):
    times = np.array([0.4, 0.8])
    xs = np.linspace(-1.0, 1.0, 9)
    field = linear_solution_slice(linear_params, times, xs)
    for i, t in enumerate(times):
        for j, x in enumerate(xs):
            direct = homogeneous_value(linear_params.u0, linear_params.u1,
                                       linear_params.eps, float(t),
                                       float(x), linear_params.ell)
            assert field.slices[i][j] == pytest.approx(direct, rel=1e-12,
                                                       abs=1e-15)
    assert field.mode == "linear"
    assert field.dx == pytest.approx(xs[1] - xs[0])
    assert len(field.errors) == len(times)


def test_slice_threading_is_deterministic(bump_pair, linear_params):
    times = np.array([0.3, 0.6, 0.9, 1.2])
    xs = np.linspace(-1.5, 1.5, 13)
    one = linear_solution_slice(linear_params, times, xs, threads=1)
    two = linear_solution_slice(linear_params, times, xs, threads=3)
    for a, b in zip(one.slices, two.slices):
        assert np.array_equal(a, b)


def test_slice_with_source(linear_params):
    def g(b, ys):
        return np.full_like(ys, 2.0)

    times = np.array([0.5])
    xs = np.linspace(-0.5, 0.5, 5)
    field = linear_solution_slice(linear_params, times, xs, source=g)
    homog = homogeneous_value(linear_params.u0, linear_params.u1,
                              linear_params.eps, 0.5, 0.0, linear_params.ell)
    assert field.slices[0][2] == pytest.approx(homog + 0.25, rel=1e-8)


def test_slice_validation(linear_params):
    with pytest.raises(DomainError):
        linear_solution_slice(linear_params, [0.0, 0.5], [-1.0, 1.0])
    with pytest.raises(DomainError):
        linear_solution_slice(linear_params, [0.5], [1.0, -1.0])
