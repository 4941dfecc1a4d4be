"""Initial data profiles: evaluation, support, and L1 norms."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from tricomi_lab.errors import DomainError
from tricomi_lab.profiles import DataProfile

# frozen from mpmath 1.3 quadrature at 30 dps: smooth mollifier with
# R = 0.6, A = 1 integrated over R^n
_GAUSSIAN_L1_ORACLE = {1: 0.72414019346272571,
                       2: 0.45652037800593459,
                       3: 0.2589848439161502}


def test_compact_bump_values():
    f = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=2.0)
    assert f(0.0) == 2.0
    assert f(0.6) == 0.0
    assert f(-0.9) == 0.0
    assert f(0.3) == pytest.approx(2.0 * 0.75 ** 4, rel=1e-15)


def test_gaussian_bump_values():
    f = DataProfile(kind="gaussian_bump", support_radius=1.0, amplitude=3.0)
    assert f(0.0) == pytest.approx(3.0, rel=1e-15)
    assert f(1.0) == 0.0
    assert f(0.5) == pytest.approx(3.0 * math.exp(1.0 - 1.0 / 0.75),
                                   rel=1e-14)


def test_constant_on_interval_values():
    f = DataProfile(kind="constant_on_interval", support_radius=0.25,
                    amplitude=-1.5, center=1.0)
    assert f(1.0) == -1.5
    assert f(1.25) == -1.5
    assert f(1.26) == 0.0
    assert f(0.0) == 0.0


def test_scalar_and_vector_calls_agree():
    f = DataProfile(kind="compact_bump", support_radius=0.6)
    xs = np.linspace(-1.0, 1.0, 17)
    arr = f(xs)
    assert isinstance(arr, np.ndarray)
    for x, v in zip(xs, arr):
        assert f(float(x)) == v


@given(kind=st.sampled_from(("gaussian_bump", "compact_bump",
                             "constant_on_interval")),
       x=st.floats(min_value=1.0001, max_value=100.0),
       sign=st.sampled_from((-1.0, 1.0)))
def test_support_containment(kind, x, sign):
    f = DataProfile(kind=kind, support_radius=1.0, amplitude=2.0)
    assert f(sign * x) == 0.0


def test_custom_sampled_reproduces_nodes():
    xs = np.linspace(-0.5, 0.5, 9)
    ys = np.sin(3.0 * xs) + 0.2
    f = DataProfile(kind="custom_sampled", support_radius=0.5,
                    samples_x=xs, samples_y=ys)
    assert np.allclose(f(xs), ys, atol=1e-14)
    assert f(0.7) == 0.0


def test_custom_sampled_amplitude_scales():
    xs = np.linspace(-1.0, 1.0, 5)
    ys = np.array([0.0, 1.0, 2.0, 1.0, 0.0])
    base = DataProfile(kind="custom_sampled", support_radius=1.0,
                       samples_x=xs, samples_y=ys)
    doubled = DataProfile(kind="custom_sampled", support_radius=1.0,
                          amplitude=2.0, samples_x=xs, samples_y=ys)
    grid = np.linspace(-1.0, 1.0, 33)
    assert np.allclose(doubled(grid), 2.0 * base(grid), rtol=1e-14)


def test_compact_bump_l1_line_is_rational():
    # power 4: integral of (1-s^2)^4 over [-1, 1] is 256/315
    f = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=1.0)
    assert f.l1_norm(1) == pytest.approx(0.6 * 256.0 / 315.0, rel=1e-14)


def test_compact_bump_l1_radial_against_quadrature():
    f = DataProfile(kind="compact_bump", support_radius=0.8, amplitude=1.3)
    for n in (2, 3, 4):
        omega = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
        ref, err = quad(lambda r: 1.3 * (1.0 - (r / 0.8) ** 2) ** 4
                        * r ** (n - 1), 0.0, 0.8)
        assert f.l1_norm(n) == pytest.approx(omega * ref, rel=1e-12)


def test_gaussian_l1_frozen_oracle():
    f = DataProfile(kind="gaussian_bump", support_radius=0.6, amplitude=1.0)
    for n, expected in _GAUSSIAN_L1_ORACLE.items():
        assert f.l1_norm(n) == pytest.approx(expected, rel=1e-12)


def test_plateau_l1():
    f = DataProfile(kind="constant_on_interval", support_radius=0.5,
                    amplitude=3.0)
    assert f.l1_norm(1) == pytest.approx(3.0, rel=1e-15)
    assert f.l1_norm(2) == pytest.approx(3.0 * math.pi * 0.25, rel=1e-14)


def test_l1_uses_absolute_value():
    f = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=-1.0)
    g = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=1.0)
    assert f.l1_norm(1) == g.l1_norm(1)


def test_zero_profile():
    z = DataProfile.zero(support_radius=0.4)
    assert z.is_zero
    assert z(0.0) == 0.0
    assert z.l1_norm(1) == 0.0
    assert not DataProfile(kind="compact_bump", support_radius=1.0).is_zero


def test_custom_sampled_zero_detection():
    xs = np.array([-1.0, 0.0, 1.0])
    f = DataProfile(kind="custom_sampled", support_radius=1.0,
                    samples_x=xs, samples_y=np.zeros(3))
    assert f.is_zero


def test_validation_errors():
    with pytest.raises(DomainError):
        DataProfile(kind="lump", support_radius=1.0)
    with pytest.raises(DomainError):
        DataProfile(kind="compact_bump", support_radius=0.0)
    with pytest.raises(DomainError):
        DataProfile(kind="compact_bump", support_radius=1.0, power=1)
    with pytest.raises(DomainError):
        DataProfile(kind="compact_bump", support_radius=1.0,
                    amplitude=float("inf"))
    with pytest.raises(DomainError):
        DataProfile(kind="custom_sampled", support_radius=1.0)
    with pytest.raises(DomainError):
        DataProfile(kind="custom_sampled", support_radius=1.0,
                    samples_x=np.array([0.0, 1.0, 1.0]),
                    samples_y=np.array([1.0, 2.0, 3.0]))
    with pytest.raises(DomainError):
        DataProfile(kind="custom_sampled", support_radius=1.0,
                    samples_x=np.array([0.0, 1.0]),
                    samples_y=np.array([1.0]))
    with pytest.raises(DomainError):
        f = DataProfile(kind="compact_bump", support_radius=1.0)
        f.l1_norm(0)
