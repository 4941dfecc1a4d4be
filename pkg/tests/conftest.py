"""Shared fixtures: canonical data profiles and model setups."""

import pytest

from tricomi_lab.fd_solver import DetectionConfig, GridConfig, ModelParams
from tricomi_lab.profiles import DataProfile


@pytest.fixture
def bump_pair():
    """The compact bump pair used across oracle and solver tests."""
    u0 = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=1.0)
    u1 = DataProfile(kind="compact_bump", support_radius=0.6, amplitude=0.5)
    return u0, u1


@pytest.fixture
def linear_params(bump_pair):
    u0, u1 = bump_pair
    return ModelParams(n=1, ell=1.0, R=1.0, eps=0.1, u0=u0, u1=u1,
                       linear=True)


@pytest.fixture
def nonlinear_params(bump_pair):
    u0, u1 = bump_pair
    return ModelParams(n=1, ell=1.0, R=1.0, eps=1.5, u0=u0, u1=u1, p=2.0)


@pytest.fixture
def coarse_grid():
    return GridConfig(dx=0.02, horizon=2.0, store_slices=80)


@pytest.fixture
def detection():
    return DetectionConfig()
