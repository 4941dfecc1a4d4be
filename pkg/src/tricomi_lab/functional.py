"""Characteristic-line functional diagnostics for blow-up runs.

The blow-up machinery watches the transverse average of the solution,

    UU(t, z) = integral of u(t, z, w) over the (n-1) transverse directions
               (u itself when n = 1),

along the outgoing characteristic phi(t) - z = R, through the weighted
trace

    U(z) = (R + z)^gamma UU(phi_inverse(z + R), z),   z >= R.

With nonnegative data, U admits an explicit lower bound by the data term

    U(z) >= K eps |u0 + u1|_L1,
    K = K(R, l) = min{2^(2(gamma-1)) a_l R^(gamma-1), 2^(-2 gamma) b_l R^(-gamma)},

plus a nonnegative memory integral of |d_t u|^p whose multiplicative
constant is not explicit; only the K part is therefore checked
quantitatively here, the integral term enters through monotonicity of
the margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fd_solver import ModelParams, transverse_integral
from .fields import SpaceTimeField
from .kernel import constants as kernel_constants, phi_inverse
from .special_functions import gauss_legendre_rule, gamma_fn


@dataclass(frozen=True)
class CharacteristicTrace:
    """Weighted trace U sampled along the characteristic phi(t) - z = R.

    ``j_lower`` holds the data-term lower bound in the unweighted scale,
    K eps |u0+u1|_L1 (R+z)^(-gamma); multiplying by (R+z)^gamma gives the
    z-independent bound that ``check_data_term_bound`` asserts against U.
    """

    zs: np.ndarray
    times: np.ndarray
    U: np.ndarray
    j_lower: np.ndarray
    R: float
    ell: float
    gamma: float

    def __post_init__(self):
        if not (len(self.zs) == len(self.times) == len(self.U) == len(self.j_lower)):
            raise DomainError("CharacteristicTrace: field lengths differ")


@dataclass(frozen=True)
class DataTermReport:
    """Outcome of the explicit-constant bound check U(z) >= K eps |data|_L1."""

    bound: float
    margins: np.ndarray
    worst_z: float
    worst_margin: float
    tol: float
    passed: bool


def K_constant(params: ModelParams) -> float:
    """min{2^(2(gamma-1)) a_l R^(gamma-1), 2^(-2 gamma) b_l R^(-gamma)}.

    The two branches cross in R: the first dominates for small R, the
    second for large R; both are positive for every l > 0, R > 0.
    """
    kc = kernel_constants(params.ell)
    g = kc.gamma
    first = 2.0 ** (2.0 * (g - 1.0)) * kc.a_ell * params.R ** (g - 1.0)
    second = 2.0 ** (-2.0 * g) * kc.b_ell * params.R ** (-g)
    return min(first, second)


def _is_nonnegative(profile) -> bool:
    if profile.kind == "custom_sampled":
        return profile.amplitude >= 0.0 and bool(np.all(profile.samples_y >= 0.0))
    return profile.amplitude >= 0.0


def l1_data_norm(params: ModelParams) -> float:
    """|u0 + u1|_L1 over R^n for the given data profiles.

    The profiles are combined pointwise before taking the absolute value,
    so sign cancellations are honored (for the nonnegative data used in
    blow-up runs this equals the sum of the individual norms).
    """
    u0, u1 = params.u0, params.u1
    if u0.is_zero and u1.is_zero:
        return 0.0
    if _is_nonnegative(u0) and _is_nonnegative(u1):
        # no cancellation possible; the per-profile closed forms are exact
        # even for the discontinuous plateau profile
        return u0.l1_norm(params.n) + u1.l1_norm(params.n)
    reach = max(u0.support_radius + abs(u0.center),
                u1.support_radius + abs(u1.center))
    rule = gauss_legendre_rule(200)
    if params.n == 1:
        xs = reach * rule.nodes
        vals = np.abs(u0(xs) + u1(xs))
        return float(np.dot(rule.weights, vals) * reach)
    rs = 0.5 * (rule.nodes + 1.0) * reach
    vals = np.abs(u0(rs) + u1(rs)) * rs ** (params.n - 1)
    omega = 2.0 * math.pi ** (params.n / 2.0) / gamma_fn(params.n / 2.0)
    return float(omega * np.dot(rule.weights, vals) * reach / 2.0)


def _lagrange_time_weights(times: np.ndarray, t: float) -> tuple[int, np.ndarray]:
    """Index of the 4-point stencil around t and its Lagrange weights."""
    i = int(np.searchsorted(times, t))
    i0 = min(max(i - 2, 0), len(times) - 4)
    ts = times[i0:i0 + 4]
    w = np.ones(4)
    for a in range(4):
        for b in range(4):
            if a != b:
                w[a] *= (t - ts[b]) / (ts[a] - ts[b])
    return i0, w


def evaluate_U(field: SpaceTimeField, params: ModelParams,
               zs: np.ndarray) -> CharacteristicTrace:
    """Sample U(z) = (R+z)^gamma UU(t(z), z) with t(z) = phi_inverse(z + R).

    Values between stored slices are interpolated cubically in time
    (4-point Lagrange on the possibly non-uniform stamps); the transverse
    average uses the stored spatial profile directly.
    """
    zs = np.asarray(zs, dtype=float)
    if zs.ndim != 1 or len(zs) == 0:
        raise DomainError("evaluate_U: zs must be a non-empty 1-d array")
    if np.any(np.diff(zs) <= 0.0):
        raise DomainError("evaluate_U: zs must be strictly increasing")
    if zs[0] < params.R:
        raise DomainError(
            f"evaluate_U: the trace lives on z >= R = {params.R}, got z={zs[0]}"
        )
    if len(field.times) < 4:
        raise DomainError("evaluate_U: need at least 4 stored slices")
    if field.mode == "edp":
        raise DomainError("evaluate_U: trace expects a physical-time field")
    x_hi = float(field.xs[-1])
    R, ell = params.R, params.ell
    g = ell / (2.0 * (ell + 1.0))
    kbound = K_constant(params) * params.eps * l1_data_norm(params)
    times = np.empty_like(zs)
    U = np.empty_like(zs)
    jlow = np.empty_like(zs)
    for k, z in enumerate(zs):
        t = float(phi_inverse(ell, z + R))
        if not (field.times[0] <= t <= field.times[-1] * (1.0 + 1e-12)):
            raise DomainError(
                f"evaluate_U: t(z)={t} for z={z} outside the stored range "
                f"[{field.times[0]}, {field.times[-1]}]"
            )
        if z > x_hi - 2.0 * field.dx:
            raise DomainError(f"evaluate_U: z={z} beyond the spatial grid")
        i0, w = _lagrange_time_weights(field.times, t)
        uu = 0.0
        for a in range(4):
            uu += w[a] * transverse_integral(field.xs, field.slices[i0 + a],
                                             z, params.n)
        times[k] = t
        U[k] = (R + z) ** g * uu
        jlow[k] = kbound * (R + z) ** (-g)
    return CharacteristicTrace(zs=zs, times=times, U=U, j_lower=jlow,
                               R=R, ell=ell, gamma=g)


def check_data_term_bound(trace: CharacteristicTrace, params: ModelParams,
                          tol: float = 0.0) -> DataTermReport:
    """Check U(z) >= K eps |u0+u1|_L1 across the trace.

    ``tol`` is the grid-error allowance: the check passes when every
    margin U(z) - bound stays above -tol * max(bound, 1).  The integral
    term of the full inequality is nonnegative, so the bound is valid for
    linear and nonlinear runs alike (with nonnegative data).
    """
    bound = K_constant(params) * params.eps * l1_data_norm(params)
    margins = trace.U - bound
    worst = int(np.argmin(margins))
    slack = tol * max(bound, 1.0)
    return DataTermReport(
        bound=bound,
        margins=margins,
        worst_z=float(trace.zs[worst]),
        worst_margin=float(margins[worst]),
        tol=tol,
        passed=bool(np.all(margins >= -slack)),
    )
