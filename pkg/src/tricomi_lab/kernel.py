"""Light-cone geometry and the explicit kernel of the 1-d solution formula.

The degenerate operator d_tt - t^(2l) d_xx propagates signals with speed
t^l, so the distance covered from time b to time t is

    phi(t) - phi(b),   phi(tau) = tau^(l+1) / (l+1).

The inhomogeneous part of the solution formula integrates the source
against the kernel

    E(t, x; b, y) = ((phi(t)+phi(b))^2 - (y-x)^2)^(-gamma) F(gamma, gamma; 1; z),

    z = ((phi(t)-phi(b))^2 - (y-x)^2) / ((phi(t)+phi(b))^2 - (y-x)^2),

with gamma = l/(2(l+1)).  Inside the dependence region z lies in [0, 1];
the hypergeometric factor is >= 1 there, which is what makes E bounded
below by its algebraic prefactor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .special_functions import gamma_fn, gauss_limit, hyp2f1_diag_conj

_BOUNDARY_SLACK = 1e-12  # relative tolerance admitting points on the cone


def _check_ell(ell: float) -> float:
    ell = float(ell)
    if not (math.isfinite(ell) and ell > 0.0):
        raise DomainError(f"ell must be a positive real, got {ell}")
    return ell


def phi(ell: float, tau):
    """Propagation distance phi(tau) = tau^(l+1)/(l+1); tau >= 0."""
    ell = _check_ell(ell)
    arr = np.asarray(tau, dtype=float)
    if np.any(arr < 0.0) or np.any(~np.isfinite(arr)):
        raise DomainError(f"phi: time must be finite and >= 0, got {tau}")
    out = arr ** (ell + 1.0) / (ell + 1.0)
    return float(out) if arr.ndim == 0 else out


def phi_inverse(ell: float, s):
    """Inverse of phi: time needed to cover distance s >= 0."""
    ell = _check_ell(ell)
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0.0) or np.any(~np.isfinite(arr)):
        raise DomainError(f"phi_inverse: distance must be finite and >= 0, got {s}")
    out = ((ell + 1.0) * arr) ** (1.0 / (ell + 1.0))
    return float(out) if arr.ndim == 0 else out


@dataclass(frozen=True)
class KernelConstants:
    """Closed-form constants of the 1-d solution formula.

    gamma   = l / (2(l+1))
    a_ell   = 2^(1-2g) gamma(2g) / gamma(g)^2        (u(0) data term)
    b_ell   = 2^(2g-1) (l+1)^(1-2g) gamma(2-2g) / gamma(1-g)^2   (d_t u(0) term)
    c_ell   = 2^(2g-1) (l+1)^(-2g)                   (source term)
    mu_ell  = l / (l+1) = 2 gamma                    (damping exponent)
    c_ell_p = (l+1)^(mu (p-2))  when p is given      (nonlinearity factor
              after transforming to the constant-speed form)
    """

    ell: float
    gamma: float
    a_ell: float
    b_ell: float
    c_ell: float
    mu_ell: float
    p: float | None = None
    c_ell_p: float | None = None


def constants(ell: float, p: float | None = None) -> KernelConstants:
    """Evaluate the kernel constants for a given ell (and optionally p)."""
    ell = _check_ell(ell)
    g = ell / (2.0 * (ell + 1.0))
    a_ell = 2.0 ** (1.0 - 2.0 * g) * gamma_fn(2.0 * g) / gamma_fn(g) ** 2
    b_ell = (
        2.0 ** (2.0 * g - 1.0)
        * (ell + 1.0) ** (1.0 - 2.0 * g)
        * gamma_fn(2.0 - 2.0 * g)
        / gamma_fn(1.0 - g) ** 2
    )
    c_ell = 2.0 ** (2.0 * g - 1.0) * (ell + 1.0) ** (-2.0 * g)
    mu = ell / (ell + 1.0)
    c_ell_p = None
    if p is not None:
        p = float(p)
        if not (math.isfinite(p) and p > 1.0):
            raise DomainError(f"constants: p must be > 1, got {p}")
        c_ell_p = (ell + 1.0) ** (mu * (p - 2.0))
    return KernelConstants(
        ell=ell, gamma=g, a_ell=a_ell, b_ell=b_ell, c_ell=c_ell, mu_ell=mu,
        p=p, c_ell_p=c_ell_p,
    )


def in_light_cone(t: float, x_norm: float, R: float, ell: float) -> bool:
    """Whether |x| <= R + phi(t): the support bound for data in B_R."""
    if x_norm < 0.0 or R <= 0.0 or t < 0.0:
        raise DomainError(
            f"in_light_cone: need x_norm >= 0, R > 0, t >= 0, got "
            f"x_norm={x_norm} R={R} t={t}"
        )
    return x_norm <= R + phi(ell, t)


def kernel_E(t: float, x: float, b: float, y: float, ell: float) -> float:
    """Source kernel E(t, x; b, y) of the 1-d solution formula.

    Defined for 0 <= b <= t and |y - x| <= phi(t) - phi(b) (the backward
    dependence region).  On the slice b = 0 the ratio z degenerates to 1
    and the hypergeometric factor is replaced by its finite limit; the
    corner t = b = 0, y = x has no meaningful value and raises.
    """
    ell = _check_ell(ell)
    for name, v in (("t", t), ("b", b)):
        if not (math.isfinite(v) and v >= 0.0):
            raise DomainError(f"kernel_E: {name} must be finite and >= 0, got {v}")
    if b > t:
        raise DomainError(f"kernel_E: need b <= t, got b={b} t={t}")
    pt = phi(ell, t)
    pb = phi(ell, b)
    d = abs(y - x)
    reach = pt - pb
    if d > reach * (1.0 + _BOUNDARY_SLACK) + _BOUNDARY_SLACK * max(pt, 1.0):
        raise DomainError(
            f"kernel_E: point (b={b}, y={y}) outside the dependence region "
            f"of (t={t}, x={x}); |y-x|={d} > phi(t)-phi(b)={reach}"
        )
    d = min(d, reach)  # snap points that passed the slack onto the cone
    g = ell / (2.0 * (ell + 1.0))
    denom = (pt + pb) ** 2 - d * d
    if denom <= 0.0:
        if pt == 0.0 and d == 0.0:
            raise DomainError("kernel_E: degenerate corner t = b = 0, y = x")
        # b = 0 with |y-x| = phi(t): the prefactor diverges (integrably).
        return math.inf
    # 1 - z = 4 phi(t) phi(b) / denom exactly; evaluating the
    # hypergeometric factor through this conjugate form keeps the
    # connection branch accurate when z is within rounding of 1
    w = min(max(4.0 * pt * pb / denom, 0.0), 1.0)
    pref = denom ** (-g)
    if w <= 0.0:
        return pref * gauss_limit(g)
    return pref * hyp2f1_diag_conj(g, w)


def kernel_E_array(t: float, x: float, b: float, ys: np.ndarray, ell: float,
                   g: float) -> np.ndarray:
    """Vectorized kernel over source positions ``ys`` at fixed (t, x, b).

    Used by the Duhamel quadrature, which guarantees its nodes lie strictly
    inside the dependence region; no boundary diagnostics here.
    """
    pt = phi(ell, t)
    pb = phi(ell, b)
    d2 = (np.asarray(ys, dtype=float) - x) ** 2
    denom = (pt + pb) ** 2 - d2
    if pb > 0.0:
        # for admissible points denom >= 4 pt pb exactly; rounding in the
        # caller's node positions must not push it below (or negative)
        np.maximum(denom, 4.0 * pt * pb, out=denom)
    w = 4.0 * pt * pb / denom
    np.clip(w, 0.0, 1.0, out=w)
    return denom ** (-g) * hyp2f1_diag_conj(g, w)
