"""Initial-data profiles with compact support.

All profiles vanish outside [-R, R] (R = ``support_radius``) so that the
finite-speed support bound |x| <= R + phi(t) applies verbatim.  Kinds:

* ``gaussian_bump``        smooth mollifier  A exp(1 - 1/(1 - (x/R)^2)),
                           infinitely differentiable, peak A at x = 0;
* ``compact_bump``         polynomial bump  A (1 - (x/R)^2)^k,
                           C^(k-1) across the support boundary;
* ``constant_on_interval`` plateau A on [center-R, center+R]; a test
                           harness profile, discontinuous at the edges;
* ``custom_sampled``       natural cubic spline through given samples,
                           clamped to zero outside [-R, R].

Profiles are used both on the line (argument x) and radially (argument
r >= 0 with the same formulas).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .special_functions import gamma_fn, gauss_legendre_rule

_KINDS = ("gaussian_bump", "compact_bump", "constant_on_interval", "custom_sampled")


def _natural_spline_coeffs(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Second derivatives of the natural cubic spline through (xs, ys)."""
    n = len(xs)
    if n < 3:
        return np.zeros(n)
    h = np.diff(xs)
    # Thomas algorithm on the standard tridiagonal system for y''.
    sub = h[:-1].copy()
    diag = 2.0 * (h[:-1] + h[1:])
    sup = h[1:].copy()
    rhs = 6.0 * ((ys[2:] - ys[1:-1]) / h[1:] - (ys[1:-1] - ys[:-2]) / h[:-1])
    m = n - 2
    for i in range(1, m):
        w = sub[i] / diag[i - 1]
        diag[i] -= w * sup[i - 1]
        rhs[i] -= w * rhs[i - 1]
    interior = np.zeros(m)
    interior[-1] = rhs[-1] / diag[-1]
    for i in range(m - 2, -1, -1):
        interior[i] = (rhs[i] - sup[i] * interior[i + 1]) / diag[i]
    out = np.zeros(n)
    out[1:-1] = interior
    return out


@dataclass(frozen=True)
class DataProfile:
    """Compactly supported data profile; callable and vectorized."""

    kind: str
    support_radius: float
    amplitude: float = 1.0
    power: int = 4
    center: float = 0.0
    samples_x: np.ndarray | None = field(default=None, repr=False)
    samples_y: np.ndarray | None = field(default=None, repr=False)
    _spline_m: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"DataProfile: unknown kind {self.kind!r}")
        if not (math.isfinite(self.support_radius) and self.support_radius > 0.0):
            raise DomainError(
                f"DataProfile: support_radius must be > 0, got {self.support_radius}"
            )
        if not math.isfinite(self.amplitude):
            raise DomainError("DataProfile: amplitude must be finite")
        if self.kind == "compact_bump" and self.power < 2:
            raise DomainError("DataProfile: compact_bump needs power >= 2")
        if self.kind == "constant_on_interval" and not math.isfinite(self.center):
            raise DomainError("DataProfile: center must be finite")
        if self.kind == "custom_sampled":
            if self.samples_x is None or self.samples_y is None:
                raise DomainError("DataProfile: custom_sampled needs samples")
            xs = np.asarray(self.samples_x, dtype=float)
            ys = np.asarray(self.samples_y, dtype=float)
            if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
                raise DomainError("DataProfile: samples must be two equal 1-d arrays")
            if np.any(np.diff(xs) <= 0.0):
                raise DomainError("DataProfile: sample abscissae must increase")
            object.__setattr__(self, "samples_x", xs)
            object.__setattr__(self, "samples_y", ys)
            object.__setattr__(self, "_spline_m", _natural_spline_coeffs(xs, ys))

    @classmethod
    def zero(cls, support_radius: float = 1.0) -> "DataProfile":
        return cls(kind="compact_bump", support_radius=support_radius, amplitude=0.0)

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = self._evaluate(arr)
        return float(out[0]) if scalar else out

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        R = self.support_radius
        A = self.amplitude
        if self.kind == "gaussian_bump":
            s2 = (x / R) ** 2
            inside = s2 < 1.0
            out = np.zeros_like(x)
            s2c = np.where(inside, s2, 0.0)
            out[inside] = (A * np.exp(1.0 - 1.0 / (1.0 - s2c)))[inside]
            return out
        if self.kind == "compact_bump":
            s2 = (x / R) ** 2
            base = np.clip(1.0 - s2, 0.0, None)
            return A * base ** self.power
        if self.kind == "constant_on_interval":
            out = np.zeros_like(x)
            out[np.abs(x - self.center) <= R] = A
            return out
        # custom_sampled: clamped natural spline
        xs, ys, m = self.samples_x, self.samples_y, self._spline_m
        out = np.zeros_like(x)
        live = (np.abs(x) <= R) & (x >= xs[0]) & (x <= xs[-1])
        if np.any(live):
            xv = x[live]
            idx = np.clip(np.searchsorted(xs, xv) - 1, 0, len(xs) - 2)
            h = xs[idx + 1] - xs[idx]
            a = (xs[idx + 1] - xv) / h
            b = (xv - xs[idx]) / h
            out[live] = (
                a * ys[idx]
                + b * ys[idx + 1]
                + ((a ** 3 - a) * m[idx] + (b ** 3 - b) * m[idx + 1]) * h * h / 6.0
            )
        return A * out

    def l1_norm(self, n: int = 1) -> float:
        """L1 norm over R^n of the radially extended profile.

        n = 1 integrates over the line; n >= 2 multiplies the radial
        integral int_0^R |f(r)| r^(n-1) dr by the sphere area
        2 pi^(n/2) / gamma(n/2).  Closed forms where available, a
        high-order fixed quadrature otherwise (profiles are smooth).
        """
        if n < 1:
            raise DomainError(f"l1_norm: n must be >= 1, got {n}")
        R, A = self.support_radius, abs(self.amplitude)
        if self.kind == "constant_on_interval":
            if n == 1:
                return A * 2.0 * R
            omega = 2.0 * math.pi ** (n / 2.0) / gamma_fn(n / 2.0)
            return A * omega * R ** n / n
        if self.kind == "compact_bump":
            k = self.power
            if n == 1:
                # int_{-R}^{R} (1-(x/R)^2)^k dx = R sqrt(pi) G(k+1)/G(k+3/2)
                return A * R * math.sqrt(math.pi) * gamma_fn(k + 1.0) / gamma_fn(k + 1.5)
            omega = 2.0 * math.pi ** (n / 2.0) / gamma_fn(n / 2.0)
            # int_0^1 s^(n-1) (1-s^2)^k ds = B(n/2, k+1)/2
            beta = gamma_fn(n / 2.0) * gamma_fn(k + 1.0) / gamma_fn(n / 2.0 + k + 1.0)
            return A * omega * R ** n * beta / 2.0
        # smooth mollifier and sampled profiles: fixed Gauss-Legendre panels
        rule = gauss_legendre_rule(200)
        if n == 1:
            half = 0.5 * (rule.nodes + 1.0) * (2.0 * R) - R
            vals = np.abs(self._evaluate(half))
            return float(np.dot(rule.weights, vals) * R)
        rs = 0.5 * (rule.nodes + 1.0) * R
        vals = np.abs(self._evaluate(rs)) * rs ** (n - 1)
        omega = 2.0 * math.pi ** (n / 2.0) / gamma_fn(n / 2.0)
        return float(omega * np.dot(rule.weights, vals) * R / 2.0)

    @property
    def is_zero(self) -> bool:
        if self.amplitude == 0.0:
            return True
        if self.kind == "custom_sampled":
            return bool(np.all(self.samples_y == 0.0))
        return False
