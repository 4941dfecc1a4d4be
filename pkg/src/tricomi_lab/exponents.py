"""Exponent algebra for the semilinear degenerate wave equation.

For the operator  d_tt - t^(2l) Laplace  in n space dimensions with the
derivative nonlinearity |d_t u|^p, the relevant thresholds all depend on
the product (l+1) n:

* Glassey-type exponent      p_gla(m) = (m+1)/(m-1),
* quasi-homogeneous dimension  Q = (l+1) n + 1, with the identity
  p_gla((l+1) n) = Q/(Q-2),
* generalized Strauss exponent:  greatest root of
  ((l+1)n - 1) p^2 - ((l+1)n + 1 - 2l) p - 2(l+1) = 0,
  reducing at l = 0 to the classical (n-1) p^2 - (n+1) p - 2 = 0.

``lifespan_exponent`` encodes the proven upper bounds on the maximal
existence time: algebraic in eps below the Glassey threshold and
exponential at it.  The threshold is only conjectured to be critical
(no blow-up result above it is known), which is why user-facing labels
say "conjectured critical".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

_CRITICAL_REL_TOL = 1e-12


@dataclass(frozen=True)
class ExponentContext:
    """Problem parameters entering the exponent formulas.

    ``ell`` must be positive; the classical wave case ell = 0 is accepted
    only when ``allow_classical`` is set, so that accidental degenerate
    input is caught early.  ``p`` is optional and only required by the
    operations that depend on the nonlinearity.
    """

    n: int
    ell: float
    p: float | None = None
    allow_classical: bool = False

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"ExponentContext: n must be an integer >= 1, got {self.n}")
        if not math.isfinite(self.ell):
            raise DomainError(f"ExponentContext: ell must be finite, got {self.ell}")
        if self.ell < 0.0 or (self.ell == 0.0 and not self.allow_classical):
            raise DomainError(
                f"ExponentContext: ell must be > 0 (or ell = 0 with "
                f"allow_classical=True), got {self.ell}"
            )
        if self.p is not None and not (math.isfinite(self.p) and self.p > 1.0):
            raise DomainError(f"ExponentContext: p must be > 1, got {self.p}")

    @property
    def gamma(self) -> float:
        """Kernel exponent l / (2 (l+1)), in [0, 1/2)."""
        return self.ell / (2.0 * (self.ell + 1.0))

    @property
    def m(self) -> float:
        """Effective spatial dimension (l+1) n."""
        return (self.ell + 1.0) * self.n

    def require_p(self) -> float:
        if self.p is None:
            raise DomainError("ExponentContext: this operation requires p")
        return self.p


@dataclass(frozen=True)
class LifespanLaw:
    """Upper bound on the lifespan T(eps) as eps -> 0.

    kind = "subcritical":  T <= C eps^slope  with slope < 0.
    kind = "critical":     log T <= C eps^(-rate)  with rate = p - 1.
    """

    kind: str
    slope: float | None = None
    rate: float | None = None

    @classmethod
    def subcritical(cls, slope: float) -> "LifespanLaw":
        return cls(kind="subcritical", slope=slope)

    @classmethod
    def critical(cls, rate: float) -> "LifespanLaw":
        return cls(kind="critical", rate=rate)


def glassey(m: float) -> float:
    """Glassey-type exponent (m+1)/(m-1) for effective dimension m > 1."""
    if not (math.isfinite(m) and m > 1.0):
        raise DomainError(f"glassey: effective dimension must exceed 1, got {m}")
    return (m + 1.0) / (m - 1.0)


def quasi_homogeneous_dimension(ctx: ExponentContext) -> float:
    """Q = (l+1) n + 1, the scaling dimension of the operator."""
    return ctx.m + 1.0


def conjectured_critical_p(ctx: ExponentContext) -> float:
    """The conjectured critical exponent p_gla((l+1) n) = Q / (Q - 2)."""
    return glassey(ctx.m)


def sobolev_exponent(m: float) -> float:
    """Energy-critical Sobolev exponent (m+2)/(m-2); needs m > 2."""
    if not (math.isfinite(m) and m > 2.0):
        raise DomainError(f"sobolev_exponent: undefined for dimension {m} <= 2")
    return (m + 2.0) / (m - 2.0)


def generalized_strauss(ctx: ExponentContext) -> float:
    """Greatest root of ((l+1)n - 1) p^2 - ((l+1)n + 1 - 2l) p - 2(l+1) = 0.

    At l = 0 this is the classical Strauss exponent; the leading
    coefficient vanishes when (l+1) n = 1 (only l = 0, n = 1), which is
    rejected.
    """
    lead = ctx.m - 1.0
    if lead <= 0.0:
        raise DomainError(
            f"generalized_strauss: quadratic degenerates for (l+1)n = {ctx.m}"
        )
    mid = ctx.m + 1.0 - 2.0 * ctx.ell
    const = 2.0 * (ctx.ell + 1.0)
    disc = mid * mid + 4.0 * lead * const
    return (mid + math.sqrt(disc)) / (2.0 * lead)


def critical_condition_residual(ctx: ExponentContext) -> float:
    """1 + the exponent -(n-1)(p-1)/2 - gamma (p+1) of the comparison ODE.

    Zero exactly when the comparison ODE's decay exponent equals -1, i.e.
    when p = p_gla((l+1) n); positive below the threshold.
    """
    p = ctx.require_p()
    lhs = -((ctx.n - 1.0) / 2.0) * (p - 1.0) - ctx.gamma * (p + 1.0)
    return lhs + 1.0


def scaling_identity_residual(ctx: ExponentContext) -> float:
    """Residual of the exponent identity used to rewrite the blow-up bound:

    1 - 2 gamma - (n + 2 gamma - 1)(p-1)/2
        = (1/(l+1)) (1 - ((l+1)n - 1)(p-1)/2).

    Identically zero; exposed so tests can pin the algebra down.
    """
    p = ctx.require_p()
    g = ctx.gamma
    lhs = 1.0 - 2.0 * g - (ctx.n + 2.0 * g - 1.0) * (p - 1.0) / 2.0
    rhs = (1.0 - (ctx.m - 1.0) * (p - 1.0) / 2.0) / (ctx.ell + 1.0)
    return lhs - rhs


def lifespan_exponent(ctx: ExponentContext) -> LifespanLaw:
    """Lifespan law for 1 < p <= p_gla((l+1) n).

    Below the threshold:  T <= C eps^(-1/(1/(p-1) - ((l+1)n - 1)/2)),
    at the threshold:     log T <= C eps^(-(p-1)).
    p above the threshold has no proven bound and raises DomainError.
    """
    p = ctx.require_p()
    p_thr = conjectured_critical_p(ctx)
    if abs(p - p_thr) <= _CRITICAL_REL_TOL * max(1.0, p_thr):
        return LifespanLaw.critical(rate=p - 1.0)
    if p > p_thr:
        raise DomainError(
            f"lifespan_exponent: p={p} exceeds the conjectured critical "
            f"exponent {p_thr}; no bound is available there"
        )
    denom = 1.0 / (p - 1.0) - (ctx.m - 1.0) / 2.0
    # denom > 0 strictly below the threshold.
    return LifespanLaw.subcritical(slope=-1.0 / denom)
