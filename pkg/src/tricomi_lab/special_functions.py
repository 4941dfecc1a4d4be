"""Gamma function, diagonal Gauss hypergeometric series, Gauss-Jacobi rules.

These are the three scalar primitives behind the explicit solution formula
for the degenerate wave operator:

* ``gamma_fn``        Euler gamma via a Lanczos approximation, reflection
                      formula for arguments left of 1/2.
* ``hyp2f1_diag``     F(g, g; 1; z) for g in (0, 1/2) and z in [0, 1].
                      Power series away from z = 1; close to z = 1 the
                      connection formula in w = 1 - z, whose leading
                      coefficient is the finite limit at z = 1.
* ``gauss_jacobi_rule``  nodes and weights for int_{-1}^{1} f(s)
                      (1-s)^alpha (1+s)^beta ds by the Golub-Welsch
                      eigenvalue method.

All functions are deterministic and accept either scalars or numpy arrays
where noted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

# Lanczos coefficients for g = 607/128, n = 15 (Godfrey's set).  Relative
# accuracy of the resulting gamma is ~1e-15 over the positive real axis.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEFFS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_SERIES_SWITCH = 0.75  # hand over to the connection formula above this z
_SERIES_MAX_TERMS = 600
_SERIES_STOP = 1e-18  # terminate once term/sum drops below this


def gamma_fn(x: float) -> float:
    """Euler gamma function for real ``x``.

    Poles at 0, -1, -2, ... raise :class:`DomainError`.  Arguments below
    1/2 go through the reflection formula gamma(x) gamma(1-x) = pi/sin(pi x),
    everything else through the Lanczos sum directly.
    """
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise DomainError(f"gamma_fn: argument must be finite, got {x}")
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma_fn: pole at non-positive integer {x}")
    if x < 0.5:
        # gamma(x) = pi / (sin(pi x) gamma(1 - x))
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    # Lanczos sum at shifted argument.
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for k in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def ln_gamma(x: float) -> float:
    """log gamma(x) for x > 0, via the same Lanczos sum."""
    if x <= 0.0:
        raise DomainError(f"ln_gamma: argument must be positive, got {x}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - ln_gamma(1.0 - x)
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for k in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(acc)


def gauss_limit(g: float) -> float:
    """Limit of F(g, g; 1; z) as z -> 1-, finite for g < 1/2.

    By Gauss's summation theorem the limit equals
    gamma(1 - 2g) / gamma(1 - g)^2.
    """
    _check_diag_parameter(g)
    return gamma_fn(1.0 - 2.0 * g) / gamma_fn(1.0 - g) ** 2


def _check_diag_parameter(g: float) -> None:
    if not (0.0 < g < 0.5):
        raise DomainError(f"hyp2f1_diag: parameter must lie in (0, 1/2), got {g}")


def _hyp_series(a: float, b: float, c: float, w):
    """Power series for F(a, b; c; w), vectorized over ``w``.

    Plain term recursion t_{k+1} = t_k (a+k)(b+k) / ((c+k)(k+1)) w.  Caller
    is responsible for keeping ``w`` well inside the unit disc; used here
    with w <= 0.75 (direct branch) and w <= 0.25 (connection branch).
    """
    w = np.asarray(w, dtype=float)
    total = np.ones_like(w)
    term = np.ones_like(w)
    for k in range(_SERIES_MAX_TERMS):
        term = term * ((a + k) * (b + k)) / ((c + k) * (k + 1.0)) * w
        total = total + term
        if np.max(np.abs(term)) <= _SERIES_STOP * np.max(np.abs(total)):
            return total
    # w <= 0.75 gives a convergence factor of at least 0.75 per term, so
    # 600 terms leaves a tail far below double precision; unreachable.
    raise RuntimeError(
        f"hypergeometric series did not terminate: a={a} b={b} c={c} "
        f"max w={float(np.max(w))}"
    )


def _hyp_diag_series(g: float, z):
    """Series branch of F(g, g; 1; z); all terms are nonnegative."""
    return _hyp_series(g, g, 1.0, z)


def _hyp_diag_connection(g: float, w):
    """Connection-formula branch of F(g, g; 1; z) in terms of w = 1 - z.

    F(g,g;1;z) = A F(g,g;2g;w) + B w^(1-2g) F(1-g,1-g;2-2g;w),
    with A = gamma(1-2g)/gamma(1-g)^2 and B = gamma(2g-1)/gamma(g)^2.
    A is the z -> 1 limit; B < 0 on (0, 1/2) so the second term approaches
    the limit from below.
    """
    w = np.asarray(w, dtype=float)
    coeff_a = gamma_fn(1.0 - 2.0 * g) / gamma_fn(1.0 - g) ** 2
    coeff_b = gamma_fn(2.0 * g - 1.0) / gamma_fn(g) ** 2
    out = coeff_a * _hyp_series(g, g, 2.0 * g, w)
    nz = w > 0.0
    if np.any(nz):
        wz = np.where(nz, w, 0.0)  # placeholder at w = 0 is masked out below
        second = coeff_b * wz ** (1.0 - 2.0 * g) * _hyp_series(
            1.0 - g, 1.0 - g, 2.0 - 2.0 * g, wz
        )
        out = np.where(nz, out + second, out)
    return out


def hyp2f1_diag(g: float, z):
    """F(g, g; 1; z) for g in (0, 1/2) and z in [0, 1], scalar or array.

    z = 1 is allowed and returns the finite Gauss limit.  Values are >= 1
    and nondecreasing in z (the series has nonnegative coefficients).
    """
    _check_diag_parameter(g)
    arr = np.asarray(z, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        bad = arr[~(np.isfinite(arr) & (arr >= 0.0) & (arr <= 1.0))][:1]
        raise DomainError(f"hyp2f1_diag: z must lie in [0, 1], got {bad[0]!r}")
    out = np.empty_like(arr)
    lo = arr <= _SERIES_SWITCH
    if np.any(lo):
        out[lo] = _hyp_diag_series(g, arr[lo])
    if np.any(~lo):
        out[~lo] = _hyp_diag_connection(g, 1.0 - arr[~lo])
    if scalar:
        return float(out[0])
    return out


def hyp2f1_diag_conj(g: float, w):
    """F(g, g; 1; 1 - w) for g in (0, 1/2) and w in [0, 1], scalar or array.

    Same function as :func:`hyp2f1_diag` but parametrized by the distance
    to the singular point.  Callers that know w exactly (for the solution
    kernel w = 4 phi(t) phi(b) / denominator) must use this entry point:
    near z = 1 the subtraction 1 - z destroys w, and with it the fractional
    power w^(1-2g) in the connection formula.
    """
    _check_diag_parameter(g)
    arr = np.asarray(w, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        bad = arr[~(np.isfinite(arr) & (arr >= 0.0) & (arr <= 1.0))][:1]
        raise DomainError(f"hyp2f1_diag_conj: w must lie in [0, 1], got {bad[0]!r}")
    out = np.empty_like(arr)
    lo = arr >= 1.0 - _SERIES_SWITCH
    if np.any(lo):
        out[lo] = _hyp_diag_series(g, 1.0 - arr[lo])
    if np.any(~lo):
        out[~lo] = _hyp_diag_connection(g, arr[~lo])
    if scalar:
        return float(out[0])
    return out


@dataclass(frozen=True)
class JacobiRule:
    """Gauss-Jacobi rule for int_{-1}^{1} f(s) (1-s)^alpha (1+s)^beta ds."""

    alpha: float
    beta: float
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def weight_sum(self) -> float:
        return float(np.sum(self.weights))


def _jacobi_moment_zero(alpha: float, beta: float) -> float:
    """mu_0 = int (1-s)^a (1+s)^b ds = 2^(a+b+1) B(a+1, b+1)."""
    return (
        2.0 ** (alpha + beta + 1.0)
        * gamma_fn(alpha + 1.0)
        * gamma_fn(beta + 1.0)
        / gamma_fn(alpha + beta + 2.0)
    )


@lru_cache(maxsize=256)
def _jacobi_rule_cached(alpha: float, beta: float, order: int) -> JacobiRule:
    # Symmetric tridiagonal Jacobi matrix from the monic three-term
    # recurrence; eigenvalues are the nodes, weights come from the first
    # component of the normalized eigenvectors (Golub-Welsch).
    n = order
    ab = alpha + beta
    diag = np.zeros(n)
    if ab + 2.0 != 0.0:
        diag[0] = (beta - alpha) / (ab + 2.0)
    sub = np.zeros(n - 1) if n > 1 else np.zeros(0)
    for k in range(1, n):
        den = (2.0 * k + ab) * (2.0 * k + ab + 2.0)
        diag[k] = (beta * beta - alpha * alpha) / den if den != 0.0 else 0.0
        if k == 1:
            b2 = 4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) ** 2 * (ab + 3.0))
        else:
            b2 = (
                4.0
                * k
                * (k + alpha)
                * (k + beta)
                * (k + ab)
                / ((2.0 * k + ab) ** 2 * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0))
            )
        sub[k - 1] = math.sqrt(b2)
    jacobi = np.diag(diag)
    if n > 1:
        idx = np.arange(n - 1)
        jacobi[idx, idx + 1] = sub
        jacobi[idx + 1, idx] = sub
    vals, vecs = np.linalg.eigh(jacobi)
    weights = _jacobi_moment_zero(alpha, beta) * vecs[0, :] ** 2
    nodes = vals
    if not (np.all(np.diff(nodes) > 0.0) and np.all(weights > 0.0)):
        raise RuntimeError(
            f"gauss_jacobi_rule: degenerate rule for alpha={alpha} beta={beta} "
            f"order={order}"
        )
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return JacobiRule(alpha=alpha, beta=beta, order=order, nodes=nodes, weights=weights)


def gauss_jacobi_rule(alpha: float, beta: float, order: int) -> JacobiRule:
    """Gauss-Jacobi quadrature rule with ``order`` nodes, cached.

    Requires alpha > -1, beta > -1 (integrability of the weight) and
    order >= 1.  Returned arrays are read-only; do not mutate them.
    """
    alpha = float(alpha)
    beta = float(beta)
    if not (alpha > -1.0 and beta > -1.0):
        raise DomainError(
            f"gauss_jacobi_rule: weight exponents must exceed -1, got "
            f"alpha={alpha} beta={beta}"
        )
    if not (isinstance(order, (int, np.integer)) and order >= 1):
        raise DomainError(f"gauss_jacobi_rule: order must be a positive int, got {order}")
    return _jacobi_rule_cached(alpha, beta, int(order))


def gauss_legendre_rule(order: int) -> JacobiRule:
    """Gauss-Legendre rule (the alpha = beta = 0 Jacobi special case)."""
    return gauss_jacobi_rule(0.0, 0.0, order)
