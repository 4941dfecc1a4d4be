"""Comparison ODE closed forms and the lifespan experiment harness.

Two halves:

* The comparison ODE  G'(z) = C (R+z)^(-a) G(z)^p,  G(R) = M eps, with
  a = (n-1)(p-1)/2 + gamma (p+1).  Separation of variables gives the
  blow-up abscissa in closed form; ``ode_integrate`` reproduces it with
  an adaptive Runge-Kutta scheme as an independent check.  The weight
  exponent satisfies a = 1 exactly at the Glassey-type threshold
  p = (m+1)/(m-1), m = (l+1) n, which is where the abscissa switches
  from algebraic to exponential growth in 1/eps.

* eps-ladder sweeps over full finite-difference runs: collect detection
  brackets per eps, fit log T against log eps by weighted least squares,
  and re-run with a 10x threshold and a halved grid to quantify how
  sensitive the fitted slope is to the detection heuristics.

The proven lifespan results are upper bounds, so sweep verdicts compare
measured lifespans against the bound as an envelope; the fitted slope is
reported next to the theoretical one without any sharpness claim.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, SolverError
from .exponents import ExponentContext, conjectured_critical_p, lifespan_exponent
from .fd_solver import DetectionConfig, GridConfig, ModelParams, run
from .functional import K_constant, l1_data_norm

_CRITICAL_ATOL = 1e-12
_DIVERGENCE_DEFAULT = 1e12


# ---------------------------------------------------------------------------
# comparison ODE


@dataclass(frozen=True)
class ComparisonODE:
    """Parameters of G'(z) = C (R+z)^(-a) G^p with G(R) = M eps.

    ``C`` is not pinned down by the theory (it collects unexpressed
    constants); ``M`` defaults to the explicit K |u0+u1|_L1 when built
    through :meth:`from_params`.
    """

    C: float
    M: float
    p: float
    R: float
    a: float

    def __post_init__(self):
        for name, v in (("C", self.C), ("M", self.M), ("R", self.R)):
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"ComparisonODE: {name} must be > 0, got {v}")
        if not (math.isfinite(self.p) and self.p > 1.0):
            raise DomainError(f"ComparisonODE: p must be > 1, got {self.p}")
        if not math.isfinite(self.a):
            raise DomainError(f"ComparisonODE: a must be finite, got {self.a}")

    @property
    def critical(self) -> bool:
        """a = 1: the logarithmic branch of the closed form."""
        return abs(self.a - 1.0) <= _CRITICAL_ATOL

    @classmethod
    def from_params(cls, params: ModelParams, C: float = 1.0,
                    M: float | None = None) -> "ComparisonODE":
        """Build the ODE matching a model configuration.

        The weight exponent a = (n-1)(p-1)/2 + gamma (p+1) is computed
        from (n, l, p); M defaults to K(R, l) |u0+u1|_L1.  C defaults
        to 1 and carries no meaning beyond fixing a concrete ODE.
        """
        if params.p is None:
            raise DomainError("ComparisonODE.from_params: params.p is required")
        g = params.ell / (2.0 * (params.ell + 1.0))
        a = (params.n - 1.0) * (params.p - 1.0) / 2.0 + g * (params.p + 1.0)
        if M is None:
            M = K_constant(params) * l1_data_norm(params)
            if M <= 0.0:
                raise DomainError(
                    "ComparisonODE.from_params: zero data gives M = 0; pass M"
                )
        return cls(C=C, M=M, p=params.p, R=params.R, a=a)


def _weight_primitive(ode: ComparisonODE, z: float) -> float:
    """W(z) = integral_R^z (R+y)^(-a) dy, the separated weight mass."""
    R, a = ode.R, ode.a
    if ode.critical:
        return math.log((R + z) / (2.0 * R))
    return ((R + z) ** (1.0 - a) - (2.0 * R) ** (1.0 - a)) / (1.0 - a)


def ode_blowup_point(ode: ComparisonODE, eps: float = 1.0) -> float:
    """Blow-up abscissa of the separable closed form (may be inf).

    G stays finite exactly while C (p-1) W(z) < (M eps)^(1-p); solving
    the equality for z gives

        a = 1:  z* = 2R exp(S) - R,
        else:   z* = ((2R)^(1-a) + (1-a) S)^(1/(1-a)) - R,

    with S = (M eps)^(1-p) / (C (p-1)).  For a > 1 the total weight mass
    is finite and z* = inf when S exceeds it.
    """
    if not (math.isfinite(eps) and eps > 0.0):
        raise DomainError(f"ode_blowup_point: eps must be > 0, got {eps}")
    S = (ode.M * eps) ** (1.0 - ode.p) / (ode.C * (ode.p - 1.0))
    R, a = ode.R, ode.a
    try:
        if ode.critical:
            return 2.0 * R * math.exp(S) - R
        base = (2.0 * R) ** (1.0 - a) + (1.0 - a) * S
        if a > 1.0 and base <= 0.0:
            return math.inf
        return base ** (1.0 / (1.0 - a)) - R
    except OverflowError:
        # the abscissa is finite but beyond double range
        return math.inf


def ode_solution(ode: ComparisonODE, z, eps: float = 1.0):
    """Closed-form G(z) below the blow-up abscissa, scalar or array.

    Inverts the separated relation
    (M eps)^(1-p) - G^(1-p) = C (p-1) W(z); raises for z at or past the
    blow-up point where the expression loses meaning.
    """
    arr = np.asarray(z, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < ode.R):
        raise DomainError("ode_solution: defined for z >= R")
    g0 = (ode.M * eps) ** (1.0 - ode.p)
    W = np.array([_weight_primitive(ode, float(zz)) for zz in arr])
    rest = g0 - ode.C * (ode.p - 1.0) * W
    if np.any(rest <= 0.0):
        bad = arr[rest <= 0.0][0]
        raise DomainError(f"ode_solution: z={bad} is at or past the blow-up point")
    out = rest ** (-1.0 / (ode.p - 1.0))
    return float(out[0]) if scalar else out


@dataclass
class OdeTrajectory:
    """Accepted steps of :func:`ode_integrate` plus the divergence event."""

    zs: np.ndarray
    values: np.ndarray
    status: str                  # "diverged", "completed", "inconclusive"
    z_event: float | None = None
    divergence: float | None = None


# Dormand-Prince 5(4) tableau.
_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_DP_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
          -2187.0 / 6784.0, 11.0 / 84.0, 0.0)
_DP_B4 = (5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0)


def _dp_step(f, z: float, y: float, h: float) -> tuple[float, float]:
    """One Dormand-Prince step: (5th-order value, error estimate)."""
    k = [f(z, y)]
    for i in range(1, 7):
        acc = 0.0
        for j, aij in enumerate(_DP_A[i]):
            acc += aij * k[j]
        k.append(f(z + _DP_C[i] * h, y + h * acc))
    y5 = y + h * sum(b * kk for b, kk in zip(_DP_B5, k))
    y4 = y + h * sum(b * kk for b, kk in zip(_DP_B4, k))
    return y5, abs(y5 - y4)


def ode_integrate(ode: ComparisonODE, z_max: float, eps: float = 1.0,
                  divergence: float = _DIVERGENCE_DEFAULT,
                  rtol: float = 1e-10) -> OdeTrajectory:
    """Adaptive integration of the equality-case ODE up to divergence.

    Marches G' = C (R+z)^(-a) G^p from G(R) = M eps with an embedded
    5(4) pair; reports ``z_event`` where G first reaches ``divergence``
    (localized by bisection inside the crossing step).  ``completed``
    means z_max was reached while G stayed below the threshold;
    ``inconclusive`` means the step size underflowed first.
    """
    if not (math.isfinite(z_max) and z_max > ode.R):
        raise DomainError(f"ode_integrate: z_max must exceed R={ode.R}")
    if not (math.isfinite(eps) and eps > 0.0):
        raise DomainError(f"ode_integrate: eps must be > 0, got {eps}")

    C, R, a, p = ode.C, ode.R, ode.a, ode.p

    def f(z: float, y: float) -> float:
        return C * (R + z) ** (-a) * max(y, 0.0) ** p

    z, y = R, ode.M * eps
    if y >= divergence:
        return OdeTrajectory(np.array([z]), np.array([y]), "diverged",
                             z_event=z, divergence=divergence)
    zs, ys = [z], [y]
    h = min(1e-3 * R, (z_max - R) / 16.0)
    mach = float(np.finfo(float).eps)

    def tick(zz: float) -> float:
        # the smallest step that still moves z in double precision
        return 8.0 * mach * max(zz, R)

    while z < z_max:
        if z_max - z <= tick(z):
            break  # within rounding of the requested endpoint
        h = min(h, z_max - z)
        if h <= tick(z):
            # z cannot advance further in floating point.  With the
            # coefficient frozen at the current point the solution of
            # y' = K y^p escapes to infinity after exactly
            # y / ((p - 1) f); the coefficient drifts by O(mach) over
            # that span, so when the estimate fits inside a few hundred
            # ticks the blow-up point is resolved to machine precision.
            # A stall without a nearby escape is reported as such.
            rate = f(z, y)
            if rate > 0.0 and y > 0.0:
                escape = y / ((p - 1.0) * rate)
                if escape <= 256.0 * tick(z) and z + escape <= z_max:
                    z_event = z + escape
                    zs.append(z_event)
                    ys.append(divergence)
                    return OdeTrajectory(np.array(zs), np.array(ys),
                                         "diverged", z_event=z_event,
                                         divergence=divergence)
            return OdeTrajectory(np.array(zs), np.array(ys), "inconclusive",
                                 divergence=divergence)
        y_new, err = _dp_step(f, z, y, h)
        tol = rtol * max(abs(y), abs(y_new), ode.M * eps)
        if not math.isfinite(y_new) or err > tol:
            h = max(h * max(0.2, 0.9 * (tol / max(err, 1e-300)) ** 0.2),
                    0.5 * tick(z))
            continue
        if y_new >= divergence:
            # monotone in the step size: bisect h to land on the threshold
            lo, hi = 0.0, h
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                y_mid, _ = _dp_step(f, z, y, mid)
                if y_mid >= divergence:
                    hi = mid
                else:
                    lo = mid
            z_event = z + hi
            zs.append(z_event)
            ys.append(divergence)
            return OdeTrajectory(np.array(zs), np.array(ys), "diverged",
                                 z_event=z_event, divergence=divergence)
        z += h
        y = y_new
        zs.append(z)
        ys.append(y)
        h *= min(5.0, max(0.2, 0.9 * (tol / max(err, 1e-300)) ** 0.2))
    return OdeTrajectory(np.array(zs), np.array(ys), "completed",
                         divergence=divergence)


# ---------------------------------------------------------------------------
# finite-difference lifespan sweeps


@dataclass(frozen=True)
class LifespanRecord:
    """One sweep point: detection bracket and its provenance."""

    eps: float
    status: str                 # verdict status of the final attempt
    t_lower: float | None
    t_upper: float | None
    dx: float
    threshold: float
    horizon: float
    trigger: str | None = None

    @property
    def usable(self) -> bool:
        return self.status == "blew_up"

    @property
    def t_mid(self) -> float:
        if not self.usable:
            raise SolverError(f"LifespanRecord: eps={self.eps} holds no lifespan")
        return 0.5 * (self.t_lower + self.t_upper)


@dataclass
class SweepReport:
    """Weighted log-log fit of measured lifespans against eps.

    ``slope`` fits log T = slope log eps + intercept over the usable
    records (T = bracket midpoint, bracket width as per-point weight).
    Sensitivities are relative slope changes under a 10x detection
    threshold and under dx/2; both stay small on a healthy sweep.
    """

    records: list[LifespanRecord]
    slope: float
    slope_stderr: float
    intercept: float
    theoretical_slope: float
    threshold_sensitivity: float | None = None
    grid_sensitivity: float | None = None
    insufficient_data: bool = False
    notes: list[str] = field(default_factory=list)


@dataclass
class CriticalReport:
    """Envelope diagnostics at the conjectured critical exponent.

    At p = (m+1)/(m-1) the bound is log T <= C eps^(-(p-1)): the report
    fits log log T against log eps (theoretical slope -(p-1)) and checks
    whether log T grows superlinearly in 1/eps.  ``inconclusive`` is set
    when any ladder point failed to produce a blow-up bracket.
    """

    records: list[LifespanRecord]
    loglog_slope: float
    theoretical_slope: float
    envelope_constant: float
    superlinear: bool
    inconclusive: bool
    notes: list[str] = field(default_factory=list)


def default_eps_ladder(eps_top: float, count: int = 8,
                       ratio: float = 2.0 ** 0.5) -> np.ndarray:
    """Geometric ladder eps_top, eps_top/ratio, ... (descending)."""
    if not (math.isfinite(eps_top) and eps_top > 0.0):
        raise DomainError(f"default_eps_ladder: eps_top must be > 0, got {eps_top}")
    if count < 2 or ratio <= 1.0:
        raise DomainError("default_eps_ladder: need count >= 2 and ratio > 1")
    return eps_top / ratio ** np.arange(count)


def measure_lifespan(params: ModelParams, grid: GridConfig,
                     detection: DetectionConfig, eps: float,
                     horizon_growth: int = 3) -> LifespanRecord:
    """Run the solver at one eps, extending the horizon until blow-up.

    A run that completes the horizon is retried with the horizon tripled,
    ``horizon_growth`` times; a still-completed (or inconclusive) final
    attempt is recorded as-is and flagged unusable for fitting.
    """
    p = replace(params, eps=float(eps))
    g = grid
    verdict = None
    for _ in range(horizon_growth + 1):
        _, verdict = run(p, g, detection)
        if verdict.status != "completed":
            break
        g = replace(g, horizon=3.0 * g.horizon)
    return LifespanRecord(
        eps=float(eps),
        status=verdict.status,
        t_lower=verdict.t_lower,
        t_upper=verdict.t_upper,
        dx=g.dx,
        threshold=verdict.threshold,
        horizon=g.horizon,
        trigger=verdict.trigger,
    )


def _collect_records(params: ModelParams, grid: GridConfig,
                     detection: DetectionConfig, ladder: np.ndarray,
                     threads: int) -> list[LifespanRecord]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(measure_lifespan, params, grid, detection, e)
                    for e in ladder]
            return [f.result() for f in futs]
    return [measure_lifespan(params, grid, detection, e) for e in ladder]


def _fit_loglog(records: list[LifespanRecord]) -> tuple[float, float, float]:
    """Weighted LS fit of log T on log eps; returns (slope, stderr, intercept).

    Each point is weighted by the inverse variance implied by its
    detection bracket, sigma = (log t_hi - log t_lo)/2, floored to keep
    tight brackets from dominating the fit numerically.
    """
    xs = np.array([math.log(r.eps) for r in records])
    ys = np.array([math.log(r.t_mid) for r in records])
    sig = np.array([
        max(0.5 * (math.log(r.t_upper) - math.log(max(r.t_lower, 1e-300))), 1e-6)
        for r in records
    ])
    w = 1.0 / sig ** 2
    xm = float(np.sum(w * xs) / np.sum(w))
    ym = float(np.sum(w * ys) / np.sum(w))
    sxx = float(np.sum(w * (xs - xm) ** 2))
    slope = float(np.sum(w * (xs - xm) * (ys - ym)) / sxx)
    intercept = ym - slope * xm
    resid = ys - slope * xs - intercept
    dof = max(len(records) - 2, 1)
    chi2 = float(np.sum(w * resid ** 2))
    stderr = math.sqrt(max(chi2 / dof, 1.0) / sxx)
    return slope, stderr, intercept


def lifespan_sweep(params: ModelParams, grid: GridConfig,
                   detection: DetectionConfig, eps_ladder,
                   compute_sensitivities: bool = True,
                   threads: int = 1) -> SweepReport:
    """Measure T(eps) over a ladder and fit the subcritical power law.

    Requires p strictly below the conjectured critical exponent so the
    theoretical slope exists.  Points whose runs never blow up are
    excluded; fewer than 4 usable points yields an insufficient-data
    report (slope NaN) rather than a fit.
    """
    ladder = np.sort(np.asarray(eps_ladder, dtype=float))[::-1]
    if len(ladder) < 4:
        raise DomainError("lifespan_sweep: ladder needs at least 4 points")
    if params.p is None or params.linear:
        raise DomainError("lifespan_sweep: nonlinear params required")
    ctx = ExponentContext(n=params.n, ell=params.ell, p=params.p)
    if params.p >= conjectured_critical_p(ctx):
        raise DomainError(
            "lifespan_sweep: p is at or above the conjectured critical "
            "exponent; use critical_sweep instead"
        )
    law = lifespan_exponent(ctx)
    records = _collect_records(params, grid, detection, ladder, threads)
    usable = [r for r in records if r.usable]
    notes = [f"eps={r.eps:g} excluded ({r.status})"
             for r in records if not r.usable]
    if len(usable) < 4:
        return SweepReport(records=records, slope=math.nan,
                           slope_stderr=math.nan, intercept=math.nan,
                           theoretical_slope=law.slope,
                           insufficient_data=True, notes=notes)
    slope, stderr, intercept = _fit_loglog(usable)
    report = SweepReport(records=records, slope=slope, slope_stderr=stderr,
                         intercept=intercept, theoretical_slope=law.slope,
                         notes=notes)
    if compute_sensitivities:
        det10 = replace(detection,
                        threshold=None,
                        threshold_factor=10.0 * detection.threshold_factor)
        rec10 = [r for r in _collect_records(params, grid, det10, ladder, threads)
                 if r.usable]
        if len(rec10) >= 4:
            s10, _, _ = _fit_loglog(rec10)
            report.threshold_sensitivity = abs(s10 - slope) / abs(slope)
        else:
            report.notes.append("threshold sensitivity skipped: too few points")
        fine = replace(grid, dx=grid.dx / 2.0)
        rec2 = [r for r in _collect_records(params, fine, detection, ladder, threads)
                if r.usable]
        if len(rec2) >= 4:
            s2, _, _ = _fit_loglog(rec2)
            report.grid_sensitivity = abs(s2 - slope) / abs(slope)
        else:
            report.notes.append("grid sensitivity skipped: too few points")
    return report


def critical_sweep(params: ModelParams, grid: GridConfig,
                   detection: DetectionConfig, eps_ladder,
                   threads: int = 1) -> CriticalReport:
    """Envelope diagnostics for the exponential lifespan law at critical p.

    Fits log log T against log eps over the usable points with T > 1
    (the double logarithm needs log T > 0) and reports the max of
    eps^(p-1) log T as the implied envelope constant.  Superlinearity of
    log T in 1/eps is tested through the secant slopes of consecutive
    ladder points.
    """
    ladder = np.sort(np.asarray(eps_ladder, dtype=float))[::-1]
    if len(ladder) < 4:
        raise DomainError("critical_sweep: ladder needs at least 4 points")
    if params.p is None or params.linear:
        raise DomainError("critical_sweep: nonlinear params required")
    ctx = ExponentContext(n=params.n, ell=params.ell, p=params.p)
    p_thr = conjectured_critical_p(ctx)
    if abs(params.p - p_thr) > 1e-9 * max(1.0, p_thr):
        raise DomainError(
            f"critical_sweep: p={params.p} is not the conjectured critical "
            f"exponent {p_thr}"
        )
    records = _collect_records(params, grid, detection, ladder, threads)
    usable = [r for r in records if r.usable]
    notes = [f"eps={r.eps:g} excluded ({r.status})"
             for r in records if not r.usable]
    inconclusive = len(usable) < len(records) or len(usable) < 4
    loggable = [r for r in usable if r.t_mid > 1.0]
    if len(loggable) >= 3:
        xs = np.array([math.log(r.eps) for r in loggable])
        ys = np.array([math.log(math.log(r.t_mid)) for r in loggable])
        A = np.vstack([xs, np.ones_like(xs)]).T
        sol, *_ = np.linalg.lstsq(A, ys, rcond=None)
        loglog_slope = float(sol[0])
    else:
        loglog_slope = math.nan
        notes.append("log-log fit skipped: too few points with T > 1")
        inconclusive = True
    if usable:
        envelope = max(r.eps ** (params.p - 1.0) * math.log(max(r.t_mid, 1.0))
                       for r in usable)
    else:
        envelope = math.nan
    # secant slopes of log T versus 1/eps must increase for superlinearity
    superlinear = False
    if len(usable) >= 3:
        pts = sorted(usable, key=lambda r: 1.0 / r.eps)
        secants = []
        for r0, r1 in zip(pts[:-1], pts[1:]):
            du = 1.0 / r1.eps - 1.0 / r0.eps
            secants.append((math.log(r1.t_mid) - math.log(r0.t_mid)) / du)
        superlinear = all(s1 >= s0 * (1.0 - 0.05) for s0, s1 in
                          zip(secants[:-1], secants[1:])) and secants[-1] > secants[0]
    return CriticalReport(records=records, loglog_slope=loglog_slope,
                          theoretical_slope=-(params.p - 1.0),
                          envelope_constant=envelope, superlinear=superlinear,
                          inconclusive=inconclusive, notes=notes)
