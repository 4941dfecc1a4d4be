"""Adaptive finite-difference marching for the semilinear degenerate wave
equation and its constant-speed (Euler-Darboux-Poisson type) companion.

Native form ("tricomi" mode):

    u_tt = t^(2l) Lap(u) + |u_t|^p,        u(0) = eps u0,  u_t(0) = eps u1,

stepped with a leapfrog-type scheme on a fixed spatial grid and a time
step tied to the growing signal speed t^l:

    dt * max(speed, floor)/dx <= nu,   floor = t_floor^l,  t_floor = dx^(1/l),

where the speed is evaluated conservatively at the end of the step.  The
derivative nonlinearity is handled predictor-corrector: a lagged one-sided
u_t estimate produces a predicted slice, whose centered difference feeds
the final update.  The first step is a Taylor seed; at t = 0 the equation
reduces to u_tt = |eps u1|^p because the Laplacian coefficient vanishes.

Transformed form ("edp" mode): with s = phi(t) and v(s, x) = u(t, x),

    v_ss - Lap(v) + (mu/s) v_s = c_lp s^(mu (p-2)) |v_s|^p,
    mu = l/(l+1),  c_lp = (l+1)^(mu (p-2)),

a constant-speed wave equation with a singular damping term, treated
semi-implicitly (time-averaged).  An edp run starts at s0 = phi(t0) from
a short tricomi warm-up whose state is transplanted via v_s = u_t t^(-l).

Blow-up detection monitors max |u_t|: crossing the configured threshold,
time-step underflow under the nonlinear step limiter, or non-finite
values all end the run with a bracketed lifespan estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from numba import njit

from .errors import DomainError, SolverError
from .fields import SpaceTimeField
from .kernel import constants as kernel_constants, phi, phi_inverse
from .profiles import DataProfile
from .special_functions import gamma_fn, gauss_legendre_rule

_LAND_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Model description: equation parameters and Cauchy data.

    ``linear`` disables the nonlinearity (used for convergence studies and
    cross-checks against the explicit solution formula).  ``p`` may be
    omitted for linear runs.  ``geometry`` is "line" for 1-d runs or
    "radial" for radially symmetric runs in n >= 2 dimensions.
    """

    n: int
    ell: float
    R: float
    eps: float
    u0: DataProfile
    u1: DataProfile
    p: float | None = None
    mode: str = "tricomi"
    geometry: str = "line"
    linear: bool = False

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"ModelParams: n must be an integer >= 1, got {self.n}")
        if not (math.isfinite(self.ell) and self.ell > 0.0):
            raise DomainError(f"ModelParams: ell must be > 0, got {self.ell}")
        if not (math.isfinite(self.R) and self.R > 0.0):
            raise DomainError(f"ModelParams: R must be > 0, got {self.R}")
        if not (math.isfinite(self.eps) and self.eps >= 0.0):
            raise DomainError(f"ModelParams: eps must be >= 0, got {self.eps}")
        if not self.linear:
            if self.p is None or not (math.isfinite(self.p) and self.p > 1.0):
                raise DomainError(f"ModelParams: p must be > 1, got {self.p}")
        if self.mode not in ("tricomi", "edp"):
            raise DomainError(f"ModelParams: unknown mode {self.mode!r}")
        if self.geometry not in ("line", "radial"):
            raise DomainError(f"ModelParams: unknown geometry {self.geometry!r}")
        if self.geometry == "line" and self.n != 1:
            raise DomainError("ModelParams: line geometry requires n = 1")
        if self.geometry == "radial" and self.n < 2:
            raise DomainError("ModelParams: radial geometry requires n >= 2")
        for name, prof in (("u0", self.u0), ("u1", self.u1)):
            reach = prof.support_radius + abs(prof.center)
            if reach > self.R * (1.0 + 1e-12):
                raise DomainError(
                    f"ModelParams: {name} support extends to {reach} beyond R={self.R}"
                )


@dataclass(frozen=True)
class GridConfig:
    """Discretization controls for :func:`run`."""

    dx: float
    horizon: float
    cfl: float = 0.8
    margin: float = 0.5
    t_floor: float | None = None      # default dx^(1/l)
    store_slices: int = 160
    symmetric: bool = False           # exploit even data on the line
    edp_t0: float | None = None       # warm-up handover time for edp mode
    nl_dt_safety: float = 0.35        # dt <= safety/(p max|u_t|^(p-1))

    def __post_init__(self):
        if not (math.isfinite(self.dx) and self.dx > 0.0):
            raise DomainError(f"GridConfig: dx must be > 0, got {self.dx}")
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise DomainError(f"GridConfig: horizon must be > 0, got {self.horizon}")
        if not (0.0 < self.cfl <= 0.9):
            raise DomainError(f"GridConfig: cfl must lie in (0, 0.9], got {self.cfl}")
        if self.margin < 0.0:
            raise DomainError("GridConfig: margin must be >= 0")
        if self.store_slices < 2:
            raise DomainError("GridConfig: store_slices must be >= 2")
        if self.nl_dt_safety <= 0.0:
            raise DomainError("GridConfig: nl_dt_safety must be > 0")


@dataclass(frozen=True)
class DetectionConfig:
    """Blow-up detection controls.

    The default threshold is ``threshold_factor * max(eps, dx)``; it can be
    pinned explicitly with ``threshold``.
    """

    threshold_factor: float = 1e6
    threshold: float | None = None
    dt_min: float = 1e-10
    max_steps: int = 20_000_000

    def resolve_threshold(self, eps: float, dx: float) -> float:
        if self.threshold is not None:
            return self.threshold
        return self.threshold_factor * max(eps, dx)


@dataclass
class BlowupVerdict:
    """Outcome of a marching run.

    status    "completed" (horizon reached), "blew_up", or "inconclusive"
              (step budget exhausted).
    trigger   for blew_up: "derivative_threshold", "dt_underflow", "nan".
    [t_lower, t_upper] brackets the event between the last stable time and
    the first triggering time; lifespan_estimate is the trigger time.
    Times are in the clock of the producing mode (physical t for tricomi,
    s = phi(t) for edp).
    """

    status: str
    trigger: str | None = None
    t_lower: float | None = None
    t_upper: float | None = None
    lifespan_estimate: float | None = None
    threshold: float | None = None
    diagnostics: dict = dc_field(default_factory=dict)


@njit(cache=True)
def _step_window(u_prev, u_curr, out, lo, hi, mirror, nrad, dx, c2, damp, q,
                 p, semilinear, dt_prev, dt_next):
    """One leapfrog step of u_tt + damp u_t = c2 Lap(u) + q |u_t|^p.

    Updates out[lo:hi) and returns (max centered |u_t|, all-finite flag).
    Points outside the window are left untouched (they are zero by the
    caller's window invariant).
    """
    inv_dx2 = 1.0 / (dx * dx)
    sum_dt = dt_prev + dt_next
    den = 2.0 / dt_next + damp
    max_ut = 0.0
    ok = True
    for j in range(lo, hi):
        if mirror and j == 0:
            lap = 2.0 * nrad * (u_curr[1] - u_curr[0]) * inv_dx2
        else:
            lap = (u_curr[j + 1] - 2.0 * u_curr[j] + u_curr[j - 1]) * inv_dx2
            if mirror and nrad > 1:
                lap += (nrad - 1.0) * (u_curr[j + 1] - u_curr[j - 1]) / (
                    2.0 * dx * (j * dx)
                )
        rhs = c2 * lap
        base = (
            2.0 * u_curr[j] / dt_next
            + 2.0 * (u_curr[j] - u_prev[j]) / dt_prev
            + damp * u_prev[j]
        )
        if semilinear:
            ut_pred = (u_curr[j] - u_prev[j]) / dt_prev
            u_pred = (sum_dt * (rhs + q * abs(ut_pred) ** p) + base) / den
            ut_corr = (u_pred - u_prev[j]) / sum_dt
            rhs = rhs + q * abs(ut_corr) ** p
        val = (sum_dt * rhs + base) / den
        out[j] = val
        ut = (val - u_prev[j]) / sum_dt
        if abs(ut) > max_ut:
            max_ut = abs(ut)
        if not math.isfinite(val):
            ok = False
    return max_ut, ok


def _mode_coeffs(params: ModelParams, mode: str, t: float):
    """(c2, damp, q) of the marching equation at time t in the given mode."""
    if mode == "tricomi":
        return t ** (2.0 * params.ell), 0.0, 0.0 if params.linear else 1.0
    mu = params.ell / (params.ell + 1.0)
    if params.linear:
        return 1.0, mu / t, 0.0
    c_lp = (params.ell + 1.0) ** (mu * (params.p - 2.0))
    return 1.0, mu / t, c_lp * t ** (mu * (params.p - 2.0))


def step_tricomi(u_prev: np.ndarray, u_curr: np.ndarray, t: float,
                 dt_prev: float, dt_next: float, params: ModelParams,
                 dx: float, symmetric: bool = False) -> np.ndarray:
    """Single native-mode step: slices at t - dt_prev and t -> t + dt_next."""
    if dt_prev <= 0.0 or dt_next <= 0.0:
        raise DomainError("step_tricomi: step sizes must be positive")
    mirror = symmetric or params.geometry == "radial"
    out = np.zeros_like(u_curr)
    c2 = t ** (2.0 * params.ell)
    q = 0.0 if params.linear else 1.0
    lo = 0 if mirror else 1
    _step_window(
        u_prev, u_curr, out, lo, len(u_curr) - 1, mirror, params.n, dx,
        c2, 0.0, q, params.p if params.p is not None else 2.0,
        not params.linear, dt_prev, dt_next,
    )
    return out


def step_edp(v_prev: np.ndarray, v_curr: np.ndarray, s: float,
             dt_prev: float, dt_next: float, params: ModelParams,
             dx: float, symmetric: bool = False) -> np.ndarray:
    """Single transformed-mode step at s > 0 (semi-implicit damping)."""
    if dt_prev <= 0.0 or dt_next <= 0.0:
        raise DomainError("step_edp: step sizes must be positive")
    if s <= 0.0:
        raise DomainError("step_edp: the damping term needs s > 0")
    mirror = symmetric or params.geometry == "radial"
    mu = params.ell / (params.ell + 1.0)
    if params.linear:
        q = 0.0
    else:
        c_lp = (params.ell + 1.0) ** (mu * (params.p - 2.0))
        q = c_lp * s ** (mu * (params.p - 2.0))
    out = np.zeros_like(v_curr)
    lo = 0 if mirror else 1
    _step_window(
        v_prev, v_curr, out, lo, len(v_curr) - 1, mirror, params.n, dx,
        1.0, mu / s, q, params.p if params.p is not None else 2.0,
        not params.linear, dt_prev, dt_next,
    )
    return out


class _Marcher:
    """Time loop over one mode segment; owns buffers, storage, detection."""

    def __init__(self, params: ModelParams, grid: GridConfig,
                 detection: DetectionConfig, xs: np.ndarray, mirror: bool):
        self.params = params
        self.grid = grid
        self.detection = detection
        self.xs = xs
        self.mirror = mirror
        self.semilinear = not params.linear
        self.threshold = detection.resolve_threshold(params.eps, grid.dx)
        n_floor = grid.t_floor if grid.t_floor is not None else grid.dx ** (
            1.0 / params.ell
        )
        self.floor_speed = n_floor ** params.ell
        self.cfl_max_seen = 0.0
        self.min_dt_seen = math.inf

    def _speed(self, t: float, mode: str) -> float:
        if mode == "tricomi":
            return t ** self.params.ell
        return 1.0

    def _dt_candidate(self, t: float, dt_prev: float | None, mode: str,
                      last_max_ut: float) -> float:
        nu, dx = self.grid.cfl, self.grid.dx
        if mode == "tricomi":
            if dt_prev is None:
                # First step from t: solve dt * max((t+dt)^l, floor) = nu dx,
                # monotone in dt, by bisection on [0, nu dx / floor].
                hi = nu * dx / self.floor_speed
                lo = 0.0
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if mid * max(self._speed(t + mid, mode),
                                 self.floor_speed) > nu * dx:
                        hi = mid
                    else:
                        lo = mid
                dt = lo
            else:
                # Look ahead one previous step: conservative since t^l grows.
                dt = nu * dx / max(self._speed(t + dt_prev, mode), self.floor_speed)
            # While the speed is below 1 the CFL condition alone would allow
            # steps far larger than the grid spacing, and those steps shrink
            # rapidly as t^l climbs; the unequal-step second difference then
            # carries a u_ttt error term that converges only like dx.
            # Capping at the unit-speed step keeps dt slowly varying and the
            # whole march second order.
            dt = min(dt, nu * dx)
        else:
            # unit speed, but the damping mu/s is singular at s = 0: the
            # semi-implicit treatment is stable for any dt yet accurate
            # only while dt stays a fraction of s, so the first steps
            # after a small-s handover grow geometrically from s/4
            dt = min(nu * dx, 0.25 * t)
        if self.semilinear and last_max_ut > 0.0:
            p = self.params.p
            dt = min(dt, self.grid.nl_dt_safety / (p * last_max_ut ** (p - 1.0)))
        return dt

    def march(self, u0_slice: np.ndarray, ut0_slice: np.ndarray, t_start: float,
              t_end: float, mode: str, window: tuple[int, int],
              n_slices: int, collect_final_state: bool = False,
              dt_cap: float = math.inf):
        """March from (u0, u_t0) at t_start to t_end or a detection event.

        ``dt_cap`` tightens the step beyond the stability candidates; the
        warm-up segment of an edp run uses it so the handover derivative
        carries an O((t0/8)^2) error instead of O(t0^2).  Returns (times,
        slices, verdict, final_state) where final_state is (u_prev, u_curr,
        t, dt_prev, window) when requested.
        """
        params, grid = self.params, self.grid
        N = len(self.xs)
        lo, hi = window
        u_prev = np.array(u0_slice, dtype=float)
        checkpoints = np.linspace(t_start, t_end, n_slices)
        next_cp = 1  # index into checkpoints; slice 0 stored immediately
        times = [t_start]
        slices = [u_prev.copy()]
        deriv_t = [t_start]
        deriv_m = [float(np.max(np.abs(ut0_slice)))]
        dts = []

        # Taylor seed for the first step.
        last_max_ut = deriv_m[0]
        dt = min(self._dt_candidate(t_start, None, mode, last_max_ut), dt_cap)
        landed = False
        if t_start + dt >= t_end - _LAND_TOL * max(1.0, abs(t_end)):
            dt = t_end - t_start
            landed = True
        c2, damp, q = _mode_coeffs(params, mode, t_start)
        lap0 = self._laplacian(u_prev)
        utt0 = c2 * lap0 - damp * ut0_slice
        if self.semilinear:
            utt0 = utt0 + q * np.abs(ut0_slice) ** params.p
        u_curr = u_prev + dt * ut0_slice + 0.5 * dt * dt * utt0
        t = t_start + dt
        dts.append(dt)
        ratio = dt * max(self._speed(t_start, mode), self.floor_speed if mode == "tricomi" else 0.0) / grid.dx
        self.cfl_max_seen = max(self.cfl_max_seen, ratio)
        self.min_dt_seen = min(self.min_dt_seen, dt)
        dt_prev = dt
        lo = max(lo - 1, 0 if self.mirror else 1)
        hi = min(hi + 1, N - 1)
        seed_ut = ut0_slice + dt * utt0
        last_max_ut = float(np.max(np.abs(seed_ut)))
        deriv_t.append(t)
        deriv_m.append(last_max_ut)
        verdict = None
        steps = 1

        if landed:
            times.append(t)
            slices.append(u_curr.copy())
        else:
            out = np.zeros(N)
            while True:
                if steps >= self.detection.max_steps:
                    verdict = BlowupVerdict(status="inconclusive",
                                            threshold=self.threshold)
                    break
                dt = min(self._dt_candidate(t, dt_prev, mode, last_max_ut),
                         dt_cap)
                landed = False
                if t + dt >= t_end - _LAND_TOL * max(1.0, abs(t_end)):
                    dt = t_end - t
                    landed = True
                    if dt <= 0.0:
                        break
                if not landed and dt < self.detection.dt_min:
                    verdict = BlowupVerdict(
                        status="blew_up", trigger="dt_underflow",
                        t_lower=t, t_upper=t + self.detection.dt_min,
                        threshold=self.threshold,
                    )
                    break
                c2, damp, q = _mode_coeffs(params, mode, t)
                max_ut, ok = _step_window(
                    u_prev, u_curr, out, lo, hi, self.mirror, params.n,
                    grid.dx, c2, damp, q,
                    params.p if params.p is not None else 2.0,
                    self.semilinear, dt_prev, dt,
                )
                t_new = t + dt
                steps += 1
                dts.append(dt)
                ratio = dt * max(self._speed(t, mode),
                                 self.floor_speed if mode == "tricomi" else 0.0) / grid.dx
                self.cfl_max_seen = max(self.cfl_max_seen, ratio)
                self.min_dt_seen = min(self.min_dt_seen, dt)
                deriv_t.append(t)
                deriv_m.append(max_ut)
                if not ok:
                    verdict = BlowupVerdict(
                        status="blew_up", trigger="nan",
                        t_lower=deriv_t[-2], t_upper=t_new,
                        threshold=self.threshold,
                    )
                    break
                # rotate buffers; stale values outside the growing window are
                # zero because windows only expand
                u_prev, u_curr, out = u_curr, out, u_prev
                t = t_new
                dt_prev = dt
                last_max_ut = max_ut
                lo = max(lo - 1, 0 if self.mirror else 1)
                hi = min(hi + 1, N - 1)
                if next_cp < len(checkpoints) and t >= checkpoints[next_cp]:
                    times.append(t)
                    slices.append(u_curr.copy())
                    while next_cp < len(checkpoints) and t >= checkpoints[next_cp]:
                        next_cp += 1
                if self.semilinear and max_ut >= self.threshold:
                    verdict = BlowupVerdict(
                        status="blew_up", trigger="derivative_threshold",
                        t_lower=deriv_t[-2], t_upper=t,
                        threshold=self.threshold,
                    )
                    break
                if landed:
                    break
            if times[-1] != t:
                times.append(t)
                slices.append(u_curr.copy())

        if verdict is None:
            verdict = BlowupVerdict(status="completed", threshold=self.threshold)
        elif verdict.status == "blew_up":
            # "first time the trigger fired"; for dt underflow that is the
            # time stepping stalled
            if verdict.trigger == "dt_underflow":
                verdict.lifespan_estimate = verdict.t_lower
            else:
                verdict.lifespan_estimate = verdict.t_upper
        verdict.diagnostics = {
            "deriv_times": np.array(deriv_t),
            "max_ut": np.array(deriv_m),
            "max_cfl_ratio": self.cfl_max_seen,
            "min_dt": self.min_dt_seen,
            "n_steps": steps,
            "final_time": t,
            "mode": mode,
        }
        final_state = None
        if collect_final_state:
            final_state = (u_prev, u_curr, t, dt_prev, (lo, hi))
        return times, slices, np.array(dts), verdict, final_state

    def _laplacian(self, u: np.ndarray) -> np.ndarray:
        dx, n = self.grid.dx, self.params.n
        out = np.zeros_like(u)
        out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (dx * dx)
        if self.mirror:
            out[0] = 2.0 * n * (u[1] - u[0]) / (dx * dx)
            if n > 1:
                rs = np.arange(1, len(u) - 1) * dx
                out[1:-1] += (n - 1.0) * (u[2:] - u[:-2]) / (2.0 * dx * rs)
        return out


def _initial_window(arrs, mirror: bool, N: int) -> tuple[int, int]:
    live = np.zeros(N, dtype=bool)
    for a in arrs:
        live |= a != 0.0
    if not np.any(live):
        idx_lo, idx_hi = 0, 1
    else:
        nz = np.nonzero(live)[0]
        idx_lo, idx_hi = int(nz[0]), int(nz[-1]) + 1
    lo = 0 if mirror else max(idx_lo - 1, 1)
    hi = min(idx_hi + 1, N - 1)
    return lo, max(hi, lo + 1)


def run(params: ModelParams, grid: GridConfig,
        detection: DetectionConfig | None = None
        ) -> tuple[SpaceTimeField, BlowupVerdict]:
    """March the model to the horizon or to a blow-up trigger.

    Returns the stored space-time field (decimated to about
    ``grid.store_slices`` slices) and the verdict.  For edp mode the field
    and verdict use the transformed clock s = phi(t); the run covers
    s in [phi(t0), phi(horizon)] after a native-mode warm-up on [0, t0].
    """
    detection = detection or DetectionConfig()
    mirror = params.geometry == "radial" or grid.symmetric
    if grid.symmetric and params.geometry == "line":
        probe = np.linspace(0.0, params.R, 64)
        for name, prof in (("u0", params.u0), ("u1", params.u1)):
            if np.max(np.abs(prof(probe) - prof(-probe))) > 1e-12:
                raise DomainError(
                    f"run: symmetric grid requires even data, {name} is not"
                )
    L = params.R + phi(params.ell, grid.horizon) + grid.margin
    npts = int(math.ceil(L / grid.dx)) + 1
    if mirror:
        xs = np.arange(npts) * grid.dx
    else:
        xs = np.arange(-(npts - 1), npts) * grid.dx
    marcher = _Marcher(params, grid, detection, xs, mirror)

    u0_slice = params.eps * params.u0(xs)
    ut0_slice = params.eps * params.u1(xs)
    window = _initial_window((u0_slice, ut0_slice), mirror, len(xs))

    if params.mode == "tricomi":
        times, slices, dts, verdict, _ = marcher.march(
            u0_slice, ut0_slice, 0.0, grid.horizon, "tricomi", window,
            grid.store_slices,
        )
        fld = SpaceTimeField(
            xs=xs, times=np.array(times), slices=slices, dx=grid.dx,
            geometry=params.geometry, mode="tricomi", n=params.n,
            ell=params.ell, R=params.R, symmetric=mirror and
            params.geometry == "line", dt_history=dts,
        )
        return fld, verdict

    # edp mode: warm up in native mode on [0, t0], transplant, then march
    # in the transformed clock.
    if grid.edp_t0 is not None:
        t0 = grid.edp_t0
    else:
        # Hand over once the transformed clock is resolved.  Near s = 0 the
        # solution carries an s^(1-mu) layer and the damping mu/s is
        # singular, so differencing from a tiny s0 loses accuracy no matter
        # the step policy; the native mode has no such problem there (its
        # speed t^l vanishes at the origin).  Placing s0 = phi(t0) several
        # grid steps into the clock keeps both segments second order.
        s_target = 8.0 * grid.cfl * grid.dx
        t0 = min(phi_inverse(params.ell, s_target), 0.45 * grid.horizon)
    if not (0.0 < t0 < grid.horizon):
        raise DomainError(f"run: edp_t0 must lie in (0, horizon), got {t0}")
    w_times, w_slices, w_dts, w_verdict, state = marcher.march(
        u0_slice, ut0_slice, 0.0, t0, "tricomi", window, 2,
        collect_final_state=True, dt_cap=t0 / 8.0,
    )
    if w_verdict.status != "completed":
        # blow-up during warm-up; report in native clock
        fld = SpaceTimeField(
            xs=xs, times=np.array(w_times), slices=w_slices, dx=grid.dx,
            geometry=params.geometry, mode="tricomi", n=params.n,
            ell=params.ell, R=params.R, dt_history=w_dts,
        )
        return fld, w_verdict
    u_prev, u_curr, t_at, dt_prev, wnd = state
    # one extra native step for a centered u_t at t0
    dt_x = min(marcher._dt_candidate(t_at, dt_prev, "tricomi",
                                     float(np.max(np.abs(
                                         (u_curr - u_prev) / dt_prev)))),
               dt_prev)
    c2, damp, q = _mode_coeffs(params, "tricomi", t_at)
    out = np.zeros_like(u_curr)
    _step_window(u_prev, u_curr, out, wnd[0], wnd[1], mirror, params.n,
                 grid.dx, c2, damp, q,
                 params.p if params.p is not None else 2.0,
                 not params.linear, dt_prev, dt_x)
    ut_t0 = (out - u_prev) / (dt_prev + dt_x)
    s0 = phi(params.ell, t0)
    s_end = phi(params.ell, grid.horizon)
    v0 = u_curr
    vt0 = ut_t0 * t0 ** (-params.ell)
    e_times, e_slices, e_dts, verdict, _ = marcher.march(
        v0, vt0, s0, s_end, "edp", wnd, grid.store_slices,
    )
    verdict.diagnostics["clock"] = "edp"
    verdict.diagnostics["warmup_t0"] = t0
    fld = SpaceTimeField(
        xs=xs, times=np.array(e_times), slices=e_slices, dx=grid.dx,
        geometry=params.geometry, mode="edp", n=params.n, ell=params.ell,
        R=params.R, symmetric=mirror and params.geometry == "line",
        dt_history=e_dts,
    )
    return fld, verdict


def _interp_cubic(x0: float, dx: float, ys: np.ndarray, xq: np.ndarray
                  ) -> np.ndarray:
    """Local 4-point Lagrange interpolation on a uniform grid."""
    n = len(ys)
    s = (np.asarray(xq, dtype=float) - x0) / dx
    i = np.clip(np.floor(s).astype(np.int64), 1, n - 3)
    f = s - i
    ym1, y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1], ys[i + 2]
    return (
        -f * (f - 1.0) * (f - 2.0) / 6.0 * ym1
        + (f * f - 1.0) * (f - 2.0) / 2.0 * y0
        - f * (f + 1.0) * (f - 2.0) / 2.0 * y1
        + f * (f * f - 1.0) / 6.0 * y2
    )


def transverse_integral(rs: np.ndarray, values: np.ndarray, z: float, n: int,
                        order: int = 48, tol: float = 1e-9) -> float:
    """Integral of a radial profile over the hyperplane slice {x1 = z}:

        int_{R^(n-1)} u(sqrt(z^2 + |w|^2)) dw
            = omega int_0^inf u(sqrt(z^2 + rho^2)) rho^(n-2) drho,

    omega = 2 pi^((n-1)/2) / gamma((n-1)/2) (so 2 for n = 2, 2 pi for
    n = 3).  ``values`` samples u on the uniform radial grid ``rs``; the
    profile is taken as zero beyond the grid.  n = 1 returns u(z) itself.
    """
    rs = np.asarray(rs, dtype=float)
    values = np.asarray(values, dtype=float)
    if rs.ndim != 1 or rs.shape != values.shape or len(rs) < 4:
        raise DomainError("transverse_integral: rs/values must be matching 1-d arrays")
    if z < 0.0:
        raise DomainError(f"transverse_integral: z must be >= 0, got {z}")
    r_max = float(rs[-1])
    if z > r_max:
        raise DomainError(f"transverse_integral: z={z} beyond grid radius {r_max}")
    dx = float(rs[1] - rs[0])
    if n == 1:
        return float(_interp_cubic(rs[0], dx, values, np.array([z]))[0])
    omega = 2.0 * math.pi ** ((n - 1) / 2.0) / gamma_fn((n - 1) / 2.0)
    rho_max = math.sqrt(max(r_max * r_max - z * z, 0.0))
    if rho_max == 0.0:
        return 0.0

    def estimate(m: int) -> float:
        rule = gauss_legendre_rule(m)
        total = 0.0
        # a few panels keep the composed integrand comfortably resolved
        edges = np.linspace(0.0, rho_max, 9)
        for a, b in zip(edges[:-1], edges[1:]):
            rho = 0.5 * (rule.nodes + 1.0) * (b - a) + a
            r = np.sqrt(z * z + rho * rho)
            u = _interp_cubic(rs[0], dx, values, r)
            total += 0.5 * (b - a) * float(np.dot(rule.weights,
                                                  u * rho ** (n - 2)))
        return omega * total

    coarse = estimate(order)
    fine = estimate(2 * order)
    if abs(fine - coarse) > tol * max(1.0, abs(fine)):
        # interpolation error dominates; report the finer answer anyway
        return fine
    return fine


def transverse_integral_field(field: SpaceTimeField, z: float,
                              slice_index: int = -1) -> float:
    """Convenience wrapper applying :func:`transverse_integral` to a stored
    radial slice (or, for n = 1 line fields, sampling u at |x| = z)."""
    if field.geometry == "radial" or field.symmetric:
        return transverse_integral(field.xs, field.slices[slice_index], z,
                                   field.n)
    # full-line field: restrict to x >= 0 (data are even in all shipped
    # configurations; the value at x = z is the slice itself)
    return float(_interp_cubic(field.xs[0], field.dx,
                               field.slices[slice_index], np.array([z]))[0])
