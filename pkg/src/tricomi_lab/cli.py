"""Command-line entry point.

One binary, seven subcommands:

* ``exponents``        exponent algebra report for (n, ell, p),
* ``solve-linear``     linear marching run with stored slices,
* ``solve-nonlinear``  nonlinear run with blow-up detection,
* ``functional-check`` characteristic trace against the data-term bound,
* ``lifespan-sweep``   lifespan ladder plus scaling-law fit,
* ``comparison-ode``   comparison equation versus its closed form,
* ``sf-selftest``      special-function dual-route consistency checks.

Every subcommand reads a JSON configuration (``--config``), writes its
artifacts plus a digest manifest into one directory, and prints a short
human summary.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure or inconclusive outcome, 4 IO error.  The default output root is
``$TRICOMI_LAB_OUT`` (falling back to ./runs), with one subdirectory per
subcommand; ``--out`` or the config's ``io.out_dir`` select an explicit
directory instead.  Concurrency (``--threads``) happens inside the
numerical modules; all file IO stays on this single thread.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import plotting
from .blowup_lab import (ComparisonODE, critical_sweep, default_eps_ladder,
                         lifespan_sweep, ode_blowup_point, ode_integrate)
from .config import COMMANDS, RunConfig, load_config, parse_config
from .errors import (ConfigError, DomainError, IntegrityError,
                     QuadratureError, SolverError)
from .exponents import (conjectured_critical_p, critical_condition_residual,
                        generalized_strauss, lifespan_exponent,
                        quasi_homogeneous_dimension, scaling_identity_residual,
                        sobolev_exponent)
from .fd_solver import run
from .functional import (K_constant, check_data_term_bound, evaluate_U,
                         l1_data_norm)
from .kernel import phi
from .persistence import (config_hash, json_safe, persist_run, render_csv,
                          render_json)

logger = logging.getLogger(__name__)

ENV_OUT_ROOT = "TRICOMI_LAB_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _resolve_out_dir(args, cfg: RunConfig) -> str:
    if args.out:
        return args.out
    if cfg.io.out_dir:
        return cfg.io.out_dir
    root = os.environ.get(ENV_OUT_ROOT, "runs")
    return os.path.join(root, args.command)


def _field_csv(field, stride: int) -> str:
    rows = []
    for i in range(0, len(field.times), stride):
        t = float(field.times[i])
        values = field.slices[i]
        for j in range(0, len(field.xs), stride):
            rows.append((i, t, float(field.xs[j]), float(values[j])))
    clock = "s = phi(t)" if field.mode == "edp" else "t"
    return render_csv(
        ("slice", "time", "x", "u"),
        rows,
        units=("1", clock, "length", "amplitude"),
        comments=(f"geometry {field.geometry}, mode {field.mode}, "
                  f"dx {field.dx}",))


def _verdict_payload(verdict) -> dict:
    return {
        "status": verdict.status,
        "trigger": verdict.trigger,
        "t_lower": None if verdict.t_lower is None else verdict.t_lower,
        "t_upper": None if verdict.t_upper is None else verdict.t_upper,
        "lifespan_estimate": (None if verdict.lifespan_estimate is None
                              else verdict.lifespan_estimate),
        "threshold": verdict.threshold,
    }


def _cmd_exponents(cfg: RunConfig, out_dir: str, threads: int) -> int:
    ctx = cfg.exponent_context
    m = ctx.m
    payload: dict = {
        "n": ctx.n,
        "ell": ctx.ell,
        "gamma": ctx.gamma,
        "effective_dimension": m,
        "quasi_homogeneous_dimension": quasi_homogeneous_dimension(ctx),
        "conjectured_critical_p": json_safe(conjectured_critical_p(ctx))
        if m > 1.0 else "undefined (effective dimension <= 1)",
        "generalized_strauss": generalized_strauss(ctx) if m > 1.0
        else "undefined (effective dimension <= 1)",
        "sobolev_exponent": sobolev_exponent(m) if m > 2.0
        else "undefined (effective dimension <= 2)",
    }
    if ctx.p is not None:
        payload["p"] = ctx.p
        payload["critical_condition_residual"] = \
            critical_condition_residual(ctx)
        payload["scaling_identity_residual"] = scaling_identity_residual(ctx)
        try:
            law = lifespan_exponent(ctx)
            payload["lifespan_law"] = {
                "kind": law.kind,
                "slope": law.slope,
                "rate": law.rate,
            }
        except DomainError as exc:
            payload["lifespan_law"] = str(exc)
    cfg_hash = config_hash(cfg.normalized)
    persist_run({"exponents.json": render_json(payload,
                                               config_hash=cfg_hash)},
                out_dir, cfg_hash)
    print(f"exponents: n={ctx.n} ell={ctx.ell} gamma={ctx.gamma:.6g} "
          f"m={m:.6g}")
    if isinstance(payload["conjectured_critical_p"], float):
        print(f"  conjectured critical p = "
              f"{payload['conjectured_critical_p']:.12g}")
    if ctx.p is not None and isinstance(payload.get("lifespan_law"), dict):
        law = payload["lifespan_law"]
        if law["kind"] == "subcritical":
            print(f"  lifespan law: T <= C eps^({law['slope']:.6g})")
        else:
            print(f"  lifespan law: log T <= C eps^(-{law['rate']:.6g})")
    return EXIT_OK


def _cmd_solve(cfg: RunConfig, out_dir: str, threads: int) -> int:
    detection = cfg.detection
    if detection is None:
        from .fd_solver import DetectionConfig
        detection = DetectionConfig()
    field, verdict = run(cfg.model, cfg.grid, detection)
    cfg_hash = config_hash(cfg.normalized)
    outputs = {
        "field.csv": _field_csv(field, cfg.io.stride),
        "verdict.json": render_json(_verdict_payload(verdict),
                                    config_hash=cfg_hash),
        "snapshots.svg": plotting.render_figure_svg(
            plotting.field_snapshot_figure(field)),
    }
    persist_run(outputs, out_dir, cfg_hash)
    print(f"run: status={verdict.status}"
          + (f" trigger={verdict.trigger}" if verdict.trigger else "")
          + (f" T in [{verdict.t_lower:.6g}, {verdict.t_upper:.6g}]"
             if verdict.t_lower is not None else ""))
    print(f"  stored {len(field.times)} slices, grid {len(field.xs)} "
          f"points, artifacts in {out_dir}")
    return EXIT_NUMERICAL if verdict.status == "inconclusive" else EXIT_OK


def _cmd_functional(cfg: RunConfig, out_dir: str, threads: int) -> int:
    spec = cfg.functional
    field, verdict = run(cfg.model, cfg.grid, _default_detection(cfg))
    if verdict.status != "completed":
        print(f"functional-check: linear run ended {verdict.status}; "
              f"cannot evaluate the trace", file=sys.stderr)
        return EXIT_NUMERICAL
    z_min = spec.z_min if spec.z_min is not None else cfg.model.R
    zs = np.linspace(z_min, spec.z_max, spec.count)
    trace = evaluate_U(field, cfg.model, zs)
    report = check_data_term_bound(trace, cfg.model, tol=spec.tol)
    cfg_hash = config_hash(cfg.normalized)
    rows = [(float(z), float(t), float(u), report.bound, float(mgn))
            for z, t, u, mgn in zip(trace.zs, trace.times, trace.U,
                                    report.margins)]
    outputs = {
        "trace.csv": render_csv(
            ("z", "t", "U", "bound", "margin"), rows,
            units=("length", "time", "amplitude", "amplitude",
                   "amplitude")),
        "report.json": render_json({
            "passed": report.passed,
            "bound": report.bound,
            "K": K_constant(cfg.model),
            "l1_data_norm": l1_data_norm(cfg.model),
            "worst_margin": report.worst_margin,
            "worst_z": report.worst_z,
            "tol": report.tol,
        }, config_hash=cfg_hash),
        "trace.svg": plotting.render_figure_svg(
            plotting.trace_figure(trace, report.bound)),
    }
    persist_run(outputs, out_dir, cfg_hash)
    print(f"functional-check: {'PASS' if report.passed else 'FAIL'} "
          f"(bound {report.bound:.6g}, worst margin "
          f"{report.worst_margin:.6g} at z={report.worst_z:.6g})")
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def _default_detection(cfg: RunConfig):
    if cfg.detection is not None:
        return cfg.detection
    from .fd_solver import DetectionConfig
    return DetectionConfig()


def _record_rows(records) -> list[tuple]:
    rows = []
    for r in records:
        mid = r.t_mid if r.usable else None
        rows.append((r.eps, r.status, r.t_lower, r.t_upper, mid, r.dx,
                     r.threshold, r.horizon, r.trigger or ""))
    return rows


_RECORD_COLUMNS = ("eps", "status", "t_lower", "t_upper", "t_mid", "dx",
                   "threshold", "horizon", "trigger")
_RECORD_UNITS = ("1", "1", "time", "time", "time", "length", "amplitude",
                 "time", "1")


def _cmd_sweep(cfg: RunConfig, out_dir: str, threads: int) -> int:
    spec = cfg.sweep
    ladder = default_eps_ladder(spec.eps_top, spec.count, spec.ratio)
    from .exponents import ExponentContext
    ctx = ExponentContext(n=cfg.model.n, ell=cfg.model.ell, p=cfg.model.p)
    p_crit = conjectured_critical_p(ctx)
    critical = abs(cfg.model.p - p_crit) <= 1e-9 * p_crit
    cfg_hash = config_hash(cfg.normalized)
    if critical:
        report = critical_sweep(cfg.model, cfg.grid, _default_detection(cfg),
                                ladder, threads=threads)
        payload = {
            "kind": "critical",
            "loglog_slope": json_safe(report.loglog_slope),
            "theoretical_slope": report.theoretical_slope,
            "envelope_constant": json_safe(report.envelope_constant),
            "superlinear": report.superlinear,
            "inconclusive": report.inconclusive,
            "notes": report.notes,
        }
        verdict_bad = report.inconclusive
        slope, intercept = None, None
        print(f"lifespan-sweep (critical): superlinear="
              f"{report.superlinear} inconclusive={report.inconclusive}")
    else:
        report = lifespan_sweep(cfg.model, cfg.grid, _default_detection(cfg),
                                ladder,
                                compute_sensitivities=spec.sensitivities,
                                threads=threads)
        payload = {
            "kind": "subcritical",
            "slope": json_safe(report.slope),
            "slope_stderr": json_safe(report.slope_stderr),
            "intercept": json_safe(report.intercept),
            "theoretical_slope": report.theoretical_slope,
            "threshold_sensitivity": None
            if report.threshold_sensitivity is None
            else json_safe(report.threshold_sensitivity),
            "grid_sensitivity": None if report.grid_sensitivity is None
            else json_safe(report.grid_sensitivity),
            "insufficient_data": report.insufficient_data,
            "notes": report.notes,
        }
        verdict_bad = report.insufficient_data
        slope, intercept = report.slope, report.intercept
        print(f"lifespan-sweep: slope {report.slope:.4f} +- "
              f"{report.slope_stderr:.4f} (theory "
              f"{report.theoretical_slope:.4f})")
    outputs = {
        "records.csv": render_csv(_RECORD_COLUMNS,
                                  _record_rows(report.records),
                                  units=_RECORD_UNITS),
        "report.json": render_json(payload, config_hash=cfg_hash),
        "sweep.svg": plotting.render_figure_svg(
            plotting.sweep_figure(report.records, slope, intercept)),
    }
    persist_run(outputs, out_dir, cfg_hash)
    for note in report.notes:
        logger.info("note: %s", note)
    return EXIT_NUMERICAL if verdict_bad else EXIT_OK


def _cmd_ode(cfg: RunConfig, out_dir: str, threads: int) -> int:
    spec = cfg.ode
    ode = ComparisonODE(C=spec.C, M=spec.M, p=spec.p, R=spec.R, a=spec.a)
    ladder = [spec.eps / spec.eps_ratio ** k for k in range(spec.eps_count)]
    rows = []
    worst = 0.0
    bad = False
    first_traj = None
    first_closed = None
    for eps in ladder:
        z_closed = ode_blowup_point(ode, eps)
        if math.isfinite(z_closed):
            z_max = spec.z_max_factor * z_closed
        else:
            z_max = 1000.0 * ode.R  # confirm no early divergence
        traj = ode_integrate(ode, z_max=z_max, eps=eps,
                             divergence=spec.divergence, rtol=spec.rtol)
        if first_traj is None:
            first_traj, first_closed = traj, z_closed
        rel = None
        if math.isfinite(z_closed) and traj.z_event is not None:
            rel = abs(traj.z_event - z_closed) / z_closed
            worst = max(worst, rel)
        if (math.isfinite(z_closed) and traj.status != "diverged") or \
                traj.status == "inconclusive":
            bad = True
        rows.append((eps, json_safe(z_closed), traj.status,
                     traj.z_event, rel))
    cfg_hash = config_hash(cfg.normalized)
    outputs = {
        "events.csv": render_csv(
            ("eps", "z_closed_form", "status", "z_detected",
             "rel_deviation"), rows,
            units=("1", "length", "1", "length", "1")),
        "report.json": render_json({
            "a": ode.a,
            "critical": ode.critical,
            "worst_rel_deviation": worst,
            "all_consistent": not bad,
        }, config_hash=cfg_hash),
        "trajectory.svg": plotting.render_figure_svg(
            plotting.ode_figure(first_traj,
                                first_closed if first_closed is not None
                                and math.isfinite(first_closed) else None)),
    }
    persist_run(outputs, out_dir, cfg_hash)
    print(f"comparison-ode: {len(ladder)} run(s), worst closed-form "
          f"deviation {worst:.3e}" + (" (INCONSISTENT)" if bad else ""))
    return EXIT_NUMERICAL if bad else EXIT_OK


def _cmd_selftest(cfg: RunConfig, out_dir: str, threads: int) -> int:
    from .special_functions import (_SERIES_SWITCH, gamma_fn, gauss_limit,
                                    gauss_jacobi_rule, gauss_legendre_rule,
                                    hyp2f1_diag)

    rng = np.random.default_rng(cfg.seed)
    checks: list[tuple[str, float, float]] = []  # name, worst, tolerance

    # gamma against the exp(lgamma) route
    xs = np.concatenate([rng.uniform(0.02, 5.0, 200),
                         rng.uniform(5.0, 30.0, 50)])
    worst = max(abs(gamma_fn(float(x)) - math.exp(math.lgamma(float(x))))
                / math.exp(math.lgamma(float(x))) for x in xs)
    checks.append(("gamma_vs_lgamma", worst, 1e-12))

    # gamma recurrence x * Gamma(x) = Gamma(x+1)
    worst = max(abs(float(x) * gamma_fn(float(x)) - gamma_fn(float(x) + 1.0))
                / gamma_fn(float(x) + 1.0) for x in xs)
    checks.append(("gamma_recurrence", worst, 1e-12))

    # hypergeometric branch agreement at the crossover point: the same z
    # evaluated through the direct series and the connection formula
    from .special_functions import _hyp_diag_connection, _hyp_series

    gammas = np.linspace(0.02, 0.48, 24)
    worst = 0.0
    for g in gammas:
        series = float(_hyp_series(float(g), float(g), 1.0,
                                   np.array([_SERIES_SWITCH]))[0])
        conn = float(_hyp_diag_connection(
            float(g), np.array([1.0 - _SERIES_SWITCH]))[0])
        worst = max(worst, abs(conn - series) / abs(series))
    checks.append(("hyp2f1_crossover", worst, 1e-9))

    # limit value at z -> 1- against an independent log-gamma route
    worst = 0.0
    for g in gammas:
        lim = hyp2f1_diag(float(g), 1.0)
        ref = math.exp(math.lgamma(1.0 - 2.0 * float(g))
                       - 2.0 * math.lgamma(1.0 - float(g)))
        worst = max(worst, abs(lim - ref) / ref)
    checks.append(("hyp2f1_gauss_limit", worst, 1e-9))

    # quadrature rules against closed-form moments
    rule = gauss_legendre_rule(24)
    worst = 0.0
    for k in range(0, 2 * 24, 7):
        exact = 0.0 if k % 2 else 2.0 / (k + 1.0)
        got = float(np.dot(rule.weights, rule.nodes ** k))
        worst = max(worst, abs(got - exact))
    checks.append(("gauss_legendre_moments", worst, 1e-12))

    worst = 0.0
    for g in (0.1, 0.25, 0.4):
        rule = gauss_jacobi_rule(-g, -g, 20)
        # integral of (1-s^2)^(-g) over [-1, 1] = sqrt(pi) G(1-g) / G(3/2-g)
        exact = math.sqrt(math.pi) * gamma_fn(1.0 - g) / gamma_fn(1.5 - g)
        got = float(np.sum(rule.weights))
        worst = max(worst, abs(got - exact) / exact)
    checks.append(("gauss_jacobi_mass", worst, 1e-12))

    payload = {"checks": [
        {"name": name, "worst": worst, "tol": tol, "passed": worst <= tol}
        for name, worst, tol in checks]}
    failed = [name for name, worst, tol in checks if worst > tol]
    payload["passed"] = not failed
    cfg_hash = config_hash(cfg.normalized)
    persist_run({"selftest.json": render_json(payload,
                                              config_hash=cfg_hash)},
                out_dir, cfg_hash)
    for name, worst, tol in checks:
        status = "PASS" if worst <= tol else "FAIL"
        print(f"  {status} {name}: worst {worst:.3e} (tol {tol:.0e})")
    print(f"sf-selftest: {'PASS' if not failed else 'FAIL'}")
    return EXIT_OK if not failed else EXIT_NUMERICAL


_HANDLERS = {
    "exponents": _cmd_exponents,
    "solve-linear": _cmd_solve,
    "solve-nonlinear": _cmd_solve,
    "functional-check": _cmd_functional,
    "lifespan-sweep": _cmd_sweep,
    "comparison-ode": _cmd_ode,
    "sf-selftest": _cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tricomi-lab",
        description="Numerical laboratory for the degenerate wave operator "
                    "d_tt - t^(2l) Laplace with derivative nonlinearity.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} pipeline")
        cmd.add_argument("--config", metavar="PATH",
                         required=(name != "sf-selftest"),
                         help="JSON run configuration")
        cmd.add_argument("--out", metavar="DIR", default=None,
                         help=f"output directory (default: "
                              f"$({ENV_OUT_ROOT})/{name})")
        cmd.add_argument("--threads", type=int, default=1, metavar="N",
                         help="worker threads for sweeps (default 1)")
        cmd.add_argument("--verbose", action="store_true",
                         help="debug-level logging")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config is not None:
            cfg = load_config(args.config, args.command)
        else:
            cfg = parse_config({}, args.command)
        for entry in cfg.defaults_applied:
            logger.info("default applied: %s", entry)
        if args.threads < 1:
            raise ConfigError(["threads: must be >= 1"])
        out_dir = _resolve_out_dir(args, cfg)
        return _HANDLERS[args.command](cfg, out_dir, args.threads)
    except ConfigError as exc:
        for message in exc.errors:
            print(f"config error: {message}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, SolverError, QuadratureError,
            IntegrityError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
