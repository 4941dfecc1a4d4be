"""Run-configuration schema: parsing, validation, and normalization.

A run is described by a JSON object with optional sections

* ``model``      equation parameters and Cauchy data (profiles under
                 ``u0`` / ``u1``),
* ``grid``       discretization controls,
* ``detection``  blow-up detection controls,
* ``sweep``      epsilon ladder for lifespan studies,
* ``functional`` z-grid and tolerance for the characteristic trace check,
* ``ode``        comparison-equation parameters,
* ``io``         output directory and decimation stride,
* ``seed``       integer seed for randomized suites.

Which sections are required depends on the subcommand; validation is
strict everywhere: unknown keys are rejected, every violation is reported
with the dotted path of the offending field, and all errors are collected
before :class:`~tricomi_lab.errors.ConfigError` is raised.  Parsing also
returns the normalized document (defaults materialized) so that artifact
hashes do not depend on which defaults were spelled out.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Mapping

from .errors import ConfigError, DomainError
from .exponents import ExponentContext
from .fd_solver import DetectionConfig, GridConfig, ModelParams
from .profiles import DataProfile

COMMANDS = (
    "exponents",
    "solve-linear",
    "solve-nonlinear",
    "functional-check",
    "lifespan-sweep",
    "comparison-ode",
    "sf-selftest",
)

_REQUIRED_SECTIONS = {
    "exponents": ("model",),
    "solve-linear": ("model", "grid"),
    "solve-nonlinear": ("model", "grid", "detection"),
    "functional-check": ("model", "grid", "functional"),
    "lifespan-sweep": ("model", "grid", "detection", "sweep"),
    "comparison-ode": ("ode",),
    "sf-selftest": (),
}

_LINEAR_COMMANDS = ("solve-linear", "functional-check")
_NONLINEAR_COMMANDS = ("solve-nonlinear", "lifespan-sweep")

_MISSING = object()


@dataclass(frozen=True)
class SweepSpec:
    """Epsilon ladder for lifespan sweeps: eps_top, eps_top/ratio, ..."""

    eps_top: float
    count: int = 8
    ratio: float = math.sqrt(2.0)
    sensitivities: bool = True


@dataclass(frozen=True)
class FunctionalSpec:
    """z-grid and pass tolerance for the characteristic trace check."""

    z_max: float
    z_min: float | None = None  # default: the data radius R
    count: int = 33
    tol: float = 1e-9


@dataclass(frozen=True)
class OdeSpec:
    """Comparison-equation parameters and integration controls."""

    M: float
    p: float
    R: float
    a: float
    C: float = 1.0
    eps: float = 1.0
    eps_count: int = 1
    eps_ratio: float = math.sqrt(2.0)
    z_max_factor: float = 3.0
    divergence: float = 1e12
    rtol: float = 1e-10


@dataclass(frozen=True)
class IoSpec:
    """Output controls; ``out_dir`` may be overridden by the CLI."""

    out_dir: str | None = None
    stride: int = 1


@dataclass(frozen=True)
class RunConfig:
    """Validated run description.

    ``model`` is populated when the model section carries full solver
    data; ``exponent_context`` is always populated from a model section
    (it also accepts the classical limit ell = 0, which the solver
    sections reject).  ``normalized`` is the document with defaults
    materialized, suitable for hashing; ``defaults_applied`` lists the
    fields that were filled in, for explicit logging.
    """

    command: str | None
    model: ModelParams | None
    exponent_context: ExponentContext | None
    grid: GridConfig | None
    detection: DetectionConfig | None
    sweep: SweepSpec | None
    functional: FunctionalSpec | None
    ode: OdeSpec | None
    io: IoSpec
    seed: int
    normalized: dict
    defaults_applied: tuple[str, ...]


class _Section:
    """One mapping being validated; tracks consumed keys and defaults."""

    def __init__(self, obj: Mapping, path: str, errors: list[str],
                 defaults: list[str]):
        self.obj = obj
        self.path = path
        self.errors = errors
        self.defaults = defaults
        self.seen: set[str] = set()

    def _at(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def error(self, key: str, message: str) -> None:
        self.errors.append(f"{self._at(key)}: {message}")

    def raw(self, key: str, default: Any = _MISSING) -> Any:
        self.seen.add(key)
        if key in self.obj:
            return self.obj[key]
        if default is _MISSING:
            self.error(key, "required field is missing")
            return None
        if default is not None:
            self.defaults.append(f"{self._at(key)} = {default!r}")
        return default

    def number(self, key: str, default: Any = _MISSING, *,
               lo: float | None = None, hi: float | None = None,
               lo_open: bool = False, hi_open: bool = False,
               optional: bool = False) -> float | None:
        value = self.raw(key, default)
        if value is None:
            if optional or default is None:
                return None
            return None  # missing-required already recorded
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.error(key, f"must be a number (got {value!r})")
            return None
        value = float(value)
        if not math.isfinite(value):
            self.error(key, f"must be finite (got {value})")
            return None
        if lo is not None and (value < lo or (lo_open and value == lo)):
            self.error(key, f"must be {'>' if lo_open else '>='} {lo} "
                            f"(got {value})")
            return None
        if hi is not None and (value > hi or (hi_open and value == hi)):
            self.error(key, f"must be {'<' if hi_open else '<='} {hi} "
                            f"(got {value})")
            return None
        return value

    def integer(self, key: str, default: Any = _MISSING, *,
                lo: int | None = None, hi: int | None = None,
                optional: bool = False) -> int | None:
        value = self.raw(key, default)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            self.error(key, f"must be an integer (got {value!r})")
            return None
        if lo is not None and value < lo:
            self.error(key, f"must be >= {lo} (got {value})")
            return None
        if hi is not None and value > hi:
            self.error(key, f"must be <= {hi} (got {value})")
            return None
        return value

    def boolean(self, key: str, default: Any = _MISSING) -> bool | None:
        value = self.raw(key, default)
        if value is None:
            return None
        if not isinstance(value, bool):
            self.error(key, f"must be true or false (got {value!r})")
            return None
        return value

    def string(self, key: str, default: Any = _MISSING, *,
               choices: tuple[str, ...] | None = None) -> str | None:
        value = self.raw(key, default)
        if value is None:
            return None
        if not isinstance(value, str):
            self.error(key, f"must be a string (got {value!r})")
            return None
        if choices is not None and value not in choices:
            self.error(key, f"must be one of {', '.join(choices)} "
                            f"(got {value!r})")
            return None
        return value

    def subsection(self, key: str) -> "_Section | None":
        value = self.raw(key, None)
        if value is None:
            return None
        if not isinstance(value, Mapping):
            self.error(key, f"must be an object (got {type(value).__name__})")
            return None
        return _Section(value, self._at(key), self.errors, self.defaults)

    def close(self) -> None:
        for key in sorted(set(self.obj) - self.seen):
            self.error(key, "unknown key")


def _parse_profile(parent: _Section, key: str,
                   required: bool) -> tuple[DataProfile | None, dict | None]:
    sec = parent.subsection(key)
    if sec is None:
        if required and key not in parent.obj:
            parent.error(key, "required field is missing")
        return None, None
    kind = sec.string("kind", choices=(
        "gaussian_bump", "compact_bump", "constant_on_interval",
        "custom_sampled"))
    radius = sec.number("radius", lo=0.0, lo_open=True)
    amplitude = sec.number("amplitude", 1.0)
    normalized: dict[str, Any] = {"kind": kind, "radius": radius,
                                  "amplitude": amplitude}
    extra: dict[str, Any] = {}
    if kind == "compact_bump":
        power = sec.integer("power", 4, lo=2)
        extra["power"] = power
        normalized["power"] = power
    if kind == "constant_on_interval":
        center = sec.number("center", 0.0)
        extra["center"] = center
        normalized["center"] = center
    if kind == "custom_sampled":
        for axis in ("samples_x", "samples_y"):
            vals = sec.raw(axis)
            if vals is not None and (not isinstance(vals, list) or any(
                    isinstance(v, bool) or not isinstance(v, (int, float))
                    for v in vals)):
                sec.error(axis, "must be a list of numbers")
                vals = None
            extra[axis] = vals
            normalized[axis] = vals
    sec.close()
    if sec.errors or kind is None or radius is None or amplitude is None:
        return None, normalized
    try:
        profile = DataProfile(kind=kind, support_radius=radius,
                              amplitude=amplitude, **extra)
    except DomainError as exc:
        parent.error(key, str(exc))
        return None, normalized
    return profile, normalized


def _parse_model(sec: _Section, command: str | None):
    """Validate the model section.

    Returns (ModelParams | None, ExponentContext | None, normalized).
    The exponent context tolerates ell = 0 (classical limit); the solver
    object is built only when the full solver fields validate and
    requires ell > 0.
    """
    solver_command = command is not None and command != "exponents"
    n = sec.integer("n", lo=1)
    ell = sec.number("ell", lo=0.0)
    if ell == 0.0 and solver_command:
        sec.error("ell", "must be > 0 for solver runs; the classical "
                         "limit ell = 0 is supported by the exponents "
                         "command only")
    p = sec.number("p", None, lo=1.0, lo_open=True, optional=True)
    linear = sec.boolean("linear", False)
    full = solver_command or any(
        k in sec.obj for k in ("R", "eps", "u0", "u1", "mode", "geometry"))
    normalized: dict[str, Any] = {"n": n, "ell": ell, "linear": linear}
    if p is not None:
        normalized["p"] = p

    params = None
    if full:
        R = sec.number("R", lo=0.0, lo_open=True)
        eps = sec.number("eps", lo=0.0)
        mode = sec.string("mode", "tricomi", choices=("tricomi", "edp"))
        geometry = sec.string("geometry", "line", choices=("line", "radial"))
        u0, u0_norm = _parse_profile(sec, "u0", required=True)
        u1, u1_norm = _parse_profile(sec, "u1", required=True)
        normalized.update({"R": R, "eps": eps, "mode": mode,
                           "geometry": geometry, "u0": u0_norm,
                           "u1": u1_norm})
        ok = None not in (n, ell, R, eps, mode, geometry, u0, u1, linear)
        if ok and not linear and p is None:
            sec.error("p", "required for nonlinear runs (must be > 1)")
            ok = False
        if ok and ell == 0.0:
            ok = False  # already reported above for solver commands
        if ok:
            try:
                params = ModelParams(n=n, ell=ell, R=R, eps=eps, u0=u0,
                                     u1=u1, p=p, mode=mode,
                                     geometry=geometry, linear=linear)
            except DomainError as exc:
                sec.error("", str(exc))

    context = None
    if n is not None and ell is not None:
        try:
            context = ExponentContext(n=n, ell=ell, p=p,
                                      allow_classical=(ell == 0.0))
        except DomainError as exc:
            sec.error("", str(exc))
    sec.close()
    return params, context, normalized


def _parse_grid(sec: _Section):
    dx = sec.number("dx", lo=0.0, lo_open=True)
    horizon = sec.number("horizon", lo=0.0, lo_open=True)
    cfl = sec.number("cfl", 0.8, lo=0.0, lo_open=True, hi=0.9)
    margin = sec.number("margin", 0.5, lo=0.0)
    t_floor = sec.number("t_floor", None, lo=0.0, lo_open=True, optional=True)
    store_slices = sec.integer("store_slices", 160, lo=2)
    symmetric = sec.boolean("symmetric", False)
    edp_t0 = sec.number("edp_t0", None, lo=0.0, lo_open=True, optional=True)
    nl_dt_safety = sec.number("nl_dt_safety", 0.35, lo=0.0, lo_open=True)
    sec.close()
    normalized = {"dx": dx, "horizon": horizon, "cfl": cfl, "margin": margin,
                  "t_floor": t_floor, "store_slices": store_slices,
                  "symmetric": symmetric, "edp_t0": edp_t0,
                  "nl_dt_safety": nl_dt_safety}
    if sec.errors or None in (dx, horizon, cfl, margin, store_slices,
                              symmetric, nl_dt_safety):
        return None, normalized
    try:
        grid = GridConfig(dx=dx, horizon=horizon, cfl=cfl, margin=margin,
                          t_floor=t_floor, store_slices=store_slices,
                          symmetric=symmetric, edp_t0=edp_t0,
                          nl_dt_safety=nl_dt_safety)
    except DomainError as exc:
        sec.error("", str(exc))
        return None, normalized
    return grid, normalized


def _parse_detection(sec: _Section):
    factor = sec.number("threshold_factor", 1e6, lo=0.0, lo_open=True)
    threshold = sec.number("threshold", None, lo=0.0, lo_open=True,
                           optional=True)
    dt_min = sec.number("dt_min", 1e-10, lo=0.0, lo_open=True)
    max_steps = sec.integer("max_steps", 20_000_000, lo=1)
    sec.close()
    normalized = {"threshold_factor": factor, "threshold": threshold,
                  "dt_min": dt_min, "max_steps": max_steps}
    if sec.errors or None in (factor, dt_min, max_steps):
        return None, normalized
    return DetectionConfig(threshold_factor=factor, threshold=threshold,
                           dt_min=dt_min, max_steps=max_steps), normalized


def _parse_sweep(sec: _Section):
    eps_top = sec.number("eps_top", lo=0.0, lo_open=True)
    count = sec.integer("count", 8, lo=4)
    ratio = sec.number("ratio", math.sqrt(2.0), lo=1.0, lo_open=True)
    sens = sec.boolean("sensitivities", True)
    sec.close()
    normalized = {"eps_top": eps_top, "count": count, "ratio": ratio,
                  "sensitivities": sens}
    if sec.errors or None in (eps_top, count, ratio, sens):
        return None, normalized
    return SweepSpec(eps_top=eps_top, count=count, ratio=ratio,
                     sensitivities=sens), normalized


def _parse_functional(sec: _Section):
    z_max = sec.number("z_max", lo=0.0, lo_open=True)
    z_min = sec.number("z_min", None, lo=0.0, lo_open=True, optional=True)
    count = sec.integer("count", 33, lo=2)
    tol = sec.number("tol", 1e-9, lo=0.0)
    sec.close()
    normalized = {"z_max": z_max, "z_min": z_min, "count": count, "tol": tol}
    if sec.errors or None in (z_max, count, tol):
        return None, normalized
    return FunctionalSpec(z_max=z_max, z_min=z_min, count=count,
                          tol=tol), normalized


def _parse_ode(sec: _Section):
    M = sec.number("M", lo=0.0, lo_open=True)
    p = sec.number("p", lo=1.0, lo_open=True)
    R = sec.number("R", lo=0.0, lo_open=True)
    a = sec.number("a")
    C = sec.number("C", 1.0, lo=0.0, lo_open=True)
    eps = sec.number("eps", 1.0, lo=0.0, lo_open=True)
    eps_count = sec.integer("eps_count", 1, lo=1)
    eps_ratio = sec.number("eps_ratio", math.sqrt(2.0), lo=1.0, lo_open=True)
    z_max_factor = sec.number("z_max_factor", 3.0, lo=1.0, lo_open=True)
    divergence = sec.number("divergence", 1e12, lo=1.0, lo_open=True)
    rtol = sec.number("rtol", 1e-10, lo=0.0, lo_open=True, hi=1e-2)
    sec.close()
    normalized = {"M": M, "p": p, "R": R, "a": a, "C": C, "eps": eps,
                  "eps_count": eps_count, "eps_ratio": eps_ratio,
                  "z_max_factor": z_max_factor, "divergence": divergence,
                  "rtol": rtol}
    if sec.errors or None in (M, p, R, a, C, eps, eps_count, eps_ratio,
                              z_max_factor, divergence, rtol):
        return None, normalized
    return OdeSpec(M=M, p=p, R=R, a=a, C=C, eps=eps, eps_count=eps_count,
                   eps_ratio=eps_ratio, z_max_factor=z_max_factor,
                   divergence=divergence, rtol=rtol), normalized


def _parse_io(sec: _Section):
    out_dir = sec.string("out_dir", None)
    stride = sec.integer("stride", 1, lo=1)
    sec.close()
    normalized = {"out_dir": out_dir, "stride": stride}
    if sec.errors or stride is None:
        return None, normalized
    return IoSpec(out_dir=out_dir, stride=stride), normalized


def parse_config(document: str | bytes | Mapping,
                 command: str | None = None) -> RunConfig:
    """Validate a JSON run configuration.

    ``document`` is JSON text or an already-decoded mapping; ``command``
    (one of :data:`COMMANDS`) activates the per-command section
    requirements.  Raises :class:`ConfigError` carrying every violation,
    each prefixed with the dotted path of the offending field.
    """
    if command is not None and command not in COMMANDS:
        raise ConfigError([f"command: unknown command {command!r}"])
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"document: malformed JSON ({exc})"]) from exc
    if not isinstance(document, Mapping):
        raise ConfigError(["document: top level must be a JSON object"])

    errors: list[str] = []
    defaults: list[str] = []
    top = _Section(document, "", errors, defaults)

    model = context = None
    normalized: dict[str, Any] = {}
    sec = top.subsection("model")
    if sec is not None:
        model, context, normalized["model"] = _parse_model(sec, command)

    grid = detection = sweep = functional = ode = None
    for name, parser in (("grid", _parse_grid),
                         ("detection", _parse_detection),
                         ("sweep", _parse_sweep),
                         ("functional", _parse_functional),
                         ("ode", _parse_ode)):
        sec = top.subsection(name)
        if sec is not None:
            parsed, norm = parser(sec)
            normalized[name] = norm
            if name == "grid":
                grid = parsed
            elif name == "detection":
                detection = parsed
            elif name == "sweep":
                sweep = parsed
            elif name == "functional":
                functional = parsed
            else:
                ode = parsed

    sec = top.subsection("io")
    if sec is not None:
        io, normalized["io"] = _parse_io(sec)
    else:
        io = IoSpec()
        normalized["io"] = {"out_dir": None, "stride": 1}
    seed = top.integer("seed", 0, lo=0)
    normalized["seed"] = seed
    top.close()

    if command is not None:
        for required in _REQUIRED_SECTIONS[command]:
            present = "model" if required == "model" else required
            if present not in document:
                errors.append(f"document: command {command!r} requires "
                              f"section {required!r}")
        if command in _LINEAR_COMMANDS and model is not None \
                and not model.linear:
            errors.append(f"model.linear: {command} runs the linear "
                          f"equation; set linear = true")
        if command in _NONLINEAR_COMMANDS and model is not None \
                and model.linear:
            errors.append(f"model.linear: {command} runs the nonlinear "
                          f"equation; set linear = false")
        if command == "exponents" and context is None \
                and "model" in document and not errors:
            errors.append("model: could not build an exponent context")

    if functional is not None and model is not None:
        z_min = functional.z_min if functional.z_min is not None else model.R
        if z_min < model.R:
            errors.append(f"functional.z_min: must be >= model.R = "
                          f"{model.R} (got {z_min})")
        elif functional.z_max <= z_min:
            errors.append(f"functional.z_max: must exceed z_min = {z_min} "
                          f"(got {functional.z_max})")

    if errors:
        raise ConfigError(errors)
    return RunConfig(command=command, model=model, exponent_context=context,
                     grid=grid, detection=detection, sweep=sweep,
                     functional=functional, ode=ode, io=io, seed=seed,
                     normalized=normalized,
                     defaults_applied=tuple(defaults))


def load_config(path: str, command: str | None = None) -> RunConfig:
    """Read and validate a configuration file (thin file wrapper)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError([f"document: cannot read {path} ({exc})"]) from exc
    return parse_config(text, command)
