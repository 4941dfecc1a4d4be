"""Configuration schema: strict validation with dotted-path reporting."""

import json

import pytest

from tricomi_lab.config import COMMANDS, load_config, parse_config
from tricomi_lab.errors import ConfigError


def _solver_doc(**model_extra):
    model = {
        "n": 1, "ell": 1.0, "R": 1.0, "eps": 0.1, "linear": True,
        "u0": {"kind": "compact_bump", "radius": 0.6, "amplitude": 1.0},
        "u1": {"kind": "compact_bump", "radius": 0.6, "amplitude": 0.5},
    }
    model.update(model_extra)
    return {"model": model, "grid": {"dx": 0.02, "horizon": 2.0}}


def test_minimal_solver_config():
    cfg = parse_config(json.dumps(_solver_doc()), "solve-linear")
    assert cfg.command == "solve-linear"
    assert cfg.model.ell == 1.0
    assert cfg.model.linear
    assert cfg.grid.dx == 0.02
    assert cfg.grid.cfl == 0.8  # default materialized
    assert cfg.seed == 0
    assert cfg.io.stride == 1


def test_defaults_are_recorded():
    cfg = parse_config(_solver_doc(), "solve-linear")
    joined = "\n".join(cfg.defaults_applied)
    assert "grid.cfl = 0.8" in joined
    assert "grid.store_slices = 160" in joined
    assert "seed = 0" in joined


def test_normalized_document_is_default_stable():
    """Spelling out a default by hand produces the same normalized form."""
    doc = _solver_doc()
    a = parse_config(doc, "solve-linear").normalized
    doc["grid"]["cfl"] = 0.8
    b = parse_config(doc, "solve-linear").normalized
    assert a == b


def test_all_errors_collected_with_paths():
    doc = _solver_doc()
    doc["model"]["ell"] = -1.0
    doc["model"]["n"] = 0
    doc["grid"]["dx"] = 0.0
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-linear")
    msgs = exc.value.errors
    assert any(m.startswith("model.ell:") for m in msgs)
    assert any(m.startswith("model.n:") for m in msgs)
    assert any(m.startswith("grid.dx:") for m in msgs)
    assert len(msgs) >= 3


def test_unknown_keys_rejected():
    doc = _solver_doc()
    doc["grid"]["dt"] = 0.01
    doc["turbo"] = True
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-linear")
    msgs = "\n".join(exc.value.errors)
    assert "grid.dt" in msgs
    assert "turbo" in msgs


def test_malformed_json():
    with pytest.raises(ConfigError) as exc:
        parse_config("{not json", "exponents")
    assert exc.value.errors[0].startswith("document: malformed JSON")
    with pytest.raises(ConfigError):
        parse_config(json.dumps([1, 2]), "exponents")


def test_unknown_command():
    with pytest.raises(ConfigError):
        parse_config(_solver_doc(), "calibrate")
    for c in COMMANDS:
        assert isinstance(c, str)


def test_required_sections_per_command():
    with pytest.raises(ConfigError) as exc:
        parse_config({"model": {"n": 1, "ell": 1.0}}, "solve-linear")
    assert any("requires section 'grid'" in m for m in exc.value.errors)
    with pytest.raises(ConfigError) as exc:
        parse_config({}, "comparison-ode")
    assert any("requires section 'ode'" in m for m in exc.value.errors)
    # sf-selftest needs nothing
    assert parse_config({}, "sf-selftest").command == "sf-selftest"


def test_linear_flag_cross_check():
    doc = _solver_doc(linear=False, p=2.0)
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-linear")
    assert any(m.startswith("model.linear:") for m in exc.value.errors)

    doc = _solver_doc()  # linear=True
    doc["detection"] = {}
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-nonlinear")
    assert any(m.startswith("model.linear:") for m in exc.value.errors)


def test_nonlinear_requires_p():
    doc = _solver_doc(linear=False)
    doc["detection"] = {}
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-nonlinear")
    assert any(m.startswith("model.p:") for m in exc.value.errors)


def test_p_lower_bound():
    doc = _solver_doc(linear=False, p=1.0)
    doc["detection"] = {}
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-nonlinear")
    assert any("must be > 1" in m for m in exc.value.errors)


def test_classical_ell_allowed_for_exponents_only():
    doc = {"model": {"n": 3, "ell": 0.0}}
    cfg = parse_config(doc, "exponents")
    assert cfg.exponent_context.ell == 0.0
    with pytest.raises(ConfigError) as exc:
        parse_config(_solver_doc(ell=0.0), "solve-linear")
    assert any("classical limit" in m for m in exc.value.errors)


def test_profile_validation_paths():
    doc = _solver_doc()
    doc["model"]["u0"] = {"kind": "wavelet", "radius": 0.6}
    doc["model"]["u1"] = {"kind": "compact_bump", "radius": -0.5}
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-linear")
    msgs = "\n".join(exc.value.errors)
    assert "model.u0.kind" in msgs
    assert "model.u1.radius" in msgs


def test_custom_sampled_profile_roundtrip():
    doc = _solver_doc()
    doc["model"]["u0"] = {
        "kind": "custom_sampled", "radius": 0.5,
        "samples_x": [-0.5, 0.0, 0.5], "samples_y": [0.0, 1.0, 0.0],
    }
    cfg = parse_config(doc, "solve-linear")
    assert cfg.model.u0(0.0) == 1.0
    doc["model"]["u0"]["samples_y"] = [0.0, "one", 0.0]
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-linear")
    assert any("samples_y" in m for m in exc.value.errors)


def test_functional_cross_checks():
    doc = _solver_doc()
    doc["functional"] = {"z_max": 0.5}
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "functional-check")
    assert any(m.startswith("functional.z_max:") for m in exc.value.errors)
    doc["functional"] = {"z_max": 2.0, "z_min": 0.2}
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "functional-check")
    assert any(m.startswith("functional.z_min:") for m in exc.value.errors)
    doc["functional"] = {"z_max": 2.0}
    cfg = parse_config(doc, "functional-check")
    assert cfg.functional.z_min is None
    assert cfg.functional.count == 33


def test_sweep_section():
    doc = _solver_doc(linear=False, p=2.0)
    doc["detection"] = {}
    doc["sweep"] = {"eps_top": 2.0, "count": 6, "ratio": 2.0,
                    "sensitivities": False}
    cfg = parse_config(doc, "lifespan-sweep")
    assert cfg.sweep.eps_top == 2.0
    assert cfg.sweep.count == 6
    assert not cfg.sweep.sensitivities
    doc["sweep"]["count"] = 2
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "lifespan-sweep")
    assert any(m.startswith("sweep.count:") for m in exc.value.errors)


def test_ode_section():
    doc = {"ode": {"M": 0.5, "p": 2.0, "R": 1.0, "a": 0.75,
                   "eps_count": 3}}
    cfg = parse_config(doc, "comparison-ode")
    assert cfg.ode.C == 1.0
    assert cfg.ode.z_max_factor == 3.0
    assert cfg.ode.eps_count == 3
    doc["ode"]["rtol"] = 0.5  # above the accuracy ceiling
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "comparison-ode")
    assert any(m.startswith("ode.rtol:") for m in exc.value.errors)


def test_type_errors_have_paths():
    doc = _solver_doc()
    doc["grid"]["symmetric"] = "yes"
    doc["grid"]["store_slices"] = 3.5
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, "solve-linear")
    msgs = "\n".join(exc.value.errors)
    assert "grid.symmetric" in msgs
    assert "grid.store_slices" in msgs


def test_load_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(_solver_doc()))
    cfg = load_config(str(path), "solve-linear")
    assert cfg.model.R == 1.0
    with pytest.raises(ConfigError) as exc:
        load_config(str(tmp_path / "absent.json"), "solve-linear")
    assert exc.value.errors[0].startswith("document: cannot read")
