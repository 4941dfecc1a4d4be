"""Deterministic artifact rendering and content-addressed manifests.

Runs communicate through plain files: CSV tables, canonical JSON, and SVG
figures.  The contract is byte-exactness: rendering the same data twice
yields identical bytes, so a configuration hash plus the manifest digests
certify a reproduced run.  To that end

* floats are written with 17 significant digits (full round-trip),
* JSON is emitted with sorted keys and a fixed layout, non-finite floats
  are rejected at the door (encode them explicitly as strings upstream),
* the manifest records a sha256 digest per artifact; only the manifest
  itself carries a timestamp, never the artifacts.

Writes go through a temp-file rename with cleanup of everything already
written when a later write fails, so a crashed run never leaves a
half-valid artifact directory behind.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Mapping, Sequence

from .errors import IntegrityError

TOOL_NAME = "tricomi-lab"
TOOL_VERSION = "0.1.0"
MANIFEST_NAME = "manifest.json"


def format_float(value: float) -> str:
    """Render a float with 17 significant digits (exact round-trip)."""
    return format(float(value), ".17g")


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    text = str(value)
    if any(ch in text for ch in ",\"\n"):
        text = '"' + text.replace('"', '""') + '"'
    return text


def render_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]], *,
               units: Sequence[str] | None = None,
               comments: Sequence[str] | None = None) -> str:
    """Render a CSV table with a header row and documented column units.

    ``units`` (one entry per column, "1" for dimensionless) and any extra
    ``comments`` go into '#'-prefixed lines above the header so the body
    stays plain CSV.
    """
    if units is not None and len(units) != len(columns):
        raise ValueError("render_csv: units must match columns")
    lines: list[str] = []
    for comment in comments or ():
        lines.append(f"# {comment}")
    if units is not None:
        pairs = ", ".join(f"{c} [{u}]" for c, u in zip(columns, units))
        lines.append(f"# units: {pairs}")
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("render_csv: row width does not match header")
        lines.append(",".join(_format_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _reject_nonfinite(node: Any, path: str) -> None:
    if isinstance(node, float):
        if not math.isfinite(node):
            raise ValueError(f"render_json: non-finite float at {path}; "
                             f"encode it explicitly (e.g. as a string)")
    elif isinstance(node, Mapping):
        for key, value in node.items():
            _reject_nonfinite(value, f"{path}.{key}")
    elif isinstance(node, (list, tuple)):
        for i, value in enumerate(node):
            _reject_nonfinite(value, f"{path}[{i}]")


def render_json(payload: Mapping, *, config_hash: str | None = None) -> str:
    """Render canonical JSON (sorted keys, two-space indent, no NaN).

    Every artifact carries the tool name/version; ``config_hash`` stamps
    the configuration that produced it.
    """
    body = dict(payload)
    body.setdefault("tool", TOOL_NAME)
    body.setdefault("tool_version", TOOL_VERSION)
    if config_hash is not None:
        body.setdefault("config_hash", config_hash)
    _reject_nonfinite(body, "$")
    return json.dumps(body, sort_keys=True, indent=2, allow_nan=False,
                      ensure_ascii=False) + "\n"


def json_safe(value: float) -> float | str:
    """Map non-finite floats to their string names for JSON payloads."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def config_hash(normalized: Mapping) -> str:
    """sha256 over the canonical encoding of a normalized configuration."""
    text = json.dumps(normalized, sort_keys=True, separators=(",", ":"),
                      allow_nan=False, ensure_ascii=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class OutputDigest:
    path: str  # relative to the run directory
    sha256: str
    bytes: int


@dataclass(frozen=True)
class RunRecord:
    """Manifest content: what a run produced and under which config."""

    config_hash: str
    tool_version: str
    created_utc: str
    outputs: tuple[OutputDigest, ...]

    def to_payload(self) -> dict:
        return {
            "tool": TOOL_NAME,
            "tool_version": self.tool_version,
            "config_hash": self.config_hash,
            "created_utc": self.created_utc,
            "outputs": [
                {"path": o.path, "sha256": o.sha256, "bytes": o.bytes}
                for o in self.outputs
            ],
        }


def _digest_bytes(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()


def persist_run(outputs: Mapping[str, bytes | str], directory: str,
                cfg_hash: str) -> RunRecord:
    """Write artifacts plus a digest manifest to ``directory``.

    ``outputs`` maps relative paths to rendered content.  Each file goes
    through a temp-file rename; if any write fails, everything already
    written by this call is removed before the error propagates.
    """
    os.makedirs(directory, exist_ok=True)
    written: list[str] = []
    digests: list[OutputDigest] = []
    try:
        for rel in sorted(outputs):
            content = outputs[rel]
            blob = content.encode("utf-8") if isinstance(content, str) \
                else content
            target = os.path.join(directory, rel)
            parent = os.path.dirname(target)
            if parent:
                os.makedirs(parent, exist_ok=True)
            tmp = target + f".tmp-{os.getpid()}"
            with open(tmp, "wb") as handle:
                handle.write(blob)
            os.replace(tmp, target)
            written.append(target)
            digests.append(OutputDigest(path=rel, sha256=_digest_bytes(blob),
                                        bytes=len(blob)))
        record = RunRecord(
            config_hash=cfg_hash,
            tool_version=TOOL_VERSION,
            created_utc=datetime.now(timezone.utc).isoformat(
                timespec="seconds"),
            outputs=tuple(digests),
        )
        manifest = render_json(record.to_payload())
        target = os.path.join(directory, MANIFEST_NAME)
        tmp = target + f".tmp-{os.getpid()}"
        with open(tmp, "wb") as handle:
            handle.write(manifest.encode("utf-8"))
        os.replace(tmp, target)
        return record
    except OSError:
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        raise


def load_manifest(directory: str) -> RunRecord:
    """Read a manifest back into a :class:`RunRecord`."""
    path = os.path.join(directory, MANIFEST_NAME)
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    outputs = tuple(
        OutputDigest(path=o["path"], sha256=o["sha256"], bytes=o["bytes"])
        for o in doc["outputs"])
    return RunRecord(config_hash=doc["config_hash"],
                     tool_version=doc["tool_version"],
                     created_utc=doc["created_utc"], outputs=outputs)


def verify_manifest(directory: str) -> RunRecord:
    """Recompute digests for every artifact listed in the manifest.

    Returns the record when everything matches; raises
    :class:`IntegrityError` naming the first mismatching or missing file.
    """
    record = load_manifest(directory)
    for output in record.outputs:
        target = os.path.join(directory, output.path)
        try:
            with open(target, "rb") as handle:
                blob = handle.read()
        except OSError as exc:
            raise IntegrityError(
                f"{output.path}: listed in manifest but unreadable "
                f"({exc})") from exc
        if len(blob) != output.bytes:
            raise IntegrityError(
                f"{output.path}: size {len(blob)} != recorded "
                f"{output.bytes}")
        digest = _digest_bytes(blob)
        if digest != output.sha256:
            raise IntegrityError(
                f"{output.path}: sha256 {digest[:12]}... != recorded "
                f"{output.sha256[:12]}...")
    return record
