"""Figure builders emitting deterministic SVG.

Artifacts must be byte-identical across reruns of the same configuration,
so every figure goes through :func:`render_figure_svg`, which pins the
SVG id hash salt and strips the creation date.  The matplotlib version
still matters (glyph paths come from the bundled fonts), which is the
documented "fixed environment" caveat of the determinism contract.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "tricomi-lab"

_SVG_METADATA = {"Date": None}


def render_figure_svg(fig) -> str:
    """Serialize a figure to SVG text and close it."""
    buffer = io.BytesIO()
    try:
        fig.savefig(buffer, format="svg", metadata=_SVG_METADATA)
    finally:
        plt.close(fig)
    return buffer.getvalue().decode("utf-8")


def field_snapshot_figure(field, count: int = 6):
    """Amplitude snapshots at evenly spaced stored times."""
    idx = np.unique(np.linspace(0, len(field.times) - 1, count).astype(int))
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for i in idx:
        label = f"t = {field.times[i]:.3f}" if field.mode != "edp" \
            else f"s = {field.times[i]:.3f}"
        ax.plot(field.xs, field.slices[i], lw=1.1, label=label)
    ax.set_xlabel("r" if field.geometry == "radial" else "x")
    ax.set_ylabel("u")
    ax.legend(fontsize=8, frameon=False)
    ax.grid(alpha=0.25, lw=0.5)
    fig.tight_layout()
    return fig


def trace_figure(trace, bound: float):
    """Characteristic trace U(z) against the data-term lower bound."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(trace.zs, trace.U, lw=1.4, label="U(z)")
    ax.axhline(bound, color="tab:red", lw=1.0, ls="--",
               label="data-term bound")
    ax.set_xlabel("z")
    ax.set_ylabel("U")
    ax.legend(fontsize=8, frameon=False)
    ax.grid(alpha=0.25, lw=0.5)
    fig.tight_layout()
    return fig


def ode_figure(trajectory, z_closed: float | None = None):
    """Comparison-equation trajectory with the closed-form abscissa."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.semilogy(trajectory.zs, np.maximum(trajectory.values, 1e-300),
                lw=1.2, label="G(z)")
    if trajectory.z_event is not None:
        ax.axvline(trajectory.z_event, color="tab:orange", lw=1.0,
                   label="detected divergence")
    if z_closed is not None and np.isfinite(z_closed):
        ax.axvline(z_closed, color="tab:green", lw=1.0, ls="--",
                   label="closed form")
    ax.set_xlabel("z")
    ax.set_ylabel("G")
    ax.legend(fontsize=8, frameon=False)
    ax.grid(alpha=0.25, lw=0.5)
    fig.tight_layout()
    return fig


def sweep_figure(records, slope: float | None = None,
                 intercept: float | None = None):
    """log-log lifespan ladder with the fitted power law overlaid."""
    eps = np.array([r.eps for r in records if r.usable])
    mid = np.array([r.t_mid for r in records if r.usable])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if eps.size:
        lo = np.array([r.t_lower for r in records if r.usable])
        hi = np.array([r.t_upper for r in records if r.usable])
        ax.errorbar(eps, mid, yerr=(mid - lo, hi - mid), fmt="o", ms=4,
                    lw=1.0, capsize=2, label="measured T(eps)")
        if slope is not None and intercept is not None \
                and np.isfinite(slope):
            grid = np.geomspace(eps.min(), eps.max(), 64)
            ax.plot(grid, np.exp(intercept) * grid ** slope, "--", lw=1.0,
                    color="tab:red", label=f"fit, slope {slope:.3f}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("eps")
    ax.set_ylabel("lifespan T")
    ax.legend(fontsize=8, frameon=False)
    ax.grid(alpha=0.25, lw=0.5, which="both")
    fig.tight_layout()
    return fig
