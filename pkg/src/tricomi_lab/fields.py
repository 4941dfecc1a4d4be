"""Space-time field container shared by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass
class SpaceTimeField:
    """Solution samples u(t_i, x_j) on a fixed spatial grid.

    ``slices[i]`` holds the values at ``times[i]``.  The time stamps need
    not be uniform; ``dt_history`` (when present) records every step the
    producing solver took, which is generally finer than the stored
    slices.  ``geometry`` is "line" (x in [x0, x0+dx*(N-1)]) or "radial"
    (x >= 0 is the radius); ``mode`` names the producing formulation
    ("tricomi", "edp", or "linear" for quadrature-based slices).
    ``errors`` optionally carries per-point error estimates aligned with
    ``slices``.
    """

    xs: np.ndarray
    times: np.ndarray
    slices: list[np.ndarray]
    dx: float
    geometry: str = "line"
    mode: str = "tricomi"
    n: int = 1
    ell: float | None = None
    R: float | None = None
    symmetric: bool = False
    dt_history: np.ndarray | None = None
    errors: list[np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.slices) != len(self.times):
            raise DomainError("SpaceTimeField: one slice per time stamp required")
        for s in self.slices:
            if s.shape != self.xs.shape:
                raise DomainError("SpaceTimeField: slice shape mismatch")

    def slice_at(self, t: float, rel_tol: float = 1e-9) -> np.ndarray:
        """The stored slice whose stamp is closest to ``t`` (must be near)."""
        i = int(np.argmin(np.abs(self.times - t)))
        scale = max(1.0, abs(t))
        if abs(self.times[i] - t) > rel_tol * scale + 1e-12:
            raise DomainError(
                f"SpaceTimeField: no stored slice near t={t}; closest is "
                f"{self.times[i]}"
            )
        return self.slices[i]

    def support_radius(self, slice_index: int, rel_tol: float = 1e-8) -> float:
        """Largest |x| where the slice exceeds rel_tol times its max."""
        u = self.slices[slice_index]
        peak = float(np.max(np.abs(u)))
        if peak == 0.0:
            return 0.0
        live = np.abs(u) > rel_tol * peak
        if not np.any(live):
            return 0.0
        return float(np.max(np.abs(self.xs[live])))
