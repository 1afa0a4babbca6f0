"""Slopes of normalized fringe traces and the resulting phase error.

Phase error follows ``dphi = dI / |dI/dphi|``: steep fringes resolve small
phase changes, flat regions (peaks, nulls, and the wide dark stretches of a
grating pattern) do not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baselines import NSlitModel, nslit_intensity
from .correlation import CorrelationTrace, ScanGrid
from .errors import ConfigError

UNIT_PERIOD = (-np.pi / 2, np.pi / 2)
# grid steps per quantum fringe (period pi/N) used by gain_curve
GAIN_SAMPLES = 200


@dataclass(frozen=True)
class SlopeTrace:
    grid: ScanGrid
    slope_values: np.ndarray

    @property
    def phi(self):
        return self.grid.phi


@dataclass(frozen=True)
class SensitivityReport:
    mean_abs_slope: float
    phase_error: np.ndarray
    window: tuple[float, float]
    min_phase_error: float
    best_phi: float


def differentiate_samples(phi, values) -> np.ndarray:
    """Second-order finite differences (central inside, one-sided at the ends)."""
    phi = np.asarray(phi, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(phi) < 3 or phi.shape != values.shape:
        raise ConfigError("need >= 3 matching samples")
    steps = np.diff(phi)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * abs(steps[0]):
        raise ConfigError("finite differences need a uniform increasing grid")
    return np.gradient(values, steps.mean(), edge_order=2)


def differentiate(trace: CorrelationTrace) -> SlopeTrace:
    """d(normalized value)/dphi on the trace's grid."""
    grid = trace.grid
    if grid.n_points < 3:
        raise ConfigError("need >= 3 grid points")
    slope = np.gradient(np.asarray(trace.normalized_values, float), grid.step, edge_order=2)
    return SlopeTrace(grid, slope)


def _window_mask(phi, window):
    lo, hi = window
    if not hi > lo:
        raise ConfigError(f"empty window {window}")
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    if lo < phi[0] - tol or hi > phi[-1] + tol:
        raise ConfigError(f"window {window} lies outside the grid [{phi[0]}, {phi[-1]}]")
    mask = (phi >= lo - tol) & (phi <= hi + tol)
    if mask.sum() < 2:
        raise ConfigError(f"window {window} holds fewer than two grid points")
    return mask


def mean_abs_slope(slope: SlopeTrace, window=UNIT_PERIOD) -> float:
    """Trapezoidal average of |slope| over ``window``."""
    phi = slope.phi
    mask = _window_mask(phi, window)
    x = phi[mask]
    return float(np.trapezoid(np.abs(slope.slope_values[mask]), x) / (x[-1] - x[0]))


def phase_error(slope: SlopeTrace, delta_I: float, window=UNIT_PERIOD) -> SensitivityReport:
    """Pointwise phase error ``delta_I/|slope|``; +inf at stationary points."""
    if not delta_I > 0:
        raise ConfigError(f"delta_I must be > 0, got {delta_I}")
    mag = np.abs(slope.slope_values)
    with np.errstate(divide="ignore"):
        err = np.where(mag > 0, delta_I / mag, np.inf)
    mask = _window_mask(slope.phi, window)
    inside = np.where(mask, err, np.inf)
    k = int(np.argmin(inside))
    return SensitivityReport(
        mean_abs_slope=mean_abs_slope(slope, window),
        phase_error=err,
        window=tuple(window),
        min_phase_error=float(inside[k]),
        best_phi=float(slope.phi[k]),
    )


def _gain_grid(n, window):
    lo, hi = window
    points = max(2001, int(np.ceil((hi - lo) * GAIN_SAMPLES * n / np.pi)) + 1)
    return ScanGrid(lo, hi, points)


def quantum_slope(n: int, window=UNIT_PERIOD) -> SlopeTrace:
    grid = _gain_grid(n, window)
    values = np.sin(n * grid.phi) ** 2
    return SlopeTrace(grid, differentiate_samples(grid.phi, values))


def nslit_slope(n: int, window=UNIT_PERIOD, beta: float = 0.0) -> SlopeTrace:
    grid = _gain_grid(n, window)
    values = nslit_intensity(NSlitModel(n, beta), grid.phi, normalize=True)
    return SlopeTrace(grid, differentiate_samples(grid.phi, values))


def gain_curve(n_list, window=UNIT_PERIOD):
    """Rows of ``(N, quantum mean |slope|, N-slit mean |slope|)``.

    Both patterns are normalized to unit peak before differentiating.
    """
    n_list = list(n_list)
    if not n_list:
        raise ConfigError("N list is empty")
    rows = []
    for n in n_list:
        if int(n) != n or n < 1:
            raise ConfigError(f"N must be a positive integer, got {n}")
        n = int(n)
        rows.append((n, mean_abs_slope(quantum_slope(n, window), window),
                     mean_abs_slope(nslit_slope(n, window), window)))
    return rows
