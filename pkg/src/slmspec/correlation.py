"""Pair products and the order-2N intensity correlation over all SLM pixels.

The full correlation is a product of ``2N`` intensities, each at most
``I0/N``, so for large ``N`` it underflows any float.  Everything is
accumulated as a sum of natural logs; exact nulls become ``-inf``.
Normalized traces are ``exp(log - max(log))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .eraser import EraserRecord, SlmArray, eraser_intensities, eraser_intensities_fields, make_slm
from .errors import AliasingError, ConfigError, NoFringesError, NumericalError
from .optics import ApparatusConfig

SAMPLES_PER_FRINGE = 20
PEAK_THRESHOLD = 0.5
# an endpoint only counts as a null when it is this close to zero
EDGE_NULL_LEVEL = 0.01
# peaks must rise this far (in normalized units) above their surroundings,
# so shot-noise jitter on a fringe crest is not counted as another fringe
MIN_PROMINENCE = 0.25
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class ScanGrid:
    """Uniform, endpoint-inclusive grid of ``n_points`` phases."""

    phi_min: float
    phi_max: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.phi_min) and np.isfinite(self.phi_max)):
            raise ConfigError("grid bounds must be finite")
        if not self.phi_max > self.phi_min:
            raise ConfigError(f"phi_max ({self.phi_max}) must exceed phi_min ({self.phi_min})")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigError(f"n_points must be an integer >= 2, got {self.n_points}")

    @property
    def step(self) -> float:
        return (self.phi_max - self.phi_min) / (self.n_points - 1)

    @property
    def span(self) -> float:
        return self.phi_max - self.phi_min

    @property
    def phi(self) -> np.ndarray:
        return np.linspace(self.phi_min, self.phi_max, int(self.n_points))

    @classmethod
    def for_order(cls, n: int, phi_min: float, phi_max: float, samples_per_fringe=SAMPLES_PER_FRINGE):
        """Smallest grid over the range whose step is at most ``pi/(samples*N)``."""
        max_step = np.pi / (samples_per_fringe * n)
        points = int(np.ceil((phi_max - phi_min) / max_step)) + 1
        return cls(phi_min, phi_max, points)

    def check_resolution(self, n: int, allow_coarse: bool = False):
        """Raise :class:`AliasingError` if the step exceeds ``pi/(20N)``."""
        limit = np.pi / (SAMPLES_PER_FRINGE * n)
        if self.step > limit * (1 + 1e-12) and not allow_coarse:
            raise AliasingError(
                f"grid step {self.step:.3g} rad exceeds pi/(20N) = {limit:.3g} rad for N={n}; "
                "fringes would alias (pass allow_coarse to override)"
            )


def normalize_log(log_values: np.ndarray) -> np.ndarray:
    log_values = np.asarray(log_values, dtype=float)
    top = np.max(log_values)
    if top == -np.inf:
        return np.zeros_like(log_values)
    return np.exp(log_values - top)


@dataclass(frozen=True)
class CorrelationTrace:
    grid: ScanGrid
    log_values: np.ndarray
    normalized_values: np.ndarray
    order: int

    @classmethod
    def from_log(cls, grid: ScanGrid, log_values, order: int, peak_log=None) -> CorrelationTrace:
        """Build a trace; normalize by ``peak_log`` if given, else by the grid maximum."""
        log_values = np.asarray(log_values, dtype=float)
        if log_values.shape != (grid.n_points,):
            raise ConfigError("trace length must match the grid")
        if np.any(np.isnan(log_values)) or np.any(log_values == np.inf):
            raise NumericalError("log values must be finite or -inf")
        if peak_log is None:
            return cls(grid, log_values, normalize_log(log_values), order)
        return cls(grid, log_values, np.exp(log_values - peak_log), order)

    @property
    def phi(self) -> np.ndarray:
        return self.grid.phi

    @property
    def values(self) -> np.ndarray:
        """Un-normalized values; may underflow to zero for high orders."""
        return np.exp(self.log_values)


@dataclass(frozen=True)
class FringeMetrics:
    peak_count: int
    mean_period: float
    resolution_delta: float
    peak_positions: np.ndarray = field(repr=False)

    @property
    def orders(self) -> np.ndarray:
        """Fringe order of each detected peak, counted from the first."""
        return np.arange(self.peak_count)


def pair_product(record: EraserRecord) -> float:
    """Intensity product of one PD pair, proportional to sin^2(phi - xi_j)."""
    return record.intensity_a * record.intensity_b


def log_correlation(config: ApparatusConfig, slm: SlmArray, phi, method: str = "closed_form"):
    """Sum over pixels of ``log(I_A^j * I_B^j)`` at every phase in ``phi``.

    ``method`` picks the intensity route: ``"closed_form"`` (default) or
    ``"fields"`` (Jones propagation).  Evaluated in chunks so that large
    ``N`` times long grids stay within memory.
    """
    routes = {"closed_form": eraser_intensities, "fields": eraser_intensities_fields}
    if method not in routes:
        raise ConfigError(f"unknown method {method!r}")
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    out = np.empty(phi.shape)
    chunk = max(1, _CHUNK_ELEMENTS // slm.pixel_count)
    with np.errstate(divide="ignore"):
        for start in range(0, len(phi), chunk):
            ia, ib = routes[method](config, slm, phi[start:start + chunk])
            out[start:start + chunk] = np.sum(np.log(ia) + np.log(ib), axis=0)
    return out


def log_prefactor(config: ApparatusConfig) -> float:
    """log of (I0/2N)^(2N), the amplitude of the full-visibility product."""
    n = config.pixel_count
    return 2 * n * np.log(config.intensity / (2 * n))


def correlation_trace(config: ApparatusConfig, slm: SlmArray, grid: ScanGrid,
                      allow_coarse: bool = False, method: str = "closed_form") -> CorrelationTrace:
    """Order-2N intensity correlation over ``grid``.

    ``config.mzi_phase`` is ignored; the grid supplies the phases.
    """
    if config.pixel_count != slm.pixel_count:
        raise ConfigError(f"config has {config.pixel_count} pixels but SLM has {slm.pixel_count}")
    grid.check_resolution(slm.pixel_count, allow_coarse)
    logs = log_correlation(config, slm, grid.phi, method)
    return CorrelationTrace.from_log(grid, logs, 2 * slm.pixel_count)


def closed_form_log(n: int, phi):
    """log of prod_j sin^2(phi - pi j/N) = log(sin^2(N phi) / 4^(N-1))."""
    with np.errstate(divide="ignore"):
        return np.log(np.sin(n * np.asarray(phi, dtype=float)) ** 2) - (n - 1) * np.log(4.0)


def closed_form_trace(n: int, grid: ScanGrid) -> CorrelationTrace:
    """Analytic sin^2(N phi) trace, the reference shape for :func:`correlation_trace`.

    Normalized by the analytic peak (1), not the grid maximum, so values are
    sin^2(N phi) even on grids that miss every peak.
    """
    if int(n) != n or n < 1:
        raise ConfigError(f"N must be a positive integer, got {n}")
    with np.errstate(divide="ignore"):
        logs = np.log(np.sin(n * grid.phi) ** 2)
    return CorrelationTrace.from_log(grid, logs, 2 * int(n), peak_log=0.0)


def _local_extrema(values: np.ndarray):
    peaks, _ = find_peaks(values, prominence=MIN_PROMINENCE)
    peaks = peaks[values[peaks] > PEAK_THRESHOLD]
    nulls, _ = find_peaks(-values)
    nulls = list(nulls[values[nulls] < PEAK_THRESHOLD])
    top = values.max()
    if values[0] < values[1] and values[0] <= EDGE_NULL_LEVEL * top:
        nulls.insert(0, 0)
    if values[-1] < values[-2] and values[-1] <= EDGE_NULL_LEVEL * top:
        nulls.append(len(values) - 1)
    return peaks, np.asarray(nulls, dtype=int)


def fringe_metrics(trace: CorrelationTrace) -> FringeMetrics:
    """Peak count, mean peak spacing and Rayleigh (peak-to-null) resolution."""
    values = np.asarray(trace.normalized_values)
    if len(values) < 3:
        raise ConfigError("need at least 3 grid points")
    if np.ptp(values) == 0:
        raise NoFringesError("trace is constant")
    phi = trace.phi
    peaks, nulls = _local_extrema(values)
    positions = phi[peaks]
    period = float(np.mean(np.diff(positions))) if len(peaks) > 1 else float("nan")
    if len(peaks) == 0:
        return FringeMetrics(0, period, float("nan"), positions)

    # distance from each peak to the nearest null on either side
    distances = []
    idx = np.searchsorted(nulls, peaks)
    for p, k in zip(peaks, idx):
        if k > 0:
            distances.append(phi[p] - phi[nulls[k - 1]])
        if k < len(nulls):
            distances.append(phi[nulls[k]] - phi[p])
    if not distances:
        raise NumericalError("no null brackets any peak; widen the scan")
    return FringeMetrics(len(peaks), period, float(np.mean(distances)), positions)


def default_trace(n: int, grid: ScanGrid, input_amplitude: float = 1.0, **kwargs) -> CorrelationTrace:
    """Correlation trace for the standard SLM law with ``N`` pixel pairs."""
    config = ApparatusConfig(input_amplitude=input_amplitude, pixel_count=n)
    return correlation_trace(config, make_slm(n), grid, **kwargs)
