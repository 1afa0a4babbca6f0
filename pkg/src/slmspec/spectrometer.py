"""Beat-fringe wavemeter.

Frequencies are phase rates per unit delay (``phi = f * tau``, no 2*pi).
Traces are sampled against the reference phase ``phi0 = f0 * tau``, so the
reference is ``sin^2(N phi0)`` and an unknown ``f = r * f0`` gives
``sin^2(N r phi0)``.  Their product holds a slow component
``cos(2 N |r - 1| phi0) / 8`` below every carrier; its rate gives
``|delta f| = rate * f0 / (2N)``.

The rate is located on a zero-padded, Hann-windowed periodogram of the
mean-removed product (parabolic interpolation around the peak), then
refined by least squares against the full set of product components:
DC, the reference carrier at ``2N`` and the beat together with both
sign branches of the unknown carrier and of the sum term.  Carrying both
branches keeps the fit blind to the sign of ``delta f``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .correlation import CorrelationTrace, ScanGrid, closed_form_trace, default_trace
from .eraser import sample_counts
from .errors import AliasingError, ConfigError, InsufficientScanError

BASE_HALF_SPAN = 10 * np.pi
MIN_AUTO_BEATS = 4
MIN_ESTIMATE_BEATS = 2
# samples per unknown-carrier fringe required by estimate_frequency
ESTIMATE_SAMPLES = 8
DEFAULT_MAX_RATIO = 1.5
_PAD = 16


@dataclass(frozen=True)
class BeatScanConfig:
    reference_frequency: float
    unknown_frequency: float
    order: int
    grid: ScanGrid

    def __post_init__(self):
        for name in ("reference_frequency", "unknown_frequency"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be > 0, got {value}")
        if int(self.order) != self.order or self.order < 1:
            raise ConfigError(f"order must be a positive integer, got {self.order}")

    @property
    def ratio(self) -> float:
        return self.unknown_frequency / self.reference_frequency

    def check_sampling(self):
        fastest = self.order * max(self.ratio, 1.0)
        limit = np.pi / (20 * fastest)
        if self.grid.step > limit * (1 + 1e-12):
            raise AliasingError(
                f"grid step {self.grid.step:.3g} exceeds pi/(20 N max(f/f0, 1)) = {limit:.3g}"
            )


@dataclass(frozen=True)
class FrequencyEstimate:
    delta_f_magnitude: float
    candidates: tuple[float, float]
    beat_count: int
    relative_uncertainty: float
    beat_rate: float


def auto_scan(order: int, min_delta_f: float, max_delta_f: float | None = None,
              reference_frequency: float = 1.0) -> ScanGrid:
    """Scan over ``phi0`` sized for the requested offsets.

    Starts from the symmetric range ``[-10 pi, 10 pi]`` and widens it until
    the smallest offset ``min_delta_f`` (same units as the reference
    frequency) produces at least four beat periods.  The step resolves an
    unknown as fast as ``f0 + max_delta_f``.
    """
    if not min_delta_f > 0:
        raise ConfigError(f"min_delta_f must be > 0, got {min_delta_f}")
    max_delta_f = min_delta_f if max_delta_f is None else max_delta_f
    if max_delta_f < min_delta_f:
        raise ConfigError("max_delta_f must be >= min_delta_f")
    x_min = min_delta_f / reference_frequency
    x_max = max_delta_f / reference_frequency
    if x_max >= 0.5:
        raise ConfigError("offsets must stay below f0/2 to separate beat and carrier")
    # beat period in phi0 is pi/(N x)
    half = max(BASE_HALF_SPAN, MIN_AUTO_BEATS * np.pi / (order * x_min) / 2)
    step = np.pi / (20 * order * (1 + x_max))
    points = int(np.ceil(2 * half / step)) + 1
    return ScanGrid(-half, half, points)


def _synth(order, ratio, grid, pipeline):
    if pipeline:
        scaled = ScanGrid(ratio * grid.phi_min, ratio * grid.phi_max, grid.n_points)
        trace = default_trace(order, scaled, allow_coarse=True)
        return CorrelationTrace.from_log(grid, trace.log_values, trace.order)
    with np.errstate(divide="ignore"):
        logs = np.log(np.sin(order * ratio * grid.phi) ** 2)
    return CorrelationTrace.from_log(grid, logs, 2 * order)


def beat_traces(config: BeatScanConfig, pipeline: bool = False):
    """(unknown, reference) normalized traces on the shared ``phi0`` grid.

    With ``pipeline=True`` both come from the full pixel-product route
    instead of the ``sin^2`` closed form.
    """
    config.check_sampling()
    unknown = _synth(config.order, config.ratio, config.grid, pipeline)
    reference = _synth(config.order, 1.0, config.grid, pipeline)
    return unknown, reference


def _design(phi, order, rate):
    carrier = 2 * order
    cols = [np.ones_like(phi)]
    for r in (carrier, rate, carrier + rate, carrier - rate,
              2 * carrier + rate, 2 * carrier - rate):
        cols += [np.cos(r * phi), np.sin(r * phi)]
    return np.column_stack(cols)


def _residual(params, phi, y, order):
    a = _design(phi, order, params[0])
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    return y - a @ coef


def _coarse_rate(phi, y, cutoff):
    step = phi[1] - phi[0]
    taper = np.hanning(len(y))
    x = (y - np.average(y, weights=taper)) * taper
    m = 1 << int(np.ceil(np.log2(len(y) * _PAD)))
    power = np.abs(np.fft.rfft(x, m)) ** 2
    rates = 2 * np.pi * np.fft.rfftfreq(m, step)
    usable = np.flatnonzero((rates > 0) & (rates < cutoff))
    k = usable[np.argmax(power[usable])]
    if k - 1 < 1 or k + 1 >= len(power):
        return rates[k]
    a, b, c = np.log(power[k - 1:k + 2] + 1e-300)
    denom = a - 2 * b + c
    shift = 0.5 * (a - c) / denom if denom < 0 else 0.0
    return (k + shift) * 2 * np.pi / (m * step)


def beat_rate(product: np.ndarray, grid: ScanGrid, order: int) -> float:
    """Angular rate (per unit ``phi0``) of the slow beat in a product trace."""
    phi = grid.phi
    y = np.asarray(product, dtype=float)
    cutoff = float(order)
    coarse = _coarse_rate(phi, y, cutoff)
    bin_width = 2 * np.pi / grid.span
    lo = max(coarse - 2 * bin_width, 1e-9 * cutoff)
    hi = min(coarse + 2 * bin_width, cutoff)
    start = float(np.clip(coarse, lo, hi))
    fit = least_squares(_residual, [start], bounds=([lo], [hi]), args=(phi, y, order),
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, diff_step=1e-7)
    return float(fit.x[0])


def _order_of(reference: CorrelationTrace) -> int:
    if reference.order % 2:
        raise ConfigError("reference must be an order-2N correlation trace")
    return reference.order // 2


def count_beats(unknown: CorrelationTrace, reference: CorrelationTrace) -> int:
    """Whole beat periods in the scan, from the slow part of ``unknown*reference``."""
    if unknown.grid != reference.grid:
        raise ConfigError("traces must share one grid")
    if np.array_equal(unknown.normalized_values, reference.normalized_values):
        return 0
    order = _order_of(reference)
    product = unknown.normalized_values * reference.normalized_values
    beats = beat_rate(product, reference.grid, order) * reference.grid.span / (2 * np.pi)
    if beats < 1:
        raise InsufficientScanError(f"scan holds only {beats:.2f} beat periods")
    return int(round(beats))


def estimate_frequency(measured: CorrelationTrace, reference_frequency: float, order: int,
                       max_ratio: float = DEFAULT_MAX_RATIO) -> FrequencyEstimate:
    """Recover ``|f - f0|`` from a measured order-2N trace on the ``phi0`` grid.

    ``max_ratio`` bounds the unknown/reference ratio for the sampling check.
    """
    grid = measured.grid
    if not reference_frequency > 0:
        raise ConfigError("reference_frequency must be > 0")
    limit = np.pi / (ESTIMATE_SAMPLES * order * max_ratio)
    if grid.step > limit * (1 + 1e-12):
        raise AliasingError(f"grid step {grid.step:.3g} exceeds {limit:.3g} for N={order}")
    reference = closed_form_trace(order, grid).normalized_values
    f0 = reference_frequency
    if np.allclose(measured.normalized_values, reference, rtol=0, atol=1e-12):
        return FrequencyEstimate(0.0, (f0, f0), 0, float("inf"), 0.0)
    rate = beat_rate(measured.normalized_values * reference, grid, order)
    beats = rate * grid.span / (2 * np.pi)
    if beats < MIN_ESTIMATE_BEATS:
        raise InsufficientScanError(
            f"scan holds {beats:.2f} beat periods, need at least {MIN_ESTIMATE_BEATS}"
        )
    delta = rate * f0 / (2 * order)
    return FrequencyEstimate(
        delta_f_magnitude=delta,
        candidates=(f0 - delta, f0 + delta),
        beat_count=int(round(beats)),
        relative_uncertainty=1 / beats,
        beat_rate=rate,
    )


def noisy_trace(trace: CorrelationTrace, peak_counts: float, seed: int) -> CorrelationTrace:
    """Poisson-sampled copy of a normalized trace (``peak_counts`` at value 1)."""
    counts = sample_counts(trace.normalized_values, peak_counts, seed)
    with np.errstate(divide="ignore"):
        logs = np.log(counts / peak_counts)
    return CorrelationTrace.from_log(trace.grid, logs, trace.order)
