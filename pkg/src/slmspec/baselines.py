"""Classical references: N-slit grating and Fabry-Perot etalon.

The grating factor ``sin(N phi)/sin(phi)`` is evaluated as the Chebyshev
polynomial ``U_{N-1}(cos phi)``, which equals the ratio wherever it is
defined and takes the limit value ``+/-N`` at ``phi = m*pi`` without any
special-casing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_chebyu

from .correlation import CorrelationTrace, ScanGrid
from .errors import ConfigError


@dataclass(frozen=True)
class NSlitModel:
    slit_count: int
    beta: float = 0.0

    def __post_init__(self):
        if int(self.slit_count) != self.slit_count or self.slit_count < 1:
            raise ConfigError(f"slit_count must be a positive integer, got {self.slit_count}")
        if not np.isfinite(self.beta):
            raise ConfigError("beta must be finite")

    @property
    def envelope(self) -> float:
        """sinc^2(beta) with sinc(x) = sin(x)/x."""
        return float(np.sinc(self.beta / np.pi) ** 2)


@dataclass(frozen=True)
class FabryPerotModel:
    reflectance: float

    def __post_init__(self):
        if not 0 < self.reflectance < 1:
            raise ConfigError(f"reflectance must lie in (0, 1), got {self.reflectance}")

    @property
    def coefficient_of_finesse(self) -> float:
        r = self.reflectance
        return 4 * r / (1 - r) ** 2

    @property
    def finesse(self) -> float:
        """pi sqrt(R)/(1-R); the high-reflectance approximation."""
        r = self.reflectance
        return np.pi * np.sqrt(r) / (1 - r)

    @property
    def exact_finesse(self) -> float:
        """Peak spacing over the exact FWHM of the Airy function."""
        return np.pi / (2 * np.arcsin(1 / np.sqrt(self.coefficient_of_finesse)))


def grating_factor(n: int, phi):
    """sin(N phi)/sin(phi), finite everywhere."""
    return eval_chebyu(int(n) - 1, np.cos(np.asarray(phi, dtype=float)))


def nslit_intensity(model: NSlitModel, phi, normalize: bool = False):
    value = model.envelope * grating_factor(model.slit_count, phi) ** 2
    if normalize:
        value = value / (model.slit_count**2 * model.envelope)
    return value


def _trace(grid, values):
    with np.errstate(divide="ignore"):
        return CorrelationTrace.from_log(grid, np.log(values), order=1)


def nslit_trace(model: NSlitModel, grid: ScanGrid) -> CorrelationTrace:
    """Grating pattern on ``grid``; ``values`` are raw (peak N^2 sinc^2 beta)."""
    return _trace(grid, nslit_intensity(model, grid.phi))


def airy_transmission(model: FabryPerotModel, phi):
    return 1 / (1 + model.coefficient_of_finesse * np.sin(np.asarray(phi, dtype=float) / 2) ** 2)


def fabry_perot_trace(model: FabryPerotModel, grid: ScanGrid) -> CorrelationTrace:
    return _trace(grid, airy_transmission(model, grid.phi))


def measured_fwhm(phi: np.ndarray, values: np.ndarray) -> float:
    """Full width at half maximum of the highest peak, linearly interpolated."""
    k = int(np.argmax(values))
    half = values[k] / 2
    left = k
    while left > 0 and values[left] > half:
        left -= 1
    right = k
    while right < len(values) - 1 and values[right] > half:
        right += 1
    if values[left] > half or values[right] > half:
        raise ConfigError("grid does not contain both half-maximum crossings")

    def cross(i, j):
        return phi[i] + (half - values[i]) * (phi[j] - phi[i]) / (values[j] - values[i])

    return cross(right - 1, right) - cross(left, left + 1)
