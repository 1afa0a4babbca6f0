"""SLM pixel pairs, 45 degree polarizers and photodiode arrays.

Each MZI output is expanded over ``N`` SLM pixels (power ``1/N`` per pixel).
Pixel ``j`` of both SLMs delays the vertical component by ``xi_j = pi*j/N``,
then a 45 degree polarizer erases the which-path information.  Intensities
are reported per projected event: the polarizer passes half of the ensemble
on average, and that factor 1/2 is divided out, so

    I_A^j = I0/(2N) (1 - V cos psi_j),   I_B^j = I0/(2N) (1 + V cos psi_j)

with ``psi_j = phi - xi_j`` and visibility ``V = sin(4*theta_hwp)`` (1 for
the 22.5 degree plate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .optics import (
    ApparatusConfig,
    JonesVector,
    intensity,
    mzi_outputs,
    project_polarizer,
)

PROJECTION_EFFICIENCY = 0.5
MATCH_TOL = 1e-12


@dataclass(frozen=True)
class SlmArray:
    pixel_count: int
    phases: np.ndarray

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim != 1 or len(phases) != self.pixel_count:
            raise ConfigError("SLM phase list must have one entry per pixel")
        if not np.all(np.isfinite(phases)):
            raise ConfigError("SLM phases must be finite")
        object.__setattr__(self, "phases", phases)


@dataclass(frozen=True)
class EraserRecord:
    index: int
    xi: float
    psi: float
    intensity_a: float
    intensity_b: float


@dataclass(frozen=True)
class CountSample:
    counts_a: int
    counts_b: int
    exposure: float
    seed: int


def make_slm(n: int) -> SlmArray:
    """SLM with the equally spaced phase law ``xi_j = pi*j/N``, j = 0..N-1."""
    if int(n) != n or n < 1:
        raise ConfigError(f"pixel count must be a positive integer, got {n}")
    n = int(n)
    return SlmArray(n, np.pi * np.arange(n) / n)


def slm_apply(field: JonesVector, xi) -> JonesVector:
    """Delay the vertical component by ``xi`` (slow axis vertical)."""
    return JonesVector(field.h, field.v * np.exp(-1j * np.asarray(xi)))


def _check_pair(config: ApparatusConfig, slm: SlmArray):
    if config.pixel_count != slm.pixel_count:
        raise ConfigError(
            f"config has {config.pixel_count} pixels but SLM has {slm.pixel_count}"
        )


def eraser_intensities_fields(config: ApparatusConfig, slm: SlmArray, phi=None):
    """Detected intensities by full Jones propagation.

    Returns ``(I_A, I_B)`` with shape ``(N,) + shape(phi)``.
    """
    _check_pair(config, slm)
    phi = config.mzi_phase if phi is None else phi
    phi = np.asarray(phi, dtype=float)
    cfg = ApparatusConfig(config.input_amplitude, config.hwp_angle, phi, config.pixel_count)
    out_a, out_b = mzi_outputs(cfg)
    xi = slm.phases.reshape((-1,) + (1,) * phi.ndim)
    per_pixel = 1 / np.sqrt(slm.pixel_count)
    result = []
    for out in (out_a, out_b):
        amp = project_polarizer(slm_apply(out.scaled(per_pixel), xi))
        result.append(intensity(amp) / PROJECTION_EFFICIENCY)
    return tuple(result)


def eraser_intensities(config: ApparatusConfig, slm: SlmArray, phi=None):
    """Detected intensities from the closed form, shape ``(N,) + shape(phi)``.

    Uses the half-angle form ``1 -/+ V cos psi`` written so that exact nulls
    stay exactly zero and small values keep full relative precision.
    """
    _check_pair(config, slm)
    phi = config.mzi_phase if phi is None else phi
    phi = np.asarray(phi, dtype=float)
    psi = phi[None, ...] - slm.phases.reshape((-1,) + (1,) * phi.ndim)
    scale = config.intensity / slm.pixel_count
    vis = config.visibility
    s2 = np.sin(psi / 2) ** 2
    c2 = np.cos(psi / 2) ** 2
    if vis == 1.0:
        return scale * s2, scale * c2
    # 1 - V cos psi = (1 - V) + 2 V sin^2(psi/2)
    return (scale / 2 * ((1 - vis) + 2 * vis * s2),
            scale / 2 * ((1 - vis) + 2 * vis * c2))


def measure_erasers(config: ApparatusConfig, slm: SlmArray) -> list[EraserRecord]:
    """One record per pixel pair at the configured scalar MZI phase.

    Both the field pipeline and the closed form are evaluated; disagreement
    beyond 1e-12 (relative to the per-pixel power) is a numerical error.
    """
    if np.ndim(config.mzi_phase) != 0:
        raise ConfigError("measure_erasers needs a scalar mzi_phase")
    ia, ib = eraser_intensities(config, slm)
    fa, fb = eraser_intensities_fields(config, slm)
    tol = MATCH_TOL * config.intensity / slm.pixel_count
    if np.max(np.abs(ia - fa)) > tol or np.max(np.abs(ib - fb)) > tol:
        raise NumericalError("field pipeline disagrees with closed-form eraser intensities")
    phi = float(config.mzi_phase)
    return [
        EraserRecord(j, float(xi), phi - float(xi), float(a), float(b))
        for j, (xi, a, b) in enumerate(zip(slm.phases, ia, ib))
    ]


def sample_counts(mean_intensity, exposure: float, seed: int):
    """Poisson photon counts with mean ``mean_intensity * exposure``.

    Accepts scalars or arrays; a scalar input gives a Python int.
    """
    mean = np.asarray(mean_intensity, dtype=float)
    if np.any(mean < 0) or not np.all(np.isfinite(mean)):
        raise ConfigError("mean intensity must be finite and >= 0")
    if not exposure > 0:
        raise ConfigError(f"exposure must be > 0, got {exposure}")
    counts = np.asarray(np.random.default_rng(seed).poisson(mean * exposure))
    return int(counts) if counts.ndim == 0 else counts


def sample_record(record: EraserRecord, exposure: float, seed: int) -> CountSample:
    a, b = sample_counts([record.intensity_a, record.intensity_b], exposure, seed)
    return CountSample(int(a), int(b), exposure, seed)
