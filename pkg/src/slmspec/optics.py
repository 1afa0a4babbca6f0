"""Jones calculus for the polarization Mach-Zehnder interferometer.

A horizontally polarized laser of amplitude ``E0`` passes a half-wave plate,
is split by a polarizing beam splitter (H to the upper arm, V to the lower
arm), picks up the PZT phase ``phi`` on the V arm and is recombined on a
lossless 50/50 beam splitter.  Reflections at both splitters carry a factor
``i``.  The outputs are

    E_A = (E0/2) (H - V e^{i phi})
    E_B = (i E0/2) (H + V e^{i phi})

which is the textbook pair up to the overall amplitude factor that keeps
``|E_A|^2 + |E_B|^2 = E0^2``.

Scalar amplitudes are plain Python/NumPy complex numbers.  Every function
broadcasts, so a :class:`JonesVector` may hold arrays of amplitudes (one per
phase-grid point).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

HWP_ANGLE = np.pi / 8
POLARIZER_ANGLE = np.pi / 4


def _check_finite(*values, what="value"):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ConfigError(f"{what} must be finite, got {v!r}")


@dataclass(frozen=True)
class JonesVector:
    """Horizontal and vertical complex amplitudes of a polarized field."""

    h: complex | np.ndarray
    v: complex | np.ndarray

    def __post_init__(self):
        _check_finite(self.h, self.v, what="Jones vector components")

    @property
    def intensity(self):
        return np.abs(self.h) ** 2 + np.abs(self.v) ** 2

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(np.asarray(self.h, complex),
                                            np.asarray(self.v, complex)))

    def scaled(self, factor) -> JonesVector:
        return JonesVector(factor * self.h, factor * self.v)


@dataclass(frozen=True)
class ApparatusConfig:
    """Input laser, half-wave plate, MZI phase and SLM pixel count.

    ``mzi_phase`` may be a scalar or an array of phases to evaluate at once.
    """

    input_amplitude: float = 1.0
    hwp_angle: float = HWP_ANGLE
    mzi_phase: float | np.ndarray = 0.0
    pixel_count: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.input_amplitude) and self.input_amplitude > 0):
            raise ConfigError(f"input_amplitude must be > 0, got {self.input_amplitude}")
        _check_finite(self.hwp_angle, self.mzi_phase, what="angles")
        if int(self.pixel_count) != self.pixel_count or self.pixel_count < 1:
            raise ConfigError(f"pixel_count must be a positive integer, got {self.pixel_count}")

    @property
    def intensity(self) -> float:
        """Input intensity I0 = E0**2."""
        return self.input_amplitude**2

    @property
    def visibility(self) -> float:
        """Fringe visibility set by the H/V power split of the half-wave plate."""
        return np.sin(4 * self.hwp_angle)


def intensity(amp):
    """|amp|**2."""
    _check_finite(amp, what="amplitude")
    return np.abs(amp) ** 2


def hwp_transform(field: JonesVector, theta: float) -> JonesVector:
    """Half-wave plate with fast axis at ``theta`` from horizontal."""
    _check_finite(theta, what="wave-plate angle")
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return JonesVector(c * field.h + s * field.v, s * field.h - c * field.v)


def project_polarizer(field: JonesVector, theta: float = POLARIZER_ANGLE):
    """Scalar amplitude transmitted by a linear polarizer at ``theta``."""
    return field.h * np.cos(theta) + field.v * np.sin(theta)


def pbs_split(field: JonesVector) -> tuple[JonesVector, JonesVector]:
    """Polarizing beam splitter: H transmitted, V reflected (factor ``i``)."""
    zero = np.zeros_like(np.asarray(field.h, complex))
    return JonesVector(field.h, zero), JonesVector(zero, 1j * field.v)


def beam_splitter(upper: JonesVector, lower: JonesVector) -> tuple[JonesVector, JonesVector]:
    """Lossless 50/50 splitter with ``i`` on reflection; returns (A, B)."""
    r = 1 / np.sqrt(2)
    out_a = JonesVector(r * (upper.h + 1j * lower.h), r * (upper.v + 1j * lower.v))
    out_b = JonesVector(r * (1j * upper.h + lower.h), r * (1j * upper.v + lower.v))
    return out_a, out_b


def mzi_outputs(config: ApparatusConfig) -> tuple[JonesVector, JonesVector]:
    """Propagate the input laser to the two MZI output ports."""
    laser = JonesVector(complex(config.input_amplitude), 0j)
    rotated = hwp_transform(laser, config.hwp_angle)
    upper, lower = pbs_split(rotated)
    lower = JonesVector(lower.h, lower.v * np.exp(1j * np.asarray(config.mzi_phase)))
    # broadcast the unshifted arm onto the phase grid
    upper = JonesVector(upper.h + 0 * lower.v, upper.v + 0 * lower.v)
    return beam_splitter(upper, lower)


def mzi_closed_form(input_amplitude: float, phi) -> tuple[JonesVector, JonesVector]:
    """Analytic MZI outputs for the 22.5 degree half-wave plate."""
    e = np.exp(1j * np.asarray(phi))
    half = input_amplitude / 2
    return (JonesVector(half + 0 * e, -half * e),
            JonesVector(1j * half + 0 * e, 1j * half * e))


def equal_up_to_global_phase(a: JonesVector, b: JonesVector, atol: float = 1e-12) -> bool:
    """Compare two fields after removing the phase of the first nonzero component.

    Works elementwise for array-valued fields; all elements must agree.
    """
    va, vb = a.as_array(), b.as_array()
    va, vb = np.broadcast_arrays(va, vb)
    va = va.reshape(2, -1)
    vb = vb.reshape(2, -1)
    scale = max(np.max(np.abs(va)), np.max(np.abs(vb)), 1e-300)
    for k in range(va.shape[1]):
        x, y = va[:, k], vb[:, k]
        ref = 0 if abs(x[0]) > atol * scale else 1
        if abs(x[ref]) <= atol * scale:
            if np.max(np.abs(y)) > atol * scale:
                return False
            continue
        if abs(y[ref]) <= atol * scale:
            return False
        x = x * np.exp(-1j * np.angle(x[ref]))
        y = y * np.exp(-1j * np.angle(y[ref]))
        if np.max(np.abs(x - y)) > atol * scale:
            return False
    return True
