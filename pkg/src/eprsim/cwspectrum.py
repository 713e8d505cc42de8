"""Continuous-wave EPR spectra: field sweeps and rotation patterns.

Each allowed transition contributes its transverse matrix element times
the population difference of the two levels, dressed with the chosen
line shape centered at the resonance field.  Spectra are reported in
units where the thermal central line at theta = 0 has peak-to-peak
amplitude 1, which removes microwave and detection calibration factors
from the model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .pumprelax import PopulationState, thermal_populations
from .spectrum import LineShape, Spectrum
from .spincore import (FieldOrientation, ResonanceLine, SpinSystem,
                       resonance_fields)

__all__ = [
    "field_sweep",
    "rotational_pattern",
    "RotationPattern",
    "central_line_scale",
]


def _sweep_lines(system: SpinSystem, theta_deg: float, freq_mhz: float,
                 b_range: tuple[float, float]) -> list[ResonanceLine]:
    margin = 5.0 * system.linewidth_pp
    return resonance_fields(system, theta_deg, freq_mhz,
                            b_range[0] - margin, b_range[1] + margin)


def central_line_scale(system: SpinSystem, freq_mhz: float,
                       shape: LineShape,
                       temperature: float = 300.0) -> float:
    """Peak-to-peak amplitude of the thermal theta=0 central line.

    Used as the normalization constant for all spectra of the system at
    this microwave frequency, so a thermal axial sweep has a central
    line of unit peak-to-peak amplitude.
    """
    gamma = system.g * 1.3996245
    center = freq_mhz / gamma
    span = 6.0 * abs(system.zfs_d) / gamma + 50.0 * system.linewidth_pp + 10.0
    lines = _sweep_lines(system, 0.0, freq_mhz, (center - span, center + span))
    if not lines:
        raise ConfigError(
            f"no resonance found near {center:.1f} G for normalization")
    # central line: the one closest to the pure Zeeman field
    line = min(lines, key=lambda ln: abs(ln.field - center))
    pops = thermal_populations(
        system, FieldOrientation(line.field, 0.0), temperature)
    weight = line.matrix_element_sq * pops.difference(line.pair)
    return abs(weight) * shape.peak_to_peak_amplitude()


def field_sweep(system: SpinSystem, theta_deg: float, freq_mhz: float,
                b_start: float, b_stop: float, n_points: int = 2048,
                populations: PopulationState | None = None,
                shape: LineShape | None = None,
                temperature: float = 300.0,
                normalization: float | None = None) -> Spectrum:
    """CW spectrum over [b_start, b_stop] at fixed microwave frequency.

    populations defaults to thermal equilibrium evaluated at each line's
    resonance field.  A fixed PopulationState (for example an optically
    pumped one) is applied to every line instead when given.  The
    normalization constant may be precomputed with central_line_scale
    to keep several sweeps on a common scale.
    """
    if b_stop <= b_start:
        raise ConfigError("b_stop must exceed b_start")
    if n_points < 2:
        raise ConfigError("n_points must be at least 2")
    if freq_mhz <= 0:
        raise ConfigError("freq_mhz must be positive")
    shape = shape or LineShape("lorentzian_derivative", system.linewidth_pp)
    axis = np.linspace(b_start, b_stop, n_points)
    intensity = np.zeros_like(axis)
    lines = _sweep_lines(system, theta_deg, freq_mhz, (b_start, b_stop))
    for line in lines:
        if populations is None:
            pops = thermal_populations(
                system, FieldOrientation(line.field, theta_deg), temperature)
        else:
            pops = populations
        weight = line.matrix_element_sq * pops.difference(line.pair)
        intensity += weight * shape.evaluate(axis - line.field)
    scale = normalization if normalization is not None else central_line_scale(
        system, freq_mhz, shape, temperature)
    intensity /= scale
    meta = {
        "system": system.label,
        "theta_deg": theta_deg,
        "freq_mhz": freq_mhz,
        "shape": shape.kind,
        "width_pp_g": shape.width_pp,
        "normalization": scale,
    }
    for k, line in enumerate(sorted(lines, key=lambda ln: ln.field)):
        meta[f"line{k}_pair"] = f"{line.lower}-{line.upper}"
        meta[f"line{k}_field_g"] = round(line.field, 4)
    return Spectrum("field", axis, intensity, meta)


@dataclass
class RotationPattern:
    """Resonance fields vs field angle at fixed microwave frequency.

    Attributes:
        angles_deg: the angle grid.
        lines: per-angle lists of ResonanceLine, sorted by field.
        spectra: optional per-angle Spectrum objects (None if not built).
    """

    angles_deg: np.ndarray
    lines: list[list[ResonanceLine]]
    spectra: list[Spectrum] | None = None

    def field_of_pair(self, pair: tuple[int, int]) -> np.ndarray:
        """Resonance field of one level pair across the angle grid (NaN if absent)."""
        out = np.full(len(self.angles_deg), np.nan)
        for i, per_angle in enumerate(self.lines):
            for line in per_angle:
                if line.pair == pair:
                    out[i] = line.field
                    break
        return out


def rotational_pattern(system: SpinSystem, freq_mhz: float,
                       angles_deg: np.ndarray,
                       b_range: tuple[float, float] | None = None,
                       build_spectra: bool = False,
                       n_points: int = 2048,
                       shape: LineShape | None = None,
                       temperature: float = 300.0) -> RotationPattern:
    """Resonance-field table (and optional spectra) on an angle grid."""
    angles = np.asarray(angles_deg, dtype=float)
    if angles.ndim != 1 or len(angles) == 0:
        raise ConfigError("angles_deg must be a non-empty 1-D grid")
    if b_range is None:
        gamma = system.g * 1.3996245
        center = freq_mhz / gamma
        span = 6.0 * abs(system.zfs_d) / gamma + 25.0 * system.linewidth_pp + 10.0
        b_range = (center - span, center + span)
    shape = shape or LineShape("lorentzian_derivative", system.linewidth_pp)
    norm = central_line_scale(system, freq_mhz, shape, temperature)

    all_lines: list[list[ResonanceLine]] = []
    spectra: list[Spectrum] | None = [] if build_spectra else None
    for theta in angles:
        lines = resonance_fields(system, theta, freq_mhz, b_range[0], b_range[1])
        all_lines.append(lines)
        if build_spectra:
            spec = field_sweep(system, theta, freq_mhz, b_range[0], b_range[1],
                               n_points=n_points, shape=shape,
                               temperature=temperature, normalization=norm)
            spectra.append(spec)
    return RotationPattern(angles, all_lines, spectra)
