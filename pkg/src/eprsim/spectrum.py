"""Spectrum container and EPR line shapes.

Line shapes are parameterized by the peak-to-peak width of the
derivative form, the quantity read off an experimental CW spectrum.
Absorption variants of the same shape use the equivalent full width at
half maximum (FWHM = sqrt(3) * pp for a Lorentzian, sqrt(2 ln 2) * pp
for a Gaussian), so switching kind keeps the underlying linewidth.

Absorption shapes are normalized to unit area; derivative shapes are
their exact derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["LineShape", "Spectrum", "LINE_SHAPE_KINDS"]

LINE_SHAPE_KINDS = (
    "lorentzian_derivative",
    "gaussian_derivative",
    "lorentzian",
    "gaussian",
)

_SQRT3 = np.sqrt(3.0)
_SQRT2LN2 = np.sqrt(2.0 * np.log(2.0))


@dataclass(frozen=True)
class LineShape:
    """Line shape kind plus peak-to-peak width in Gauss."""

    kind: str = "lorentzian_derivative"
    width_pp: float = 3.0

    def __post_init__(self) -> None:
        if self.kind not in LINE_SHAPE_KINDS:
            raise ValueError(
                f"unknown line shape {self.kind!r}; expected one of {LINE_SHAPE_KINDS}")
        if self.width_pp <= 0:
            raise ValueError(f"width_pp must be positive, got {self.width_pp}")

    @property
    def is_derivative(self) -> bool:
        return self.kind.endswith("_derivative")

    @property
    def fwhm(self) -> float:
        """Equivalent absorption full width at half maximum in Gauss."""
        if self.kind.startswith("lorentzian"):
            return _SQRT3 * self.width_pp
        return _SQRT2LN2 * self.width_pp

    def evaluate(self, offsets: np.ndarray) -> np.ndarray:
        """Shape value at the given offsets (G) from line center.

        Absorption kinds integrate to one; derivative kinds are the
        field derivative of the corresponding absorption kind.
        """
        x = np.asarray(offsets, dtype=float)
        if self.kind == "lorentzian":
            return _lorentzian(x, self.fwhm)
        if self.kind == "gaussian":
            return _gaussian(x, self.fwhm)
        if self.kind == "lorentzian_derivative":
            return _lorentzian_derivative(x, self.fwhm)
        return _gaussian_derivative(x, self.fwhm)

    def peak_to_peak_amplitude(self) -> float:
        """max - min of the unit-weight shape (closed form)."""
        g = self.fwhm
        if self.kind == "lorentzian":
            return 2.0 / (np.pi * g)
        if self.kind == "gaussian":
            return 2.0 * np.sqrt(np.log(2.0) / np.pi) / g
        if self.kind == "lorentzian_derivative":
            # extrema at +-g/(2 sqrt(3)) from center
            return 2.0 * 9.0 / (2.0 * np.sqrt(3.0) * np.pi * g * g)
        # gaussian derivative: extrema at +-sigma
        sigma = g / (2.0 * _SQRT2LN2)
        return 2.0 / (np.sqrt(2.0 * np.pi * np.e) * sigma * sigma)


def _lorentzian(x: np.ndarray, fwhm: float) -> np.ndarray:
    half = fwhm / 2.0
    return (half / np.pi) / (x * x + half * half)


def _lorentzian_derivative(x: np.ndarray, fwhm: float) -> np.ndarray:
    half = fwhm / 2.0
    return -(2.0 * half / np.pi) * x / (x * x + half * half) ** 2


def _gaussian(x: np.ndarray, fwhm: float) -> np.ndarray:
    sigma = fwhm / (2.0 * _SQRT2LN2)
    return np.exp(-0.5 * (x / sigma) ** 2) / (sigma * np.sqrt(2.0 * np.pi))


def _gaussian_derivative(x: np.ndarray, fwhm: float) -> np.ndarray:
    sigma = fwhm / (2.0 * _SQRT2LN2)
    return -x / sigma**2 * np.exp(-0.5 * (x / sigma) ** 2) / (sigma * np.sqrt(2.0 * np.pi))


AXIS_KINDS = ("field", "frequency", "time", "angle")


@dataclass
class Spectrum:
    """A 1-D trace: axis values, intensities and free-form metadata.

    axis_kind states the physical meaning of the axis: "field" (G),
    "frequency" (GHz or MHz, see meta), "time" (us) or "angle" (deg).
    """

    axis_kind: str
    axis: np.ndarray
    intensity: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.axis_kind not in AXIS_KINDS:
            raise ValueError(
                f"unknown axis_kind {self.axis_kind!r}; expected one of {AXIS_KINDS}")
        self.axis = np.asarray(self.axis, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.axis.ndim != 1:
            raise ValueError("axis must be one-dimensional")
        if self.axis.shape[0] != self.intensity.shape[-1]:
            raise ValueError(
                f"axis length {self.axis.shape[0]} does not match intensity "
                f"length {self.intensity.shape[-1]}")

    def __len__(self) -> int:
        return len(self.axis)
