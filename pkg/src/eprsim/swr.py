"""Spin-wave resonance of a ferromagnetic nanostripe.

The stripe is magnetized in plane along its width; standing spin waves
across the width carry wavevectors k_n = n*pi/w (unpinned, with the
effective quantization width exposed as an override).  Mode fields come
from the lowest-order dipole-exchange dispersion for k parallel to the
magnetization,

    f_n = g' * sqrt((Hi + L k^2) (Hi + L k^2 + Ms4pi * F(k T))),

with F(x) = (1 - exp(-x))/x, g' the gyromagnetic ratio in MHz/G,
L = 2A/Ms the exchange length parameter in G cm^2, and
Hi = H - N_width * Ms4pi the internal field.  Demagnetizing factors use
the exact closed form for a uniformly magnetized rectangular prism.

CGS-practical units throughout: Gauss, cm, erg/cm, GHz for microwave
frequencies.  Geometry is specified in nm/um because that is how
nanostructures are quoted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import MHZ_PER_GAUSS
from .errors import ConfigError, UnsaturatedError
from .spectrum import LineShape, Spectrum

__all__ = [
    "StripeSpec",
    "SwrMode",
    "DemagFactors",
    "demag_factors",
    "dispersion_frequency",
    "uniform_mode_field",
    "resonance_fields_at_frequency",
    "swr_spectrum",
]

NM_TO_CM = 1e-7
UM_TO_CM = 1e-4


@dataclass(frozen=True)
class StripeSpec:
    """Geometry and material constants of one nanostripe.

    Default values describe the measured Permalloy stripe: only the
    exchange stiffness is a textbook value rather than a measured one.
    """

    thickness_nm: float = 100.0
    width_nm: float = 300.0
    length_um: float = 100.0
    ms4pi_gauss: float = 11700.0
    g: float = 2.00
    exchange_erg_per_cm: float = 1.3e-6
    quantization_width_nm: float | None = None

    def __post_init__(self) -> None:
        for name in ("thickness_nm", "width_nm", "length_um", "ms4pi_gauss",
                     "g"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.exchange_erg_per_cm < 0:
            raise ConfigError("exchange stiffness must be non-negative")
        if self.quantization_width_nm is not None \
                and self.quantization_width_nm <= 0:
            raise ConfigError("quantization width must be positive")

    @property
    def thickness_cm(self) -> float:
        return self.thickness_nm * NM_TO_CM

    @property
    def width_cm(self) -> float:
        return self.width_nm * NM_TO_CM

    @property
    def length_cm(self) -> float:
        return self.length_um * UM_TO_CM

    @property
    def ms_gauss(self) -> float:
        return self.ms4pi_gauss / (4.0 * np.pi)

    @property
    def exchange_parameter(self) -> float:
        """Lambda = 2A/Ms in Gauss cm^2."""
        return 2.0 * self.exchange_erg_per_cm / self.ms_gauss

    @property
    def effective_width_cm(self) -> float:
        if self.quantization_width_nm is not None:
            return self.quantization_width_nm * NM_TO_CM
        return self.width_cm

    def gyromagnetic_mhz_per_gauss(self) -> float:
        return self.g * MHZ_PER_GAUSS


@dataclass(frozen=True)
class SwrMode:
    """One standing-wave mode: index, wavevector, resonance field."""

    index: int
    k_rad_per_cm: float
    resonance_field_g: float


@dataclass(frozen=True)
class DemagFactors:
    """Demagnetizing factors of the prism along its three edges."""

    along_length: float
    along_width: float
    along_thickness: float

    @property
    def total(self) -> float:
        return self.along_length + self.along_width + self.along_thickness


def _prism_factor(a: float, b: float, c: float) -> float:
    """Demag factor along the c edge of a prism with semi-axes a, b, c."""
    r = np.sqrt(a * a + b * b + c * c)
    ab = np.sqrt(a * a + b * b)
    ac = np.sqrt(a * a + c * c)
    bc = np.sqrt(b * b + c * c)
    f = ((b * b - c * c) / (2 * b * c) * np.log((r - a) / (r + a))
         + (a * a - c * c) / (2 * a * c) * np.log((r - b) / (r + b))
         + b / (2 * c) * np.log((ab + a) / (ab - a))
         + a / (2 * c) * np.log((ab + b) / (ab - b))
         + c / (2 * a) * np.log((bc - b) / (bc + b))
         + c / (2 * b) * np.log((ac - a) / (ac + a))
         + 2 * np.arctan2(a * b, c * r)
         + (a ** 3 + b ** 3 - 2 * c ** 3) / (3 * a * b * c)
         + (a * a + b * b - 2 * c * c) / (3 * a * b * c) * r
         + c / (a * b) * (ac + bc)
         - (ab ** 3 + bc ** 3 + ac ** 3) / (3 * a * b * c))
    return float(f / np.pi)


def demag_factors(spec: StripeSpec) -> DemagFactors:
    """Exact prism demagnetizing factors; they sum to one."""
    half_l = spec.length_cm / 2.0
    half_w = spec.width_cm / 2.0
    half_t = spec.thickness_cm / 2.0
    return DemagFactors(
        along_length=_prism_factor(half_w, half_t, half_l),
        along_width=_prism_factor(half_t, half_l, half_w),
        along_thickness=_prism_factor(half_l, half_w, half_t),
    )


def mode_wavevector(spec: StripeSpec, index: int) -> float:
    if index < 1:
        raise ConfigError("mode index must be a positive integer")
    return index * np.pi / spec.effective_width_cm


def _thin_film_form_factor(x: float) -> float:
    """(1 - exp(-x))/x, continuous through x = 0."""
    if x < 1e-12:
        return 1.0 - x / 2.0
    return (1.0 - np.exp(-x)) / x


def _internal_field(spec: StripeSpec, field_g: float,
                    demag: DemagFactors) -> float:
    hi = field_g - demag.along_width * spec.ms4pi_gauss
    if hi <= 0:
        raise UnsaturatedError(
            f"applied field {field_g:.1f} G does not saturate the stripe "
            f"along its width (need > "
            f"{demag.along_width * spec.ms4pi_gauss:.1f} G)")
    return hi


def dispersion_frequency(spec: StripeSpec, field_g: float, index: int,
                         demag: DemagFactors | None = None) -> float:
    """Mode frequency in GHz at the given applied field."""
    if demag is None:
        demag = demag_factors(spec)
    hi = _internal_field(spec, field_g, demag)
    k = mode_wavevector(spec, index)
    stiffened = hi + spec.exchange_parameter * k * k
    form = _thin_film_form_factor(k * spec.thickness_cm)
    f_mhz = spec.gyromagnetic_mhz_per_gauss() * np.sqrt(
        stiffened * (stiffened + spec.ms4pi_gauss * form))
    return float(f_mhz / 1e3)


def uniform_mode_field(spec: StripeSpec, freq_ghz: float,
                       demag: DemagFactors | None = None) -> float:
    """Field of the k -> 0 uniform mode (in-plane Kittel condition)."""
    if freq_ghz <= 0:
        raise ConfigError("drive frequency must be positive")
    if demag is None:
        demag = demag_factors(spec)
    q = freq_ghz * 1e3 / spec.gyromagnetic_mhz_per_gauss()
    ms = spec.ms4pi_gauss
    hi = 0.5 * (-ms + np.sqrt(ms * ms + 4.0 * q * q))
    return float(hi + demag.along_width * ms)


def resonance_fields_at_frequency(spec: StripeSpec, freq_ghz: float,
                                  n_max: int = 6,
                                  tolerance_g: float = 1e-3,
                                  field_max_g: float = 1e6) -> list[SwrMode]:
    """Resonance fields of modes 1..n_max at fixed drive frequency.

    Each mode's field is bisected from the dispersion, which is
    monotone increasing in field above saturation.  Modes with no root
    below field_max_g are omitted rather than reported as errors.
    """
    if freq_ghz <= 0:
        raise ConfigError("drive frequency must be positive")
    if n_max < 1:
        raise ConfigError("n_max must be at least 1")
    demag = demag_factors(spec)
    saturation = demag.along_width * spec.ms4pi_gauss
    modes = []
    for n in range(1, n_max + 1):
        lo = saturation + tolerance_g
        hi = lo + 1000.0
        while dispersion_frequency(spec, hi, n, demag) < freq_ghz:
            hi = saturation + 2.0 * (hi - saturation)
            if hi > field_max_g:
                break
        if hi > field_max_g:
            continue
        if dispersion_frequency(spec, lo, n, demag) > freq_ghz:
            continue
        while hi - lo > tolerance_g:
            mid = 0.5 * (lo + hi)
            if dispersion_frequency(spec, mid, n, demag) < freq_ghz:
                lo = mid
            else:
                hi = mid
        modes.append(SwrMode(n, mode_wavevector(spec, n), 0.5 * (lo + hi)))
    return modes


def swr_spectrum(spec: StripeSpec, freq_ghz: float,
                 field_start_g: float, field_stop_g: float,
                 n_points: int = 2048,
                 line_width_g: float = 50.0,
                 kind: str = "derivative",
                 n_max: int = 6) -> Spectrum:
    """Synthesized sweep with equal-weight lines at the mode fields.

    Oscillator strengths are deliberately uniform; kind selects the
    derivative or absorption representation.  An empty mode list gives
    a flat zero spectrum.
    """
    if kind not in ("derivative", "absorption"):
        raise ConfigError("kind must be 'derivative' or 'absorption'")
    if n_points < 2:
        raise ConfigError("need at least two field points")
    if field_stop_g <= field_start_g:
        raise ConfigError("field range must be increasing")
    shape_kind = "lorentzian_derivative" if kind == "derivative" else "lorentzian"
    shape = LineShape(shape_kind, width_pp=line_width_g)
    axis = np.linspace(field_start_g, field_stop_g, n_points)
    intensity = np.zeros_like(axis)
    modes = resonance_fields_at_frequency(spec, freq_ghz, n_max)
    for mode in modes:
        intensity += shape.evaluate(axis - mode.resonance_field_g)
    peak = float(np.max(np.abs(intensity))) if modes else 0.0
    if peak > 0:
        intensity /= peak
    meta = {"freq_ghz": freq_ghz, "kind": kind, "n_modes": len(modes)}
    for mode in modes:
        meta[f"mode{mode.index}_field_g"] = round(mode.resonance_field_g, 3)
    return Spectrum("field", axis, intensity, meta)
