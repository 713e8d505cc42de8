"""Spin-resonance simulation toolkit for optically pumped high-spin defects.

Covers continuous-wave spectra and rotation patterns of a zero-field-split
spin, optical pumping and relaxation kinetics, density-matrix pulse
sequences (nutation, echoes, echo-detected sweeps), pump-frequency-swept
DEER, spin-wave resonance of ferromagnetic nanostripes, and exponential
trace fitting.  Working units: MHz, Gauss, microseconds.
"""

from .constants import KB_MHZ_PER_K, MHZ_PER_GAUSS, gyromagnetic_mhz_per_gauss
from .errors import ConfigError, EprsimError, FitError, UnsaturatedError
from .spincore import (
    ALLOWED_ME_THRESHOLD,
    FieldOrientation,
    ResonanceLine,
    SpinSystem,
    Transition,
    field_offset_to_frequency,
    frequency_offset_to_field,
    hamiltonian,
    resonance_fields,
    spin_operators,
    transitions,
)
from .spectrum import LINE_SHAPE_KINDS, LineShape, Spectrum
from .cwspectrum import (
    RotationPattern,
    central_line_scale,
    field_sweep,
    rotational_pattern,
)
from .pumprelax import (
    PopulationState,
    PumpModel,
    combined_fixed_point,
    echo_detected_recovery_trace,
    effective_pump_time,
    evolve_populations,
    populations_at,
    thermal_populations,
)
from .pulse import (
    PulseEngine,
    RelaxationParams,
    echo_detected_field_sweep,
    extract_nutation_frequency,
    gauss_hermite_detunings,
    hahn_echo_decay,
    rabi_trace,
    run_sequence,
)
from .peldor import (
    DeerDip,
    DeerSweepConfig,
    PartnerSpecies,
    ResonatorProfile,
    deer_sweep,
    dip_detect,
    flip_probability,
    pump_excitation_probability,
)
from .swr import (
    DemagFactors,
    StripeSpec,
    SwrMode,
    demag_factors,
    dispersion_frequency,
    resonance_fields_at_frequency,
    swr_spectrum,
    uniform_mode_field,
)
from .fitting import (
    FitResult,
    PiecewiseRecoveryFit,
    bare_pump_time,
    fit_mono_exponential,
    fit_piecewise_recovery,
    initial_guess,
)

__version__ = "0.1.0"

__all__ = [
    "ALLOWED_ME_THRESHOLD",
    "ConfigError",
    "DeerDip",
    "DeerSweepConfig",
    "DemagFactors",
    "EprsimError",
    "FieldOrientation",
    "FitError",
    "FitResult",
    "KB_MHZ_PER_K",
    "LINE_SHAPE_KINDS",
    "LineShape",
    "MHZ_PER_GAUSS",
    "PartnerSpecies",
    "PiecewiseRecoveryFit",
    "PopulationState",
    "PulseEngine",
    "PumpModel",
    "RelaxationParams",
    "ResonanceLine",
    "ResonatorProfile",
    "RotationPattern",
    "SpinSystem",
    "Spectrum",
    "StripeSpec",
    "SwrMode",
    "Transition",
    "UnsaturatedError",
    "bare_pump_time",
    "central_line_scale",
    "combined_fixed_point",
    "deer_sweep",
    "demag_factors",
    "dip_detect",
    "dispersion_frequency",
    "echo_detected_field_sweep",
    "echo_detected_recovery_trace",
    "effective_pump_time",
    "evolve_populations",
    "extract_nutation_frequency",
    "field_offset_to_frequency",
    "field_sweep",
    "fit_mono_exponential",
    "fit_piecewise_recovery",
    "flip_probability",
    "frequency_offset_to_field",
    "gauss_hermite_detunings",
    "gyromagnetic_mhz_per_gauss",
    "hahn_echo_decay",
    "hamiltonian",
    "initial_guess",
    "populations_at",
    "pump_excitation_probability",
    "rabi_trace",
    "resonance_fields",
    "resonance_fields_at_frequency",
    "rotational_pattern",
    "run_sequence",
    "spin_operators",
    "swr_spectrum",
    "thermal_populations",
    "transitions",
    "uniform_mode_field",
]
