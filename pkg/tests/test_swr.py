"""Nanostripe spin-wave resonance: demag factors, dispersion and mode
fields frozen against an independent evaluation of the closed forms."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eprsim import (
    ConfigError,
    StripeSpec,
    UnsaturatedError,
    demag_factors,
    dispersion_frequency,
    resonance_fields_at_frequency,
    swr_spectrum,
    uniform_mode_field,
)

FROZEN_MODE_FIELDS = [12253.04, 13052.74, 13452.68, 13592.21,
                      13553.79, 13383.70]


def test_demag_factors_of_default_stripe():
    d = demag_factors(StripeSpec())
    assert d.along_length == pytest.approx(0.00076291, abs=1e-7)
    assert d.along_width == pytest.approx(0.2763971, abs=1e-6)
    assert d.along_thickness == pytest.approx(0.7228399, abs=1e-6)
    assert d.total == pytest.approx(1.0, abs=1e-8)


def test_demag_factors_cube_limit():
    d = demag_factors(StripeSpec(thickness_nm=500.0, width_nm=500.0,
                                 length_um=0.5))
    assert d.along_length == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert d.along_width == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert d.along_thickness == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_demag_factors_thin_film_limit():
    d = demag_factors(StripeSpec(thickness_nm=1.0, width_nm=1e7,
                                 length_um=1e4))
    assert d.along_thickness == pytest.approx(1.0, abs=1e-5)
    assert d.along_length < 1e-5
    assert d.along_width < 1e-5


@settings(max_examples=30, deadline=None)
@given(t=st.floats(10.0, 1000.0), w=st.floats(10.0, 1000.0),
       l=st.floats(0.1, 10.0))
def test_demag_factors_sum_to_one(t, w, l):
    d = demag_factors(StripeSpec(thickness_nm=t, width_nm=w, length_um=l))
    assert d.total == pytest.approx(1.0, abs=1e-6)
    for value in (d.along_length, d.along_width, d.along_thickness):
        assert -1e-9 <= value <= 1.0 + 1e-9


def test_dispersion_frequencies_at_fixed_field():
    spec = StripeSpec()
    freqs = [dispersion_frequency(spec, 12000.0, n) for n in range(1, 7)]
    assert freqs == pytest.approx([33.2601, 30.9881, 29.8841, 29.5102,
                                   29.6297, 30.1139], abs=2e-3)


def test_dispersion_monotone_in_field():
    spec = StripeSpec()
    fields = np.linspace(3300.0, 20000.0, 40)
    for n in (1, 4, 6):
        freqs = [dispersion_frequency(spec, h, n) for h in fields]
        assert np.all(np.diff(freqs) > 0)


def test_unsaturated_field_raises():
    spec = StripeSpec()
    with pytest.raises(UnsaturatedError, match="saturate"):
        dispersion_frequency(spec, 3000.0, 1)


def test_mode_fields_at_default_frequency():
    modes = resonance_fields_at_frequency(StripeSpec(), 34.0)
    assert [m.index for m in modes] == [1, 2, 3, 4, 5, 6]
    fields = [m.resonance_field_g for m in modes]
    assert fields == pytest.approx(FROZEN_MODE_FIELDS, abs=0.05)
    # the non-monotonic tail: dipolar thinning beats exchange stiffening
    # up to n = 4, then exchange wins
    assert np.argmax(fields) == 3


def test_mode_field_round_trip():
    spec = StripeSpec()
    for mode in resonance_fields_at_frequency(spec, 34.0):
        back = dispersion_frequency(spec, mode.resonance_field_g, mode.index)
        assert back == pytest.approx(34.0, abs=5e-4)


def test_uniform_mode_matches_quadratic_solution():
    spec = StripeSpec()
    field = uniform_mode_field(spec, 34.0)
    assert field == pytest.approx(10865.338, abs=1e-2)
    # verify against the dispersion evaluated at a huge quantization
    # width, where k -> 0 recovers the uniform mode
    d = demag_factors(spec)
    hi = field - d.along_width * spec.ms4pi_gauss
    gamma = spec.gyromagnetic_mhz_per_gauss()
    f_check = gamma * np.sqrt(hi * (hi + spec.ms4pi_gauss)) / 1e3
    assert f_check == pytest.approx(34.0, rel=1e-9)


def test_wide_quantization_limit_converges_to_uniform_mode():
    wide = StripeSpec(quantization_width_nm=1e9)
    kittel = uniform_mode_field(wide, 34.0)
    for mode in resonance_fields_at_frequency(wide, 34.0):
        assert mode.resonance_field_g == pytest.approx(kittel, abs=0.5)


def test_zero_exchange_wide_limit_is_degenerate():
    flat = StripeSpec(exchange_erg_per_cm=0.0, quantization_width_nm=1e9)
    fields = [m.resonance_field_g
              for m in resonance_fields_at_frequency(flat, 34.0)]
    assert np.ptp(fields) < 0.01


def test_stiffer_exchange_lowers_mode_fields():
    soft = resonance_fields_at_frequency(StripeSpec(), 34.0)
    stiff = resonance_fields_at_frequency(
        StripeSpec(exchange_erg_per_cm=2.6e-6), 34.0)
    for a, b in zip(soft, stiff):
        assert b.resonance_field_g < a.resonance_field_g


def test_spectrum_normalization_and_meta():
    spec = swr_spectrum(StripeSpec(), 34.0, 11800.0, 14000.0)
    assert np.max(np.abs(spec.intensity)) == pytest.approx(1.0)
    assert spec.meta["n_modes"] == 6
    assert spec.meta["mode1_field_g"] == pytest.approx(12253.04, abs=0.05)
    # the two isolated low-field modes show the derivative signature:
    # a zero crossing at the center between lobes of opposite sign
    # (modes 4 and 5 overlap too strongly for this to hold there)
    for n in (1, 2):
        center = spec.meta[f"mode{n}_field_g"]
        at = lambda b: spec.intensity[np.argmin(np.abs(spec.axis - b))]
        assert abs(at(center)) < 0.05
        assert at(center - 20.0) > 0.5
        assert at(center + 20.0) < -0.5


def test_absorption_spectrum_has_six_comparable_peaks():
    spec = swr_spectrum(StripeSpec(), 34.0, 11800.0, 14000.0,
                        kind="absorption", line_width_g=20.0)
    heights = []
    for n in range(1, 7):
        center = spec.meta[f"mode{n}_field_g"]
        k = np.argmin(np.abs(spec.axis - center))
        heights.append(spec.intensity[k])
    # equal oscillator strengths: peak heights differ only through
    # overlap of neighboring lines
    assert min(heights) > 0.8 * max(heights)


def test_no_modes_gives_flat_spectrum():
    # below the bottom of every mode branch there is nothing to excite
    spec = swr_spectrum(StripeSpec(), 0.5, 11800.0, 14000.0)
    assert spec.meta["n_modes"] == 0
    assert np.all(spec.intensity == 0.0)


def test_spec_validation():
    with pytest.raises(ConfigError):
        StripeSpec(width_nm=0.0)
    with pytest.raises(ConfigError):
        StripeSpec(exchange_erg_per_cm=-1e-7)
    with pytest.raises(ConfigError):
        StripeSpec(quantization_width_nm=0.0)
    with pytest.raises(ConfigError):
        swr_spectrum(StripeSpec(), 34.0, 14000.0, 11800.0)
    with pytest.raises(ConfigError):
        swr_spectrum(StripeSpec(), 34.0, 11800.0, 14000.0, kind="dispersion")
