"""Pump-frequency DEER sweeps, resonator attenuation and dip detection."""

import numpy as np
import pytest

from eprsim import (
    ConfigError,
    DeerSweepConfig,
    PartnerSpecies,
    ResonatorProfile,
    Spectrum,
    deer_sweep,
    dip_detect,
    flip_probability,
    pump_excitation_probability,
)
from eprsim.peldor import PULSED_PRELUDE_SCALE


def test_transmission_profile():
    res = ResonatorProfile(center_freq_ghz=9.308, fwhm_mhz=100.0)
    assert res.transmission(9.308) == 1.0
    assert res.transmission(9.358) == pytest.approx(0.5, rel=1e-12)
    assert res.transmission(9.258) == pytest.approx(0.5, rel=1e-12)
    assert res.transmission(9.178) == pytest.approx(0.128866, abs=1e-6)


def test_flip_probability_limits():
    # resonant pi pulse flips completely, zero drive flips nothing
    assert flip_probability(5.0, 0.0, 0.1) == pytest.approx(1.0, rel=1e-12)
    assert flip_probability(0.0, 3.0, 0.1) == 0.0
    # far off resonance the probability is bounded by (nu1/delta)^2
    assert flip_probability(5.0, 200.0, 0.1) < (5.0 / 200.0) ** 2


def test_pump_excitation_matches_independent_quadrature():
    sp = PartnerSpecies("x", 9.308)
    got = pump_excitation_probability(sp, 9.308)
    sigma = sp.line_width_mhz / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    off = np.linspace(-10 * sigma, 10 * sigma, 40001)
    w = np.exp(-off ** 2 / (2.0 * sigma ** 2))
    w /= np.trapezoid(w, off)
    expected = np.trapezoid(w * flip_probability(5.0, off, 0.1), off)
    assert got == pytest.approx(expected, rel=1e-4)
    assert got == pytest.approx(0.685674, abs=1e-5)


def test_pump_excitation_symmetric_about_line_center():
    sp = PartnerSpecies("x", 9.308)  # at the resonator center
    up = pump_excitation_probability(sp, 9.328)
    down = pump_excitation_probability(sp, 9.288)
    assert up == pytest.approx(down, rel=1e-9)


def test_pump_excitation_negligible_far_off_resonance():
    sp = PartnerSpecies("x", 9.308)
    assert pump_excitation_probability(sp, 9.108) < 1e-3


def test_pump_excitation_validation():
    sp = PartnerSpecies("x", 9.308)
    with pytest.raises(ConfigError):
        pump_excitation_probability(sp, 9.308, pump_pulse_ns=0.0)


def test_from_field_offset_shifts_down_in_frequency():
    sp = PartnerSpecies.from_field_offset("SO", 23.188, 2.0028, 9.308)
    assert sp.line_center_ghz == pytest.approx(9.243, abs=1e-5)


def test_partner_validation():
    with pytest.raises(ConfigError):
        PartnerSpecies("bad", 9.3, line_width_mhz=0.0)
    with pytest.raises(ConfigError):
        PartnerSpecies("bad", 9.3, coupling_depth=1.5)


def test_config_validation():
    with pytest.raises(ConfigError):
        DeerSweepConfig(echo_kind="primary")
    with pytest.raises(ConfigError):
        DeerSweepConfig(optical_mode="strobed")
    with pytest.raises(ConfigError):
        DeerSweepConfig(step_mhz=0.0)
    with pytest.raises(ConfigError):
        DeerSweepConfig(stimulated_to_refocused=0.9)
    with pytest.raises(ConfigError):
        DeerSweepConfig(sweep_start_ghz=9.30, sweep_stop_ghz=9.3005)


def test_frequency_grid_is_stop_exclusive():
    cfg = DeerSweepConfig(sweep_start_ghz=9.15, sweep_stop_ghz=9.40,
                          step_mhz=1.0)
    grid = cfg.frequency_grid()
    assert len(grid) == 250
    assert grid[0] == pytest.approx(9.15)
    assert grid[-1] == pytest.approx(9.399)


def test_default_sweep_has_self_and_partner_dips():
    partner = PartnerSpecies.from_field_offset("SO", 23.188, 2.0028, 9.308,
                                               coupling_depth=0.5)
    spec = deer_sweep(DeerSweepConfig(), [partner])
    dips = dip_detect(spec)
    assert len(dips) == 2
    assert dips[0].freq_ghz == pytest.approx(9.24343, abs=1e-3)
    assert dips[0].depth == pytest.approx(0.10328, abs=2e-3)
    assert dips[1].freq_ghz == pytest.approx(9.30800, abs=1e-3)
    assert dips[1].depth == pytest.approx(0.37312, abs=2e-3)


def test_echo_stays_within_bounds():
    spec = deer_sweep(DeerSweepConfig())
    e0 = spec.meta["base_echo_amplitude"]
    assert np.all(spec.intensity > 0)
    assert np.all(spec.intensity <= e0 + 1e-12)


def test_partner_dips_multiply():
    a = PartnerSpecies("a", 9.27, coupling_depth=0.3)
    b = PartnerSpecies("b", 9.35, coupling_depth=0.6)
    cfg = DeerSweepConfig()
    none = deer_sweep(cfg).intensity
    only_a = deer_sweep(cfg, [a]).intensity
    only_b = deer_sweep(cfg, [b]).intensity
    both = deer_sweep(cfg, [a, b]).intensity
    assert np.allclose(both * none, only_a * only_b, rtol=1e-12)


def test_refocused_echo_is_smaller_same_fractional_dips():
    partner = PartnerSpecies("SO", 9.243, coupling_depth=0.5)
    stim = deer_sweep(DeerSweepConfig(echo_kind="stimulated"), [partner])
    refoc = deer_sweep(DeerSweepConfig(echo_kind="refocused"), [partner])
    ratio = DeerSweepConfig().stimulated_to_refocused
    assert np.allclose(stim.intensity, ratio * refoc.intensity, rtol=1e-12)
    d_stim = dip_detect(stim)
    d_refoc = dip_detect(refoc)
    assert [d.freq_ghz for d in d_stim] == pytest.approx(
        [d.freq_ghz for d in d_refoc])
    assert [d.depth for d in d_stim] == pytest.approx(
        [d.depth for d in d_refoc], rel=1e-9)


def test_pulsed_prelude_rescales_amplitude_only():
    cont = deer_sweep(DeerSweepConfig(optical_mode="continuous"))
    pulsed = deer_sweep(DeerSweepConfig(optical_mode="pulsedPrelude"))
    assert np.allclose(pulsed.intensity,
                       PULSED_PRELUDE_SCALE * cont.intensity, rtol=1e-12)


def test_band_edge_partner_dip_is_buried():
    cfg = DeerSweepConfig(self_coupling_depth=1e-9)
    at_edge = deer_sweep(cfg, [PartnerSpecies("p", 9.178,
                                              coupling_depth=0.5)])
    at_center = deer_sweep(cfg, [PartnerSpecies("p", 9.308,
                                                coupling_depth=0.5)])
    depth_edge = max(d.depth for d in dip_detect(at_edge))
    depth_center = max(d.depth for d in dip_detect(at_center))
    assert depth_edge < 0.2 * depth_center


def test_probe_outside_band_warns():
    cfg = DeerSweepConfig(probe_freq_ghz=9.15)
    with pytest.warns(UserWarning, match="resonator band"):
        deer_sweep(cfg)


def test_dip_detect_synthetic_spectrum():
    axis = np.linspace(9.2, 9.4, 401)
    y = np.ones_like(axis)
    for center, depth in ((9.26, 0.3), (9.35, 0.12)):
        y *= 1.0 - depth / (1.0 + ((axis - center) / 0.004) ** 2)
    dips = dip_detect(Spectrum("frequency", axis, y))
    assert len(dips) == 2
    assert dips[0].freq_ghz == pytest.approx(9.26, abs=5e-4)
    assert dips[1].freq_ghz == pytest.approx(9.35, abs=5e-4)
    assert dips[0].depth == pytest.approx(0.3, rel=0.02)
    assert dips[1].depth == pytest.approx(0.12, rel=0.02)


def test_dip_detect_flat_and_wrong_axis():
    flat = Spectrum("frequency", np.linspace(9.2, 9.4, 100),
                    np.ones(100))
    assert dip_detect(flat) == []
    with pytest.raises(ConfigError):
        dip_detect(Spectrum("field", np.arange(5.0), np.ones(5)))
