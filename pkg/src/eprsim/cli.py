"""Config-driven scenario runner.

Usage:
    eprsim <scenario> [--config file.yaml] [--set key=value ...]
                      [--csv out.csv] [--plot out.svg]
    eprsim list

Scenario parameters resolve with command-line --set overrides taking
precedence over config-file values, which take precedence over schema
defaults.  Unknown or mistyped keys are rejected (exit 2); numerical
failures inside a module exit 3.  CSV output is deterministic: sorted
`# key=value` comment lines, a header row, then fixed-precision data
rows, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import cwspectrum, peldor, pumprelax, pulse, swr as swr_mod
from .constants import MHZ_PER_GAUSS
from .errors import ConfigError, EprsimError
from .fitting import bare_pump_time, fit_mono_exponential, fit_piecewise_recovery
from .pumprelax import PumpModel, combined_fixed_point, populations_at, thermal_populations
from .spectrum import LINE_SHAPE_KINDS, LineShape
from .spincore import FieldOrientation, SpinSystem, resonance_fields

__all__ = ["main", "run_scenario", "list_scenarios", "REGISTRY"]

REQUIRED = object()


@dataclass(frozen=True)
class Key:
    """One schema entry: type, default, unit, and documentation."""

    name: str
    kind: str  # float, int, str, bool, json, path
    default: object
    unit: str
    help: str
    choices: tuple | None = None

    @property
    def required(self) -> bool:
        return self.default is REQUIRED


def _coerce(key: Key, value, source: str):
    try:
        if key.kind == "float":
            if isinstance(value, bool) or value is None:
                raise TypeError
            out = float(value)
        elif key.kind == "int":
            if isinstance(value, bool) or float(value) != int(value):
                raise TypeError
            out = int(value)
        elif key.kind == "bool":
            if not isinstance(value, bool):
                raise TypeError
            out = value
        elif key.kind in ("str", "path"):
            if not isinstance(value, str):
                raise TypeError
            out = value
        elif key.kind == "json":
            out = value
        else:
            raise ConfigError(f"schema bug: unknown kind {key.kind}")
    except (TypeError, ValueError):
        raise ConfigError(
            f"{source}: key '{key.name}' expects {key.kind}, got {value!r}")
    if key.choices is not None and out not in key.choices:
        raise ConfigError(
            f"{source}: key '{key.name}' must be one of {key.choices}, "
            f"got {out!r}")
    return out


@dataclass
class Scenario:
    name: str
    description: str
    keys: list
    runner: object = None

    def key_map(self) -> dict:
        return {k.name: k for k in self.keys}

    def resolve(self, config_values: dict, overrides: dict) -> dict:
        keymap = self.key_map()
        for source, values in (("config file", config_values),
                               ("command line", overrides)):
            for name in values:
                if name not in keymap:
                    raise ConfigError(
                        f"{source}: unknown key '{name}' for scenario "
                        f"'{self.name}'")
        params = {}
        for key in self.keys:
            if key.name in overrides:
                params[key.name] = _coerce(key, overrides[key.name],
                                           "command line")
            elif key.name in config_values:
                params[key.name] = _coerce(key, config_values[key.name],
                                           "config file")
            elif key.required:
                raise ConfigError(
                    f"scenario '{self.name}': missing required key "
                    f"'{key.name}'")
            else:
                params[key.name] = key.default
        return params


OUTPUT_KEYS = [
    Key("output_csv", "path", None, "-", "CSV output path "
        "(default <scenario>.csv; --csv overrides)"),
    Key("output_plot", "path", None, "-", "optional plot path "
        "(.svg/.pdf/.png; --plot overrides)"),
    Key("precision", "int", 6, "decimal places", "decimal places in CSV "
        "data rows"),
]

SYSTEM_KEYS = [
    Key("spin", "float", 1.5, "1", "spin quantum number S"),
    Key("g", "float", 2.0028, "1", "electron g factor"),
    Key("d_mhz", "float", 35.0, "MHz", "axial zero-field splitting D"),
    Key("e_mhz", "float", 0.0, "MHz", "transverse zero-field splitting E"),
    Key("linewidth_pp_g", "float", 3.0, "G", "peak-to-peak linewidth"),
    Key("temperature_k", "float", 300.0, "K", "sample temperature"),
]


def _system(params: dict) -> SpinSystem:
    return SpinSystem(spin=params["spin"], g=params["g"],
                      zfs_d=params["d_mhz"], zfs_e=params["e_mhz"],
                      linewidth_pp=params["linewidth_pp_g"])


def _pumped_populations(system: SpinSystem, field_g: float, theta_deg: float,
                        params: dict, efficiency: float):
    thermal = thermal_populations(system, FieldOrientation(field_g, theta_deg),
                                  params["temperature_k"])
    if efficiency <= 0:
        return thermal
    pump = PumpModel(pump_efficiency=efficiency,
                     pump_time=params.get("pump_time_us", 139.0),
                     t1=params.get("t1_us", 354.0),
                     temperature=params["temperature_k"])
    return combined_fixed_point(pump, thermal)


def _locate_line(system: SpinSystem, theta_deg: float, freq_mhz: float,
                 pair: tuple[int, int]):
    center = freq_mhz / (system.g * MHZ_PER_GAUSS)
    lines = resonance_fields(system, theta_deg, freq_mhz,
                             max(center - 400.0, 1.0), center + 400.0)
    for line in lines:
        if line.pair == pair:
            return line
    raise EprsimError(
        f"no allowed resonance of level pair {pair} near {freq_mhz} MHz")


def _parse_pair(raw, n_levels: int = 4) -> tuple[int, int]:
    try:
        i, j = int(raw[0]), int(raw[1])
    except (TypeError, ValueError, IndexError):
        raise ConfigError(f"pair must be a two-integer list, got {raw!r}")
    if not 0 <= i < j < n_levels:
        raise ConfigError(f"pair {raw!r} out of range for {n_levels} levels")
    return i, j


# ---------------------------------------------------------------------------
# scenario runners: each returns (meta, columns)
# ---------------------------------------------------------------------------

def _run_fieldsweep(params: dict):
    system = _system(params)
    freq_mhz = params["freq_ghz"] * 1e3
    populations = None
    if params["pump_efficiency"] > 0:
        center = _locate_line(system, params["theta_deg"], freq_mhz, (1, 2))
        populations = _pumped_populations(system, center.field,
                                          params["theta_deg"], params,
                                          params["pump_efficiency"])
    shape = LineShape(params["shape"], width_pp=params["linewidth_pp_g"])
    spec = cwspectrum.field_sweep(
        system, params["theta_deg"], freq_mhz,
        params["b_start_g"], params["b_stop_g"], params["n_points"],
        populations=populations, shape=shape,
        temperature=params["temperature_k"])
    return spec.meta, [("field_g", spec.axis), ("intensity", spec.intensity)]


def _run_rotpattern(params: dict):
    system = _system(params)
    angles = np.linspace(params["angle_start_deg"], params["angle_stop_deg"],
                         params["n_angles"])
    pattern = cwspectrum.rotational_pattern(
        system, params["freq_ghz"] * 1e3, angles,
        temperature=params["temperature_k"])
    columns = [("angle_deg", angles)]
    multiplicity = system.multiplicity
    for pair in [(k, k + 1) for k in range(multiplicity - 1)]:
        columns.append((f"line_{pair[0]}{pair[1]}_field_g",
                        pattern.field_of_pair(pair)))
    meta = {"freq_ghz": params["freq_ghz"], "n_angles": len(angles)}
    return meta, columns


def _run_rabi(params: dict):
    system = _system(params)
    pair = _parse_pair(params["pair"], system.multiplicity)
    freq_mhz = params["freq_ghz"] * 1e3
    line = _locate_line(system, params["theta_deg"], freq_mhz, pair)
    orientation = FieldOrientation(line.field, params["theta_deg"])
    populations = _pumped_populations(system, line.field, params["theta_deg"],
                                      params, params["pump_efficiency"])
    times_us = np.linspace(0.0, params["duration_ns"] * 1e-3,
                           params["n_points"])
    attenuations = [float(a) for a in params["attenuations_db"]]
    meta = {
        "b0_field_g": round(line.field, 4),
        "freq_ghz": params["freq_ghz"],
        "b1_reference_g": params["b1_reference_g"],
        "pair": f"{pair[0]}-{pair[1]}",
    }
    columns = [("time_ns", times_us * 1e3)]
    extracted = []
    for att in attenuations:
        b1 = params["b1_reference_g"] * 10.0 ** (-att / 20.0)
        trace = pulse.rabi_trace(
            system, orientation, pair, b1, times_us,
            populations=populations,
            inhomogeneous_fwhm_mhz=params["inhomogeneous_width_mhz"])
        f_nut = pulse.extract_nutation_frequency(times_us, trace.intensity)
        extracted.append(f_nut)
        label = f"{att:g}".replace("-", "m").replace(".", "p")
        columns.append((f"signal_att{label}db", trace.intensity))
        meta[f"nutation_att{label}db_mhz"] = round(f_nut, 5)
    if len(extracted) > 1 and extracted[0] > 0:
        for att, f_nut in zip(attenuations[1:], extracted[1:]):
            label = f"{att:g}".replace("-", "m").replace(".", "p")
            meta[f"ratio_att{label}db"] = round(f_nut / extracted[0], 5)
    return meta, columns


def _translate_events(raw_events, params: dict):
    """Config event syntax -> engine event dicts (see README)."""
    if not isinstance(raw_events, list) or not raw_events:
        raise ConfigError("events must be a non-empty list")
    out = []
    acquire_pairs = []
    default_pair = _parse_pair(params["pair"])
    for pos, entry in enumerate(raw_events):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ConfigError(f"event {pos}: each event needs a 'kind'")
        kind = entry["kind"]
        extras = set(entry) - {"kind", "duration_ns", "duration_us",
                               "b1_g", "attenuation_db", "phase_deg",
                               "pair", "pump_time_us"}
        if extras:
            raise ConfigError(f"event {pos}: unknown field(s) "
                              f"{sorted(extras)}")
        if kind == "mw_pulse":
            if "b1_g" in entry and "attenuation_db" in entry:
                raise ConfigError(f"event {pos}: give b1_g or "
                                  "attenuation_db, not both")
            if "b1_g" in entry:
                b1 = float(entry["b1_g"])
            elif "attenuation_db" in entry:
                reference = params.get("b1_reference_g")
                if reference is None:
                    raise ConfigError(
                        f"event {pos}: attenuation_db needs a reference "
                        "amplitude (set b1_reference_g)")
                b1 = reference * 10.0 ** (-float(entry["attenuation_db"]) / 20.0)
            else:
                raise ConfigError(f"event {pos}: mw_pulse needs b1_g or "
                                  "attenuation_db")
            if "duration_ns" not in entry:
                raise ConfigError(f"event {pos}: mw_pulse needs duration_ns")
            out.append({
                "kind": "mw_pulse",
                "duration_us": float(entry["duration_ns"]) * 1e-3,
                "b1_gauss": b1,
                "pair": _parse_pair(entry.get("pair", params["pair"])),
                "phase_deg": float(entry.get("phase_deg", 0.0)),
            })
        elif kind == "delay":
            out.append({"kind": "delay",
                        "duration_us": float(entry["duration_us"])})
        elif kind == "optical_pulse":
            out.append({"kind": "optical_pulse",
                        "duration_us": float(entry["duration_us"]),
                        "rate_us": float(entry.get("pump_time_us",
                                                   params["pump_time_us"]))})
        elif kind == "acquire_echo":
            pair = (_parse_pair(entry["pair"]) if "pair" in entry
                    else default_pair)
            acquire_pairs.append(pair)
            out.append({"kind": "acquire", "observable":
                        "coherence_magnitude", "pair": pair})
        else:
            raise ConfigError(
                f"event {pos}: unknown kind {kind!r}; expected mw_pulse, "
                "delay, optical_pulse or acquire_echo")
    if not acquire_pairs:
        raise ConfigError("event list needs at least one acquire_echo")
    return out


def _run_echodecay(params: dict):
    system = _system(params)
    pair = _parse_pair(params["pair"], system.multiplicity)
    freq_mhz = params["freq_ghz"] * 1e3
    line = _locate_line(system, params["theta_deg"], freq_mhz, pair)
    orientation = FieldOrientation(line.field, params["theta_deg"])
    relaxation = pulse.RelaxationParams(t1=params["t1_us"], t2=params["t2_us"])
    pump = PumpModel(pump_efficiency=params["pump_efficiency"],
                     pump_time=params["pump_time_us"], t1=params["t1_us"],
                     temperature=params["temperature_k"])
    thermal = thermal_populations(system, orientation, params["temperature_k"])
    prelude_t = params["light_prelude_us"] + params["dark_gap_us"]
    populations = populations_at(prelude_t, pump, thermal,
                                 light_duration=params["light_prelude_us"])
    meta = {
        "b0_field_g": round(line.field, 4),
        "t2_us": params["t2_us"],
        "t1_us": params["t1_us"],
        "pair": f"{pair[0]}-{pair[1]}",
        "initial_difference": round(populations.difference(pair), 9),
    }
    if params["events"] is not None:
        engine = pulse.PulseEngine(system, orientation,
                                   relaxation=relaxation,
                                   temperature_k=params["temperature_k"])
        rho = engine.initial_state(populations)
        pump_target = np.asarray(
            pump.pump_steady_state(system.multiplicity).ascending_energy())
        events = _translate_events(params["events"], params)
        _, acquisitions = pulse.run_sequence(engine, events, rho,
                                             pump_equilibrium=pump_target)
        times = np.array([t for t, _ in acquisitions])
        echoes = np.array([2.0 * v for _, v in acquisitions])
        meta["mode"] = "event_list"
        return meta, [("time_us", times), ("echo", echoes)]
    taus = np.linspace(params["tau_start_us"], params["tau_stop_us"],
                       params["n_points"])
    spec = pulse.hahn_echo_decay(
        system, orientation, pair, taus, b1_gauss=params["b1_g"],
        populations=populations, relaxation=relaxation,
        inhomogeneous_fwhm_mhz=params["inhomogeneous_width_mhz"])
    meta["mode"] = "tau_sweep"
    return meta, [("time_us", spec.axis), ("echo", spec.intensity)]


def _run_pumprecovery(params: dict):
    system = _system(params)
    pair = _parse_pair(params["pair"], system.multiplicity)
    freq_mhz = params["freq_ghz"] * 1e3
    line = _locate_line(system, params["theta_deg"], freq_mhz, pair)
    orientation = FieldOrientation(line.field, params["theta_deg"])
    pump = PumpModel(pump_efficiency=params["pump_efficiency"],
                     pump_time=params["pump_time_us"], t1=params["t1_us"],
                     temperature=params["temperature_k"])
    delays = np.linspace(params["delay_start_us"], params["delay_stop_us"],
                         params["n_points"])
    spec = pumprelax.echo_detected_recovery_trace(
        system, orientation, pump, delays, pair=pair,
        light_duration=params["light_duration_us"],
        tau_echo=params["tau_echo_us"], t2=params["t2_us"])
    meta = dict(spec.meta)
    meta["b0_field_g"] = round(line.field, 4)
    return meta, [("time_us", spec.axis), ("signal", spec.intensity)]


def _run_deer(params: dict):
    resonator = peldor.ResonatorProfile(params["resonator_center_ghz"],
                                        params["resonator_fwhm_mhz"])
    partners = []
    for pos, entry in enumerate(params["partners"] or []):
        if not isinstance(entry, dict):
            raise ConfigError(f"partners[{pos}] must be a mapping")
        extras = set(entry) - {"label", "center_ghz", "offset_gauss",
                               "width_mhz", "coupling"}
        if extras:
            raise ConfigError(f"partners[{pos}]: unknown field(s) "
                              f"{sorted(extras)}")
        label = str(entry.get("label", f"partner{pos}"))
        width = float(entry.get("width_mhz", peldor.DEFAULT_LINE_WIDTH_MHZ))
        coupling = float(entry.get("coupling", 0.5))
        if "center_ghz" in entry:
            partners.append(peldor.PartnerSpecies(
                label, float(entry["center_ghz"]), width, coupling))
        elif "offset_gauss" in entry:
            partners.append(peldor.PartnerSpecies.from_field_offset(
                label, float(entry["offset_gauss"]), params["g"],
                params["probe_freq_ghz"], width, coupling))
        else:
            raise ConfigError(
                f"partners[{pos}]: needs center_ghz or offset_gauss")
    config = peldor.DeerSweepConfig(
        probe_freq_ghz=params["probe_freq_ghz"],
        sweep_start_ghz=params["sweep_start_ghz"],
        sweep_stop_ghz=params["sweep_stop_ghz"],
        step_mhz=params["step_mhz"],
        pump_pulse_ns=params["pump_pulse_ns"],
        pump_nu1_mhz=params["pump_nu1_mhz"],
        echo_kind=params["echo_kind"],
        optical_mode=params["optical_mode"],
        stimulated_to_refocused=params["stimulated_to_refocused"],
        self_coupling_depth=params["self_coupling"])
    pump = PumpModel(pump_efficiency=params["pump_efficiency"])
    spec = peldor.deer_sweep(config, partners, resonator, pump)
    meta = dict(spec.meta)
    for k, dip in enumerate(peldor.dip_detect(spec,
                                              params["dip_prominence"])):
        meta[f"dip{k}_freq_ghz"] = round(dip.freq_ghz, 6)
        meta[f"dip{k}_depth"] = round(dip.depth, 5)
    return meta, [("pump_freq_ghz", spec.axis), ("echo", spec.intensity)]


def _run_swr(params: dict):
    quantization = params["quantization_width_nm"]
    if quantization is not None:
        try:
            quantization = float(quantization)
        except (TypeError, ValueError):
            raise ConfigError("quantization_width_nm must be a number or "
                              "null")
    spec_ = swr_mod.StripeSpec(
        thickness_nm=params["thickness_nm"], width_nm=params["width_nm"],
        length_um=params["length_um"], ms4pi_gauss=params["ms4pi_g"],
        g=params["g"], exchange_erg_per_cm=params["exchange_erg_per_cm"],
        quantization_width_nm=quantization)
    sweep = swr_mod.swr_spectrum(
        spec_, params["freq_ghz"], params["field_start_g"],
        params["field_stop_g"], params["n_points"],
        line_width_g=params["line_width_g"], kind=params["kind"],
        n_max=params["n_max"])
    meta = dict(sweep.meta)
    factors = swr_mod.demag_factors(spec_)
    meta["demag_along_length"] = round(factors.along_length, 9)
    meta["demag_along_width"] = round(factors.along_width, 9)
    meta["demag_along_thickness"] = round(factors.along_thickness, 9)
    meta["kittel_field_g"] = round(
        swr_mod.uniform_mode_field(spec_, params["freq_ghz"], factors), 3)
    return meta, [("field_g", sweep.axis), ("intensity", sweep.intensity)]


def _run_fit(params: dict, config_dir: Path | None = None):
    path = Path(params["data_csv"])
    if not path.is_absolute() and config_dir is not None:
        candidate = config_dir / path
        if candidate.exists():
            path = candidate
    if not path.exists():
        raise ConfigError(f"data_csv not found: {path}")
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        cells = text.split(",")
        try:
            rows.append([float(c) for c in cells[:2]])
        except ValueError:
            if rows:
                raise ConfigError(f"data_csv has a malformed row: {text!r}")
            continue  # header row
    if not rows or len(rows[0]) < 2:
        raise ConfigError("data_csv must have two numeric columns: "
                          "time, signal")
    data = np.asarray(rows, dtype=float)
    t, y = data[:, 0], data[:, 1]
    meta = {"source": path.name, "n_samples": len(t)}
    if params["light_off_time_us"] is not None:
        try:
            params["light_off_time_us"] = float(params["light_off_time_us"])
        except (TypeError, ValueError):
            raise ConfigError("light_off_time_us must be a number or null")
    if params["light_off_time_us"] is None:
        result = fit_mono_exponential(t, y)
        meta.update({
            "amplitude": round(result.amplitude, 9),
            "tau_us": round(result.tau, 6),
            "offset": round(result.offset, 9),
            "converged": result.converged,
            "iterations": result.iterations,
            "residual_norm": round(result.residual_norm, 9),
            "message": result.message,
        })
        model = result.model(t)
    else:
        split = fit_piecewise_recovery(t, y, params["light_off_time_us"],
                                       params["light_on_time_us"])
        meta.update({
            "during_tau_us": round(split.during.tau, 6),
            "during_amplitude": round(split.during.amplitude, 9),
            "during_converged": split.during.converged,
            "after_tau_us": round(split.after.tau, 6),
            "after_amplitude": round(split.after.amplitude, 9),
            "after_converged": split.after.converged,
            "boundary_gap": round(split.boundary_gap, 9),
            "light_off_time_us": params["light_off_time_us"],
        })
        if (split.during.converged and split.after.converged
                and split.during.tau < split.after.tau):
            meta["effective_pump_time_us"] = round(split.during.tau, 6)
            meta["bare_pump_time_us"] = round(
                bare_pump_time(split.during.tau, split.after.tau), 6)
        on, off = params["light_on_time_us"], params["light_off_time_us"]
        model = np.where(t < off, split.during.model(np.maximum(t - on, 0.0)),
                         split.after.model(t - off))
        model[t < on] = split.during.model(np.zeros(1))[0]
    return meta, [("time_us", t), ("data", y), ("model", model)]


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def _build_registry() -> dict:
    registry = {}

    registry["fieldsweep"] = Scenario(
        "fieldsweep",
        "Derivative CW spectrum versus static field at fixed microwave "
        "frequency.",
        SYSTEM_KEYS + [
            Key("freq_ghz", "float", REQUIRED, "GHz", "microwave frequency"),
            Key("theta_deg", "float", 0.0, "deg", "angle between field and "
                "the zero-field-splitting axis"),
            Key("b_start_g", "float", 3260.0, "G", "sweep start field"),
            Key("b_stop_g", "float", 3380.0, "G", "sweep stop field"),
            Key("n_points", "int", 2048, "1", "number of field points"),
            Key("shape", "str", "lorentzian_derivative", "-", "line shape",
                choices=LINE_SHAPE_KINDS),
            Key("pump_efficiency", "float", 0.0, "1", "optical pumping "
                "efficiency epsilon (0 = thermal populations)"),
        ] + OUTPUT_KEYS,
        _run_fieldsweep)

    registry["rotpattern"] = Scenario(
        "rotpattern",
        "Resonance fields of every allowed line on a grid of field "
        "orientations.",
        SYSTEM_KEYS + [
            Key("freq_ghz", "float", 9.369028, "GHz", "microwave frequency"),
            Key("angle_start_deg", "float", 0.0, "deg", "first angle"),
            Key("angle_stop_deg", "float", 90.0, "deg", "last angle"),
            Key("n_angles", "int", 31, "1", "number of angles"),
        ] + OUTPUT_KEYS,
        _run_rotpattern)

    registry["rabi"] = Scenario(
        "rabi",
        "Driven nutation traces at several drive attenuations, with "
        "extracted nutation frequencies.",
        SYSTEM_KEYS + [
            Key("freq_ghz", "float", 9.308, "GHz", "probe frequency"),
            Key("theta_deg", "float", 0.0, "deg", "field orientation"),
            Key("pair", "json", [1, 2], "level indices", "driven level pair "
                "(ascending-energy indices)"),
            Key("b1_reference_g", "float", 4.0, "G", "drive amplitude at "
                "0 dB attenuation"),
            Key("attenuations_db", "json", [10.0, 5.0, 0.0], "dB",
                "attenuation list; amplitude scales as 10^(-att/20)"),
            Key("duration_ns", "float", 1000.0, "ns", "longest pulse length"),
            Key("n_points", "int", 251, "1", "number of pulse lengths"),
            Key("pump_efficiency", "float", 0.0065, "1", "optical pumping "
                "efficiency for the initial populations"),
            Key("pump_time_us", "float", 139.0, "us", "optical pumping time"),
            Key("t1_us", "float", 354.0, "us", "spin-lattice time for the "
                "pumped fixed point"),
            Key("inhomogeneous_width_mhz", "float", 0.0, "MHz",
                "Gaussian detuning spread (FWHM)"),
        ] + OUTPUT_KEYS,
        _run_rabi)

    registry["echodecay"] = Scenario(
        "echodecay",
        "Two-pulse echo amplitude versus 2*tau after an optical pumping "
        "prelude; accepts a custom event list.",
        SYSTEM_KEYS + [
            Key("freq_ghz", "float", 9.308, "GHz", "probe frequency"),
            Key("theta_deg", "float", 0.0, "deg", "field orientation"),
            Key("pair", "json", [2, 3], "level indices", "probed level pair"),
            Key("b1_g", "float", 4.0, "G", "microwave drive amplitude"),
            Key("b1_reference_g", "float", 4.0, "G", "0 dB reference for "
                "event lists using attenuation_db"),
            Key("tau_start_us", "float", 1.0, "us", "first tau"),
            Key("tau_stop_us", "float", 120.0, "us", "last tau"),
            Key("n_points", "int", 60, "1", "number of tau values"),
            Key("t1_us", "float", 354.0, "us", "spin-lattice time"),
            Key("t2_us", "float", 48.0, "us", "phase-memory time"),
            Key("light_prelude_us", "float", 900.0, "us", "optical pumping "
                "pulse before the sequence"),
            Key("dark_gap_us", "float", 20.0, "us", "delay between light "
                "off and the first microwave pulse"),
            Key("pump_efficiency", "float", 0.0065, "1", "optical pumping "
                "efficiency"),
            Key("pump_time_us", "float", 139.0, "us", "optical pumping time"),
            Key("inhomogeneous_width_mhz", "float", 0.0, "MHz",
                "Gaussian detuning spread (FWHM)"),
            Key("events", "json", None, "-", "optional event list replacing "
                "the tau sweep (see README for the syntax)"),
        ] + OUTPUT_KEYS,
        _run_echodecay)

    registry["pumprecovery"] = Scenario(
        "pumprecovery",
        "Echo-detected population recovery while an optical pumping pulse "
        "switches on and off.",
        SYSTEM_KEYS + [
            Key("freq_ghz", "float", 9.308, "GHz", "probe frequency"),
            Key("theta_deg", "float", 0.0, "deg", "field orientation"),
            Key("pair", "json", [2, 3], "level indices", "probed level pair"),
            Key("delay_start_us", "float", -200.0, "us", "first sweep delay "
                "(light switches on at 0)"),
            Key("delay_stop_us", "float", 3000.0, "us", "last sweep delay"),
            Key("n_points", "int", 161, "1", "number of delays"),
            Key("light_duration_us", "float", 1000.0, "us", "optical pulse "
                "length"),
            Key("tau_echo_us", "float", 1.2, "us", "echo half-spacing tau"),
            Key("t1_us", "float", 354.0, "us", "spin-lattice time"),
            Key("t2_us", "float", 48.0, "us", "phase-memory time"),
            Key("pump_efficiency", "float", 0.0065, "1", "optical pumping "
                "efficiency"),
            Key("pump_time_us", "float", 139.0, "us", "optical pumping time"),
        ] + OUTPUT_KEYS,
        _run_pumprecovery)

    registry["deer"] = Scenario(
        "deer",
        "Pump-frequency-swept DEER: echo amplitude with dips where the "
        "pump excites coupled species.",
        [
            Key("probe_freq_ghz", "float", 9.308, "GHz", "probe frequency"),
            Key("sweep_start_ghz", "float", 9.15, "GHz", "first pump "
                "frequency"),
            Key("sweep_stop_ghz", "float", 9.40, "GHz", "pump sweep end "
                "(exclusive)"),
            Key("step_mhz", "float", 1.0, "MHz", "pump frequency step"),
            Key("pump_pulse_ns", "float", 100.0, "ns", "pump pulse length"),
            Key("pump_nu1_mhz", "float", 3.0, "MHz", "pump drive amplitude "
                "nu1 at the resonator center"),
            Key("echo_kind", "str", "stimulated", "-", "detected echo",
                choices=peldor.ECHO_KINDS),
            Key("optical_mode", "str", "continuous", "-", "illumination "
                "scheme", choices=peldor.OPTICAL_MODES),
            Key("stimulated_to_refocused", "float", 2.0, "1", "echo "
                "amplitude ratio (must exceed 1)"),
            Key("self_coupling", "float", 0.8, "1", "coupling depth of the "
                "probed species' own dip"),
            Key("resonator_center_ghz", "float", 9.308, "GHz", "resonator "
                "center frequency"),
            Key("resonator_fwhm_mhz", "float", 100.0, "MHz", "resonator "
                "power bandwidth"),
            Key("partners", "json", [{"label": "carbon", "center_ghz": 9.243,
                                      "coupling": 0.5}], "-",
                "partner table: label, center_ghz or offset_gauss, "
                "width_mhz, coupling"),
            Key("g", "float", 2.0028, "1", "g factor for offset_gauss "
                "conversion"),
            Key("pump_efficiency", "float", 0.0065, "1", "optical pumping "
                "efficiency feeding the echo amplitude"),
            Key("dip_prominence", "float", 0.02, "1", "dip detection "
                "threshold as a fraction of the echo maximum"),
        ] + OUTPUT_KEYS,
        _run_deer)

    registry["swr"] = Scenario(
        "swr",
        "Spin-wave resonance fields and synthesized sweep spectrum of a "
        "ferromagnetic nanostripe.",
        [
            Key("thickness_nm", "float", 100.0, "nm", "stripe thickness"),
            Key("width_nm", "float", 300.0, "nm", "stripe width (field "
                "applied along it)"),
            Key("length_um", "float", 100.0, "um", "stripe length"),
            Key("ms4pi_g", "float", 11700.0, "G", "saturation induction "
                "4*pi*Ms"),
            Key("g", "float", 2.00, "1", "g factor"),
            Key("exchange_erg_per_cm", "float", 1.3e-6, "erg/cm", "exchange "
                "stiffness A"),
            Key("quantization_width_nm", "json", None, "nm", "override for "
                "the standing-wave quantization width (null = physical "
                "width)"),
            Key("freq_ghz", "float", 34.0, "GHz", "drive frequency"),
            Key("n_max", "int", 6, "1", "highest mode index"),
            Key("field_start_g", "float", 11800.0, "G", "sweep start field"),
            Key("field_stop_g", "float", 14000.0, "G", "sweep stop field"),
            Key("n_points", "int", 2048, "1", "number of field points"),
            Key("line_width_g", "float", 50.0, "G", "peak-to-peak width of "
                "each mode line"),
            Key("kind", "str", "derivative", "-", "spectrum representation",
                choices=("derivative", "absorption")),
        ] + OUTPUT_KEYS,
        _run_swr)

    registry["fit"] = Scenario(
        "fit",
        "Monoexponential or piecewise-recovery fit of a two-column CSV "
        "trace.",
        [
            Key("data_csv", "path", REQUIRED, "-", "input CSV with time and "
                "signal columns (relative paths resolve against the config "
                "file)"),
            Key("light_off_time_us", "json", None, "us", "boundary for a "
                "piecewise recovery fit (null = single exponential)"),
            Key("light_on_time_us", "float", 0.0, "us", "start of the "
                "during-light segment"),
        ] + OUTPUT_KEYS,
        _run_fit)

    return registry


REGISTRY = _build_registry()


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _format_meta_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value != value:
            return "nan"
        return repr(float(value))
    if isinstance(value, tuple):
        return "-".join(str(v) for v in value)
    return str(value)


def _format_cell(value, precision: int) -> str:
    v = float(value)
    if v != v:
        return "nan"
    text = f"{v:.{precision}f}"
    if float(text) == 0.0:
        text = f"{0.0:.{precision}f}"
    return text


def write_csv(path: Path, meta: dict, columns: list, precision: int) -> None:
    names = [name for name, _ in columns]
    arrays = [np.asarray(values, dtype=float) for _, values in columns]
    n_rows = len(arrays[0]) if arrays else 0
    lines = [f"# {key}={_format_meta_value(meta[key])}"
             for key in sorted(meta)]
    lines.append(",".join(names))
    for row in range(n_rows):
        lines.append(",".join(_format_cell(col[row], precision)
                              for col in arrays))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_plot(path: Path, columns: list, scenario: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    x_name, x = columns[0][0], np.asarray(columns[0][1], dtype=float)
    for name, values in columns[1:]:
        ax.plot(x, np.asarray(values, dtype=float), label=name, lw=1.2)
    ax.set_xlabel(x_name)
    ax.set_ylabel("signal")
    ax.set_title(scenario)
    if len(columns) > 2:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def list_scenarios() -> str:
    out = []
    for name in sorted(REGISTRY):
        scenario = REGISTRY[name]
        out.append(f"{name}: {scenario.description}")
        for key in scenario.keys:
            if key.required:
                default = "(required)"
            else:
                default = f"default={_format_meta_value(key.default)}" \
                    if not isinstance(key.default, (list, dict)) \
                    else f"default={key.default!r}"
            out.append(f"  {key.name} [{key.kind}, {key.unit}] {default}"
                       f" - {key.help}")
        out.append("")
    return "\n".join(out).rstrip() + "\n"


def _parse_overrides(pairs: list[str]) -> dict:
    overrides = {}
    for raw in pairs or []:
        if "=" not in raw:
            raise ConfigError(f"--set expects key=value, got {raw!r}")
        name, text = raw.split("=", 1)
        try:
            overrides[name.strip()] = yaml.safe_load(text)
        except yaml.YAMLError:
            overrides[name.strip()] = text
    return overrides


def _load_config(path: str | None) -> tuple[dict, Path | None]:
    if path is None:
        return {}, None
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"config file not found: {config_path}")
    try:
        loaded = yaml.safe_load(config_path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}")
    if loaded is None:
        loaded = {}
    if not isinstance(loaded, dict):
        raise ConfigError("config file must contain a mapping of keys")
    return loaded, config_path.parent


def run_scenario(name: str, config_path: str | None = None,
                 overrides: dict | None = None,
                 csv_path: str | None = None,
                 plot_path: str | None = None) -> Path:
    """Resolve parameters, run the scenario, write outputs.

    Returns the CSV path that was written.
    """
    if name not in REGISTRY:
        raise ConfigError(f"unknown scenario {name!r}; run 'eprsim list'")
    scenario = REGISTRY[name]
    config_values, config_dir = _load_config(config_path)
    params = scenario.resolve(config_values, overrides or {})
    if name == "fit":
        meta, columns = scenario.runner(params, config_dir)
    else:
        meta, columns = scenario.runner(params)
    meta = dict(meta)
    meta["scenario"] = name
    precision = params["precision"]
    out_csv = Path(csv_path or params["output_csv"] or f"{name}.csv")
    write_csv(out_csv, meta, columns, precision)
    out_plot = plot_path or params["output_plot"]
    if out_plot:
        write_plot(Path(out_plot), columns, name)
    return out_csv


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="eprsim",
        description="Spin-resonance scenario runner; see 'eprsim list' for "
                    "the catalog.")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("list", help="catalog of scenarios and their parameters")
    for name in sorted(REGISTRY):
        runner = sub.add_parser(name, help=REGISTRY[name].description)
        runner.add_argument("--config", help="YAML config file")
        runner.add_argument("--set", action="append", default=[],
                            metavar="KEY=VALUE", dest="overrides",
                            help="override one parameter")
        runner.add_argument("--csv", help="CSV output path")
        runner.add_argument("--plot", help="plot output path (.svg/.pdf/.png)")
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    if args.command == "list":
        sys.stdout.write(list_scenarios())
        return 0
    try:
        overrides = _parse_overrides(args.overrides)
        out = run_scenario(args.command, args.config, overrides,
                           args.csv, args.plot)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (EprsimError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
