"""Density-matrix pulse engine in the eigenbasis rotating frame.

States live in the Hamiltonian eigenbasis, ordered by ascending energy.
The rotating frame subtracts frame_freq_mhz per ladder step: level k
(k = 0, 1, ...) rotates at k times the frame frequency, so a resonant
drive on any adjacent pair becomes time-independent.  Microwave pulses
are unitary; relaxation acts only during delays, damping coherences
with T2 and pulling populations toward equilibrium with T1.

Pulses are selective by default: the drive couples a single adjacent
pair, which models a soft pulse whose bandwidth resolves the fine
structure.  selective=False couples every adjacent pair at once
(hard-pulse limit within the rotating-wave approximation).

Static field offsets (inhomogeneous broadening) enter as a detuning
that shifts level k by k * delta_mhz; ensemble averages use
Gauss-Hermite quadrature over a Gaussian detuning distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import MHZ_PER_GAUSS
from .errors import ConfigError
from .pumprelax import PopulationState, thermal_populations
from .spectrum import LineShape, Spectrum
from .spincore import (FieldOrientation, SpinSystem, hamiltonian,
                       resonance_fields, spin_operators)

__all__ = [
    "RelaxationParams",
    "PulseEngine",
    "gauss_hermite_detunings",
    "rabi_trace",
    "extract_nutation_frequency",
    "hahn_echo_decay",
    "echo_detected_field_sweep",
    "run_sequence",
]


@dataclass(frozen=True)
class RelaxationParams:
    """Phenomenological relaxation times in microseconds."""

    t1: float = 354.0
    t2: float = 48.0

    def __post_init__(self) -> None:
        if self.t1 <= 0 or self.t2 <= 0:
            raise ConfigError("relaxation times must be positive")
        if self.t2 > 2.0 * self.t1:
            raise ConfigError(
                f"t2 = {self.t2} exceeds 2 * t1 = {2 * self.t1}; "
                "no physical decoherence model allows that")


def gauss_hermite_detunings(fwhm_mhz: float, n_nodes: int = 16):
    """Detuning nodes and weights for a Gaussian distribution.

    Returns (detunings_mhz, weights) with weights summing to one.  A
    zero width collapses to the single node at zero detuning.
    """
    if fwhm_mhz < 0:
        raise ConfigError("inhomogeneous width must be non-negative")
    if fwhm_mhz == 0.0:
        return np.zeros(1), np.ones(1)
    sigma = fwhm_mhz / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    nodes, weights = np.polynomial.hermite.hermgauss(n_nodes)
    return nodes * np.sqrt(2.0) * sigma, weights / np.sqrt(np.pi)


class PulseEngine:
    """Propagates density matrices for one spin system at fixed field."""

    def __init__(self, system: SpinSystem, field: FieldOrientation,
                 frame_freq_mhz: float | None = None,
                 relaxation: RelaxationParams | None = None,
                 equilibrium: PopulationState | None = None,
                 temperature_k: float = 300.0):
        self.system = system
        self.field = field
        self.relaxation = relaxation
        ham = hamiltonian(system, field)
        energies, vectors = np.linalg.eigh(ham)
        self.energies = energies
        self.n = len(energies)
        _, sy, _ = spin_operators(system.spin)
        self.drive_matrix = vectors.conj().T @ sy @ vectors
        self.ladder = np.arange(self.n, dtype=float)
        if frame_freq_mhz is None and self.n > 1:
            frame_freq_mhz = float(energies[1] - energies[0])
        self.frame_freq_mhz = float(frame_freq_mhz or 0.0)
        if equilibrium is None:
            equilibrium = thermal_populations(system, field, temperature_k)
        self.equilibrium = np.asarray(equilibrium.ascending_energy(), dtype=float)

    # -- static helpers -------------------------------------------------

    def _check_pair(self, pair: tuple[int, int]) -> tuple[int, int]:
        i, j = int(pair[0]), int(pair[1])
        if not (0 <= i < j < self.n):
            raise ConfigError(f"level pair {pair} out of range for "
                              f"{self.n} levels")
        return i, j

    def transition_frequency(self, pair: tuple[int, int]) -> float:
        i, j = self._check_pair(pair)
        return float(self.energies[j] - self.energies[i])

    def matrix_element(self, pair: tuple[int, int]) -> float:
        i, j = self._check_pair(pair)
        return float(abs(self.drive_matrix[i, j]))

    def nutation_frequency(self, pair: tuple[int, int], b1_gauss: float) -> float:
        """On-resonance nutation frequency 2 * nu1 * |drive element|."""
        nu1 = self.system.g * MHZ_PER_GAUSS * b1_gauss / 2.0
        return 2.0 * nu1 * self.matrix_element(pair)

    def pi_duration(self, pair: tuple[int, int], b1_gauss: float) -> float:
        f_nut = self.nutation_frequency(pair, b1_gauss)
        if f_nut <= 0:
            raise ConfigError(f"pair {pair} is not driven (zero matrix element)")
        return 0.5 / f_nut

    def initial_state(self, populations: PopulationState | None = None) -> np.ndarray:
        if populations is None:
            p = self.equilibrium
        else:
            p = np.asarray(populations.ascending_energy(), dtype=float)
        if len(p) != self.n:
            raise ConfigError(f"need {self.n} populations, got {len(p)}")
        return np.diag(p).astype(complex)

    # -- frame bookkeeping ----------------------------------------------

    def _frame_diag(self, delta_mhz: float) -> np.ndarray:
        return (self.energies - self.frame_freq_mhz * self.ladder
                + delta_mhz * self.ladder)

    def _gauge(self, freq_mhz: float, t_us: float) -> np.ndarray:
        """Diagonal phase aligning a drive at freq_mhz with the frame."""
        phase = -2.0 * np.pi * (freq_mhz - self.frame_freq_mhz) * self.ladder * t_us
        return np.exp(1j * phase)

    # -- pulses and delays ----------------------------------------------

    def pulse_propagator(self, duration_us: float, b1_gauss: float,
                         pair: tuple[int, int] | None = None,
                         phase_deg: float = 0.0,
                         freq_mhz: float | None = None,
                         selective: bool = True,
                         delta_mhz: float = 0.0,
                         t0_us: float = 0.0) -> np.ndarray:
        """Unitary for one rectangular microwave pulse.

        With pair given (selective mode) the drive couples only that
        pair; otherwise it couples all adjacent levels.  freq_mhz
        defaults to the frame frequency; an off-frame drive is handled
        by conjugating with the diagonal gauge at the pulse edges, so
        sequences with several drive frequencies stay consistent.
        """
        if duration_us < 0:
            raise ConfigError("pulse duration must be non-negative")
        nu1 = self.system.g * MHZ_PER_GAUSS * b1_gauss / 2.0
        drive_freq = self.frame_freq_mhz if freq_mhz is None else float(freq_mhz)
        detune = self._frame_diag(delta_mhz) + (self.frame_freq_mhz - drive_freq) * self.ladder
        ham = np.diag(detune).astype(complex)
        phi = np.exp(-1j * np.deg2rad(phase_deg))
        if selective:
            if pair is None:
                raise ConfigError("selective pulse needs a level pair")
            i, j = self._check_pair(pair)
            coupling = nu1 * abs(self.drive_matrix[i, j])
            ham[i, j] += coupling * phi
            ham[j, i] += coupling * np.conj(phi)
        else:
            band = np.zeros_like(ham)
            idx = np.arange(self.n - 1)
            band[idx, idx + 1] = self.drive_matrix[idx, idx + 1]
            ham += nu1 * (phi * band + np.conj(phi) * band.conj().T)
        vals, vecs = np.linalg.eigh(ham)
        u = (vecs * np.exp(-2j * np.pi * vals * duration_us)) @ vecs.conj().T
        if drive_freq != self.frame_freq_mhz:
            g_end = self._gauge(drive_freq, t0_us + duration_us)
            g_start = self._gauge(drive_freq, t0_us)
            u = (g_end[:, None] * u) * np.conj(g_start)[None, :]
        return u

    def apply_pulse(self, rho: np.ndarray, *args, **kwargs) -> np.ndarray:
        u = self.pulse_propagator(*args, **kwargs)
        return u @ rho @ u.conj().T

    def apply_delay(self, rho: np.ndarray, duration_us: float,
                    delta_mhz: float = 0.0) -> np.ndarray:
        """Free evolution: frame phases plus optional relaxation."""
        if duration_us < 0:
            raise ConfigError("delay duration must be non-negative")
        phase = np.exp(-2j * np.pi * self._frame_diag(delta_mhz) * duration_us)
        rho = (phase[:, None] * rho) * np.conj(phase)[None, :]
        if self.relaxation is not None:
            rho = self._relax(rho, duration_us)
        return rho

    def _relax(self, rho: np.ndarray, dt: float) -> np.ndarray:
        f2 = np.exp(-dt / self.relaxation.t2)
        f1 = np.exp(-dt / self.relaxation.t1)
        out = rho * f2
        pops = np.real(np.diag(rho))
        np.fill_diagonal(out, self.equilibrium + (pops - self.equilibrium) * f1)
        return out

    # -- observables ------------------------------------------------------

    def population_difference(self, rho: np.ndarray, pair: tuple[int, int]) -> float:
        i, j = self._check_pair(pair)
        return float(np.real(rho[i, i] - rho[j, j]))

    def coherence(self, rho: np.ndarray, pair: tuple[int, int]) -> complex:
        i, j = self._check_pair(pair)
        return complex(rho[i, j])


def rabi_trace(system: SpinSystem, field: FieldOrientation,
               pair: tuple[int, int], b1_gauss: float, times_us: np.ndarray,
               populations: PopulationState | None = None,
               relaxation: RelaxationParams | None = None,
               inhomogeneous_fwhm_mhz: float = 0.0,
               n_quadrature: int = 16,
               drive_freq_mhz: float | None = None) -> Spectrum:
    """Population difference of pair versus drive duration.

    The drive is applied on resonance with the pair unless
    drive_freq_mhz overrides it.  Inhomogeneous broadening averages the
    trace over a Gaussian detuning distribution; the apparent nutation
    rate then sits at the generalized Rabi frequency of the typical
    detuning, slightly above the on-resonance value.
    """
    times_us = np.asarray(times_us, dtype=float)
    engine = PulseEngine(system, field, relaxation=relaxation)
    engine.frame_freq_mhz = engine.transition_frequency(pair)
    freq = engine.frame_freq_mhz if drive_freq_mhz is None else drive_freq_mhz
    rho0 = engine.initial_state(populations)
    detunings, weights = gauss_hermite_detunings(inhomogeneous_fwhm_mhz,
                                                 n_quadrature)
    i, j = engine._check_pair(pair)
    signal = np.zeros_like(times_us)
    for delta, weight in zip(detunings, weights):
        detune = engine._frame_diag(delta) + (engine.frame_freq_mhz - freq) * engine.ladder
        ham = np.diag(detune).astype(complex)
        nu1 = system.g * MHZ_PER_GAUSS * b1_gauss / 2.0
        coupling = nu1 * abs(engine.drive_matrix[i, j])
        ham[i, j] += coupling
        ham[j, i] += coupling
        vals, vecs = np.linalg.eigh(ham)
        modes = vecs.conj().T @ rho0 @ vecs
        phases = np.exp(-2j * np.pi * np.subtract.outer(vals, vals)
                        * times_us[:, None, None])
        rho_t = np.einsum("ab,tbc,dc->tad", vecs, phases * modes, vecs.conj())
        signal += weight * np.real(rho_t[:, i, i] - rho_t[:, j, j])
    meta = {
        "nutation_frequency_mhz": engine.nutation_frequency(pair, b1_gauss),
        "b1_gauss": b1_gauss,
        "transition_frequency_mhz": engine.transition_frequency(pair),
    }
    return Spectrum("time", times_us, signal, meta)


def extract_nutation_frequency(times_us: np.ndarray,
                               signal: np.ndarray) -> float:
    """Dominant oscillation frequency via zero-padded FFT and parabolic
    refinement of the peak bin."""
    times_us = np.asarray(times_us, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if len(times_us) < 8:
        raise ConfigError("need at least 8 samples to extract a frequency")
    dt = times_us[1] - times_us[0]
    if not np.allclose(np.diff(times_us), dt, rtol=1e-6):
        raise ConfigError("time axis must be uniform for FFT extraction")
    detrended = signal - signal.mean()
    n_fft = 8 * len(detrended)
    amp = np.abs(np.fft.rfft(detrended * np.hanning(len(detrended)), n_fft))
    freqs = np.fft.rfftfreq(n_fft, dt)
    k = int(np.argmax(amp[1:]) + 1)
    if 1 <= k < len(amp) - 1:
        a, b, c = amp[k - 1], amp[k], amp[k + 1]
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
    else:
        shift = 0.0
    return float(freqs[k] + shift * (freqs[1] - freqs[0]))


def hahn_echo_decay(system: SpinSystem, field: FieldOrientation,
                    pair: tuple[int, int], taus_us: np.ndarray,
                    b1_gauss: float = 4.0,
                    populations: PopulationState | None = None,
                    relaxation: RelaxationParams | None = None,
                    inhomogeneous_fwhm_mhz: float = 0.0,
                    n_quadrature: int = 16) -> Spectrum:
    """Two-pulse echo amplitude versus total evolution time 2 tau.

    The sequence is pi/2 - tau - pi - tau with both pulses resonant and
    selective on pair.  The reported amplitude is twice the magnitude
    of the ensemble-averaged coherence, so the tau -> 0 limit equals
    the initial population difference of the pair.
    """
    taus_us = np.asarray(taus_us, dtype=float)
    if np.any(taus_us < 0):
        raise ConfigError("tau values must be non-negative")
    engine = PulseEngine(system, field, relaxation=relaxation)
    engine.frame_freq_mhz = engine.transition_frequency(pair)
    rho0 = engine.initial_state(populations)
    t_pi = engine.pi_duration(pair, b1_gauss)
    detunings, weights = gauss_hermite_detunings(inhomogeneous_fwhm_mhz,
                                                 n_quadrature)
    amplitudes = np.zeros_like(taus_us)
    for idx, tau in enumerate(taus_us):
        coh = 0.0 + 0.0j
        for delta, weight in zip(detunings, weights):
            rho = engine.apply_pulse(rho0, t_pi / 2.0, b1_gauss, pair=pair,
                                     delta_mhz=delta)
            rho = engine.apply_delay(rho, tau, delta_mhz=delta)
            rho = engine.apply_pulse(rho, t_pi, b1_gauss, pair=pair,
                                     phase_deg=90.0, delta_mhz=delta)
            rho = engine.apply_delay(rho, tau, delta_mhz=delta)
            coh += weight * engine.coherence(rho, pair)
        amplitudes[idx] = 2.0 * abs(coh)
    meta = {
        "pair": pair,
        "pi_duration_us": t_pi,
        "t2_us": relaxation.t2 if relaxation is not None else np.inf,
    }
    return Spectrum("time", 2.0 * taus_us, amplitudes, meta)


def echo_detected_field_sweep(system: SpinSystem, theta_deg: float,
                              freq_mhz: float, b_start: float, b_stop: float,
                              n_points: int = 1024,
                              tau_us: float = 1.2,
                              relaxation: RelaxationParams | None = None,
                              populations: PopulationState | None = None,
                              temperature_k: float = 300.0,
                              width_pp_gauss: float | None = None,
                              extra_lines: list[dict] | None = None) -> Spectrum:
    """Absorption-mode echo intensity versus static field.

    Each allowed transition contributes an absorption line weighted by
    its drive matrix element squared, its population difference, and
    the echo attenuation exp(-2 tau / t2).  extra_lines entries are
    dicts with center_field_g, amplitude and optional width_pp_gauss,
    letting spectra include species beyond the modeled system.
    """
    if n_points < 2:
        raise ConfigError("need at least two field points")
    axis = np.linspace(b_start, b_stop, n_points)
    width = width_pp_gauss if width_pp_gauss is not None else system.linewidth_pp
    shape = LineShape("gaussian", width_pp=width)
    margin = 5.0 * width
    lines = resonance_fields(system, theta_deg, freq_mhz,
                             b_start - margin, b_stop + margin)
    attenuation = 1.0
    if relaxation is not None:
        attenuation = float(np.exp(-2.0 * tau_us / relaxation.t2))
    intensity = np.zeros_like(axis)
    weights = []
    for line in lines:
        orientation = FieldOrientation(line.field, theta_deg)
        if populations is None:
            pops = thermal_populations(system, orientation, temperature_k)
        else:
            pops = populations
        weight = line.matrix_element_sq * pops.difference(line.pair)
        weights.append(weight)
        intensity += weight * attenuation * shape.evaluate(axis - line.field)
    scale = max((abs(w) for w in weights), default=0.0)
    peak = shape.evaluate(np.zeros(1))[0]
    if scale > 0:
        intensity /= scale * peak
    for extra in extra_lines or []:
        w = extra.get("width_pp_gauss", width)
        eshape = LineShape("gaussian", width_pp=w)
        profile = eshape.evaluate(axis - float(extra["center_field_g"]))
        epeak = eshape.evaluate(np.zeros(1))[0]
        intensity += float(extra["amplitude"]) * attenuation * profile / epeak
    meta = {"tau_us": tau_us, "freq_mhz": freq_mhz, "theta_deg": theta_deg}
    for k, line in enumerate(lines):
        meta[f"line{k}_field_g"] = round(line.field, 4)
        meta[f"line{k}_pair"] = line.pair
    return Spectrum("field", axis, intensity, meta)


_EVENT_KINDS = ("mw_pulse", "delay", "optical_pulse", "acquire")


def run_sequence(engine: PulseEngine, events: list[dict],
                 rho: np.ndarray | None = None,
                 delta_mhz: float = 0.0,
                 pump_equilibrium: np.ndarray | None = None):
    """Execute an event list and collect acquisitions.

    Events are dicts with a kind key:
      mw_pulse       duration_us, b1_gauss, pair, [phase_deg, freq_mhz,
                     selective]
      delay          duration_us
      optical_pulse  duration_us, rate_us (approach toward the pumped
                     fixed point; coherences damp with t2 as usual)
      acquire        observable in {population_difference,
                     coherence_magnitude, populations}, pair as needed

    Returns (rho, acquisitions) where acquisitions is a list of
    (time_us, value) in event order.
    """
    if rho is None:
        rho = engine.initial_state()
    rho = np.array(rho, dtype=complex)
    acquisitions = []
    t_now = 0.0
    for pos, event in enumerate(events):
        kind = event.get("kind")
        if kind not in _EVENT_KINDS:
            raise ConfigError(f"event {pos}: unknown kind {kind!r}; "
                              f"expected one of {_EVENT_KINDS}")
        if kind == "mw_pulse":
            duration = float(event["duration_us"])
            rho = engine.apply_pulse(
                rho, duration, float(event["b1_gauss"]),
                pair=tuple(event["pair"]) if "pair" in event else None,
                phase_deg=float(event.get("phase_deg", 0.0)),
                freq_mhz=event.get("freq_mhz"),
                selective=bool(event.get("selective", True)),
                delta_mhz=delta_mhz, t0_us=t_now)
            t_now += duration
        elif kind == "delay":
            duration = float(event["duration_us"])
            rho = engine.apply_delay(rho, duration, delta_mhz=delta_mhz)
            t_now += duration
        elif kind == "optical_pulse":
            duration = float(event["duration_us"])
            rate = float(event.get("rate_us", 139.0))
            if rate <= 0:
                raise ConfigError(f"event {pos}: pump rate_us must be positive")
            if pump_equilibrium is None:
                raise ConfigError(f"event {pos}: optical_pulse needs a pump "
                                  "fixed point (pump_equilibrium)")
            rho = engine.apply_delay(rho, duration, delta_mhz=delta_mhz)
            pops = np.real(np.diag(rho)).copy()
            target = np.asarray(pump_equilibrium, dtype=float)
            mixed = target + (pops - target) * np.exp(-duration / rate)
            np.fill_diagonal(rho, mixed)
            t_now += duration
        else:
            observable = event.get("observable", "population_difference")
            if observable == "population_difference":
                value = engine.population_difference(rho, tuple(event["pair"]))
            elif observable == "coherence_magnitude":
                value = abs(engine.coherence(rho, tuple(event["pair"])))
            elif observable == "populations":
                value = np.real(np.diag(rho)).copy()
            else:
                raise ConfigError(f"event {pos}: unknown observable "
                                  f"{observable!r}")
            acquisitions.append((t_now, value))
    return rho, acquisitions
