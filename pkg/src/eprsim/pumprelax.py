"""Level populations, optical pumping and spin-lattice relaxation.

Populations are stored in descending-mS order, matching the high-field
convention where the highest mS level is also the highest in energy
for positive g.  Optical pumping drives the system toward a spin-aligned
state with the mS = +-1/2 pair enriched; the lattice drives it toward
thermal equilibrium.  With light on, both act at once, so the state
relaxes toward a mixed fixed point with the combined rate

    1/T_op_eff = 1/T_op + 1/T_1

and with light off it relaxes to thermal with 1/T_1.  Both segments are
exact exponentials, so traces under piecewise-constant illumination are
evaluated in closed form rather than by time stepping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import KB_MHZ_PER_K, ROOM_TEMPERATURE_K
from .errors import ConfigError
from .spectrum import Spectrum
from .spincore import FieldOrientation, SpinSystem, hamiltonian

__all__ = [
    "PopulationState",
    "PumpModel",
    "thermal_populations",
    "evolve_populations",
    "combined_fixed_point",
    "effective_pump_time",
    "populations_at",
    "echo_detected_recovery_trace",
]


@dataclass(frozen=True)
class PopulationState:
    """Occupation probabilities ordered by descending mS.

    For S=3/2 the order is [p(+3/2), p(+1/2), p(-1/2), p(-3/2)].
    """

    p: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "p", p)
        if p.ndim != 1 or len(p) < 2:
            raise ValueError("populations must be a 1-D vector of >= 2 levels")
        if np.any(p < -1e-12):
            raise ValueError(f"populations must be non-negative, got {p}")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"populations must sum to 1, got sum {p.sum()!r}")

    @property
    def n_levels(self) -> int:
        return len(self.p)

    def ascending_energy(self) -> np.ndarray:
        """Populations reindexed to ascending energy order."""
        return self.p[::-1].copy()

    def difference(self, pair: tuple[int, int]) -> float:
        """p_lower - p_upper for a level pair in ascending-energy indices.

        Positive at thermal equilibrium (net absorption), negative for
        an inverted pair (net emission).
        """
        asc = self.p[::-1]
        return float(asc[pair[0]] - asc[pair[1]])


@dataclass(frozen=True)
class PumpModel:
    """Optical pumping and relaxation time scales.

    Attributes:
        pump_efficiency: excess population per central level in the pure
            pump steady state, in [0, 1/4] for S=3/2.
        pump_time: bare optical pumping time T_op in us.
        t1: spin-lattice relaxation time in us.
        temperature: lattice temperature in K for thermal populations.
    """

    pump_efficiency: float = 0.0065
    pump_time: float = 139.0
    t1: float = 354.0
    temperature: float = ROOM_TEMPERATURE_K

    def __post_init__(self) -> None:
        if not 0.0 <= self.pump_efficiency <= 0.25:
            raise ValueError(
                f"pump_efficiency must lie in [0, 0.25], got {self.pump_efficiency}")
        if self.pump_time <= 0 or self.t1 <= 0:
            raise ValueError("pump_time and t1 must be positive")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")

    def pump_steady_state(self, n_levels: int) -> PopulationState:
        """Pure optical fixed point: mS = +-1/2 pair enriched by epsilon each.

        The 2*epsilon excess is taken evenly from the outer levels, so
        for S=3/2 the vector is [1/4-e, 1/4+e, 1/4+e, 1/4-e].
        """
        if n_levels < 4 or n_levels % 2:
            raise ConfigError(
                "optical pumping into mS=+-1/2 needs an even multiplicity >= 4")
        eps = self.pump_efficiency
        bound = (n_levels - 2) / (2.0 * n_levels)
        if eps > bound + 1e-12:
            raise ConfigError(
                f"pump_efficiency {eps} exceeds the {bound} bound for "
                f"{n_levels} levels")
        p = np.full(n_levels, 1.0 / n_levels)
        mid = n_levels // 2
        p[mid - 1] += eps
        p[mid] += eps
        outer = [i for i in range(n_levels) if i not in (mid - 1, mid)]
        p[outer] -= 2.0 * eps / (n_levels - 2)
        return PopulationState(p)

    @property
    def effective_pump_time(self) -> float:
        """Observed light-on time constant 1/(1/T_op + 1/T_1), in us."""
        return 1.0 / (1.0 / self.pump_time + 1.0 / self.t1)


def effective_pump_time(pump_time: float, t1: float) -> float:
    """Light-on time constant from the bare pump time and T1, in us."""
    return 1.0 / (1.0 / pump_time + 1.0 / t1)


def thermal_populations(system: SpinSystem, field: FieldOrientation,
                        temperature: float = ROOM_TEMPERATURE_K) -> PopulationState:
    """High-temperature Boltzmann populations, descending-mS order."""
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    energies = np.linalg.eigvalsh(hamiltonian(system, field))
    p_asc = 1.0 - energies / (KB_MHZ_PER_K * temperature)
    p_asc = p_asc / p_asc.sum()
    return PopulationState(p_asc[::-1])


def combined_fixed_point(pump: PumpModel, thermal: PopulationState) -> PopulationState:
    """Light-on fixed point: rate-weighted mix of pump and thermal targets."""
    p_pump = pump.pump_steady_state(thermal.n_levels).p
    w_pump = 1.0 / pump.pump_time
    w_th = 1.0 / pump.t1
    p = (w_pump * p_pump + w_th * thermal.p) / (w_pump + w_th)
    return PopulationState(p)


def evolve_populations(state: PopulationState, pump: PumpModel, dt: float,
                       light_on: bool, thermal: PopulationState) -> PopulationState:
    """Propagate populations for dt (us) under light on or off.

    Exact solution of dp/dt = (target - p)/tau for the piecewise-constant
    illumination model; composing two steps equals one combined step.
    """
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    if state.n_levels != thermal.n_levels:
        raise ValueError("state and thermal must have the same multiplicity")
    if light_on:
        target = combined_fixed_point(pump, thermal).p
        tau = pump.effective_pump_time
    else:
        target = thermal.p
        tau = pump.t1
    decay = np.exp(-dt / tau)
    return PopulationState(target + (state.p - target) * decay)


def populations_at(t_us: float, pump: PumpModel, thermal: PopulationState,
                   light_duration: float) -> PopulationState:
    """Populations at time t for a light pulse spanning [0, light_duration].

    Before the pulse the system sits at thermal equilibrium; during it
    the populations head for the combined fixed point; afterward they
    relax back to thermal.
    """
    if t_us <= 0:
        return thermal
    if t_us <= light_duration:
        return evolve_populations(thermal, pump, t_us, True, thermal)
    at_off = evolve_populations(thermal, pump, light_duration, True, thermal)
    return evolve_populations(at_off, pump, t_us - light_duration, False, thermal)


def echo_detected_recovery_trace(system: SpinSystem, field: FieldOrientation,
                                 pump: PumpModel, delays_us: np.ndarray,
                                 pair: tuple[int, int] = (2, 3),
                                 light_duration: float = 1000.0,
                                 tau_echo: float = 1.2,
                                 t2: float = 48.0,
                                 sweep_start: float | None = None) -> Spectrum:
    """Echo amplitude vs position of the echo sequence around a light pulse.

    The light pulse spans [0, light_duration] us; each delay is the time
    of the detection sequence relative to the pulse start.  The signal
    is the probed pair's population difference at that time, scaled by
    the constant echo decay factor exp(-2 tau_echo / t2).

    pair uses ascending-energy level indices; the default (2, 3) probes
    the upper adjacent pair, which for positive D is the low-field line
    of the triplet.
    """
    delays = np.asarray(delays_us, dtype=float)
    if delays.ndim != 1 or len(delays) < 2:
        raise ConfigError("delays_us must be a 1-D grid of at least 2 points")
    if np.any(np.diff(delays) <= 0):
        raise ConfigError("delays_us must be strictly increasing")
    if tau_echo < 0 or t2 <= 0:
        raise ConfigError("tau_echo must be >= 0 and t2 positive")
    if light_duration <= 0:
        raise ConfigError(f"light_duration must be positive, got {light_duration}")
    if sweep_start is not None and delays[0] < sweep_start:
        raise ConfigError(
            f"microwave pulse scheduled before sweep start: first delay "
            f"{delays[0]} us < sweep_start {sweep_start} us")
    n = system.multiplicity
    if not (0 <= pair[0] < pair[1] < n):
        raise ConfigError(f"invalid level pair {pair} for {n} levels")

    thermal = thermal_populations(system, field, pump.temperature)
    echo_factor = float(np.exp(-2.0 * tau_echo / t2))
    signal = np.array([
        populations_at(t, pump, thermal, light_duration).difference(pair)
        for t in delays
    ]) * echo_factor
    meta = {
        "pair": f"{pair[0]}-{pair[1]}",
        "light_duration_us": light_duration,
        "tau_echo_us": tau_echo,
        "t2_us": t2,
        "echo_factor": echo_factor,
        "effective_pump_time_us": pump.effective_pump_time,
    }
    return Spectrum("time", delays, signal, meta)
