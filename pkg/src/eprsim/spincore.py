"""Spin Hamiltonian, transition frequencies and resonance-field search.

Model: a single electron spin S with an axial-plus-rhombic zero-field
splitting in a static field B0 tilted by theta from the distortion axis
(the crystal c axis, taken as z).  In MHz,

    H = g * 1.3996245 * B0 * (sin(theta) Sx + cos(theta) Sz)
        + D (Sz^2 - S(S+1)/3) + E (Sx^2 - Sy^2)

The microwave field is taken along y, perpendicular to the rotation
plane of B0, so the same transverse operator applies at every angle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import MHZ_PER_GAUSS

__all__ = [
    "SpinSystem",
    "FieldOrientation",
    "Transition",
    "ResonanceLine",
    "spin_operators",
    "hamiltonian",
    "transitions",
    "resonance_fields",
    "frequency_offset_to_field",
    "field_offset_to_frequency",
]

# Transitions with squared transverse matrix element below this are
# treated as forbidden during resonance-field searches.
ALLOWED_ME_THRESHOLD = 1e-6


@dataclass(frozen=True)
class SpinSystem:
    """Electron spin system parameters.

    Attributes:
        spin: total spin quantum number (half-integer or integer, >= 1/2).
        g: isotropic g-factor.
        zfs_d: axial zero-field splitting D in MHz.
        zfs_e: rhombic zero-field splitting E in MHz.
        linewidth_pp: peak-to-peak linewidth in Gauss for spectra.
        label: free-form name used in output metadata.
    """

    spin: float = 1.5
    g: float = 2.0028
    zfs_d: float = 35.0
    zfs_e: float = 0.0
    linewidth_pp: float = 3.0
    label: str = "V2"

    def __post_init__(self) -> None:
        if self.spin < 0.5 or abs(2 * self.spin - round(2 * self.spin)) > 1e-12:
            raise ValueError(f"spin must be a positive half-integer, got {self.spin}")
        if self.g <= 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.linewidth_pp <= 0:
            raise ValueError(f"linewidth_pp must be positive, got {self.linewidth_pp}")
        if self.zfs_d == 0.0:
            if self.zfs_e != 0.0:
                raise ValueError("zfs_e must be 0 when zfs_d is 0")
        elif abs(self.zfs_e) > abs(self.zfs_d) / 3 + 1e-12:
            raise ValueError("|zfs_e| must not exceed |zfs_d|/3")

    @property
    def multiplicity(self) -> int:
        return int(round(2 * self.spin + 1))


@dataclass(frozen=True)
class FieldOrientation:
    """Static field magnitude (Gauss) and polar angle from the ZFS axis.

    theta_deg is measured from the distortion axis; the field lies in
    the xz plane.  Negative angles are allowed (the axial Hamiltonian
    is symmetric under theta -> -theta).
    """

    magnitude: float
    theta_deg: float = 0.0

    def __post_init__(self) -> None:
        if self.magnitude < 0:
            raise ValueError(f"field magnitude must be >= 0, got {self.magnitude}")
        if abs(self.theta_deg) > 90.0:
            raise ValueError(f"|theta_deg| must be <= 90, got {self.theta_deg}")

    @property
    def direction(self) -> np.ndarray:
        th = np.deg2rad(self.theta_deg)
        return np.array([np.sin(th), 0.0, np.cos(th)])


@dataclass(frozen=True)
class Transition:
    """A level pair (indices in ascending energy order) with its frequency.

    matrix_element_sq is |<i|Sy|j>|^2 for the transverse drive operator.
    """

    lower: int
    upper: int
    frequency: float
    matrix_element_sq: float

    @property
    def allowed(self) -> bool:
        return self.matrix_element_sq >= ALLOWED_ME_THRESHOLD


def spin_operators(spin: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Sx, Sy, Sz) in the descending-mS basis |S>, |S-1>, ..., |-S>."""
    if spin < 0.5 or abs(2 * spin - round(2 * spin)) > 1e-12:
        raise ValueError(f"spin must be a positive half-integer, got {spin}")
    n = int(round(2 * spin + 1))
    m = spin - np.arange(n)
    sz = np.diag(m.astype(complex))
    sp = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        mm = m[k]
        sp[k - 1, k] = np.sqrt(spin * (spin + 1) - mm * (mm + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    return sx, sy, sz


def hamiltonian(system: SpinSystem, field: FieldOrientation) -> np.ndarray:
    """Zeeman + zero-field-splitting Hamiltonian in MHz (traceless)."""
    sx, sy, sz = spin_operators(system.spin)
    nx, ny, nz = field.direction
    gamma = system.g * MHZ_PER_GAUSS
    h = gamma * field.magnitude * (nx * sx + ny * sy + nz * sz)
    eye = np.eye(system.multiplicity)
    h += system.zfs_d * (sz @ sz - system.spin * (system.spin + 1) / 3 * eye)
    h += system.zfs_e * (sx @ sx - sy @ sy)
    return h


def transitions(system: SpinSystem, field: FieldOrientation) -> list[Transition]:
    """All level pairs with frequencies and transverse matrix elements.

    Levels are indexed in ascending energy; frequencies are positive.
    """
    h = hamiltonian(system, field)
    energies, vectors = np.linalg.eigh(h)
    _, sy, _ = spin_operators(system.spin)
    out = []
    n = system.multiplicity
    for i in range(n):
        for j in range(i + 1, n):
            me = abs(np.vdot(vectors[:, i], sy @ vectors[:, j])) ** 2
            out.append(Transition(i, j, energies[j] - energies[i], float(me)))
    return out


def _pair_frequency(system: SpinSystem, b: float, theta_deg: float,
                    pair: tuple[int, int]) -> float:
    energies = np.linalg.eigvalsh(
        hamiltonian(system, FieldOrientation(b, theta_deg)))
    return energies[pair[1]] - energies[pair[0]]


@dataclass(frozen=True)
class ResonanceLine:
    """A resonance-field solution for one level pair at fixed frequency."""

    lower: int
    upper: int
    field: float
    matrix_element_sq: float

    @property
    def pair(self) -> tuple[int, int]:
        return (self.lower, self.upper)


def resonance_fields(system: SpinSystem, theta_deg: float, freq_mhz: float,
                     b_min: float, b_max: float, coarse_step: float = 1.0,
                     tol: float = 0.01) -> list[ResonanceLine]:
    """Fields in [b_min, b_max] where a transition matches freq_mhz.

    The search subdivides the range into brackets no wider than
    coarse_step (1 G by default), then bisects sign changes of
    transition frequency minus freq_mhz down to tol, sharpening each
    bracket to a resonance field.  Only level pairs whose transverse
    matrix element at the resonance is allowed are returned, sorted by
    field.
    """
    if b_max <= b_min:
        raise ValueError("b_max must exceed b_min")
    if freq_mhz <= 0:
        raise ValueError("freq_mhz must be positive")
    n = system.multiplicity
    n_seg = max(1, int(np.ceil((b_max - b_min) / coarse_step)))
    grid = np.linspace(b_min, b_max, n_seg + 1)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    # frequencies on the coarse grid, one row per field point
    freq_grid = np.empty((len(grid), len(pairs)))
    for gi, b in enumerate(grid):
        energies = np.linalg.eigvalsh(
            hamiltonian(system, FieldOrientation(b, theta_deg)))
        for pi, (i, j) in enumerate(pairs):
            freq_grid[gi, pi] = energies[j] - energies[i]

    lines = []
    for pi, pair in enumerate(pairs):
        fvals = freq_grid[:, pi] - freq_mhz
        for gi in range(n_seg):
            lo, hi = grid[gi], grid[gi + 1]
            flo, fhi = fvals[gi], fvals[gi + 1]
            if flo == 0.0 and gi > 0:
                continue  # counted as the right edge of the previous bracket
            if flo * fhi > 0:
                continue
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fmid = _pair_frequency(system, mid, theta_deg, pair) - freq_mhz
                if flo * fmid <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fmid
            b_res = 0.5 * (lo + hi)
            tr = _transition_at(system, b_res, theta_deg, pair)
            if tr.allowed:
                lines.append(ResonanceLine(pair[0], pair[1], b_res,
                                           tr.matrix_element_sq))
    lines.sort(key=lambda ln: ln.field)
    return lines


def _transition_at(system: SpinSystem, b: float, theta_deg: float,
                   pair: tuple[int, int]) -> Transition:
    h = hamiltonian(system, FieldOrientation(b, theta_deg))
    energies, vectors = np.linalg.eigh(h)
    _, sy, _ = spin_operators(system.spin)
    i, j = pair
    me = abs(np.vdot(vectors[:, i], sy @ vectors[:, j])) ** 2
    return Transition(i, j, energies[j] - energies[i], float(me))


def frequency_offset_to_field(delta_freq_mhz: float, g: float) -> float:
    """Convert a frequency offset (MHz) to a field offset (Gauss)."""
    return delta_freq_mhz / (g * MHZ_PER_GAUSS)


def field_offset_to_frequency(delta_field_gauss: float, g: float) -> float:
    """Convert a field offset (Gauss) to a frequency offset (MHz)."""
    return delta_field_gauss * g * MHZ_PER_GAUSS
