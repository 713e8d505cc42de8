"""Unit conventions and physical constants.

The whole package works in Gauss for magnetic fields, MHz for energies
and frequencies, and microseconds for times.  The single conversion
constant below ties fields to frequencies; everything else follows from
it.
"""

# Electron Zeeman conversion: frequency (MHz) per Gauss per unit g-factor.
MHZ_PER_GAUSS = 1.3996245

# Boltzmann constant over Planck constant, in MHz per Kelvin
# (k_B / h = 1.380649e-23 J/K / 6.62607015e-34 J s).
KB_MHZ_PER_K = 20836.61912

ROOM_TEMPERATURE_K = 300.0


def gyromagnetic_mhz_per_gauss(g: float) -> float:
    """Electron gyromagnetic ratio in MHz/G for a given g-factor."""
    return g * MHZ_PER_GAUSS
