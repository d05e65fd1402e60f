"""Unit conventions: all internal quantities in Hartree atomic units (hbar = 1).

Time I/O is in femtoseconds, temperature I/O in kelvin.
"""

# Boltzmann constant in Hartree / K
KB_AU = 3.166811563e-6

# one atomic unit of time in femtoseconds
AU_TIME_FS = 2.418884e-2


def fs_to_au(t_fs):
    return t_fs / AU_TIME_FS


def au_to_fs(t_au):
    return t_au * AU_TIME_FS


def beta_from_temperature(temperature_K: float) -> float:
    """Inverse thermal energy beta = 1/(kB T) in atomic units."""
    if temperature_K <= 0.0:
        raise ValueError("temperature must be strictly positive")
    return 1.0 / (KB_AU * temperature_K)
