"""Physical constants and the single dB conversion rule used everywhere."""

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


def amp_to_db(x):
    """20*log10 of an amplitude quantity (|H|, path gain)."""
    return 20.0 * np.log10(x)


def db_to_amp(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 20.0)


def power_to_db(p):
    """10*log10 of a power ratio (PDP bins, K-factor)."""
    return 10.0 * np.log10(p)


def db_to_power(p_db):
    return 10.0 ** (np.asarray(p_db, dtype=float) / 10.0)


def wavelength(f):
    return SPEED_OF_LIGHT / np.asarray(f, dtype=float)
