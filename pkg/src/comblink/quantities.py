"""Unit conversions and physical constants.

Everything else in the package works in linear SI units (W, Hz, J and
plain power ratios); decibel forms only appear at the I/O boundaries.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "linear_from_db",
    "db_from_linear",
    "watt_from_dbm",
    "dbm_from_watt",
    "photon_energy",
]


@dataclass(frozen=True)
class PhysicalConstants:
    planck_constant: float = 6.62607015e-34  # J s, exact SI value
    speed_of_light: float = 299792458.0  # m/s, exact SI value


CONSTANTS = PhysicalConstants()


def _as_float(x):
    # scalars stay Python floats; sequences become float arrays
    return np.asarray(x, dtype=float) if np.ndim(x) else float(x)


def _require_positive(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError(f"{name} must be strictly positive, got {x!r}")


def linear_from_db(x_db):
    """Convert a ratio in dB to a linear power ratio."""
    return 10.0 ** (_as_float(x_db) / 10.0)


def db_from_linear(x):
    """Convert a positive linear power ratio to dB.

    Raises
    ------
    ValueError
        If ``x`` is zero or negative (there is no dB value for it).
    """
    _require_positive(x, "linear ratio")
    return 10.0 * np.log10(_as_float(x))


def watt_from_dbm(p_dbm):
    """Power in dBm -> power in W."""
    return 1e-3 * linear_from_db(p_dbm)


def dbm_from_watt(p_w):
    """Power in W -> power in dBm. Non-positive powers are rejected."""
    _require_positive(p_w, "power")
    return db_from_linear(_as_float(p_w) * 1e3)


def photon_energy(wavelength, constants=CONSTANTS):
    """Photon energy ``h*c/wavelength`` in J for a vacuum wavelength in m."""
    _require_positive(wavelength, "wavelength")
    return constants.planck_constant * constants.speed_of_light / wavelength
