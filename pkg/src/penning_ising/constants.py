"""Physical constants (CODATA via scipy) and unit handling at the I/O boundary.

Everything inside the library is SI.  Frequencies are angular (rad/s) unless a
name ends in ``_hz``.
"""

import math
import re

from scipy import constants as _c

HBAR = _c.hbar
K_B = _c.k
EPSILON_0 = _c.epsilon_0
ELEMENTARY_CHARGE = _c.e
COULOMB_K = 1.0 / (4.0 * math.pi * EPSILON_0)

# 9Be+ : neutral atomic mass minus one electron.
BE9_ATOMIC_MASS_U = 9.012182
BE9_ION_MASS = BE9_ATOMIC_MASS_U * _c.atomic_mass - _c.m_e

TWO_PI = 2.0 * math.pi

# Calibrated ODF force at 1 W/cm^2 per beam and theta_R = 4.8 deg.
F0_REFERENCE = 1.4e-23
F0_REFERENCE_THETA = math.radians(4.8)
# Spontaneous-emission decoherence at 1 W/cm^2, Delta_R = -63.8 GHz, phi_p = +-65.3 deg.
GAMMA_REFERENCE = 82.0
ODF_WAVELENGTH = 313e-9
STARK_NULL_ANGLE = math.radians(65.3)


def hz(f):
    """Angular frequency for an ordinary frequency in Hz."""
    return TWO_PI * f


def khz(f):
    return TWO_PI * 1e3 * f


def to_hz(omega):
    return omega / TWO_PI


# unit -> (kind, factor to SI). Frequency units map onto angular frequency.
_UNITS = {
    "Hz": ("frequency", TWO_PI),
    "kHz": ("frequency", TWO_PI * 1e3),
    "MHz": ("frequency", TWO_PI * 1e6),
    "GHz": ("frequency", TWO_PI * 1e9),
    "rad/s": ("frequency", 1.0),
    "T": ("field", 1.0),
    "m": ("length", 1.0),
    "mm": ("length", 1e-3),
    "um": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "deg": ("angle", math.pi / 180.0),
    "rad": ("angle", 1.0),
    "K": ("temperature", 1.0),
    "mK": ("temperature", 1e-3),
    "uK": ("temperature", 1e-6),
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "1/s": ("rate", 1.0),
    "W_per_cm2": ("intensity", 1.0),
    "N": ("force", 1.0),
    "kg": ("mass", 1.0),
    "u": ("mass", _c.atomic_mass),
    "C": ("charge", 1.0),
}

_QUANTITY = re.compile(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*([A-Za-z_/0-9]+)\s*$")


def parse_quantity(text, kind):
    """Parse ``"795 kHz"`` style strings into SI (angular for frequencies).

    ``kind`` is the expected dimension; a mismatch raises ``ConfigurationError``.
    Intensities stay in W/cm^2 since every calibration constant is quoted in it.
    """
    from .errors import ConfigurationError

    if isinstance(text, (int, float)) and not isinstance(text, bool):
        raise ConfigurationError(f"missing unit for {kind} value {text!r}")
    m = _QUANTITY.match(str(text))
    if not m:
        raise ConfigurationError(f"cannot parse quantity {text!r}")
    value, unit = float(m.group(1)), m.group(2)
    if unit not in _UNITS:
        raise ConfigurationError(f"unknown unit {unit!r} in {text!r}")
    unit_kind, factor = _UNITS[unit]
    if unit_kind != kind:
        raise ConfigurationError(f"{text!r} is a {unit_kind}, expected {kind}")
    return value * factor
