"""From laboratory knobs to model parameters: F0, Gamma, delta-k, Lamb-Dicke numbers.

The force and decoherence constants are calibrated values for the 9Be+ ODF
beams (Delta_R = -63.8 GHz, polarizations at the Stark null), not derived from
atomic structure.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import (F0_REFERENCE, F0_REFERENCE_THETA, GAMMA_REFERENCE, HBAR, K_B,
                        ODF_WAVELENGTH, STARK_NULL_ANGLE)
from .errors import ConfigurationError, InstabilityError


@dataclass(frozen=True)
class BeamGeometry:
    """ODF beam pair in the y-z plane at +-theta_R/2 (angles in radians)."""

    wavelength: float = ODF_WAVELENGTH
    theta_R: float = math.radians(4.8)
    theta_err: float = 0.0
    phi_p_upper: float = STARK_NULL_ANGLE
    phi_p_lower: float = -STARK_NULL_ANGLE

    def __post_init__(self):
        if not 0 < self.theta_R < math.pi:
            raise ConfigurationError("theta_R must lie in (0, pi)")
        if not self.wavelength > 0:
            raise ConfigurationError("wavelength must be positive")


@dataclass(frozen=True)
class StarkCoefficients:
    """Single-beam Stark shifts (rad/s) for pi (A) and sigma (B) polarization."""

    A_up: float
    A_down: float
    B_up: float
    B_down: float


def delta_k(geometry):
    """|k_U - k_L| = 2 k sin(theta_R / 2), in 1/m."""
    return 2.0 * (2.0 * math.pi / geometry.wavelength) * math.sin(geometry.theta_R / 2.0)


def lattice_wavelength(geometry):
    return 2.0 * math.pi / delta_k(geometry)


def f0_from_intensity(intensity, geometry):
    """ODF force amplitude (N) for a per-beam intensity in W/cm^2.

    Linear in intensity and proportional to delta-k, anchored at the
    calibrated 1.4e-23 N for 1 W/cm^2 and theta_R = 4.8 deg.
    """
    if intensity < 0:
        raise ConfigurationError("intensity must be >= 0")
    return (F0_REFERENCE * intensity * math.sin(geometry.theta_R / 2.0)
            / math.sin(F0_REFERENCE_THETA / 2.0))


def gamma_from_intensity(intensity):
    """Spontaneous-emission decoherence rate (1/s); independent of beam angle."""
    if intensity < 0:
        raise ConfigurationError("intensity must be >= 0")
    return GAMMA_REFERENCE * intensity


def stark_shift(phi_p, coeffs):
    """Differential AC Stark shift of the qubit for polarization angle phi_p."""
    c2, s2 = math.cos(phi_p) ** 2, math.sin(phi_p) ** 2
    return (coeffs.A_up - coeffs.A_down) * c2 + (coeffs.B_up - coeffs.B_down) * s2


def stark_null_angle(coeffs):
    """Polarization angle in [0, pi/2] nulling :func:`stark_shift`, or None."""
    a = coeffs.A_up - coeffs.A_down
    b = coeffs.B_up - coeffs.B_down
    if a == 0:
        return 0.0
    if b == 0 or (a > 0) == (b > 0):
        return None
    return math.atan(math.sqrt(-a / b))


def thermal_occupation(omega, temperature):
    return K_B * temperature / (HBAR * np.asarray(omega, dtype=float))


def z_rms_profile(spectrum, temperature):
    """Per-ion rms axial extent (m) from all transverse modes at one temperature."""
    if not temperature > 0:
        raise ConfigurationError("temperature must be positive")
    w = np.asarray(spectrum.frequencies, dtype=float)
    if np.any(~(w > 0)):
        raise InstabilityError(int(np.sum(~(w > 0))), float(np.min(w)))
    mass = spectrum.crystal.trap.ion_mass if spectrum.crystal is not None else None
    if mass is None:
        raise ConfigurationError("spectrum carries no crystal; ion mass unknown")
    return _z_rms(spectrum.mode_matrix, w, mass, temperature)


def _z_rms(b, w, mass, temperature):
    nbar = thermal_occupation(w, temperature)
    per_mode = HBAR / (2.0 * mass * w) * (2.0 * nbar + 1.0)
    return np.sqrt((np.asarray(b) ** 2) @ per_mode)


def single_ion_z_rms(omega_z, mass, temperature):
    """z_rms of one ion alone in the axial well."""
    return float(_z_rms(np.ones((1, 1)), np.array([omega_z]), mass, temperature)[0])


def lamb_dicke_parameter(z_rms, geometry):
    """eta_ind = delta_k * z_rms (array-friendly)."""
    z = np.asarray(z_rms, dtype=float)
    if np.any(z < 0):
        raise ConfigurationError("z_rms must be >= 0")
    out = delta_k(geometry) * z
    return float(out) if out.ndim == 0 else out


def tilt_modulation_index(geometry, array_radius):
    """delta_k * 2 R_P * sin(theta_err); values below 1 keep the force uniform."""
    if not array_radius > 0:
        raise ConfigurationError("array radius must be positive")
    return delta_k(geometry) * 2.0 * array_radius * math.sin(geometry.theta_err)
