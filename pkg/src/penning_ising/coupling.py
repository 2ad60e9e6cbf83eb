"""Phonon-mediated Ising couplings J_ij from the transverse modes and the ODF drive."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .calibration import BeamGeometry, f0_from_intensity
from .constants import BE9_ION_MASS, HBAR, TWO_PI
from .crystal import nearest_neighbor_spacing, pairwise_distances
from .errors import ConfigurationError, FitError, ResonanceError, SignMixedError

DEFAULT_RESONANCE_GUARD = TWO_PI * 10.0
DEFAULT_BIN_FACTOR = 1.25
DEFAULT_FIT_RADIUS_FRACTION = 0.5
MIN_FIT_BINS = 5


@dataclass(frozen=True)
class ODFDrive:
    """Beat note mu_R (rad/s) and force amplitude F0 (N).

    ``intensity`` (W/cm^2 per beam) and ``theta_R`` (rad) are kept when the
    drive was built from beam settings, so sweeps can normalize by I_R^2.
    """

    mu_R: float
    F0: float
    intensity: float = None
    theta_R: float = None

    def __post_init__(self):
        if not self.mu_R > 0:
            raise ConfigurationError("mu_R must be positive")
        if not self.F0 >= 0:
            raise ConfigurationError("F0 must be >= 0")

    @classmethod
    def from_intensity(cls, mu_R, intensity, geometry=None):
        geometry = geometry or BeamGeometry()
        return cls(mu_R=mu_R, F0=f0_from_intensity(intensity, geometry),
                   intensity=intensity, theta_R=geometry.theta_R)

    def detuned(self, omega_1, detuning):
        """Same drive with mu_R = omega_1 + detuning."""
        return replace(self, mu_R=omega_1 + detuning)


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Symmetric J_ij in rad/s with zero diagonal."""

    J: np.ndarray
    drive: ODFDrive
    spectrum: object = None

    @property
    def n_ions(self):
        return len(self.J)


@dataclass(frozen=True)
class PowerLawFit:
    """J(d) ~ sign * prefactor * (d0 / d)**exponent over [d0, r_fit]."""

    exponent: float
    prefactor: float
    rms_residual: float
    n_bins: int
    sign: int
    d0: float
    r_fit: float


def _check_resonance(mu_R, frequencies, guard):
    gap = np.abs(mu_R - np.asarray(frequencies))
    m = int(np.argmin(gap))
    if gap[m] < guard:
        raise ResonanceError(m + 1, float(frequencies[m]), mu_R, guard)


def coupling_matrix(spectrum, drive, guard=DEFAULT_RESONANCE_GUARD):
    """J_ij = F0^2 N / (2 hbar M) * sum_m b_im b_jm / (mu_R^2 - omega_m^2), i != j."""
    w = np.asarray(spectrum.frequencies, dtype=float)
    b = np.asarray(spectrum.mode_matrix, dtype=float)
    _check_resonance(drive.mu_R, w, guard)
    n = len(w)
    mass = spectrum.crystal.trap.ion_mass
    prefactor = drive.F0**2 * n / (2.0 * HBAR * mass)
    J = prefactor * (b / (drive.mu_R**2 - w**2)) @ b.T
    J = 0.5 * (J + J.T)
    np.fill_diagonal(J, 0.0)
    return CouplingMatrix(J=J, drive=drive, spectrum=spectrum)


def _as_array(J):
    return np.asarray(J.J if isinstance(J, CouplingMatrix) else J, dtype=float)


def mean_coupling(J):
    """J_bar = (1/N^2) sum_{i != j} J_ij."""
    J = _as_array(J)
    n = len(J)
    if n < 2:
        raise ValueError("mean coupling needs at least two spins")
    return float((J.sum() - np.trace(J)) / n**2)


def uniform_limit_chi(drive, omega_1, mass=BE9_ION_MASS, guard=DEFAULT_RESONANCE_GUARD):
    """COM-only coupling chi = F0^2 / (2 hbar M) / (mu_R^2 - omega_1^2), in rad/s."""
    _check_resonance(drive.mu_R, [omega_1], guard)
    return drive.F0**2 / (2.0 * HBAR * mass) / (drive.mu_R**2 - omega_1**2)


def pair_table(J, crystal):
    """Upper-triangle pairs as arrays (i, j, d_ij, J_ij)."""
    J = _as_array(J)
    i, j = np.triu_indices(len(J), 1)
    d = pairwise_distances(np.asarray(crystal.positions))[i, j]
    return i, j, d, J[i, j]


def power_law_fit(J, crystal, bin_factor=DEFAULT_BIN_FACTOR, r_fit=None, d0=None):
    """Fit the exponent a of J_ij ~ d_ij^-a on logarithmic distance bins.

    Bins start at d0 (nearest-neighbor spacing) and grow by ``bin_factor`` up to
    ``r_fit`` (half the crystal radius by default).  Each bin contributes the
    mean of log d and of log|J| over its pairs, which recovers an exact power
    law exactly; a least-squares line through the bin points gives a and the
    prefactor at d0.
    """
    J = _as_array(J)
    if len(J) < 7:
        raise FitError("power-law fit needs at least 7 ions")
    d0 = nearest_neighbor_spacing(crystal) if d0 is None else d0
    r_fit = DEFAULT_FIT_RADIUS_FRACTION * crystal.radius if r_fit is None else r_fit
    _, _, d, jij = pair_table(J, crystal)
    edges = [d0]
    while edges[-1] * bin_factor < r_fit:
        edges.append(edges[-1] * bin_factor)
    edges.append(r_fit)

    members = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (d >= lo) & (d < hi)
        if np.any(mask):
            members.append(mask)
    if len(members) < MIN_FIT_BINS:
        raise FitError(f"only {len(members)} populated bins in [{d0:.3g}, {r_fit:.3g}] m")

    means = np.array([jij[m].mean() for m in members])
    if np.any(means == 0) or not (np.all(means > 0) or np.all(means < 0)):
        raise SignMixedError("bin means change sign inside the fit range")
    sign = 1 if means[0] > 0 else -1
    in_range = np.any(members, axis=0)
    if np.any(sign * jij[in_range] <= 0):
        raise SignMixedError("individual couplings change sign inside the fit range")

    x = np.array([np.log(d[m] / d0).mean() for m in members])
    y = np.array([np.log(sign * jij[m]).mean() for m in members])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return PowerLawFit(exponent=float(-slope), prefactor=float(math.exp(intercept)),
                       rms_residual=float(np.sqrt(np.mean(resid**2))), n_bins=len(members),
                       sign=sign, d0=float(d0), r_fit=float(r_fit))


@dataclass(frozen=True)
class SweepRow:
    detuning: float
    mean_coupling: float
    jbar_per_ir2: float
    exponent: float
    fit: PowerLawFit = None


def _sweep_point(spectrum, crystal, drive, detuning, guard, d0, fit_kwargs):
    omega_1 = float(spectrum.frequencies[0])
    J = coupling_matrix(spectrum, drive.detuned(omega_1, detuning), guard=guard)
    jbar = mean_coupling(J)
    intensity = drive.intensity if drive.intensity else 1.0
    try:
        fit = power_law_fit(J, crystal, d0=d0, **fit_kwargs)
        exponent = fit.exponent
    except FitError:
        fit, exponent = None, math.nan
    return SweepRow(detuning=detuning, mean_coupling=jbar,
                    jbar_per_ir2=jbar / intensity**2, exponent=exponent, fit=fit)


def detuning_sweep(spectrum, crystal, drive, detunings, guard=DEFAULT_RESONANCE_GUARD,
                   threads=1, **fit_kwargs):
    """J_bar / I_R^2 and fitted exponent for each beat-note detuning mu_R - omega_1.

    Rows come back in input order.  A detuning where the power-law fit is
    undefined (sign-mixed couplings) gets ``exponent = nan``.
    """
    d0 = nearest_neighbor_spacing(crystal)
    detunings = [float(x) for x in detunings]
    work = lambda det: _sweep_point(spectrum, crystal, drive, det, guard, d0, fit_kwargs)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, detunings))
    return [work(det) for det in detunings]
