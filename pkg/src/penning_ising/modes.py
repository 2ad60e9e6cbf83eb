"""Transverse (drumhead) normal modes of a planar crystal."""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .constants import TWO_PI
from .crystal import IonCrystal, minimize_equilibrium, pairwise_distances, seed_for
from .errors import BracketError, ConfigurationError, InstabilityError, SingularConfigurationError


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Eigenfrequencies (rad/s, descending, COM first) and eigenvectors.

    ``mode_matrix[i, m]`` is the amplitude of ion ``i`` in mode ``m``; columns
    are orthonormal.
    """

    frequencies: np.ndarray
    mode_matrix: np.ndarray
    crystal: IonCrystal = None

    @property
    def n_modes(self):
        return len(self.frequencies)


def stiffness_matrix(crystal):
    """Axial stiffness matrix K (N/m) about the equilibrium positions.

    Off-diagonal entries are k q^2 / r_ij^3; the diagonal is
    M omega_z^2 minus the row's Coulomb terms, so each row sums to M omega_z^2.
    """
    trap = crystal.trap
    r = pairwise_distances(np.asarray(crystal.positions, dtype=float))
    n = len(r)
    off = ~np.eye(n, dtype=bool)
    if np.any(r[off] <= 0):
        raise SingularConfigurationError("coincident ions")
    np.fill_diagonal(r, np.inf)
    coul = trap.coulomb / r**3
    K = coul + np.diag(trap.axial_stiffness - coul.sum(axis=1))
    return 0.5 * (K + K.T)


def _fix_signs(vectors):
    # the first entry within 1e-9 of the column's largest magnitude is made positive
    mag = np.abs(vectors)
    idx = np.argmax(mag >= (1.0 - 1e-9) * mag.max(axis=0), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def transverse_eigensystem(K, mass):
    """Eigenvalues omega^2 (descending) and sign-fixed eigenvectors of K / M."""
    K = np.asarray(K, dtype=float)
    if not np.allclose(K, K.T, rtol=1e-12, atol=0):
        raise ConfigurationError("stiffness matrix is not symmetric")
    w2, vecs = np.linalg.eigh(0.5 * (K + K.T) / mass)
    order = np.argsort(-w2, kind="stable")
    return w2[order], _fix_signs(vecs[:, order])


def transverse_modes(K, mass, crystal=None):
    """Solve the drumhead eigenproblem; raise :class:`InstabilityError` if any omega^2 < 0."""
    w2, vecs = transverse_eigensystem(K, mass)
    unstable = int(np.sum(w2 < 0))
    if unstable:
        raise InstabilityError(unstable, float(w2.min()))
    return ModeSpectrum(frequencies=np.sqrt(w2), mode_matrix=vecs, crystal=crystal)


def normal_modes(crystal):
    return transverse_modes(stiffness_matrix(crystal), crystal.trap.ion_mass, crystal)


def min_transverse_eigenvalue(crystal):
    K = stiffness_matrix(crystal)
    return float(np.linalg.eigvalsh(K / crystal.trap.ion_mass).min())


@dataclass(frozen=True)
class PlaneTransition:
    omega_r: float
    bracket: tuple
    evaluations: int
    crystal: IonCrystal = dataclasses.field(default=None, repr=False, compare=False)


def plane_transition_scan(n_ions, trap, omega_r_range, tol=TWO_PI * 50.0, log=None):
    """Bisect on the rotation frequency for the 1<->2 plane transition.

    Each step re-solves the equilibrium (warm-started from the previous crystal)
    and finds where the smallest transverse omega^2 crosses zero.  Returns the
    midpoint of the final bracket, whose width is below ``tol`` (rad/s).
    """
    lo, hi = sorted(omega_r_range)
    cache = {}
    seed = [None]

    def margin(omega_r):
        t = dataclasses.replace(trap, omega_r=omega_r)
        start = seed[0] if seed[0] is not None else seed_for(n_ions, t)
        crystal = minimize_equilibrium(start, t)
        seed[0] = crystal.positions
        value = min_transverse_eigenvalue(crystal)
        cache[omega_r] = crystal
        if log is not None:
            log(omega_r, value)
        return value

    f_lo, f_hi = margin(lo), margin(hi)
    evaluations = 2
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(
            f"smallest omega^2 has the same sign at both ends of "
            f"[{lo / TWO_PI:.6g}, {hi / TWO_PI:.6g}] Hz")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = margin(mid)
        evaluations += 1
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    stable_end = lo if f_lo > 0 else hi
    return PlaneTransition(omega_r=0.5 * (lo + hi), bracket=(lo, hi),
                           evaluations=evaluations, crystal=cache[stable_end])
