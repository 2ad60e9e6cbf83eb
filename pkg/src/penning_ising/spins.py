"""Spin-echo benchmarking dynamics.

Three engines evaluate the sequence
``R_y(pi/2) U(tau) R_y(pi) U(tau) R_x(theta_1)`` acting on all spins up:

* the closed-form mean-field precession probability,
* exact collective-spin evolution in the symmetric (Dicke) subspace under
  the uniform interaction (2 chi / N) J_z^2,
* a brute-force 2^N state vector for arbitrary J_ij at small N.

Rotations follow R(axis, angle) = exp(-i angle J_axis).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import HBAR, K_B
from .errors import CapacityError, ConfigurationError

MAX_ORACLE_SPINS = 12
MARGIN_SENTINEL = np.finfo(float).max


@dataclass(frozen=True)
class SequenceParams:
    theta_1: float
    tau_arm: float
    J_bar: float = 0.0
    Gamma: float = 0.0
    chi: float = 0.0
    N: int = 1

    def __post_init__(self):
        if self.tau_arm < 0 or self.Gamma < 0 or self.N < 1:
            raise ConfigurationError("need tau_arm >= 0, Gamma >= 0 and N >= 1")


def mf_precession_probability(p):
    """P(up) = (1 + exp(-2 Gamma tau) sin(theta_1) sin(2 J_bar cos(theta_1) 2 tau)) / 2."""
    t = 2.0 * p.tau_arm
    # cos written as sin(pi/2 - theta) so theta = pi/2 gives exactly 0.5
    cos_theta = math.sin(math.pi / 2.0 - p.theta_1)
    return 0.5 * (1.0 + math.exp(-p.Gamma * t) * math.sin(p.theta_1)
                  * math.sin(2.0 * p.J_bar * cos_theta * t))


def mf_precession_curve(theta_1, J_bar, tau_arm, Gamma=0.0):
    """Vectorized :func:`mf_precession_probability` over an array of theta_1."""
    theta_1 = np.asarray(theta_1, dtype=float)
    t = 2.0 * tau_arm
    return 0.5 * (1.0 + np.exp(-Gamma * t) * np.sin(theta_1)
                  * np.sin(2.0 * J_bar * np.sin(np.pi / 2.0 - theta_1) * t))


@dataclass(frozen=True, eq=False)
class DickeState:
    """Amplitudes over M_J = -N/2 .. N/2 (ascending) for N spins-1/2."""

    amplitudes: np.ndarray
    N: int

    def __post_init__(self):
        if len(self.amplitudes) != self.N + 1:
            raise ConfigurationError("Dicke state needs N + 1 amplitudes")

    @classmethod
    def all_up(cls, N):
        amps = np.zeros(N + 1, dtype=complex)
        amps[-1] = 1.0
        return cls(amps, N)

    @property
    def m_values(self):
        return np.arange(self.N + 1) - self.N / 2.0

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def expect_jz(self):
        return float(np.sum(self.m_values * np.abs(self.amplitudes) ** 2))

    def expect(self, operator):
        a = self.amplitudes
        return complex(np.conj(a) @ (operator @ a))


def _ladder(N):
    """J_+ in the ascending M_J basis."""
    m = np.arange(N) - N / 2.0
    J = N / 2.0
    return np.diag(np.sqrt(J * (J + 1) - m * (m + 1)), -1)


def collective_operator(N, axis):
    jp = _ladder(N)
    if axis == "x":
        return 0.5 * (jp + jp.T)
    if axis == "y":
        return -0.5j * (jp - jp.T)
    if axis == "z":
        return np.diag(np.arange(N + 1) - N / 2.0).astype(complex)
    raise ValueError(f"unknown axis {axis!r}")


@lru_cache(maxsize=256)
def _generator_eigensystem(N, axis):
    w, V = np.linalg.eigh(collective_operator(N, axis))
    w.setflags(write=False)
    V.setflags(write=False)
    return w, V


def dicke_rotation(state, axis, angle):
    """exp(-i angle J_axis) applied to a Dicke state (axis 'x' or 'y')."""
    if axis not in ("x", "y"):
        raise ValueError("rotation axis must be 'x' or 'y'")
    w, V = _generator_eigensystem(state.N, axis)
    amps = V @ (np.exp(-1j * angle * w) * (V.conj().T @ state.amplitudes))
    return DickeState(amps, state.N)


def dicke_jz2_phase(state, chi, t):
    """exp(-i (2 chi / N) J_z^2 t)."""
    m = state.m_values
    return DickeState(state.amplitudes * np.exp(-1j * (2.0 * chi / state.N) * m**2 * t), state.N)


def exact_sequence_state(N, chi, tau_arm, theta_1):
    s = DickeState.all_up(N)
    s = dicke_rotation(s, "x", theta_1)
    s = dicke_jz2_phase(s, chi, tau_arm)
    s = dicke_rotation(s, "y", math.pi)
    s = dicke_jz2_phase(s, chi, tau_arm)
    return dicke_rotation(s, "y", math.pi / 2.0)


def exact_sequence_jz(N, chi, tau_arm, theta_1, Gamma=0.0):
    """<J_z> after the echo sequence under (2 chi / N) J_z^2.

    ``Gamma > 0`` multiplies the result by exp(-2 Gamma tau_arm), the same
    envelope the mean-field formula puts on its coherent term.
    """
    jz = exact_sequence_state(N, chi, tau_arm, theta_1).expect_jz()
    return jz * math.exp(-2.0 * Gamma * tau_arm)


def exact_precession_curve(N, chi, tau_arm, theta_1, Gamma=0.0):
    """Normalized <J_z> / (N/2) over an array of theta_1."""
    return np.array([exact_sequence_jz(N, chi, tau_arm, th, Gamma) / (N / 2.0)
                     for th in np.atleast_1d(theta_1)])


# --- 2^N state-vector oracle -------------------------------------------------

def _apply_single_qubit(psi, U, N):
    psi = psi.reshape((2,) * N)
    for q in range(N):
        psi = np.moveaxis(np.tensordot(U, psi, axes=([1], [q])), 0, q)
    return psi.reshape(-1)


def _qubit_rotation(axis, angle):
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    return np.array([[c, -s], [s, c]], dtype=complex)


def _sigma_z_table(N):
    # basis index bit q (most significant first) = 0 means spin up
    idx = np.arange(2**N)
    bits = (idx[:, None] >> (N - 1 - np.arange(N))[None, :]) & 1
    return 1 - 2 * bits


@dataclass(frozen=True)
class OracleResult:
    jz: float
    p_up: float


def brute_force_sequence(N, couplings, tau_arm, theta_1, Gamma=0.0):
    """Full tensor-product evolution of the echo sequence for N <= 12 spins.

    ``couplings`` is an N x N symmetric J_ij (rad/s) or a scalar chi for
    uniform couplings.  H_I = (1/N) sum_{i<j} J_ij sigma^z_i sigma^z_j.
    Returns <J_z> and the spin-averaged P(up).
    """
    if N > MAX_ORACLE_SPINS:
        raise CapacityError(f"state-vector oracle is limited to {MAX_ORACLE_SPINS} spins")
    if N < 1:
        raise ConfigurationError("need at least one spin")
    J = np.asarray(couplings, dtype=float)
    J = np.full((N, N), float(J)) if J.ndim == 0 else J.copy()
    if J.shape != (N, N):
        raise ConfigurationError(f"coupling matrix must be {N}x{N}")
    np.fill_diagonal(J, 0.0)
    sz = _sigma_z_table(N)
    energy = np.einsum("ki,ij,kj->k", sz, np.triu(J, 1), sz) / N
    phase = np.exp(-1j * energy * tau_arm)

    psi = np.zeros(2**N, dtype=complex)
    psi[0] = 1.0
    psi = _apply_single_qubit(psi, _qubit_rotation("x", theta_1), N)
    psi = phase * psi
    psi = _apply_single_qubit(psi, _qubit_rotation("y", math.pi), N)
    psi = phase * psi
    psi = _apply_single_qubit(psi, _qubit_rotation("y", math.pi / 2.0), N)

    jz = float(np.sum(np.abs(psi) ** 2 * sz.sum(axis=1)) / 2.0)
    jz *= math.exp(-2.0 * Gamma * tau_arm)
    return OracleResult(jz=jz, p_up=0.5 * (1.0 + 2.0 * jz / N))


def mf_validity_bound(N, chi, t):
    """chi t / (sqrt(N) / 4); mean field needs this well below 1."""
    if N < 1:
        raise ConfigurationError("need N >= 1")
    return abs(chi * t) / (math.sqrt(N) / 4.0)


@dataclass(frozen=True, eq=False)
class MotionMargins:
    """Per-mode spin-motion margins; every entry must exceed 1."""

    margins: np.ndarray
    min_margin: float
    worst_mode: int
    satisfied: bool
    force_free: bool = False


def spin_motion_criterion(spectrum, drive, temperature, sqrt_n=False):
    """hbar |mu_R - omega_m| / (F0 sqrt(hbar (2 n_m + 1) / (2 M omega_m))) for each mode.

    ``sqrt_n`` scales the force by sqrt(N) for composite spin states.  A zero
    force gives every mode the sentinel margin ``MARGIN_SENTINEL``.
    """
    if not temperature > 0:
        raise ConfigurationError("temperature must be positive")
    w = np.asarray(spectrum.frequencies, dtype=float)
    n = len(w)
    if drive.F0 == 0:
        margins = np.full(n, MARGIN_SENTINEL)
        return MotionMargins(margins, MARGIN_SENTINEL, 1, True, force_free=True)
    mass = spectrum.crystal.trap.ion_mass
    nbar = K_B * temperature / (HBAR * w)
    extent = np.sqrt(HBAR * (2.0 * nbar + 1.0) / (2.0 * mass * w))
    force = drive.F0 * (math.sqrt(n) if sqrt_n else 1.0)
    margins = HBAR * np.abs(drive.mu_R - w) / (force * extent)
    worst = int(np.argmin(margins))
    return MotionMargins(margins, float(margins[worst]), worst + 1, bool(np.all(margins > 1.0)))
