"""Planar Coulomb-crystal equilibria in the rotating frame of a Penning trap.

The rotating-frame potential confines ions axially at ``omega_z`` and radially
with the effective stiffness ``beta * M * omega_z**2``.  A weak rotating-wall
quadrupole ``wall_strength * M * omega_z**2 * (x**2 - y**2) / 2`` pins the
crystal orientation.  Ions are constrained to the z = 0 plane.

Internally positions are scaled by the Coulomb length
``l0 = (k q^2 / (M omega_z^2))**(1/3)`` so that the energy reads
``sum(beta r^2 / 2 + wall (x^2 - y^2) / 2) + sum_{i<j} 1/r_ij``.
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .constants import BE9_ION_MASS, COULOMB_K, ELEMENTARY_CHARGE, khz
from .errors import ConfigurationError, ConvergenceError, SingularConfigurationError

DEFAULT_WALL = 1e-3
DEFAULT_MAX_ITER = 100_000
# default gradient tolerance, as a fraction of the Coulomb force unit k q^2 / l0^2
DEFAULT_RELATIVE_TOL = 1e-9
MAX_SADDLE_ESCAPES = 5


@dataclass(frozen=True)
class TrapConfig:
    """Static Penning-trap parameters (SI, angular frequencies)."""

    B0: float = 4.46
    omega_z: float = khz(795.0)
    omega_r: float = khz(45.6)
    wall_strength: float = DEFAULT_WALL
    ion_mass: float = BE9_ION_MASS
    ion_charge: float = ELEMENTARY_CHARGE

    def __post_init__(self):
        for name in ("B0", "omega_z", "omega_r", "ion_mass", "ion_charge"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        if not (self.wall_strength >= 0):
            raise ConfigurationError("wall_strength must be >= 0")
        if not self.cyclotron_frequency > 2 * self.omega_r:
            raise ConfigurationError(
                "rotation above half the cyclotron frequency (magnetron unstable)")
        if not self.beta > 0:
            raise ConfigurationError(f"no radial confinement: beta = {self.beta:.6g} <= 0")

    @property
    def cyclotron_frequency(self):
        return self.B0 * self.ion_charge / self.ion_mass

    @property
    def beta(self):
        wc, wr = self.cyclotron_frequency, self.omega_r
        return wr * (wc - wr) / self.omega_z**2 - 0.5

    @property
    def coulomb(self):
        """k q^2 in J m."""
        return COULOMB_K * self.ion_charge**2

    @property
    def axial_stiffness(self):
        """M omega_z^2 in N/m."""
        return self.ion_mass * self.omega_z**2

    @property
    def length_scale(self):
        return (self.coulomb / self.axial_stiffness) ** (1.0 / 3.0)

    @property
    def energy_scale(self):
        return self.coulomb / self.length_scale

    @property
    def force_scale(self):
        return self.coulomb / self.length_scale**2

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True, eq=False)
class IonCrystal:
    """Equilibrium positions (m, rotating frame, z = 0) and convergence metadata."""

    positions: np.ndarray
    trap: TrapConfig
    potential_energy: float
    gradient_norm: float
    tol: float
    iterations: int = 0
    seed_orientation: float = 0.0
    energy_history: tuple = field(default=(), repr=False)

    @property
    def n_ions(self):
        return len(self.positions)

    @property
    def radii(self):
        return np.hypot(self.positions[:, 0], self.positions[:, 1])

    @property
    def radius(self):
        return float(self.radii.max())

    def separations(self):
        return pairwise_distances(self.positions)


def closed_shell_count(shells):
    """Ion number of a hexagonal crystal with ``shells`` complete rings."""
    if shells < 0:
        raise ValueError("shells must be >= 0")
    return 1 + 3 * shells * (shells + 1)


def shells_for(n_ions):
    """Smallest shell count whose closed-shell crystal holds ``n_ions``."""
    if n_ions < 1:
        raise ValueError("need at least one ion")
    s = 0
    while closed_shell_count(s) < n_ions:
        s += 1
    return s


def seed_lattice(shells, spacing):
    """Triangular lattice with hexagonal shells, one lattice axis along x.

    Points are ordered ring by ring, counter-clockwise from +x within a ring.
    """
    if shells < 0 or not spacing > 0:
        raise ValueError("need shells >= 0 and spacing > 0")
    pts = []
    for a in range(-shells, shells + 1):
        for b in range(-shells, shells + 1):
            ring = max(abs(a), abs(b), abs(a + b))
            if ring <= shells:
                x = a + 0.5 * b
                y = b * math.sqrt(3.0) / 2.0
                angle = math.atan2(y, x) % (2 * math.pi)
                pts.append((ring, round(angle, 12), x, y))
    pts.sort()
    return spacing * np.array([(x, y) for _, _, x, y in pts], dtype=float)


def pairwise_distances(positions):
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _check_distinct(r):
    n = len(r)
    if n > 1:
        off = r[~np.eye(n, dtype=bool)]
        if np.any(off <= 0.0):
            raise SingularConfigurationError("coincident ions")


def _scaled_energy(u, beta, wall):
    x = u.reshape(-1, 2)
    diff = x[:, None, :] - x[None, :, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    iu = np.triu_indices(len(x), 1)
    trap = 0.5 * beta * np.sum(x * x) + 0.5 * wall * np.sum(x[:, 0] ** 2 - x[:, 1] ** 2)
    return trap + np.sum(1.0 / r[iu]), diff, r


def _scaled_energy_grad(u, beta, wall):
    e, diff, r = _scaled_energy(u, beta, wall)
    np.fill_diagonal(r, np.inf)
    inv3 = r**-3
    g = beta * u.reshape(-1, 2) - np.einsum("ij,ijk->ik", inv3, diff)
    g[:, 0] += wall * u[0::2]
    g[:, 1] -= wall * u[1::2]
    return e, g.ravel()


def _scaled_hessian(u, beta, wall):
    x = u.reshape(-1, 2)
    n = len(x)
    diff = x[:, None, :] - x[None, :, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(r, np.inf)
    inv3 = r**-3
    inv5 = r**-5
    # d^2(1/r)/dx_a dx_b for the pair block: 3 d_a d_b / r^5 - delta_ab / r^3
    pair = 3.0 * inv5[..., None, None] * diff[..., :, None] * diff[..., None, :]
    pair -= inv3[..., None, None] * np.eye(2)
    H = np.zeros((n, 2, n, 2))
    H -= pair.transpose(0, 2, 1, 3)
    diag = pair.sum(axis=1)
    idx = np.arange(n)
    H[idx, :, idx, :] = diag + np.diag([beta + wall, beta - wall])
    return H.reshape(2 * n, 2 * n)


def rotating_frame_energy(positions, trap):
    """Total rotating-frame potential energy in joules."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    _check_distinct(pairwise_distances(pos))
    u = (pos / trap.length_scale).ravel()
    e, _, _ = _scaled_energy(u, trap.beta, trap.wall_strength)
    return float(e) * trap.energy_scale


def energy_gradient(positions, trap):
    """Gradient of :func:`rotating_frame_energy` in N, shape (N, 2)."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    _check_distinct(pairwise_distances(pos))
    u = (pos / trap.length_scale).ravel()
    _, g = _scaled_energy_grad(u, trap.beta, trap.wall_strength)
    return g.reshape(-1, 2) * trap.force_scale


def optimal_seed_spacing(shells, trap):
    """Lattice spacing minimizing the energy of a uniformly scaled seed.

    E(s) = A s^2 + B / s has its minimum at s = (B / 2A)^(1/3).
    """
    if shells == 0:
        return trap.length_scale
    unit = seed_lattice(shells, 1.0)
    A = 0.5 * trap.beta * np.sum(unit**2) + 0.5 * trap.wall_strength * np.sum(
        unit[:, 0] ** 2 - unit[:, 1] ** 2)
    r = pairwise_distances(unit)
    B = np.sum(1.0 / r[np.triu_indices(len(unit), 1)])
    return (B / (2.0 * A)) ** (1.0 / 3.0) * trap.length_scale


def seed_for(n_ions, trap):
    """Closed-shell seed holding ``n_ions``; surplus outermost ions are dropped."""
    shells = shells_for(n_ions)
    pts = seed_lattice(shells, optimal_seed_spacing(shells, trap))
    if len(pts) > n_ions:
        order = np.argsort(np.hypot(pts[:, 0], pts[:, 1]), kind="stable")
        pts = pts[np.sort(order[:n_ions])]
    return pts


def _newton_polish(u, beta, wall, target, max_iter, history):
    e, g = _scaled_energy_grad(u, beta, wall)
    it = 0
    while np.max(np.abs(g), initial=0.0) > target and it < max_iter:
        it += 1
        H = _scaled_hessian(u, beta, wall)
        w, V = np.linalg.eigh(H)
        # saddle directions are followed downhill; near-zero modes are skipped
        keep = np.abs(w) > 1e-12 * np.max(np.abs(w))
        step = -V[:, keep] @ ((V[:, keep].T @ g) / np.abs(w[keep]))
        t = 1.0
        accepted = False
        while t > 1e-10:
            e_new, g_new = _scaled_energy_grad(u + t * step, beta, wall)
            if e_new <= e + 1e-4 * t * (g @ step):
                accepted = True
                break
            # within roundoff of a minimum only the gradient is informative
            if e_new <= e + 1e-14 * abs(e) and np.max(np.abs(g_new)) < np.max(np.abs(g)):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        u, e, g = u + t * step, e_new, g_new
        history.append(float(e))
    return u, e, g, it


def _escape_saddle(u, direction, e, beta, wall):
    step = 1e-2 * np.sqrt(len(u) / 2.0) * direction
    for _ in range(60):
        for trial in (u + step, u - step):
            if _scaled_energy(trial, beta, wall)[0] < e:
                return trial
        step *= 0.5
    return u + step


def minimize_equilibrium(seed, trap, tol=None, max_iter=DEFAULT_MAX_ITER):
    """Relax ``seed`` (m, shape (N, 2)) to a local minimum of the rotating-frame energy.

    BFGS with Wolfe line search brings the gradient down, then Newton steps on
    the analytic Hessian (with backtracking) finish the convergence.  ``tol`` is
    the bound on every Cartesian force component, in newtons; by default
    1e-9 of the Coulomb force unit.
    """
    seed = np.asarray(seed, dtype=float).reshape(-1, 2)
    _check_distinct(pairwise_distances(seed))
    if tol is None:
        tol = DEFAULT_RELATIVE_TOL * trap.force_scale
    if not tol > 0:
        raise ValueError("tol must be positive")
    L, beta, wall = trap.length_scale, trap.beta, trap.wall_strength
    stol = tol / trap.force_scale
    u0 = (seed / L).ravel()
    e0, _ = _scaled_energy_grad(u0, beta, wall)
    history = [float(e0)]
    n_iter = 0
    if len(seed) > 1:
        def record(intermediate_result):
            history.append(float(intermediate_result.fun))

        u = u0
        for _ in range(MAX_SADDLE_ESCAPES + 1):
            e_start = history[-1]
            res = scipy.optimize.minimize(
                _scaled_energy_grad, u, args=(beta, wall), jac=True, method="BFGS",
                callback=record, options={"gtol": max(stol, 1e-7),
                                          "maxiter": max(max_iter - n_iter, 1), "norm": np.inf})
            n_iter += int(res.nit)
            if res.fun <= e_start:
                u = res.x
            u, e, g, extra = _newton_polish(u, beta, wall, 1e-3 * stol, max_iter - n_iter,
                                            history)
            n_iter += extra
            # a symmetric seed can converge onto a saddle; step off along the
            # unstable direction and relax again
            w, V = np.linalg.eigh(_scaled_hessian(u, beta, wall))
            if w[0] >= -1e-9 * abs(w[-1]) or n_iter >= max_iter:
                break
            u = _escape_saddle(u, V[:, 0], e, beta, wall)
            history.append(float(_scaled_energy(u, beta, wall)[0]))
    else:
        u, e, g = _newton_polish(u0, beta, wall, 1e-3 * stol, max_iter, history)[:3]
    crystal = IonCrystal(
        positions=u.reshape(-1, 2) * L, trap=trap, potential_energy=float(e) * trap.energy_scale,
        gradient_norm=float(np.max(np.abs(g), initial=0.0)) * trap.force_scale, tol=tol,
        iterations=n_iter, energy_history=tuple(h * trap.energy_scale for h in history))
    if crystal.gradient_norm > tol:
        raise ConvergenceError(
            f"gradient {crystal.gradient_norm:.3g} N above tol {tol:.3g} N "
            f"after {n_iter} iterations", best=crystal)
    return crystal


def solve_crystal(n_ions, trap, tol=None, max_iter=DEFAULT_MAX_ITER):
    """Equilibrium crystal of ``n_ions`` seeded from the hexagonal-shell lattice."""
    return minimize_equilibrium(seed_for(n_ions, trap), trap, tol=tol, max_iter=max_iter)


def nearest_neighbor_spacing(crystal):
    """Median nearest-neighbor distance over the inner half of the crystal (d0)."""
    n = crystal.n_ions
    if n < 2:
        raise ValueError("nearest-neighbor spacing needs at least two ions")
    r = crystal.separations()
    np.fill_diagonal(r, np.inf)
    inner = np.argsort(crystal.radii, kind="stable")[: (n + 1) // 2]
    return float(np.median(r[inner].min(axis=1)))
