"""Acceptance checks for the benchmark scenario, one function per criterion.

Each check returns a :class:`CriterionResult`; :func:`run_all` runs them in
order.  The N=217 crystal and its spectrum are solved once and cached.
"""

import dataclasses
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .calibration import (BeamGeometry, gamma_from_intensity, lamb_dicke_parameter,
                          lattice_wavelength, single_ion_z_rms, tilt_modulation_index,
                          z_rms_profile)
from .constants import TWO_PI, khz
from .coupling import ODFDrive, coupling_matrix, detuning_sweep, mean_coupling, power_law_fit
from .crystal import TrapConfig, closed_shell_count, nearest_neighbor_spacing, solve_crystal
from .modes import normal_modes, plane_transition_scan
from .spins import (SequenceParams, brute_force_sequence, exact_precession_curve,
                    exact_sequence_jz, mf_precession_curve, mf_precession_probability)

BENCHMARK_N = 217
SWEEP_DETUNINGS_HZ = (250.0, 500.0, 1e3, 2e3, 4e3, 1e4, 3e4, 1e5, 3e5, 1e6, 2e6, 5e6)
THETA_GRID = np.linspace(0.0, TWO_PI, 181)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title}: {self.detail}"


def within(value, target, rel):
    return abs(value - target) <= rel * abs(target)


@lru_cache(maxsize=None)
def benchmark_crystal(n_ions=BENCHMARK_N):
    return solve_crystal(n_ions, TrapConfig())


@lru_cache(maxsize=None)
def benchmark_spectrum(n_ions=BENCHMARK_N):
    return normal_modes(benchmark_crystal(n_ions))


def criterion_1():
    got = [closed_shell_count(s) for s in (2, 6, 8)]
    return CriterionResult(1, "shell magic numbers", got == [19, 127, 217], f"s=2,6,8 -> {got}")


def criterion_2():
    worst_f, worst_v = 0.0, 0.0
    for n in (7, 19, 127, 217):
        spec = benchmark_spectrum(n)
        w1 = spec.frequencies[0]
        worst_f = max(worst_f, abs(w1 / spec.crystal.trap.omega_z - 1.0))
        v = spec.mode_matrix[:, 0]
        worst_v = max(worst_v, float(np.max(np.abs(v - 1.0 / math.sqrt(n)))))
    ok = worst_f <= 1e-9 and worst_v <= 1e-8
    return CriterionResult(2, "COM mode invariant", ok,
                           f"max rel freq err {worst_f:.2e}, max eigvec dev {worst_v:.2e}")


def criterion_3():
    low = benchmark_spectrum().frequencies[-1] / TWO_PI
    ok = 190e3 <= low <= 235e3
    return CriterionResult(3, "mode band edge", ok, f"lowest mode {low / 1e3:.2f} kHz in [190, 235]")


def criterion_4():
    res = plane_transition_scan(BENCHMARK_N, TrapConfig(), (khz(44.0), khz(48.0)))
    got = res.omega_r / TWO_PI
    ok = within(got, 46.1e3, 0.05)
    return CriterionResult(4, "plane transition", ok,
                           f"critical omega_r {got / 1e3:.3f} kHz vs 46.1 +-5% "
                           f"({res.evaluations} evaluations)")


def criterion_5():
    d0 = nearest_neighbor_spacing(benchmark_crystal())
    return CriterionResult(5, "lattice constant", within(d0, 20e-6, 0.15),
                           f"d0 {d0 * 1e6:.2f} um vs 20 +-15%")


def criterion_6(detunings_hz=SWEEP_DETUNINGS_HZ):
    spec = benchmark_spectrum()
    drive = ODFDrive.from_intensity(spec.frequencies[0] + 1.0, 1.0)
    rows = detuning_sweep(spec, spec.crystal, drive, [TWO_PI * f for f in detunings_hz])
    a = np.array([r.exponent for r in rows])
    f = np.asarray(detunings_hz)
    low_ok = bool(np.all(a[f <= 1e3] <= 0.1))
    high_ok = bool(np.all((a[f >= 2e6] >= 2.5) & (a[f >= 2e6] <= 3.0)))
    mono = bool(np.all(np.isfinite(a)) and np.all(np.diff(a) >= 0))
    table = ", ".join(f"{x / 1e3:g}kHz:{y:.3f}" for x, y in zip(f, a))
    return CriterionResult(6, "power-law limits", low_ok and high_ok and mono,
                           f"low<=0.1 {low_ok}, high in [2.5,3] {high_ok}, monotone {mono}; {table}")


def criterion_7():
    spec = benchmark_spectrum()
    drive = ODFDrive.from_intensity(spec.frequencies[0] + khz(4.0), 1.0)
    jbar = mean_coupling(coupling_matrix(spec, drive)) / TWO_PI
    return CriterionResult(7, "benchmark mean coupling", within(jbar, 25.0, 0.30),
                           f"Jbar/I^2 = 2pi x {jbar:.2f} Hz W^-2 cm^4 vs 25 +-30%")


def criterion_8():
    spec = benchmark_spectrum()
    geom = BeamGeometry(theta_R=math.radians(35.0))
    drive = ODFDrive.from_intensity(spec.frequencies[0] + khz(100.0), 12.5, geom)
    fit = power_law_fit(coupling_matrix(spec, drive), spec.crystal)
    pref = fit.prefactor / (TWO_PI * spec.n_modes)
    ok = within(fit.exponent, 1.7, 0.2 / 1.7) and within(pref, 560.0, 0.25)
    return CriterionResult(8, "short-range projection", ok,
                           f"a {fit.exponent:.3f} vs 1.7+-0.2, J(d0)/(2pi N) {pref:.1f} Hz "
                           f"vs 560 +-25%")


def precession_gap(n_spins, chi_t, theta=THETA_GRID):
    """Max |normalized <J_z>| difference between mean field and exact Dicke evolution.

    The arm length is 1 s, so chi = chi_t / 2 and the mean-field J_bar is
    chi (N - 1) / N.
    """
    tau, chi = 1.0, chi_t / 2.0
    mf = 2.0 * mf_precession_curve(theta, chi * (n_spins - 1) / n_spins, tau) - 1.0
    exact = exact_precession_curve(n_spins, chi, tau, theta)
    return float(np.max(np.abs(mf - exact)))


def criterion_9():
    g100_02 = precession_gap(100, 0.2)
    g100_08 = precession_gap(100, 0.8)
    g5, g50, g100 = (precession_gap(n, 1.6) for n in (5, 50, 100))
    ok = g100_02 < 0.01 and g100_08 < 0.03 and g5 > 0.05 and g5 > g50 > g100
    return CriterionResult(9, "mean field vs exact", ok,
                           f"N=100: {g100_02:.4f} (0.2), {g100_08:.4f} (0.8); chi2tau=1.6: "
                           f"N=5 {g5:.4f}, N=50 {g50:.4f}, N=100 {g100:.4f}")


def criterion_10(seed=20240611, draws=20):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in range(2, 9):
        for _ in range(draws):
            theta = rng.uniform(0.0, TWO_PI)
            chi_t = rng.uniform(-3.0, 3.0)
            dicke = exact_sequence_jz(n, chi_t, 1.0, theta)
            oracle = brute_force_sequence(n, chi_t, 1.0, theta).jz
            worst = max(worst, abs(dicke - oracle) / (n / 2.0))
    return CriterionResult(10, "oracle equivalence", worst <= 1e-10,
                           f"max |<Jz>/J| difference {worst:.2e} over N=2..8")


def criterion_11():
    geom = BeamGeometry()
    lam = lattice_wavelength(geom)
    eta_single = lamb_dicke_parameter(single_ion_z_rms(TrapConfig().omega_z,
                                                       TrapConfig().ion_mass, 1e-3), geom)
    z = z_rms_profile(benchmark_spectrum(), 1e-3)
    eta_center = lamb_dicke_parameter(float(z[np.argmin(benchmark_crystal().radii)]), geom)
    tilt = tilt_modulation_index(dataclasses.replace(geom, theta_err=math.radians(0.05)), 200e-6)
    gamma = gamma_from_intensity(1.0)
    checks = [within(lam, 3.7e-6, 0.02), within(eta_single, 0.32, 0.05),
              within(eta_center, 0.89, 0.10), within(tilt, 0.6, 0.05), gamma == 82.0]
    return CriterionResult(11, "calibration numbers", all(checks),
                           f"lambda_R {lam * 1e6:.4f} um, eta single {eta_single:.4f}, "
                           f"eta center {eta_center:.4f}, tilt {tilt:.4f}, Gamma {gamma:g} 1/s")


def criterion_12():
    thetas = np.linspace(-TWO_PI, TWO_PI, 41)
    in_range, antisym, fixed = True, 0.0, 0.0
    for th in thetas:
        for jt in np.linspace(-5.0, 5.0, 11):
            for gt in (0.0, 0.1, 1.0, 10.0):
                p = mf_precession_probability(SequenceParams(th, 1.0, J_bar=jt, Gamma=gt))
                in_range &= 0.0 <= p <= 1.0
            p0 = mf_precession_probability(SequenceParams(th, 1.0, J_bar=jt))
            pm = mf_precession_probability(SequenceParams(-th, 1.0, J_bar=jt))
            antisym = max(antisym, abs(pm - (1.0 - p0)))
            for th_fixed in (0.0, math.pi / 2.0):
                fixed = max(fixed, abs(mf_precession_probability(
                    SequenceParams(th_fixed, 1.0, J_bar=jt)) - 0.5))
    ok = in_range and antisym <= 1e-12 and fixed == 0.0
    return CriterionResult(12, "mean-field formula properties", ok,
                           f"in [0,1] {in_range}, antisymmetry err {antisym:.1e}, "
                           f"fixed-point err {fixed:.1e}")


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


def run_all(only=None, echo=None):
    results = []
    for number, check in CRITERIA.items():
        if only and number not in only:
            continue
        result = check()
        if echo is not None:
            echo(result.line())
        results.append(result)
    return results
