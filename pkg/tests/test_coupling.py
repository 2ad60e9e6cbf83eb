import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from penning_ising.calibration import BeamGeometry
from penning_ising.constants import HBAR, TWO_PI, khz
from penning_ising.coupling import (ODFDrive, coupling_matrix, detuning_sweep, mean_coupling,
                                    pair_table, power_law_fit, uniform_limit_chi)
from penning_ising.crystal import nearest_neighbor_spacing, pairwise_distances
from penning_ising.errors import ConfigurationError, FitError, ResonanceError, SignMixedError
from penning_ising.io import read_csv
from penning_ising.modes import stiffness_matrix

GOLDEN = Path(__file__).parent / "golden"


def _drive(spec, detuning, intensity=1.0, geometry=None):
    return ODFDrive.from_intensity(spec.frequencies[0] + detuning, intensity, geometry)


@pytest.mark.parametrize("detuning", [khz(-30.0), khz(2.0), khz(100.0), khz(3000.0)])
def test_matches_resolvent(spectrum19, crystal19, detuning):
    # sum_m b_im b_jm / (mu^2 - w_m^2) is the (i, j) entry of (mu^2 - K/M)^-1
    drive = _drive(spectrum19, detuning)
    trap = crystal19.trap
    green = np.linalg.inv(drive.mu_R**2 * np.eye(19) - stiffness_matrix(crystal19) / trap.ion_mass)
    expect = drive.F0**2 * 19 / (2 * HBAR * trap.ion_mass) * green
    np.fill_diagonal(expect, 0.0)
    J = coupling_matrix(spectrum19, drive).J
    assert np.allclose(J, expect, rtol=1e-8, atol=1e-12 * np.abs(expect).max())


def test_structure(spectrum19):
    J = coupling_matrix(spectrum19, _drive(spectrum19, khz(4.0))).J
    assert np.array_equal(J, J.T)
    assert np.all(np.diag(J) == 0)
    assert np.all(J[~np.eye(19, dtype=bool)] > 0)  # beat note above every mode


def test_just_below_com_flips_sign(spectrum19):
    drive = _drive(spectrum19, khz(-2.0))
    J = coupling_matrix(spectrum19, drive).J
    assert mean_coupling(J) < 0


def test_uniform_limit(spectrum127):
    drive = _drive(spectrum127, TWO_PI * 20.0)
    J = coupling_matrix(spectrum127, drive)
    chi = uniform_limit_chi(drive, spectrum127.frequencies[0])
    assert mean_coupling(J) == pytest.approx(chi * 126 / 127, rel=2e-3)
    off = J.J[~np.eye(127, dtype=bool)]
    assert np.ptp(off) / chi < 2e-2


def test_zero_force(spectrum19):
    J = coupling_matrix(spectrum19, ODFDrive(mu_R=spectrum19.frequencies[0] + 1e4, F0=0.0))
    assert not np.any(J.J)


def test_resonance_guard(spectrum19):
    with pytest.raises(ResonanceError) as info:
        coupling_matrix(spectrum19, ODFDrive(mu_R=spectrum19.frequencies[4] + 1.0, F0=1e-23))
    assert info.value.mode == 5
    with pytest.raises(ResonanceError):
        uniform_limit_chi(ODFDrive(mu_R=1.0e6, F0=1e-23), 1.0e6)


def test_drive_validation():
    with pytest.raises(ConfigurationError):
        ODFDrive(mu_R=-1.0, F0=1e-23)
    with pytest.raises(ConfigurationError):
        ODFDrive(mu_R=1.0, F0=-1e-23)


def test_force_scales_with_intensity(spectrum19):
    a = coupling_matrix(spectrum19, _drive(spectrum19, khz(4.0), 1.0)).J
    b = coupling_matrix(spectrum19, _drive(spectrum19, khz(4.0), 3.0)).J
    assert np.allclose(b, 9.0 * a, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.floats(-5, 5))
def test_mean_of_uniform_matrix(n, c):
    J = np.full((n, n), c)
    np.fill_diagonal(J, 0.0)
    assert mean_coupling(J) == pytest.approx(c * (n - 1) / n, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 3.5), st.sampled_from([1, -1]))
def test_fit_recovers_exact_power_law(crystal127, a, sign):
    d = pairwise_distances(crystal127.positions)
    d0 = nearest_neighbor_spacing(crystal127)
    with np.errstate(divide="ignore"):
        J = sign * 7.0 * (d0 / d) ** a
    np.fill_diagonal(J, 0.0)
    fit = power_law_fit(J, crystal127)
    assert fit.exponent == pytest.approx(a, abs=1e-9)
    assert fit.prefactor == pytest.approx(7.0, rel=1e-9)
    assert fit.sign == sign and fit.rms_residual < 1e-9


def test_fit_rejects_sign_mixed(crystal127):
    d = pairwise_distances(crystal127.positions)
    J = np.cos(d / 20e-6)
    np.fill_diagonal(J, 0.0)
    with pytest.raises(SignMixedError):
        power_law_fit(J, crystal127)


def test_fit_needs_enough_bins(spectrum19, crystal19):
    J = coupling_matrix(spectrum19, _drive(spectrum19, khz(4.0)))
    with pytest.raises(FitError):
        power_law_fit(J, crystal19)
    # a wider range gives the 19-ion crystal enough bins
    fit = power_law_fit(J, crystal19, r_fit=2.0 * crystal19.radius)
    assert 0.0 < fit.exponent < 1.0


def test_pair_table(spectrum19, crystal19):
    J = coupling_matrix(spectrum19, _drive(spectrum19, khz(4.0)))
    i, j, d, v = pair_table(J, crystal19)
    assert len(i) == 19 * 18 // 2 and np.all(i < j)
    assert np.allclose(d, np.linalg.norm(crystal19.positions[i] - crystal19.positions[j], axis=1))
    assert np.array_equal(v, J.J[i, j])


def test_one_point_sweep_equals_direct_call(spectrum127, crystal127):
    drive = _drive(spectrum127, 0.0 + khz(4.0))
    (row,) = detuning_sweep(spectrum127, crystal127, drive, [khz(4.0)])
    J = coupling_matrix(spectrum127, drive)
    assert row.mean_coupling == mean_coupling(J)
    assert row.exponent == power_law_fit(J, crystal127).exponent


def test_threaded_sweep_matches_serial(spectrum127, crystal127):
    drive = _drive(spectrum127, khz(4.0))
    grid = [khz(f) for f in (0.5, 4.0, 100.0, 2000.0)]
    serial = detuning_sweep(spectrum127, crystal127, drive, grid)
    threaded = detuning_sweep(spectrum127, crystal127, drive, grid, threads=3)
    assert [r.exponent for r in serial] == [r.exponent for r in threaded]
    assert [r.detuning for r in threaded] == grid


def test_sweep_golden_and_monotone(spectrum127, crystal127):
    _, header, data = read_csv(GOLDEN / "sweep_n127.csv")
    assert header == ["detuning_Hz", "Jbar_per_IR2", "exponent_a"]
    drive = _drive(spectrum127, khz(4.0))
    rows = detuning_sweep(spectrum127, crystal127, drive, TWO_PI * data[:, 0])
    assert np.allclose([r.jbar_per_ir2 for r in rows], data[:, 1], rtol=1e-8)
    assert np.allclose([r.exponent for r in rows], data[:, 2], rtol=1e-8)
    assert np.all(np.diff(data[:, 2]) > 0)
    assert data[0, 2] < 0.1 and 2.5 <= data[-1, 2] <= 3.0


def test_sweep_normalizes_by_intensity(spectrum127, crystal127):
    one = detuning_sweep(spectrum127, crystal127, _drive(spectrum127, 0.0, 1.0), [khz(4.0)])
    two = detuning_sweep(spectrum127, crystal127, _drive(spectrum127, 0.0, 2.0), [khz(4.0)])
    assert two[0].jbar_per_ir2 == pytest.approx(one[0].jbar_per_ir2, rel=1e-12)
    assert two[0].mean_coupling == pytest.approx(4 * one[0].mean_coupling, rel=1e-12)


def test_wider_beams_shorten_range(spectrum127, crystal127):
    narrow = power_law_fit(coupling_matrix(spectrum127, _drive(spectrum127, khz(100.0))),
                           crystal127)
    wide = power_law_fit(coupling_matrix(spectrum127, _drive(
        spectrum127, khz(100.0), 12.5, BeamGeometry(theta_R=math.radians(35.0)))), crystal127)
    assert wide.exponent == pytest.approx(narrow.exponent, rel=1e-9)
    assert wide.prefactor > 100 * narrow.prefactor
