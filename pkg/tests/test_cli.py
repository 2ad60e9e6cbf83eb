import json
import subprocess
import sys

import numpy as np
import pytest

from penning_ising.cli import main
from penning_ising.constants import TWO_PI
from penning_ising.io import read_csv


def run(tmp_path, config, *args, name="out"):
    cfg = tmp_path / f"{name}.yaml"
    cfg.write_text(config)
    out = tmp_path / name
    code = main(["--config", str(cfg), "--out", str(out), *args])
    return code, out


def test_single_ion_crystal_and_modes(tmp_path):
    code, out = run(tmp_path, "crystal: {shells: 0}\n", "crystal")
    assert code == 0
    _, header, data = read_csv(out / "crystal.csv")
    assert header == ["ion", "x_m", "y_m"] and data.tolist() == [[0.0, 0.0, 0.0]]
    code, out = run(tmp_path, "crystal: {shells: 0}\n", "modes")
    _, _, modes = read_csv(out / "modes.csv")
    assert code == 0 and modes.shape == (1, 2) and modes[0, 1] == pytest.approx(795e3, rel=1e-14)


def test_outputs_are_byte_identical(tmp_path):
    config = "crystal: {shells: 2}\n"
    run(tmp_path, config, "crystal", name="a")
    run(tmp_path, config, "crystal", name="b")
    for f in ("crystal.csv", "crystal.json", "crystal_summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_every_csv_has_provenance(tmp_path):
    config = "crystal: {shells: 2}\nsequence: {n_spins: 3, chi_t: 0.5}\n"
    for cmd in ("crystal", "modes", "couplings", "precess"):
        assert run(tmp_path, config, cmd)[0] == 0
    out = tmp_path / "out"
    csvs = sorted(out.glob("*.csv"))
    assert {p.name for p in csvs} >= {"crystal.csv", "modes.csv", "top_modes.csv",
                                      "pairs.csv", "precession.csv"}
    for path in csvs:
        prov = json.loads(path.read_text().splitlines()[0][1:])
        assert prov["version"] == "0.1.0" and len(prov["config_sha256"]) == 64


def test_modes_from_saved_crystal(tmp_path):
    config = "crystal: {shells: 2}\nmodes: {top_k: 3}\n"
    run(tmp_path, config, "crystal")
    code, out = run(tmp_path, config, "modes", "--crystal", str(tmp_path / "out" / "crystal.json"))
    assert code == 0
    _, header, data = read_csv(out / "top_modes.csv")
    assert header == ["ion", "x_m", "y_m", "b_1", "b_2", "b_3"]
    assert np.allclose(data[:, 3], 1 / np.sqrt(19))


def test_unstable_modes_exit_nonzero(tmp_path, capsys):
    code, _ = run(tmp_path, "crystal: {shells: 2}\ntrap: {omega_r: 62 kHz}\n", "modes")
    assert code != 0
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "InstabilityError" and err["unstable_modes"] >= 1


def test_bad_config_exit_nonzero(tmp_path, capsys):
    code, _ = run(tmp_path, "trap: {B0: 4.46}\n", "crystal")
    assert code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigurationError"


def test_precess_flat_without_interactions(tmp_path):
    code, out = run(tmp_path, "sequence: {n_spins: 4}\n", "precess")
    _, header, data = read_csv(out / "precession.csv")
    assert header == ["theta1_rad", "P_up_MF", "Jz_exact_normalized", "Jz_oracle_normalized"]
    assert data.shape == (181, 4)
    assert np.all(data[:, 1] == 0.5)
    assert data[0, 0] == 0.0 and data[-1, 0] == pytest.approx(TWO_PI)


@pytest.mark.parametrize("n,chi_t,check", [
    (5, 1.6, lambda gap: gap > 0.05), (100, 0.2, lambda gap: gap < 0.01)])
def test_precess_gap(tmp_path, n, chi_t, check):
    code, out = run(tmp_path, f"sequence: {{n_spins: {n}, chi_t: {chi_t}}}\n", "precess")
    _, header, data = read_csv(out / "precession.csv")
    gap = np.max(np.abs((2 * data[:, 1] - 1) - data[:, 2]))
    assert check(gap)
    assert ("Jz_oracle_normalized" in header) == (n <= 12)
    if n <= 12:
        assert np.allclose(data[:, 2], data[:, 3], atol=1e-10)


def test_sweep_and_pairs(tmp_path):
    config = "crystal: {shells: 6}\nsweep: {detunings: [4 kHz, 2 MHz]}\n"
    code, out = run(tmp_path, config, "sweep", "--pairs")
    assert code == 0
    _, header, data = read_csv(out / "sweep.csv")
    assert data[:, 0].tolist() == [4000.0, 2e6]
    assert (out / "pairs_4000.0Hz.csv").exists() and (out / "pairs_2000000.0Hz.csv").exists()
    _, _, pairs = read_csv(out / "pairs_4000.0Hz.csv")
    assert len(pairs) == 127 * 126 // 2
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert summary["rows"][0]["exponent_a"] == data[0, 2]


def test_calibrate_report(tmp_path):
    code, out = run(tmp_path, "crystal: {shells: 2}\nbeam: {theta_err: 0.05 deg}\n", "calibrate")
    assert code == 0
    report = json.loads((out / "calibration.json").read_text())
    assert report["lambda_R_m"] == pytest.approx(3.7e-6, rel=0.02)
    assert report["Gamma_per_s"] == 82.0
    assert report["tilt_index"] == pytest.approx(0.6, rel=0.05)
    assert len(report["spin_motion"]["margins"]) == 19


def test_validate_subset(tmp_path, capsys):
    code, out = run(tmp_path, "", "validate", "--only", "1", "12")
    assert code == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("[")]
    assert len(lines) == 2 and all(ln.startswith("[PASS]") for ln in lines)
    assert len(json.loads((out / "acceptance.json").read_text())["results"]) == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "penning_ising.cli", "--out", str(tmp_path),
                           "validate", "--only", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and "[PASS]  1." in proc.stdout
