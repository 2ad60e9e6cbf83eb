import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from penning_ising.config import ScenarioConfig
from penning_ising.constants import TWO_PI, parse_quantity
from penning_ising.errors import ConfigurationError
from penning_ising.io import (crystal_from_dict, crystal_to_dict, fmt, load_crystal,
                              provenance, read_csv, save_crystal, write_csv)


@pytest.mark.parametrize("text,kind,value", [
    ("795 kHz", "frequency", TWO_PI * 795e3), ("2 MHz", "frequency", TWO_PI * 2e6),
    ("10 rad/s", "frequency", 10.0), ("4.46 T", "field", 4.46), ("313 nm", "length", 313e-9),
    ("200 um", "length", 200e-6), ("4.8 deg", "angle", math.radians(4.8)),
    ("500 uK", "temperature", 5e-4), ("1 mK", "temperature", 1e-3),
    ("12.5 W_per_cm2", "intensity", 12.5), ("1e-3 s", "time", 1e-3), ("82 1/s", "rate", 82.0),
])
def test_parse_quantity(text, kind, value):
    assert parse_quantity(text, kind) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text,kind", [
    (4.46, "field"), ("4.46", "field"), ("4 furlongs", "length"), ("4 kHz", "length")])
def test_parse_quantity_rejects(text, kind):
    with pytest.raises(ConfigurationError):
        parse_quantity(text, kind)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_parse_quantity_round_trip(x):
    assert parse_quantity(f"{x!r} kHz", "frequency") == pytest.approx(TWO_PI * 1e3 * x)


def test_defaults_are_benchmark():
    cfg = ScenarioConfig.default()
    assert cfg.n_ions == 217
    assert cfg.trap.omega_z == pytest.approx(TWO_PI * 795e3)
    assert cfg.beam.theta_R == pytest.approx(math.radians(4.8))
    assert cfg.beam.phi_p_upper == pytest.approx(math.radians(65.3))
    assert cfg.detuning == pytest.approx(TWO_PI * 4e3)
    assert cfg.top_k == 14 and cfg.theta_points == 181


def test_sequence_chi_t():
    cfg = ScenarioConfig.from_text("sequence: {n_spins: 5, tau_arm: 2 ms, chi_t: 1.6}")
    assert cfg.chi * 2 * cfg.tau_arm == pytest.approx(1.6)
    assert cfg.J_bar == pytest.approx(cfg.chi * 4 / 5)


@pytest.mark.parametrize("text", [
    "traps: {}", "trap: {B: 4 T}", "trap: {B0: 4.46}", "trap: {omega_r: 1 kHz}",
    "crystal: {n_ions: 7, shells: 1}", "crystal: {n_ions: 0}", "beam: {intensity: -1 W_per_cm2}",
    "sequence: {chi: 1 Hz, chi_t: 0.2}", "drive: {temperature: 0 mK}", "- 1\n- 2",
    "sweep: {detunings: 4 kHz}",
])
def test_bad_configs_rejected(text):
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_text(text)


def test_fmt_is_round_trip():
    for x in (0.1, 1 / 3, 1e-300, 795000.0, -2.5e-17):
        assert float(fmt(x)) == x
    assert fmt(float("nan")) == "nan" and fmt(3) == "3" and fmt(True) == "true"


def test_csv_round_trip(tmp_path):
    prov = provenance("test", "a: 1")
    write_csv(tmp_path / "t.csv", ["a", "b"], [(1, 0.5), (2, float("nan"))], prov)
    got, header, data = read_csv(tmp_path / "t.csv")
    assert got == prov and header == ["a", "b"]
    assert data[0].tolist() == [1.0, 0.5] and math.isnan(data[1, 1])
    assert (tmp_path / "t.csv").read_text().startswith("# {")


def test_crystal_round_trip(tmp_path, crystal19):
    save_crystal(crystal19, tmp_path, provenance("crystal"))
    back = load_crystal(tmp_path / "crystal.json")
    assert np.array_equal(back.positions, crystal19.positions)
    assert back.trap == crystal19.trap
    assert back.potential_energy == crystal19.potential_energy
    data = json.loads((tmp_path / "crystal.json").read_text())
    assert data["provenance"]["command"] == "crystal"
    assert crystal_to_dict(crystal_from_dict(data))["positions_m"] == data["positions_m"]
