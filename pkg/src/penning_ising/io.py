"""File formats: provenance-headed CSV and JSON for crystals, modes, couplings and sweeps.

Every CSV starts with one ``#``-prefixed JSON provenance line.  Floats are
written with ``repr`` (shortest round-trip form) so reruns are byte-identical.
"""

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from .constants import TWO_PI
from .crystal import IonCrystal, TrapConfig

def _version():
    from . import __version__
    return __version__


def hz(omega):
    """Angular frequency to Hz, rounded to the micro-hertz to hide 2 pi roundoff."""
    return round(float(omega) / TWO_PI, 6)


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def config_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def provenance(command, config_text=""):
    return {"command": command, "config_sha256": config_hash(config_text),
            "package": "penning_ising", "version": _version()}


def write_csv(path, header, rows, prov):
    buf = io.StringIO()
    buf.write("# " + json.dumps(prov, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def read_csv(path):
    """Return (provenance dict, header list, float array of rows)."""
    lines = Path(path).read_text().splitlines()
    prov = json.loads(lines[0][1:]) if lines and lines[0].startswith("#") else {}
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.reader(body))
    header, data = rows[0], rows[1:]
    return prov, header, np.array([[float(v) for v in r] for r in data], dtype=float).reshape(
        len(data), len(header))


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if not math.isfinite(x) else x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload):
    Path(path).write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n")


def crystal_to_dict(crystal, prov=None):
    out = {
        "trap": crystal.trap.to_dict(),
        "positions_m": crystal.positions.tolist(),
        "energy_J": crystal.potential_energy,
        "gradient_norm_N": crystal.gradient_norm,
        "tol_N": crystal.tol,
        "iterations": crystal.iterations,
        "seed_orientation_rad": crystal.seed_orientation,
    }
    if prov is not None:
        out["provenance"] = prov
    return out


def crystal_from_dict(data):
    trap = TrapConfig(**data["trap"])
    return IonCrystal(
        positions=np.array(data["positions_m"], dtype=float).reshape(-1, 2), trap=trap,
        potential_energy=float(data["energy_J"]), gradient_norm=float(data["gradient_norm_N"]),
        tol=float(data.get("tol_N", data["gradient_norm_N"])),
        iterations=int(data.get("iterations", 0)),
        seed_orientation=float(data.get("seed_orientation_rad", 0.0)))


def save_crystal(crystal, directory, prov):
    directory = Path(directory)
    write_json(directory / "crystal.json", crystal_to_dict(crystal, prov))
    write_csv(directory / "crystal.csv", ["ion", "x_m", "y_m"],
              [(i, x, y) for i, (x, y) in enumerate(crystal.positions)], prov)


def load_crystal(path):
    return crystal_from_dict(json.loads(Path(path).read_text()))


def save_modes(spectrum, directory, prov, top_k=14):
    directory = Path(directory)
    w = spectrum.frequencies
    write_csv(directory / "modes.csv", ["m", "omega_over_2pi_Hz"],
              [(m + 1, w[m] / TWO_PI) for m in range(len(w))], prov)
    write_json(directory / "mode_matrix.json", {
        "provenance": prov, "layout": "b[i][m], ion i, mode m (0-based, m=0 is COM)",
        "omega_over_2pi_Hz": (w / TWO_PI).tolist(), "b": spectrum.mode_matrix.tolist()})
    k = min(top_k, len(w))
    pos = spectrum.crystal.positions
    header = ["ion", "x_m", "y_m"] + [f"b_{m + 1}" for m in range(k)]
    write_csv(directory / "top_modes.csv", header,
              [(i, pos[i, 0], pos[i, 1], *spectrum.mode_matrix[i, :k]) for i in range(len(w))],
              prov)


def save_pairs(path, i, j, d, J, prov):
    write_csv(path, ["i", "j", "d_m", "J_rad_s"], zip(i, j, d, J), prov)


def save_sweep(path, rows, prov):
    write_csv(path, ["detuning_Hz", "Jbar_per_IR2", "exponent_a"],
              [(hz(r.detuning), r.jbar_per_ir2, r.exponent) for r in rows], prov)


def fit_to_dict(fit):
    if fit is None:
        return None
    return {"exponent_a": fit.exponent, "prefactor_rad_s": fit.prefactor,
            "rms_log_residual": fit.rms_residual, "n_bins": fit.n_bins, "sign": fit.sign,
            "d0_m": fit.d0, "r_fit_m": fit.r_fit}
