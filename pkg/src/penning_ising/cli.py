"""``penning-ising`` command line: each subcommand writes data files into ``--out``.

Errors are reported as one JSON object on stderr with a nonzero exit code.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, io
from .calibration import (delta_k, f0_from_intensity, gamma_from_intensity,
                          lamb_dicke_parameter, lattice_wavelength, single_ion_z_rms,
                          tilt_modulation_index, z_rms_profile)
from .config import ScenarioConfig
from .constants import TWO_PI
from .coupling import (ODFDrive, coupling_matrix, detuning_sweep, mean_coupling, pair_table,
                       power_law_fit)
from .crystal import nearest_neighbor_spacing, solve_crystal
from .errors import FitError, PenningError
from .modes import normal_modes
from .spins import (MAX_ORACLE_SPINS, brute_force_sequence, exact_precession_curve,
                    mf_precession_curve, mf_validity_bound, spin_motion_criterion)

EXIT_ERROR = 2
EXIT_CRITERIA_FAILED = 1


def _crystal(cfg, args):
    if getattr(args, "crystal", None):
        return io.load_crystal(args.crystal)
    return solve_crystal(cfg.n_ions, cfg.trap, tol=cfg.tol)


def _drive(cfg, omega_1, detuning=None):
    mu = omega_1 + (cfg.detuning if detuning is None else detuning)
    return ODFDrive(mu_R=mu, F0=f0_from_intensity(cfg.intensity, cfg.beam),
                    intensity=cfg.intensity, theta_R=cfg.beam.theta_R)


def _crystal_summary(crystal):
    out = {"n_ions": crystal.n_ions, "radius_m": crystal.radius,
           "energy_J": crystal.potential_energy, "gradient_norm_N": crystal.gradient_norm,
           "iterations": crystal.iterations}
    if crystal.n_ions >= 2:
        out["d0_m"] = nearest_neighbor_spacing(crystal)
    return out


def cmd_crystal(cfg, args, out, prov):
    crystal = solve_crystal(cfg.n_ions, cfg.trap, tol=cfg.tol)
    io.save_crystal(crystal, out, prov)
    return _crystal_summary(crystal)


def cmd_modes(cfg, args, out, prov):
    crystal = _crystal(cfg, args)
    spec = normal_modes(crystal)
    top_k = args.top_k if args.top_k is not None else cfg.top_k
    io.save_modes(spec, out, prov, top_k=top_k)
    f = spec.frequencies / TWO_PI
    return {"n_modes": spec.n_modes, "com_Hz": f[0], "lowest_Hz": f[-1], "top_k": top_k}


def cmd_couplings(cfg, args, out, prov):
    crystal = _crystal(cfg, args)
    spec = normal_modes(crystal)
    drive = _drive(cfg, spec.frequencies[0])
    J = coupling_matrix(spec, drive, guard=cfg.resonance_guard)
    io.save_pairs(out / "pairs.csv", *pair_table(J, crystal), prov)
    summary = {"detuning_Hz": io.hz(cfg.detuning), "F0_N": drive.F0,
               "Jbar_rad_s": mean_coupling(J), "Jbar_over_2pi_Hz": mean_coupling(J) / TWO_PI}
    try:
        summary["fit"] = io.fit_to_dict(power_law_fit(J, crystal))
    except FitError as exc:
        summary["fit"] = None
        summary["fit_error"] = str(exc)
    return summary


def cmd_sweep(cfg, args, out, prov):
    crystal = _crystal(cfg, args)
    spec = normal_modes(crystal)
    drive = _drive(cfg, spec.frequencies[0])
    rows = detuning_sweep(spec, crystal, drive, cfg.detunings, guard=cfg.resonance_guard,
                          threads=args.threads)
    io.save_sweep(out / "sweep.csv", rows, prov)
    write_pairs = args.pairs or cfg.write_pairs
    if write_pairs:
        for row in rows:
            J = coupling_matrix(spec, drive.detuned(spec.frequencies[0], row.detuning),
                                guard=cfg.resonance_guard)
            name = f"pairs_{io.fmt(io.hz(row.detuning))}Hz.csv"
            io.save_pairs(out / name, *pair_table(J, crystal), prov)
    return {"points": len(rows), "pairs_written": bool(write_pairs),
            "rows": [{"detuning_Hz": io.hz(r.detuning), "Jbar_per_IR2": r.jbar_per_ir2,
                      "exponent_a": r.exponent} for r in rows]}


def cmd_precess(cfg, args, out, prov):
    n, tau = cfg.n_spins, cfg.tau_arm
    theta = np.linspace(0.0, TWO_PI, cfg.theta_points)
    mf = mf_precession_curve(theta, cfg.J_bar, tau, cfg.Gamma)
    exact = exact_precession_curve(n, cfg.chi, tau, theta, cfg.Gamma)
    header = ["theta1_rad", "P_up_MF", "Jz_exact_normalized"]
    columns = [theta, mf, exact]
    if n <= MAX_ORACLE_SPINS:
        header.append("Jz_oracle_normalized")
        columns.append(np.array([brute_force_sequence(n, cfg.chi, tau, th, cfg.Gamma).jz
                                 / (n / 2.0) for th in theta]))
    io.write_csv(out / "precession.csv", header, zip(*columns), prov)
    gap = float(np.max(np.abs((2.0 * mf - 1.0) - exact)))
    return {"n_spins": n, "chi_rad_s": cfg.chi, "J_bar_rad_s": cfg.J_bar, "tau_arm_s": tau,
            "chi_2tau": cfg.chi * 2.0 * tau, "max_abs_gap_normalized_Jz": gap,
            "mf_validity_ratio": mf_validity_bound(n, cfg.chi, 2.0 * tau)}


def cmd_calibrate(cfg, args, out, prov):
    geom = cfg.beam
    crystal = _crystal(cfg, args)
    spec = normal_modes(crystal)
    drive = _drive(cfg, spec.frequencies[0])
    z = z_rms_profile(spec, cfg.temperature)
    center, edge = int(np.argmin(crystal.radii)), int(np.argmax(crystal.radii))
    z_single = single_ion_z_rms(cfg.trap.omega_z, cfg.trap.ion_mass, cfg.temperature)
    margins = spin_motion_criterion(spec, drive, cfg.temperature, sqrt_n=cfg.sqrt_n)
    report = {
        "delta_k_per_m": delta_k(geom), "lambda_R_m": lattice_wavelength(geom),
        "F0_N": drive.F0, "Gamma_per_s": gamma_from_intensity(cfg.intensity),
        "z_rms_center_m": float(z[center]), "z_rms_edge_m": float(z[edge]),
        "z_rms_single_ion_m": z_single,
        "eta_center": lamb_dicke_parameter(float(z[center]), geom),
        "eta_edge": lamb_dicke_parameter(float(z[edge]), geom),
        "eta_single_ion": lamb_dicke_parameter(z_single, geom),
        "tilt_index": tilt_modulation_index(geom, cfg.array_radius),
        "spin_motion": {"min_margin": margins.min_margin, "worst_mode": margins.worst_mode,
                        "satisfied": margins.satisfied, "sqrt_n": cfg.sqrt_n,
                        "margins": margins.margins},
        "provenance": prov,
    }
    io.write_json(out / "calibration.json", report)
    return {k: report[k] for k in ("lambda_R_m", "F0_N", "Gamma_per_s", "eta_center",
                                   "tilt_index")}


def cmd_validate(cfg, args, out, prov):
    only = set(args.only) if args.only else None
    results = acceptance.run_all(only=only, echo=print)
    payload = {"provenance": prov, "results": [
        {"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
        for r in results]}
    io.write_json(out / "acceptance.json", payload)
    failed = [r.number for r in results if not r.passed]
    return {"passed": len(results) - len(failed), "failed": failed}


COMMANDS = {"crystal": cmd_crystal, "modes": cmd_modes, "couplings": cmd_couplings,
            "sweep": cmd_sweep, "precess": cmd_precess, "calibrate": cmd_calibrate,
            "validate": cmd_validate}


def build_parser():
    parser = argparse.ArgumentParser(prog="penning-ising", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="YAML scenario file (defaults: N=217 benchmark)")
    parser.add_argument("--out", help="output directory (overrides output.directory)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name in ("modes", "couplings", "sweep", "calibrate"):
            p.add_argument("--crystal", help="reuse a crystal.json instead of solving")
        if name == "modes":
            p.add_argument("--top-k", type=int, default=None, dest="top_k")
        if name == "sweep":
            p.add_argument("--pairs", action="store_true", help="write per-detuning pair files")
        if name == "validate":
            p.add_argument("--only", type=int, nargs="+", help="criterion numbers to run")
    return parser


def _fail(exc):
    payload = exc.to_dict() if isinstance(exc, PenningError) else {
        "error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(io._clean(payload), sort_keys=True) + "\n")
    return EXIT_ERROR


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = ScenarioConfig.from_file(args.config) if args.config else ScenarioConfig.default()
        out = Path(args.out or cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        prov = io.provenance(args.command, cfg.source_text)
        summary = COMMANDS[args.command](cfg, args, out, prov)
    except (PenningError, ValueError, OSError) as exc:
        return _fail(exc)
    summary = {"command": args.command, "provenance": prov, **summary}
    io.write_json(out / f"{args.command}_summary.json", summary)
    print(json.dumps(io._clean(summary), sort_keys=True))
    if args.command == "validate" and summary["failed"]:
        return EXIT_CRITERIA_FAILED
    return 0


if __name__ == "__main__":
    sys.exit(main())
