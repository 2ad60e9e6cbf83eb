"""Scenario configuration: one YAML file with explicit unit suffixes.

Every dimensional value is a string such as ``"795 kHz"`` or ``"1 mK"``.
Unknown sections or keys are rejected so typos cannot silently fall back to
defaults.  Example::

    trap:
      B0: 4.46 T
      omega_z: 795 kHz
      omega_r: 45.6 kHz
    crystal:
      shells: 8
    beam:
      theta_R: 4.8 deg
      intensity: 1 W_per_cm2
    drive:
      detuning: 4 kHz
    sweep:
      detunings: [0.5 kHz, 1 kHz, 4 kHz, 2 MHz]
"""

import math
from dataclasses import dataclass, field

import yaml

from .calibration import BeamGeometry
from .constants import TWO_PI, parse_quantity
from .crystal import TrapConfig, closed_shell_count
from .errors import ConfigurationError

# section -> key -> (kind, default); kind None means a plain number/bool/list
_SCHEMA = {
    "trap": {
        "B0": ("field", "4.46 T"),
        "omega_z": ("frequency", "795 kHz"),
        "omega_r": ("frequency", "45.6 kHz"),
        "wall_strength": (None, 1e-3),
        "ion_mass": ("mass", None),
    },
    "crystal": {
        "n_ions": (None, None),
        "shells": (None, None),
        "tol": ("force", None),
    },
    "modes": {"top_k": (None, 14)},
    "beam": {
        "wavelength": ("length", "313 nm"),
        "theta_R": ("angle", "4.8 deg"),
        "theta_err": ("angle", "0 deg"),
        "phi_p": ("angle", "65.3 deg"),
        "intensity": ("intensity", "1 W_per_cm2"),
    },
    "drive": {
        "detuning": ("frequency", "4 kHz"),
        "resonance_guard": ("frequency", "10 Hz"),
        "temperature": ("temperature", "1 mK"),
        "sqrt_n": (None, False),
    },
    "sweep": {
        "detunings": ("frequency[]", ["0.5 kHz", "1 kHz", "2 kHz", "4 kHz", "10 kHz",
                                      "30 kHz", "100 kHz", "300 kHz", "1 MHz", "2 MHz",
                                      "5 MHz"]),
        "write_pairs": (None, False),
    },
    "sequence": {
        "n_spins": (None, 5),
        "tau_arm": ("time", "1 ms"),
        "chi": ("frequency", None),
        "chi_t": (None, None),
        "J_bar": ("frequency", None),
        "Gamma": ("rate", "0 1/s"),
        "theta_points": (None, 181),
    },
    "calibrate": {"array_radius": ("length", "200 um")},
    "output": {"directory": (None, "out")},
}


def _parse(section, key, kind, raw):
    where = f"{section}.{key}"
    if raw is None or kind is None:
        return raw
    try:
        if kind.endswith("[]"):
            if not isinstance(raw, (list, tuple)):
                raise ConfigurationError(f"{where} must be a list")
            return [parse_quantity(v, kind[:-2]) for v in raw]
        return parse_quantity(raw, kind)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{where}: {exc}") from None


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario in SI units (frequencies angular, intensity in W/cm^2)."""

    trap: TrapConfig
    n_ions: int
    tol: float
    top_k: int
    beam: BeamGeometry
    intensity: float
    detuning: float
    resonance_guard: float
    temperature: float
    sqrt_n: bool
    detunings: tuple
    write_pairs: bool
    n_spins: int
    tau_arm: float
    chi: float
    J_bar: float
    Gamma: float
    theta_points: int
    array_radius: float
    output_dir: str
    source_text: str = field(default="", repr=False, compare=False)

    @classmethod
    def from_text(cls, text):
        data = yaml.safe_load(text) if text.strip() else {}
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigurationError("config root must be a mapping")
        unknown = sorted(set(data) - set(_SCHEMA))
        if unknown:
            raise ConfigurationError(f"unknown config section(s): {', '.join(unknown)}")
        v = {}
        for section, keys in _SCHEMA.items():
            given = data.get(section) or {}
            if not isinstance(given, dict):
                raise ConfigurationError(f"section {section!r} must be a mapping")
            extra = sorted(set(given) - set(keys))
            if extra:
                raise ConfigurationError(f"unknown key(s) in {section}: {', '.join(extra)}")
            for key, (kind, default) in keys.items():
                v[(section, key)] = _parse(section, key, kind, given.get(key, default))
        return cls._build(v, text)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @classmethod
    def default(cls):
        return cls.from_text("")

    @classmethod
    def _build(cls, v, text):
        trap_kwargs = {k: v[("trap", k)] for k in ("B0", "omega_z", "omega_r", "wall_strength")}
        if v[("trap", "ion_mass")] is not None:
            trap_kwargs["ion_mass"] = v[("trap", "ion_mass")]
        trap = TrapConfig(**trap_kwargs)

        n_ions, shells = v[("crystal", "n_ions")], v[("crystal", "shells")]
        if n_ions is not None and shells is not None:
            raise ConfigurationError("give crystal.n_ions or crystal.shells, not both")
        if n_ions is None:
            n_ions = closed_shell_count(8 if shells is None else int(shells))
        if int(n_ions) != n_ions or n_ions < 1:
            raise ConfigurationError("crystal.n_ions must be a positive integer")

        phi = v[("beam", "phi_p")]
        beam = BeamGeometry(wavelength=v[("beam", "wavelength")], theta_R=v[("beam", "theta_R")],
                            theta_err=v[("beam", "theta_err")], phi_p_upper=phi,
                            phi_p_lower=-phi)
        intensity = v[("beam", "intensity")]
        if intensity < 0:
            raise ConfigurationError("beam.intensity must be >= 0")

        n_spins = int(v[("sequence", "n_spins")])
        tau = v[("sequence", "tau_arm")]
        chi, chi_t = v[("sequence", "chi")], v[("sequence", "chi_t")]
        if chi is not None and chi_t is not None:
            raise ConfigurationError("give sequence.chi or sequence.chi_t, not both")
        if chi_t is not None:
            if not tau > 0:
                raise ConfigurationError("sequence.chi_t needs tau_arm > 0")
            chi = float(chi_t) / (2.0 * tau)
        chi = 0.0 if chi is None else chi
        J_bar = v[("sequence", "J_bar")]
        if J_bar is None:
            J_bar = chi * (n_spins - 1) / n_spins

        temperature = v[("drive", "temperature")]
        if not temperature > 0:
            raise ConfigurationError("drive.temperature must be positive")
        points = int(v[("sequence", "theta_points")])
        if points < 2:
            raise ConfigurationError("sequence.theta_points must be >= 2")

        return cls(
            trap=trap, n_ions=int(n_ions), tol=v[("crystal", "tol")],
            top_k=int(v[("modes", "top_k")]), beam=beam, intensity=intensity,
            detuning=v[("drive", "detuning")], resonance_guard=v[("drive", "resonance_guard")],
            temperature=temperature, sqrt_n=bool(v[("drive", "sqrt_n")]),
            detunings=tuple(v[("sweep", "detunings")]),
            write_pairs=bool(v[("sweep", "write_pairs")]), n_spins=n_spins, tau_arm=tau,
            chi=chi, J_bar=J_bar, Gamma=v[("sequence", "Gamma")], theta_points=points,
            array_radius=v[("calibrate", "array_radius")],
            output_dir=str(v[("output", "directory")]), source_text=text)

    def summary(self):
        """Human-readable echo of the parsed values in lab units."""
        return {
            "trap": {"B0_T": self.trap.B0, "omega_z_kHz": self.trap.omega_z / TWO_PI / 1e3,
                     "omega_r_kHz": self.trap.omega_r / TWO_PI / 1e3,
                     "wall_strength": self.trap.wall_strength, "beta": self.trap.beta},
            "n_ions": self.n_ions,
            "theta_R_deg": math.degrees(self.beam.theta_R),
            "intensity_W_per_cm2": self.intensity,
            "detuning_kHz": self.detuning / TWO_PI / 1e3,
        }

