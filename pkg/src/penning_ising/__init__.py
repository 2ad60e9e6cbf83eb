"""Penning-trap 2D ion crystals, drumhead modes, engineered Ising couplings and spin-echo dynamics."""

__version__ = "0.1.0"

from .calibration import (BeamGeometry, StarkCoefficients, delta_k, f0_from_intensity,
                          gamma_from_intensity, lamb_dicke_parameter, lattice_wavelength,
                          stark_null_angle, stark_shift, tilt_modulation_index, z_rms_profile)
from .coupling import (CouplingMatrix, ODFDrive, PowerLawFit, coupling_matrix, detuning_sweep,
                       mean_coupling, power_law_fit, uniform_limit_chi)
from .crystal import (IonCrystal, TrapConfig, closed_shell_count, minimize_equilibrium,
                      nearest_neighbor_spacing, rotating_frame_energy, seed_lattice,
                      solve_crystal)
from .errors import (BracketError, CapacityError, ConfigurationError, ConvergenceError,
                     FitError, InstabilityError, PenningError, ResonanceError,
                     SignMixedError, SingularConfigurationError)
from .modes import (ModeSpectrum, normal_modes, plane_transition_scan, stiffness_matrix,
                    transverse_modes)
from .spins import (DickeState, SequenceParams, brute_force_sequence, dicke_jz2_phase,
                    dicke_rotation, exact_sequence_jz, mf_precession_probability,
                    mf_validity_bound, spin_motion_criterion)
