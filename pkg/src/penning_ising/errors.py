"""Exception hierarchy shared by every module of the package."""


class PenningError(Exception):
    """Base class for all errors raised by penning_ising."""

    def to_dict(self):
        payload = {"error": type(self).__name__, "message": str(self)}
        payload.update(getattr(self, "details", {}))
        return payload


class ConfigurationError(PenningError, ValueError):
    """Invalid trap, beam or scenario parameters."""


class SingularConfigurationError(PenningError, ValueError):
    """Two or more ions occupy the same position."""


class ConvergenceError(PenningError):
    """The equilibrium search hit its iteration cap.

    ``best`` holds the lowest-energy :class:`~penning_ising.crystal.IonCrystal`
    reached before giving up.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
        self.details = {}
        if best is not None:
            self.details = {"gradient_norm_N": best.gradient_norm,
                            "energy_J": best.potential_energy}


class InstabilityError(PenningError):
    """Some transverse eigenvalues are negative; the crystal is not a stable single plane."""

    def __init__(self, n_unstable, min_eigenvalue):
        super().__init__(f"{n_unstable} unstable transverse mode(s); "
                         f"smallest omega^2 = {min_eigenvalue:.6g} rad^2/s^2")
        self.n_unstable = n_unstable
        self.min_eigenvalue = min_eigenvalue
        self.details = {"unstable_modes": n_unstable}


class ResonanceError(PenningError):
    """The ODF beat note sits within the resonance guard of a mode."""

    def __init__(self, mode, omega_m, mu_R, guard):
        super().__init__(f"beat note {mu_R / 6.283185307179586:.6g} Hz is within "
                         f"{guard / 6.283185307179586:.3g} Hz of mode m={mode} "
                         f"({omega_m / 6.283185307179586:.6g} Hz)")
        self.mode = mode
        self.details = {"mode": mode}


class BracketError(PenningError):
    """A root search was given a range without a sign change."""


class FitError(PenningError):
    """The power-law fit could not be formed (too few bins, non-positive bin means)."""


class SignMixedError(FitError):
    """Couplings inside the fit range do not share a single sign."""


class CapacityError(PenningError):
    """The state-vector oracle was asked for more spins than it supports."""
