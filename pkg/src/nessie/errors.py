"""Exception types raised by the solver stack."""


class NessieError(Exception):
    """Base class for all package-specific errors."""


class DegenerateCoupling(NessieError, ValueError):
    """Inter-qubit coupling sits on the weak/strong regime boundary."""


class NonPositiveBosonFrequency(NessieError, ValueError):
    """Bose-Einstein occupation requested at a frequency <= 0."""


class MixedStatistics(NessieError, ValueError):
    """The two reservoirs carry different statistics flags."""


class DegenerateSteadyState(NessieError):
    """The generator has a null space of dimension greater than one."""


class NonPhysical(NessieError):
    """A solved state has an eigenvalue below the negativity tolerance."""


class StepFailure(NessieError):
    """Time propagation failed to preserve the trace."""


class FermionTemperatureMismatch(NessieError, ValueError):
    """Fermionic entropy production requires equal reservoir temperatures."""


class ZeroCurrent(NessieError):
    """Both forward and reversed currents vanish; rectification undefined."""


class StructureViolation(NessieError):
    """A density matrix has entries outside the X pattern beyond tolerance."""


class ConfigError(NessieError, ValueError):
    """A run configuration failed validation.

    ``key`` names the offending configuration entry.
    """

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
