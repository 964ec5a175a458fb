"""Exception hierarchy shared across the package."""


class KcmfoldError(Exception):
    """Base class for all errors raised by kcmfold."""


class TopologyError(KcmfoldError):
    """Chain cannot be constructed (e.g. zero peptide planes)."""


class MissingParameterError(KcmfoldError):
    """Parameter table lacks an entry for an atom kind."""

    def __init__(self, kind_name: str):
        self.kind_name = kind_name
        super().__init__(f"parameter table has no entry for atom kind {kind_name!r}")


class NonFiniteAngleError(KcmfoldError):
    """A dihedral angle is NaN or infinite."""


class AxisError(KcmfoldError):
    """Rotation axis is not a unit vector."""


class DimensionError(KcmfoldError):
    """Vector length does not match the chain's degrees of freedom or atoms."""


class NonFiniteForceError(KcmfoldError):
    """An atomic force component is NaN or infinite."""


class CoincidentAtomsError(KcmfoldError):
    """Two interacting atoms sit at the same point (pair distance zero)."""

    def __init__(self, i: int, j: int, iteration: int | None = None):
        self.i = i
        self.j = j
        self.iteration = iteration
        msg = f"atoms {i} and {j} are coincident (zero pair distance)"
        if iteration is not None:
            msg += f" at iteration {iteration}"
        super().__init__(msg)


class ZeroTorqueSignal(KcmfoldError):
    """All torque components vanish; the conformation is stationary."""


class ScheduleError(KcmfoldError):
    """Step-size schedule parameters violate the contraction requirement."""


class ConfigError(KcmfoldError):
    """Experiment configuration is unreadable or invalid."""


class ConfigMismatchError(ConfigError):
    """Two configurations that must share a chain/initial state do not."""
