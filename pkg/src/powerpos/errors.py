"""Exception hierarchy shared by every module."""


class PowerPosError(Exception):
    """Base class for all library errors."""


class NonHermitianInput(PowerPosError, ValueError):
    pass


class DimMismatch(PowerPosError, ValueError):
    pass


class Defective2x2(PowerPosError, ValueError):
    """A 2x2 matrix with a repeated eigenvalue that is not normal."""


class UnsupportedMatrix(PowerPosError, ValueError):
    """Non-normal matrix functions are only implemented in dimension 2."""


class DomainViolation(PowerPosError, ValueError):
    """A value lies outside the domain of a power map."""


class PreconditionError(PowerPosError, ValueError):
    pass


class IndependenceSearchFailed(PowerPosError, RuntimeError):
    pass


class WitnessSearchFailed(PowerPosError, RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ZeroDiagonal(PowerPosError, ValueError):
    pass


class NotDominating(PowerPosError, ValueError):
    pass


class DegeneracyUnresolved(PowerPosError, RuntimeError):
    pass


class NonCommutingBlocks(PowerPosError, ValueError):
    pass
