"""Exception types raised across the package."""


class RMTError(Exception):
    """Base class for all errors raised by commuting_rmt."""


class CommutatorTooLarge(RMTError):
    pass


class DegenerateCombination(RMTError):
    pass


class NotUnitary(RMTError):
    pass


class NotHermitian(RMTError):
    pass


class InvalidBanner(RMTError):
    pass


class CoincidentPoints(RMTError):
    pass


class InitNotFinite(RMTError):
    pass


class ZeroAcceptance(RMTError):
    pass


class UnsupportedAlpha(RMTError):
    pass


class EmptySamples(RMTError):
    pass


class NonConvergence(RMTError):
    pass


class ShapeMismatch(RMTError):
    pass


class DegenerateEigenvalues(RMTError):
    pass


class WrongCase(RMTError):
    pass


class UnstableDerivative(RMTError):
    pass


class UnsupportedSize(RMTError):
    pass
