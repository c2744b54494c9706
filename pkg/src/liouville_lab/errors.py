"""Exception hierarchy shared by all solver and analysis modules."""


class LiouvilleError(Exception):
    """Base class for all errors raised by this package."""


class StepLimitExceeded(LiouvilleError):
    """The integrator reached its step budget before the end of the span."""


class NonFiniteState(LiouvilleError):
    """A state component overflowed or became NaN; the integrated quantity blew up."""


class NoConvergence(LiouvilleError):
    """The asymptotic flux did not settle within the radial budget."""


class TailNotNegligible(LiouvilleError):
    """An improper integral was truncated before its integrand decayed below threshold."""


class NoLargestZero(LiouvilleError):
    """The zero-velocity formula needs an unbounded linearized solution with a zero."""


class LevelMismatch(LiouvilleError):
    """The inversion symmetry is only available at mass level alpha = N + 2."""


class ParamMismatch(LiouvilleError):
    """A profile was computed at different parameters than the operation expects."""


class CrossingNotFound(LiouvilleError):
    """No sign change of the tracked quantity inside the search bracket."""


class NoSignChange(CrossingNotFound):
    """A scan window contained no sign change to bisect."""


class SeedFailure(LiouvilleError):
    """No nontrivial solution was found near a branch seed point."""


class ZeroCountJump(LiouvilleError):
    """The zero count changed along a continuation arc, violating its invariant."""


class PairingFailure(LiouvilleError):
    """A Kelvin image failed to land on the expected branch."""


class UnresolvedCritical(LiouvilleError):
    """A critical-point bisection lost its bracket."""


class OnCriticalValue(LiouvilleError):
    """The counting formula is undefined at a critical value of the mass curve."""


class OnTwoN(LiouvilleError):
    """The counting formula is undefined at alpha = 2N."""


class ConfigError(LiouvilleError):
    """Invalid command-line or run configuration."""
