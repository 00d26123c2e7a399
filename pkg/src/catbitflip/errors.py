"""Exception hierarchy.

Every error raised by the package derives from :class:`CatBitflipError`, and
each carries an ``exit_code`` used by the command-line front end
(2 = configuration, 3 = numerical non-convergence, 4 = internal).
"""


class CatBitflipError(Exception):
    exit_code = 4


class ConfigError(CatBitflipError, ValueError):
    exit_code = 2


class NumericalError(CatBitflipError):
    exit_code = 3


class TruncationError(NumericalError):
    """The Fock cutoff is too small for the requested quantity."""


class ConvergenceError(NumericalError):
    pass


class EigensolverFailure(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class SignalTooSmall(NumericalError):
    pass


class AmbiguousSelection(NumericalError):
    pass


class OverflowGuard(NumericalError, OverflowError):
    """Argument would overflow double precision."""


class DegenerateCat(CatBitflipError, ValueError):
    """alpha^2 below 0.05: the cat encoding is ill-conditioned."""

    exit_code = 2


class DomainError(CatBitflipError, ValueError):
    exit_code = 2


class DimensionMismatch(CatBitflipError, ValueError):
    exit_code = 2


class NotHermitian(CatBitflipError, ValueError):
    exit_code = 2


class PreconditionViolated(CatBitflipError, ValueError):
    exit_code = 2


class UnsupportedOrder(CatBitflipError, ValueError):
    exit_code = 2


class NotParityCovariant(CatBitflipError, ValueError):
    """Generator mixes the joint-parity sectors, so no block split exists."""

    exit_code = 3
