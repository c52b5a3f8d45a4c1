"""Exception hierarchy shared by all modules.

Every error raised on purpose by the package derives from :class:`EostomoError`
so callers (and the command-line front end) can map failures to exit codes.
"""


class EostomoError(Exception):
    """Base class for package errors."""


class ConfigurationError(EostomoError, ValueError):
    """Invalid configuration (unknown keys, empty ports, overlapping bands...)."""


class DomainError(EostomoError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(EostomoError, ValueError):
    """A frequency or bandwidth lies outside the support of the grid."""


class GridMismatchError(EostomoError, ValueError):
    """Two objects defined on different frequency grids were combined."""


class BasisTooSmallError(EostomoError, ValueError):
    """An operator is poorly represented by the chosen mode basis."""


class NonCommutingError(ConfigurationError):
    """Two readouts that must be measured jointly do not commute."""


class InvariantViolation(EostomoError, ArithmeticError):
    """A numerical invariant (symplecticity, positivity...) failed."""


class UndefinedMatchingError(EostomoError, ZeroDivisionError):
    """Mode matching requested for an operator or target with zero weight."""


class InfeasibleConstraintError(EostomoError, RuntimeError):
    """No sweep point satisfies the requested mode-matching floor.

    Attributes:
        closest: ``(bandwidth, theta, gamma)`` of the point whose mode matching
            came closest to the floor.
    """

    def __init__(self, message, closest=None):
        super().__init__(message)
        self.closest = closest
