"""Exception hierarchy shared by every module of the package."""


class QBesselError(Exception):
    """Base class for all errors raised by :mod:`higher_qbessel`."""


class DomainError(QBesselError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """A q-Gamma (or derived) evaluation hit a pole."""


class DegenerateDenominator(DomainError):
    """A denominator Pochhammer symbol of a hypergeometric series vanished."""


class OrderOutOfRange(DomainError):
    """Growth order of an entire datum is outside the admissible range."""


class RadiusError(QBesselError, ValueError):
    """Evaluation requested outside the radius of convergence of a series."""


class NonConvergence(QBesselError, ArithmeticError):
    """A series, product or lattice sum failed to meet its tail bound."""


class DivisionByZero(QBesselError, ZeroDivisionError):
    """A product representation has a vanishing denominator factor."""
