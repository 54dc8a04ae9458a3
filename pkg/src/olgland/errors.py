"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of a primitive (e.g. nonpositive input)."""


class UnsupportedRegimeError(ValueError):
    """Asymptotic formulas requested outside the regime where they hold (sigma <= 1, G <= 1)."""


class NumericalDiagnosticError(ArithmeticError):
    """A finite-difference estimate is dominated by rounding error."""


class ConstructionError(ValueError):
    """A reverse-engineered equilibrium cannot be built for the given parameters.

    Attributes
    ----------
    bound_name : str
        Name of the violated inequality (``"eo"``, ``"p"``, ``"horizon"``).
    bound_value : float
        Threshold the parameter had to exceed.
    value : float
        The parameter value that was supplied.
    """

    def __init__(self, message: str, bound_name: str, bound_value: float, value: float):
        super().__init__(message)
        self.bound_name = bound_name
        self.bound_value = bound_value
        self.value = value


class InfeasibleTransferError(ValueError):
    """A transfer scheme drives some young consumption to zero or below."""

    def __init__(self, message: str, period: int):
        super().__init__(message)
        self.period = period
