"""Exception types shared across the package."""

from __future__ import annotations


class ToposError(Exception):
    """Base class for every error raised by ltopos."""


class InvalidCategory(ToposError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:8])
        more = "" if len(self.violations) <= 8 else f" (+{len(self.violations) - 8} more)"
        super().__init__(f"invalid category: {lines}{more}")


class UnknownObject(ToposError):
    pass


class CodomainMismatch(ToposError):
    pass


class InvalidPresheaf(ToposError):
    pass


class NotNatural(ToposError):
    pass


class BaseMismatch(ToposError):
    pass


class IllTypedDiagram(ToposError):
    pass


class BudgetExceeded(ToposError):
    pass


class NotWeak(ToposError):
    pass


class AxiomViolation(ToposError):
    pass


class NotSeparated(ToposError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConditionViolation(ToposError):
    pass


class OracleDisagreement(ToposError):
    """Two independent decision procedures returned different answers."""
