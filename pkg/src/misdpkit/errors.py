"""Exception types shared across the package."""


class MisdpkitError(Exception):
    """Base class for all misdpkit errors."""


class NonConvergence(MisdpkitError):
    """Eigensolver exhausted its sweep budget before reaching the target."""


class NotPsd(MisdpkitError):
    """A discrete matrix failed an exact positive-semidefiniteness test."""


class ShapeMismatch(MisdpkitError):
    pass


class DimensionMismatch(MisdpkitError):
    pass


class PreconditionViolated(MisdpkitError):
    pass


class SizeLimit(MisdpkitError):
    """Input exceeds the documented desk-scale bound of an operation."""


class ParseError(MisdpkitError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedDomain(MisdpkitError):
    pass


class IncompleteAssignment(MisdpkitError):
    pass


class NegativeCapacity(MisdpkitError):
    pass


class InfeasibleItem(MisdpkitError):
    pass


class VariantPrecondition(MisdpkitError):
    pass


class SizeMismatch(MisdpkitError):
    pass


class EvenOrder(MisdpkitError):
    pass


class Disconnected(MisdpkitError):
    pass


class AxiomViolation(MisdpkitError):
    """An association-scheme axiom failed; `axiom` names the first failure."""

    def __init__(self, axiom, message):
        super().__init__(f"axiom ({axiom}): {message}")
        self.axiom = axiom


class BudgetExceeded(MisdpkitError):
    pass


class UnsupportedContinuousPattern(MisdpkitError):
    """A continuous variable matches no supported elimination pattern."""
