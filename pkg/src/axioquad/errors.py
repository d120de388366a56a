"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class AxioquadError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AxioquadError):
    """Syntax error in an expression source string.

    Carries the byte offset of the failure and the token kinds that would
    have been accepted at that position.
    """

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected " + ", ".join(expected) + ")"
        super().__init__(detail)


class UnknownIdentifierError(ParseError):
    """An identifier that is neither ``x`` nor a supported function name."""

    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier '{name}'", offset)


class DomainError(AxioquadError):
    """Evaluation left the mathematical domain of a subexpression.

    ``subexpression`` is the offending node and ``x`` the first input value
    at which the violation occurred.
    """

    def __init__(self, message: str, subexpression=None, x=None):
        self.subexpression = subexpression
        self.x = x
        super().__init__(message)


class NonFiniteError(AxioquadError):
    """An operation overflowed to a non-finite IEEE value."""

    def __init__(self, message: str, subexpression=None, x=None):
        self.subexpression = subexpression
        self.x = x
        super().__init__(message)


class EvaluationError(AxioquadError):
    """A caller-supplied function produced a non-finite value.

    ``h`` records the step at which the evaluation failed.
    """

    def __init__(self, message: str, h: float | None = None):
        self.h = h
        super().__init__(message)


class InsufficientDataError(AxioquadError):
    """Fewer than the required number of usable samples survived filtering."""


class PreconditionError(AxioquadError):
    """A documented precondition of an operation was violated.

    ``field`` names the offending argument where that is meaningful (used by
    the command-line front end for diagnostics).
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message)


class BadAntiderivativeError(PreconditionError):
    """A supplied antiderivative disagrees numerically with its integrand."""


class NotC1Error(PreconditionError):
    """A function required to be continuously differentiable is not."""


class AsymmetryError(AxioquadError):
    """One-sided coefficient estimates disagree beyond tolerance.

    Signals that a local quantity is not differentiably additive at the
    probed point.
    """

    def __init__(self, message: str, x: float, positive: float, negative: float):
        self.x = x
        self.positive = positive
        self.negative = negative
        super().__init__(message)


class NoConvergenceError(AxioquadError):
    """Refinement hit its iteration cap before reaching the target width.

    ``bracket`` holds the best bracket achieved so that callers can still
    inspect (or report) the partial result.
    """

    def __init__(self, message: str, bracket=None, evaluations: int = 0):
        self.bracket = bracket
        self.evaluations = evaluations
        super().__init__(message)


class VerificationError(AxioquadError):
    """Too many trial evaluations failed for a verification report to stand."""
