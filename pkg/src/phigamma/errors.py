"""Exception hierarchy shared across the package.

Schema problems, mathematical failures, and precision failures live on
separate branches so the command line front end can map them onto distinct
exit codes (1, 2 and 3 respectively).
"""

from __future__ import annotations


class PhiGammaError(Exception):
    """Base class for every error raised by this package."""

    kind = "Error"

    def payload(self) -> dict:
        """JSON-ready description used in CLI error reports."""
        return {"kind": self.kind, "message": str(self)}


class SchemaError(PhiGammaError):
    """Malformed or unexpected input document."""

    kind = "SchemaError"

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer

    def payload(self) -> dict:
        return {"kind": self.kind, "message": str(self), "pointer": self.pointer}


class MathError(PhiGammaError):
    """A well-formed request whose mathematical preconditions fail."""

    kind = "MathError"


class NotAUnit(MathError):
    kind = "NotAUnit"


class NotProP(MathError):
    kind = "NotProP"


class TorsionViolation(MathError):
    kind = "TorsionViolation"


class RingMismatch(MathError):
    kind = "RingMismatch"


class NotARingMap(MathError):
    kind = "NotARingMap"


class NotEtale(MathError):
    kind = "NotEtale"


class CocycleViolation(MathError):
    """A candidate module triple fails one of the commutation relations."""

    kind = "CocycleViolation"

    def __init__(self, relation: str, degree: int, residual):
        super().__init__(
            f"cocycle relation {relation!r} fails at degree {degree} "
            f"with residual {residual}"
        )
        self.relation = relation
        self.degree = degree
        self.residual = residual

    def payload(self) -> dict:
        return {
            "kind": self.kind,
            "relation": self.relation,
            "degree": self.degree,
            "residual": list(self.residual),
        }


class ValuationObstruction(MathError):
    kind = "ValuationObstruction"


class NoEmbedding(MathError):
    kind = "NoEmbedding"


class KernelConditionFailed(MathError):
    kind = "KernelConditionFailed"


class NoSolution(MathError):
    """A linear or transgression problem certified to have no solution."""

    kind = "NoSolution"


class VerificationFailed(MathError):
    kind = "VerificationFailed"


class BudgetExceeded(MathError):
    kind = "BudgetExceeded"


class PrecisionUnderflow(MathError):
    """An operation would need coefficients below the configured floor."""

    kind = "PrecisionUnderflow"


class PrecisionUnstable(PhiGammaError):
    """A window-based computation did not stabilize under enlargement."""

    kind = "PrecisionUnstable"
