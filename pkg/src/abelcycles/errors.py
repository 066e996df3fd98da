"""Exception types raised by the analysis routines."""


class AbelError(Exception):
    """Base class for all library errors."""


class DomainError(AbelError, ValueError):
    """Evaluation point outside the basis interval."""


class SingularityError(AbelError, ValueError):
    """Derivative requested where the basis is not differentiable."""


class StepFailure(AbelError, RuntimeError):
    """The adaptive integrator could not make progress."""


class UnresolvedZero(AbelError, RuntimeError):
    """A near-zero stretch of a combination could not be classified."""


class Indeterminate(AbelError, RuntimeError):
    """A sign test landed inside its tolerance band."""


class PreconditionViolated(AbelError, ValueError):
    pass


class UnresolvedRoot(AbelError, RuntimeError):
    """Root refinement of the displacement function stalled."""


class DiagnosticFailure(AbelError, AssertionError):
    """An isocline diagnostic contradicted the structure it should have."""


class SearchFailure(AbelError, RuntimeError):
    pass


class ParseError(AbelError, ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(AbelError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
