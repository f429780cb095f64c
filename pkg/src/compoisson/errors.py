"""Exception hierarchy shared by the evaluators, the distribution layer and the CLI."""


class ComPoissonError(Exception):
    """Base class for library errors."""


class DomainError(ComPoissonError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class GuardError(DomainError):
    """lambda is too close to 1 for the Cahen representation to be evaluated stably."""


class ConvergenceError(ComPoissonError, ArithmeticError):
    """A series, tail policy or iteration failed to converge within its caps."""


class IterationCapError(ConvergenceError):
    """The configured term or iteration cap was reached before certification."""


class TailPolicyError(ConvergenceError):
    """The truncation horizon ended before the terms entered their decaying regime."""


class DiagnosticError(ComPoissonError, ArithmeticError):
    """An internal consistency diagnostic failed (signals an implementation bug)."""
