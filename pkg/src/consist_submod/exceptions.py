"""Exception hierarchy shared by every module."""


class ConsistSubmodError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ConsistSubmodError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(ConsistSubmodError, ValueError):
    """An exhaustive routine was asked to enumerate more than it is built for."""

    def __init__(self, message, suggestion=None):
        if suggestion:
            message = f"{message} (try: {suggestion})"
        super().__init__(message)
        self.suggestion = suggestion


class ContractViolation(ConsistSubmodError, RuntimeError):
    """A subroutine broke the contract its caller relies on."""


class AuditError(ConsistSubmodError, RuntimeError):
    """A run violated an audited property; ``step`` locates the failure."""

    def __init__(self, message, step=None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class LPError(ConsistSubmodError, RuntimeError):
    """The linear program could not be solved to optimality."""
