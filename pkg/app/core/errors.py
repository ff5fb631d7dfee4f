"""
Exception hierarchy shared by the services, the CLI and the HTTP handlers.

Each error knows the process exit code the CLI returns for it and the HTTP
status the API answers with.
"""

from typing import Any, Optional


class LeakguardError(Exception):
    """Base class for every error raised on purpose by the toolkit."""

    exit_code: int = 4
    status_code: int = 500

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        body = {"detail": self.message, "error": type(self).__name__}
        body.update({key: str(value) for key, value in self.details.items()})
        return body


class InputError(LeakguardError):
    """Malformed document, bad argument or out-of-range index."""

    exit_code = 2
    status_code = 422


class InvariantViolation(InputError):
    """A loaded document breaks a named invariant."""

    def __init__(self, invariant: str, message: Optional[str] = None):
        super().__init__(message or invariant, invariant=invariant)
        self.invariant = invariant


class UnsupportedError(InputError):
    """The operation is not defined for the given input kind."""


class PreconditionError(InputError):
    """A constructor's precondition does not hold."""

    def __init__(self, message: str, verdict: Any = None):
        super().__init__(message)
        self.verdict = verdict


class SizeLimitError(LeakguardError):
    """The requested computation exceeds a configured cap."""

    exit_code = 3
    status_code = 413

    def __init__(self, what: str, estimate: int, cap: int):
        super().__init__(f"{what}: size estimate {estimate} exceeds cap {cap}", estimate=estimate, cap=cap)
        self.estimate = estimate
        self.cap = cap


class InternalError(LeakguardError):
    """A post-condition self-check failed."""

    exit_code = 4
    status_code = 500
