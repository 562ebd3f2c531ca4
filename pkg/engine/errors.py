"""
Exception hierarchy for the masking-certification engine.

Every error raised on purpose by the engine derives from MaskCertError, so
callers (and the launcher) can tell engine failures apart from bugs.
"""
from typing import Optional


class MaskCertError(Exception):
    """Base class for all engine errors."""

    def __init__(self, message: str = "", sample_index: Optional[int] = None):
        super().__init__(message)
        self.sample_index = sample_index

    def __str__(self) -> str:
        text = super().__str__()
        if self.sample_index is not None:
            return f"{text} (sample {self.sample_index})"
        return text


class InvalidArgumentError(MaskCertError, ValueError):
    """Raised when an argument violates a documented precondition."""
    pass


class InvalidModeError(MaskCertError):
    """Raised when an operation is requested in a mode that voids its contract."""
    pass


class NumericalError(MaskCertError):
    """Raised when a numerical routine fails to converge."""
    pass


class TooLargeError(MaskCertError):
    """Raised when an exhaustive enumeration would exceed its cap."""
    pass


class TransportError(MaskCertError):
    """Raised when an external classifier process cannot be reached or answers late."""
    pass


class ProtocolError(TransportError):
    """Raised when an external classifier answers with something the protocol forbids."""
    pass


class QueryCapReached(MaskCertError):
    """Raised internally when an attack runs out of victim queries."""
    pass


class UsageError(MaskCertError):
    """Raised for bad command-line or configuration input."""
    pass
