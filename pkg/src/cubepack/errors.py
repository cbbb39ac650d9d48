"""Shared exception types."""


class ValidationError(ValueError):
    """Malformed or inconsistent user input."""


class ResourceCapExceeded(RuntimeError):
    """A search outgrew its configured resource cap; may carry partial results."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
