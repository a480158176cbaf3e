"""Exception hierarchy shared across the package."""


class NudgeError(Exception):
    """Base class for all package errors."""


class ValidationError(NudgeError, ValueError):
    """Input data violates a schema or invariant."""


class ConfigurationError(NudgeError, ValueError):
    """Inconsistent engine configuration (e.g. mixed embedding dimensions)."""


class ProviderError(NudgeError, RuntimeError):
    """An embedding or captioning backend failed.

    ``status`` carries the last HTTP status code when the failure came from
    a remote service, otherwise ``None``.
    """

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class NotFoundError(NudgeError, LookupError):
    """Requested item does not exist in a store."""
