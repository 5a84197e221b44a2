"""Exception types shared across the toolkit.

Exit-code mapping in the CLI: ValidationError -> 1, everything else -> 2.
"""


class AzpError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(AzpError):
    """Bad configuration, bad arguments, or a violated call contract."""


class ParseError(AzpError):
    """Malformed tagged-corpus input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(AzpError):
    """A sample or prediction record violates the file schema."""

    def __init__(self, message: str, record: int | None = None, field: str | None = None):
        self.record = record
        self.field = field
        prefix = []
        if record is not None:
            prefix.append(f"record {record}")
        if field is not None:
            prefix.append(f"field {field!r}")
        if prefix:
            message = f"{', '.join(prefix)}: {message}"
        super().__init__(message)


class ProviderError(AzpError):
    """Base class for external-capability failures."""


class TransientProviderError(ProviderError):
    """Timeout, connection failure or 5xx; the call may be retried."""


class ProtocolError(ProviderError):
    """Malformed or invariant-violating response; retrying cannot help."""


class RetryExhaustedError(ProviderError):
    """A transient failure persisted past the retry budget."""

    def __init__(self, attempts: int, last_error: Exception):
        self.attempts = attempts
        self.last_error = last_error
        super().__init__(f"gave up after {attempts} attempts: {last_error}")
