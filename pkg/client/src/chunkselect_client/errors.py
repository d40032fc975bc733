"""Typed client-side errors for the selection bridge."""


class ClientError(Exception):
    """Base class for all bridge errors."""


class ValidationError(ClientError):
    """Candidate array rejected before anything was sent."""


class SpawnError(ClientError):
    """Local server process could not be started."""


class TransportError(ClientError):
    """Connection or pipe failed mid-conversation."""


class RequestTimeoutError(ClientError):
    """No response line arrived within the configured timeout."""


class ProtocolError(ClientError):
    """The server sent something that is not a valid response line."""

    def __init__(self, message: str, line: str | None = None):
        super().__init__(message)
        self.line = line


class ServerError(ClientError):
    """The server answered with an error record."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
