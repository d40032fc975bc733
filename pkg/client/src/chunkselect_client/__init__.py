"""Thin client for the chunkselect selection service."""

from .bridge import ClientConfig, SelectionClient, default_server_command, spawn_local_server
from .errors import (
    ClientError,
    ProtocolError,
    RequestTimeoutError,
    ServerError,
    SpawnError,
    TransportError,
    ValidationError,
)

__version__ = "0.1.0"
