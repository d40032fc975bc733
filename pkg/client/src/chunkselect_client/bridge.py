"""Subprocess/TCP bridge to a chunkselect selection service.

The wrapper pattern from the host-process side: serialize one candidate
batch per request as a JSON line, await exactly one response line, and
hand back the selected index, the selected chunk, and the diagnostics.
One request is in flight per client handle; open several handles for
parallelism.
"""

from __future__ import annotations

import json
import math
import selectors
import shutil
import socket
import subprocess
import sys
import time
from dataclasses import dataclass, field

from .errors import (
    ProtocolError,
    RequestTimeoutError,
    ServerError,
    SpawnError,
    TransportError,
    ValidationError,
)

CONFIG_KEYS = ("samples", "clusters", "tau", "eps", "metric", "seed")


def default_server_command() -> list[str]:
    """Prefer the installed console script, fall back to `python -m chunkselect`."""
    exe = shutil.which("chunkselect")
    if exe:
        return [exe, "serve", "--transport", "stdio"]
    return [sys.executable, "-m", "chunkselect", "serve", "--transport", "stdio"]


@dataclass(frozen=True)
class ClientConfig:
    transport: str = "stdio"
    command: tuple[str, ...] | None = None     # stdio: server argv
    host: str = "127.0.0.1"                    # tcp endpoint
    port: int = 0
    timeout: float = 30.0
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.transport not in ("stdio", "tcp"):
            raise ValueError("transport must be 'stdio' or 'tcp'")
        if not self.timeout > 0:
            raise ValueError("timeout must be > 0")
        unknown = set(self.overrides) - set(CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown selector override fields: {sorted(unknown)}")


def _validate_candidates(candidates) -> list:
    """Client-side shape/finiteness check; returns plain nested lists.

    Never mutates the caller's data. Accepts any nested sequences of
    numbers (numpy arrays included, via their natural iteration).
    """
    try:
        outer = list(candidates)
    except TypeError:
        raise ValidationError("candidates must be a K x T x A nested sequence")
    if not outer:
        raise ValidationError("candidate batch is empty")
    shape = None
    clean = []
    for i, cand in enumerate(outer):
        try:
            rows = [list(row) for row in cand]
        except TypeError:
            raise ValidationError(f"candidate {i} is not a steps x dims matrix")
        if not rows or not rows[0]:
            raise ValidationError(f"candidate {i} has an empty shape")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ValidationError(f"candidate {i} has ragged rows")
        if shape is None:
            shape = (len(rows), len(rows[0]))
        elif (len(rows), len(rows[0])) != shape:
            raise ValidationError(
                f"candidate {i} has shape {(len(rows), len(rows[0]))}, expected {shape}"
            )
        out_rows = []
        for r, row in enumerate(rows):
            out_row = []
            for c, value in enumerate(row):
                try:
                    number = float(value)
                except (TypeError, ValueError):
                    raise ValidationError(
                        f"candidate {i} has a non-numeric value at ({r}, {c})"
                    )
                if not math.isfinite(number):
                    raise ValidationError(
                        f"candidate {i} has a non-finite value at ({r}, {c})"
                    )
                out_row.append(number)
            out_rows.append(out_row)
        clean.append(out_rows)
    return clean


class _StdioTransport:
    def __init__(self, command, timeout: float):
        try:
            self._proc = subprocess.Popen(
                list(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise SpawnError(f"could not start server {list(command)!r}: {exc}")
        self._timeout = timeout
        self._buffer = b""
        self._selector = selectors.DefaultSelector()
        self._selector.register(self._proc.stdout, selectors.EVENT_READ)

    def send_line(self, line: str) -> None:
        if self._proc.poll() is not None:
            raise TransportError("server process has exited")
        try:
            self._proc.stdin.write(line.encode("utf-8") + b"\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise TransportError(f"could not write to server: {exc}")

    def recv_line(self) -> str:
        deadline = time.monotonic() + self._timeout
        while b"\n" not in self._buffer:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise RequestTimeoutError(
                    f"no response within {self._timeout:.3f}s"
                )
            if not self._selector.select(timeout=remaining):
                continue
            chunk = self._proc.stdout.read1(65536)
            if not chunk:
                raise TransportError("server closed its output")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line.decode("utf-8")

    def close(self) -> None:
        self._selector.close()
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        self._proc.stdout.close()

    @property
    def pid(self) -> int:
        return self._proc.pid

    @property
    def returncode(self):
        return self._proc.poll()


class _TcpTransport:
    def __init__(self, host: str, port: int, timeout: float):
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise TransportError(f"could not connect to {host}:{port}: {exc}")
        self._sock.settimeout(timeout)
        self._buffer = b""

    def send_line(self, line: str) -> None:
        try:
            self._sock.sendall(line.encode("utf-8") + b"\n")
        except OSError as exc:
            raise TransportError(f"could not send request: {exc}")

    def recv_line(self) -> str:
        while b"\n" not in self._buffer:
            try:
                chunk = self._sock.recv(65536)
            except socket.timeout:
                raise RequestTimeoutError("no response within the socket timeout")
            except OSError as exc:
                raise TransportError(f"connection failed: {exc}")
            if not chunk:
                raise TransportError("server closed the connection")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line.decode("utf-8")

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


class SelectionClient:
    """One live conversation with a selection service."""

    def __init__(self, config: ClientConfig | None = None):
        self.config = config or ClientConfig()
        if self.config.transport == "stdio":
            command = self.config.command or tuple(default_server_command())
            self._transport = _StdioTransport(command, self.config.timeout)
        else:
            self._transport = _TcpTransport(
                self.config.host, self.config.port, self.config.timeout
            )
        self._counter = 0

    def select_remote(self, candidates, overrides: dict | None = None):
        """Send one batch, return (selected_index, selected_chunk, diagnostics)."""
        clean = _validate_candidates(candidates)
        config = dict(self.config.overrides)
        if overrides:
            unknown = set(overrides) - set(CONFIG_KEYS)
            if unknown:
                raise ValidationError(f"unknown selector override fields: {sorted(unknown)}")
            config.update(overrides)
        self._counter += 1
        request_id = f"req-{self._counter}"
        payload = {"id": request_id, "candidates": clean}
        if config:
            payload["config"] = config
        self._transport.send_line(json.dumps(payload))
        line = self._transport.recv_line()
        try:
            response = json.loads(line)
        except json.JSONDecodeError:
            raise ProtocolError(f"undecodable response line: {line!r}", line=line)
        if not isinstance(response, dict):
            raise ProtocolError(f"response is not an object: {line!r}", line=line)
        if "error" in response:
            err = response["error"]
            raise ServerError(str(err.get("code")), str(err.get("message")))
        if response.get("id") != request_id:
            raise ProtocolError(
                f"response id {response.get('id')!r} does not match {request_id!r}",
                line=line,
            )
        if "selected_index" not in response or "selected_chunk" not in response:
            raise ProtocolError(f"response is missing selection fields: {line!r}", line=line)
        return (
            int(response["selected_index"]),
            response["selected_chunk"],
            response.get("diagnostics", {}),
        )

    @property
    def last_request_id(self) -> str:
        return f"req-{self._counter}"

    def close(self) -> None:
        self._transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def spawn_local_server(
    config: ClientConfig | None = None, command=None
) -> SelectionClient:
    """Start a stdio server child and return a connected client handle.

    Closing the handle closes the child's stdin and reaps the process.
    """
    base = config or ClientConfig()
    merged = ClientConfig(
        transport="stdio",
        command=tuple(command) if command else base.command,
        timeout=base.timeout,
        overrides=dict(base.overrides),
    )
    return SelectionClient(merged)
