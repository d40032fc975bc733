"""Line-delimited selection service.

One JSON record per line in both directions. A request carries an id, the
K x T x A candidate array, and optional config overrides; the response
echoes the id and carries either the selection plus diagnostics or an
error record. Malformed input never kills the service: every failure
becomes an error response.
"""

from __future__ import annotations

import json
import socketserver
import sys

from .errors import BatchValidationError
from .geometry import CandidateBatch, validate_batch
from .selector import SelectionResult, SelectorConfig, select

CONFIG_KEYS = {
    "samples": "samples",
    "clusters": "num_clusters",
    "tau": "tau",
    "eps": "eps",
    "metric": "metric",
    "seed": "seed",
}


class RequestError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def apply_overrides(defaults: SelectorConfig, overrides) -> SelectorConfig:
    if overrides is None:
        return defaults
    if not isinstance(overrides, dict):
        raise RequestError("parse_error", "'config' must be a mapping")
    unknown = set(overrides) - set(CONFIG_KEYS)
    if unknown:
        raise RequestError(
            "validation_error", f"unknown config fields: {sorted(unknown)}"
        )
    kwargs = {CONFIG_KEYS[k]: v for k, v in overrides.items()}
    try:
        return defaults.replace(**kwargs)
    except (TypeError, ValueError) as exc:
        raise RequestError("validation_error", f"bad config override: {exc}")


def response_payload(batch: CandidateBatch, result: SelectionResult) -> dict:
    return {
        "selected_index": result.selected_index,
        "selected_chunk": batch.values[result.selected_index].tolist(),
        "diagnostics": {
            "guard_score": result.guard_score,
            "unimodal": result.unimodal,
            "cluster_sizes": list(result.cluster_sizes),
            "global_medoid": result.global_medoid,
        },
    }


def handle_request(line: str, defaults: SelectorConfig | None = None) -> str:
    """Process one request line and return one response line (no newline)."""
    defaults = defaults or SelectorConfig()
    request_id = None
    try:
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RequestError("parse_error", f"undecodable request line: {exc.msg}")
        if not isinstance(doc, dict):
            raise RequestError("parse_error", "request must be a JSON object")
        rid = doc.get("id")
        if isinstance(rid, str) and rid:
            request_id = rid
        if not isinstance(rid, str) or not rid:
            raise RequestError("parse_error", "request needs a nonempty string 'id'")
        if "candidates" not in doc:
            raise RequestError("parse_error", "request needs a 'candidates' array")
        config = apply_overrides(defaults, doc.get("config"))
        try:
            batch = validate_batch(doc["candidates"])
        except BatchValidationError as exc:
            raise RequestError("validation_error", str(exc))
        result = select(batch, config)
        payload = {"id": request_id}
        payload.update(response_payload(batch, result))
        return json.dumps(payload)
    except RequestError as exc:
        return json.dumps(
            {"id": request_id, "error": {"code": exc.code, "message": str(exc)}}
        )
    except Exception as exc:  # service must answer no matter what
        return json.dumps(
            {"id": request_id, "error": {"code": "internal_error", "message": str(exc)}}
        )


def serve_stdio(defaults: SelectorConfig | None = None, stdin=None, stdout=None) -> None:
    """Answer requests from stdin on stdout until EOF."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        stdout.write(handle_request(line, defaults) + "\n")
        stdout.flush()


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace")
            if not line.strip():
                continue
            out = handle_request(line, self.server.defaults) + "\n"
            self.wfile.write(out.encode("utf-8"))
            self.wfile.flush()


class SelectionServer(socketserver.ThreadingTCPServer):
    """One thread per connection; requests within a connection answered in order."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, defaults: SelectorConfig | None = None):
        super().__init__(address, _Handler)
        self.defaults = defaults or SelectorConfig()


def serve_tcp(host: str, port: int, defaults: SelectorConfig | None = None) -> None:
    with SelectionServer((host, port), defaults) as server:
        bound = server.server_address
        print(f"listening on {bound[0]}:{bound[1]}", file=sys.stderr, flush=True)
        server.serve_forever()
