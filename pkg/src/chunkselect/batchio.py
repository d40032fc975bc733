"""Candidate-batch files in two interchangeable formats.

json: one document carrying a shape declaration and the nested candidate
arrays. csv: a `K,T,A` header line followed by K*T rows of A values, with
candidate i's step t on line i*T + t (after the header). Both round-trip
float64 values exactly (floats are written in shortest round-trip form).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import BatchFileError
from .geometry import CandidateBatch, validate_batch

FORMATS = ("json", "csv")


def _format_from_suffix(path: Path) -> str | None:
    suffix = path.suffix.lower()
    if suffix == ".json":
        return "json"
    if suffix in (".csv", ".txt"):
        return "csv"
    return None


def detect_format(path: Path) -> str:
    by_suffix = _format_from_suffix(path)
    if by_suffix:
        return by_suffix
    try:
        head = path.read_text().lstrip()[:1]
    except OSError:
        return "csv"
    return "json" if head == "{" else "csv"


def _parse_json(text: str, name: str) -> CandidateBatch:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BatchFileError(f"{name}: {exc.msg}", line=exc.lineno, column=exc.colno)
    if not isinstance(doc, dict) or "candidates" not in doc:
        raise BatchFileError(f"{name}: expected an object with a 'candidates' key")
    candidates = doc["candidates"]
    try:
        arr = np.asarray(candidates, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise BatchFileError(f"{name}: candidates are not a numeric array: {exc}")
    if arr.ndim != 3:
        raise BatchFileError(
            f"{name}: candidates must be K x T x A nested arrays, got {arr.ndim} levels"
        )
    if "shape" in doc:
        declared = tuple(doc["shape"])
        if declared != arr.shape:
            raise BatchFileError(
                f"{name}: declared shape {list(declared)} does not match data shape {list(arr.shape)}"
            )
    return validate_batch(arr)


def _parse_csv(text: str, name: str) -> CandidateBatch:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise BatchFileError(f"{name}: file is empty", line=1)
    header = [c.strip() for c in lines[0].split(",")]
    if len(header) != 3:
        raise BatchFileError(
            f"{name}: header must be 'K,T,A', got {lines[0]!r}", line=1
        )
    try:
        k, t, a = (int(c) for c in header)
    except ValueError:
        raise BatchFileError(
            f"{name}: header must contain three integers, got {lines[0]!r}", line=1
        )
    if k < 1 or t < 1 or a < 1:
        raise BatchFileError(f"{name}: header counts must be positive", line=1)
    rows = lines[1:]
    if len(rows) != k * t:
        raise BatchFileError(
            f"{name}: row count mismatch, expected {k * t} data rows, found {len(rows)}",
            line=len(lines),
        )
    data = np.empty((k * t, a))
    for i, row in enumerate(rows):
        cells = row.split(",")
        if len(cells) != a:
            raise BatchFileError(
                f"{name}: expected {a} values, found {len(cells)}", line=i + 2
            )
        for j, cell in enumerate(cells):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise BatchFileError(
                    f"{name}: non-numeric cell {cell.strip()!r}", line=i + 2, column=j + 1
                )
    return validate_batch(data.reshape(k, t, a))


def parse_batch_text(text: str, format: str, name: str = "<input>") -> CandidateBatch:
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    return _parse_json(text, name) if format == "json" else _parse_csv(text, name)


def parse_batch_file(path, format: str | None = None) -> CandidateBatch:
    """Read a batch file; format None means infer from the suffix/content.

    The file is read exactly once, so pipe-backed paths work too.
    """
    path = Path(path)
    if not path.exists():
        raise BatchFileError(f"batch file not found: {path}")
    try:
        text = path.read_text()
    except OSError as exc:
        raise BatchFileError(f"could not read {path}: {exc}")
    if format is None:
        format = _format_from_suffix(path) or ("json" if text.lstrip()[:1] == "{" else "csv")
    return parse_batch_text(text, format, name=str(path))


def format_batch(batch: CandidateBatch, format: str) -> str:
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    if format == "json":
        doc = {
            "shape": [batch.size, batch.steps, batch.dims],
            "candidates": batch.values.tolist(),
        }
        return json.dumps(doc) + "\n"
    lines = [f"{batch.size},{batch.steps},{batch.dims}"]
    for chunk in batch.values:
        for row in chunk:
            lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_batch_file(batch: CandidateBatch, path, format: str | None = None) -> None:
    path = Path(path)
    if format is None:
        format = detect_format(path) if path.exists() else (
            "json" if path.suffix.lower() == ".json" else "csv"
        )
    path.write_text(format_batch(batch, format))
