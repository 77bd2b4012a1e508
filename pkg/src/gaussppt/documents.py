"""JSON matrix documents read and written by the command line tool.

A document is a single object::

    {"f_a": 2, "f_b": 2, "gamma": [[...], ...], "mean": [...], "meta": {...}}

``mean`` and ``meta`` are optional. Floats are written with Python's
shortest round-trip repr, and integral values are written as integers, so
integer matrices come back bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .phase_space import SystemShape


class DocumentError(ValueError):
    """Malformed input document; the message names the offending line or field."""


def number(x):
    x = float(x)
    if math.isfinite(x) and x.is_integer() and abs(x) < 2**53:
        return int(x)
    return x


def to_jsonable(a):
    """Nested lists of plain numbers; complex arrays become ``{"re", "im"}``."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return {"re": to_jsonable(a.real), "im": to_jsonable(a.imag)}
    if a.ndim == 0:
        return number(a)
    return [to_jsonable(x) for x in a]


@dataclass
class MatrixDocument:
    f_a: int
    f_b: int
    gamma: np.ndarray
    mean: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> SystemShape:
        return SystemShape(self.f_a, self.f_b)

    def to_dict(self) -> dict:
        out = {"f_a": self.f_a, "f_b": self.f_b, "gamma": to_jsonable(self.gamma)}
        if self.mean is not None:
            out["mean"] = to_jsonable(self.mean)
        if self.meta:
            out["meta"] = {str(k): str(v) for k, v in self.meta.items()}
        return out

    def dumps(self) -> str:
        rows = ",\n    ".join(json.dumps(row) for row in to_jsonable(self.gamma))
        body = self.to_dict()
        body["gamma"] = "__GAMMA__"
        text = json.dumps(body, indent=2)
        return text.replace('"__GAMMA__"', "[\n    " + rows + "\n  ]") + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def _require_int(payload, key):
    if key not in payload:
        raise DocumentError(f"missing field '{key}'")
    value = payload[key]
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise DocumentError(f"field '{key}' must be a positive integer, got {value!r}")
    return value


def _real_vector(values, where: str) -> np.ndarray:
    if not isinstance(values, list):
        raise DocumentError(f"{where} must be a list of numbers")
    for j, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DocumentError(f"{where}[{j}] is not a number: {v!r}")
    arr = np.array(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DocumentError(f"{where} contains non-finite values")
    return arr


def parse_document(text: str) -> MatrixDocument:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(payload, dict):
        raise DocumentError("document must be a JSON object")
    f_a, f_b = _require_int(payload, "f_a"), _require_int(payload, "f_b")
    n = 2 * (f_a + f_b)
    if "gamma" not in payload:
        raise DocumentError("missing field 'gamma'")
    rows = payload["gamma"]
    if not isinstance(rows, list) or len(rows) != n:
        got = len(rows) if isinstance(rows, list) else type(rows).__name__
        raise DocumentError(f"field 'gamma' must have {n} rows for f_a={f_a}, f_b={f_b}; got {got}")
    gamma = np.empty((n, n))
    for i, row in enumerate(rows):
        vec = _real_vector(row, f"gamma[{i}]")
        if vec.shape != (n,):
            raise DocumentError(f"gamma[{i}] must have {n} entries, got {len(row)}")
        gamma[i] = vec
    mean = None
    if payload.get("mean") is not None:
        mean = _real_vector(payload["mean"], "mean")
        if mean.shape != (n,):
            raise DocumentError(f"field 'mean' must have {n} entries")
    meta = payload.get("meta") or {}
    if not isinstance(meta, dict):
        raise DocumentError("field 'meta' must be an object")
    return MatrixDocument(f_a, f_b, gamma, mean, dict(meta))


def read_document(path) -> MatrixDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_document(text)
    except DocumentError as exc:
        raise DocumentError(f"{path}: {exc}") from None
