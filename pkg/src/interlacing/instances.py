"""JSON instance files (schema version 1).

Complex numbers are ``[re, im]`` pairs, matrices are row-major nested lists
of such pairs. Floats are written with ``repr`` precision so that
``parse(emit(x))`` reproduces every array bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, SchemaError
from .mixedchar import RandomVectorSpec

SCHEMA_VERSION = "1"
KINDS = ("vectors", "random_vectors", "matrix", "covariances")
PROB_TOL = 1e-9


@dataclass(frozen=True)
class Instance:
    """``data`` is an array (vectors, matrix), a list of arrays (covariances),
    or a list of ``(values, probs)`` pairs (random_vectors)."""

    kind: str
    data: object

    def __eq__(self, other):
        if not isinstance(other, Instance) or other.kind != self.kind:
            return NotImplemented if not isinstance(other, Instance) else False
        return _same(self.data, other.data)

    def specs(self) -> list[RandomVectorSpec]:
        if self.kind != "random_vectors":
            raise SchemaError(f"expected random_vectors, got {self.kind}")
        # probabilities were validated to 1e-9; renormalize for the stricter spec check
        return [RandomVectorSpec(v, p / p.sum()) for v, p in self.data]


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a, b = np.asarray(a), np.asarray(b)
        return a.shape == b.shape and a.dtype == b.dtype and a.tobytes() == b.tobytes()
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return a == b


def _complex_array(obj, ndim: int, what: str) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{what}: ragged or non-numeric array") from exc
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise SchemaError(f"{what}: expected {ndim}-d array of [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"{what}: non-finite entry")
    out = np.empty(arr.shape[:-1], dtype=complex)
    out.real, out.imag = arr[..., 0], arr[..., 1]
    return out


def _encode(arr: np.ndarray):
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _square(m: np.ndarray, what: str) -> None:
    if m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise SchemaError(f"{what}: matrix must be square and nonempty")


def from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"schema_version must be {SCHEMA_VERSION!r}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"kind must be one of {KINDS}")
    payload = doc.get("payload")
    if not isinstance(payload, dict) or kind not in payload:
        raise SchemaError(f"payload must be an object with key {kind!r}")
    body = payload[kind]
    if kind == "vectors":
        data = _complex_array(body, 2, "vectors")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise SchemaError("vectors: need at least one nonempty vector")
    elif kind == "matrix":
        data = _complex_array(body, 2, "matrix")
        _square(data, "matrix")
    elif kind == "covariances":
        if not isinstance(body, list) or not body:
            raise SchemaError("covariances: need a nonempty list")
        data = [_complex_array(m, 2, "covariance") for m in body]
        for m in data:
            _square(m, "covariance")
        if len({m.shape for m in data}) != 1:
            raise SchemaError("covariances: inconsistent dimensions")
    else:
        if not isinstance(body, list) or not body:
            raise SchemaError("random_vectors: need a nonempty list")
        data = []
        for entry in body:
            if not isinstance(entry, dict) or set(entry) != {"values", "probs"}:
                raise SchemaError("random_vectors: entries need exactly 'values' and 'probs'")
            vals = _complex_array(entry["values"], 2, "values")
            try:
                probs = np.array(entry["probs"], dtype=float)
            except (TypeError, ValueError) as exc:
                raise SchemaError("probs: non-numeric") from exc
            if probs.ndim != 1 or len(probs) != len(vals) or len(probs) < 1:
                raise SchemaError("random_vectors: one probability per atom")
            if np.any(~np.isfinite(probs)) or np.any(probs < 0) or abs(probs.sum() - 1) > PROB_TOL:
                raise SchemaError("random_vectors: probabilities must be nonnegative and sum to 1")
            data.append((vals, probs))
        if len({v.shape[1] for v, _ in data}) != 1:
            raise SchemaError("random_vectors: inconsistent dimensions")
    return Instance(kind, data)


def to_dict(inst: Instance) -> dict:
    if inst.kind in ("vectors", "matrix"):
        body = _encode(inst.data)
    elif inst.kind == "covariances":
        body = [_encode(m) for m in inst.data]
    elif inst.kind == "random_vectors":
        body = [{"values": _encode(v), "probs": np.asarray(p, dtype=float).tolist()} for v, p in inst.data]
    else:
        raise SchemaError(f"unknown kind {inst.kind!r}")
    return {"schema_version": SCHEMA_VERSION, "kind": inst.kind, "payload": {inst.kind: body}}


def parse(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return from_dict(doc)


def emit(inst: Instance) -> str:
    return json.dumps(to_dict(inst), allow_nan=False)


def load(path) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse(text)


def save(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit(inst))
