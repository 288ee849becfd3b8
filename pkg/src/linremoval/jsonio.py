"""JSON wire formats for matrices, groups, elements, and systems.

Integers ride as plain JSON numbers while they fit in 53 bits and as
decimal strings beyond that, so consumers in double-precision land never
see a rounded value; both spellings are accepted on input.  Booleans are
rejected wherever an integer is expected.
"""

from __future__ import annotations

import json

from .abelian import AbelianGroup
from .errors import SchemaError
from .intmat import IntMatrix
from .system import RestrictedSystem

_SAFE = 1 << 53


def encode_int(v: int):
    return v if abs(v) < _SAFE else str(v)


def decode_int(v, where: str) -> int:
    if isinstance(v, bool):
        raise SchemaError(f"{where}: expected an integer, got a boolean")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        body = v[1:] if v.startswith("-") else v
        if body.isdigit():
            return int(v)
        raise SchemaError(f"{where}: {v!r} is not a decimal integer string")
    raise SchemaError(f"{where}: expected an integer, got {type(v).__name__}")


def encode_matrix(matrix: IntMatrix) -> dict:
    return {
        "rows": matrix.rows,
        "cols": matrix.cols,
        "data": [[encode_int(v) for v in row] for row in matrix.data],
    }


def decode_matrix(obj, where: str = "matrix") -> IntMatrix:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise SchemaError(f"{where}: missing key {key!r}")
    rows = decode_int(obj["rows"], f"{where}.rows")
    cols = decode_int(obj["cols"], f"{where}.cols")
    data = obj["data"]
    if not isinstance(data, list) or len(data) != rows:
        raise SchemaError(f"{where}.data: expected {rows} rows")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"{where}.data[{i}]: expected {cols} entries")
        out.append([decode_int(v, f"{where}.data[{i}][{j}]") for j, v in enumerate(row)])
    if rows < 1 or cols < 1:
        raise SchemaError(f"{where}: dimensions must be positive")
    return IntMatrix(out)


def encode_group(group: AbelianGroup) -> dict:
    return {"moduli": [encode_int(v) for v in group.moduli]}


def decode_group(obj, where: str = "group") -> AbelianGroup:
    if not isinstance(obj, dict) or "moduli" not in obj:
        raise SchemaError(f"{where}: expected an object with a moduli key")
    moduli = obj["moduli"]
    if not isinstance(moduli, list) or not moduli:
        raise SchemaError(f"{where}.moduli: expected a nonempty array")
    vals = [decode_int(v, f"{where}.moduli[{i}]") for i, v in enumerate(moduli)]
    if any(v < 1 for v in vals):
        raise SchemaError(f"{where}.moduli: entries must be >= 1")
    return AbelianGroup(tuple(vals))


def encode_element(elem) -> list:
    return [encode_int(v) for v in elem]


def decode_element(obj, group: AbelianGroup, where: str = "element"):
    if not isinstance(obj, list):
        raise SchemaError(f"{where}: expected an array of residues")
    if len(obj) != group.rank:
        raise SchemaError(
            f"{where}: expected {group.rank} residues, got {len(obj)}"
        )
    return group.reduce(
        [decode_int(v, f"{where}[{i}]") for i, v in enumerate(obj)]
    )


def encode_system(system: RestrictedSystem) -> dict:
    return {
        "group": encode_group(system.group),
        "A": encode_matrix(system.matrix),
        "b": [encode_element(v) for v in system.rhs],
        "X": [
            [encode_element(v) for v in xs] for xs in system.restrictions
        ],
    }


def decode_system(obj, where: str = "system") -> RestrictedSystem:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    for key in ("group", "A", "b", "X"):
        if key not in obj:
            raise SchemaError(f"{where}: missing key {key!r}")
    group = decode_group(obj["group"], f"{where}.group")
    matrix = decode_matrix(obj["A"], f"{where}.A")
    b = obj["b"]
    if not isinstance(b, list) or len(b) != matrix.rows:
        raise SchemaError(f"{where}.b: expected {matrix.rows} elements")
    rhs = tuple(
        decode_element(v, group, f"{where}.b[{i}]") for i, v in enumerate(b)
    )
    xs = obj["X"]
    if not isinstance(xs, list) or len(xs) != matrix.cols:
        raise SchemaError(f"{where}.X: expected {matrix.cols} restriction sets")
    sets = []
    for i, raw in enumerate(xs):
        if not isinstance(raw, list):
            raise SchemaError(f"{where}.X[{i}]: expected an array of elements")
        sets.append(
            tuple(
                decode_element(v, group, f"{where}.X[{i}][{j}]")
                for j, v in enumerate(raw)
            )
        )
    return RestrictedSystem(group, matrix, rhs, tuple(sets))


def load_text(text: str, where: str = "input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"{where}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e


def load_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e.strerror}") from e
    return load_text(text, path)


def dump(obj, human: bool = False) -> str:
    if human:
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    return json.dumps(obj, separators=(",", ":"), sort_keys=True) + "\n"
