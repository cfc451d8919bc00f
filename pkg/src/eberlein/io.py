"""JSON ingestion for semigroup, cone and spine specs, plus value formatting."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable

import numpy as np
from jsonschema import Draft202012Validator

from .cone import ProductCone
from .errors import InvalidSpec
from .semigroup import NumericalSemigroup
from .spine import SpineSystem, build_system

_NUMBER = {"type": "number"}

NUMERICAL_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"const": "numerical"},
        "generators": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "include_zero": {"type": "boolean"},
    },
    "required": ["generators"],
    "additionalProperties": False,
}

CONE_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"const": "cone"},
        "l": {"type": "integer", "minimum": 0},
        "thresholds": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "basis": {"type": "array", "items": {"type": "array", "items": _NUMBER}, "minItems": 1},
    },
    "required": ["type", "l", "thresholds", "basis"],
    "additionalProperties": False,
}

_GROUP = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["real", "integer", "finite"]},
        "dim": {"type": "integer", "minimum": 0},
        "moduli": {"type": "array", "items": {"type": "integer", "minimum": 1}},
    },
    "required": ["kind"],
    "allOf": [
        {"if": {"properties": {"kind": {"const": "finite"}}},
         "then": {"required": ["moduli"]}, "else": {"required": ["dim"]}},
    ],
}

SPINE_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"const": "spine"},
        "nodes": {"type": "array", "items": {"type": ["string", "integer"]}, "minItems": 1},
        "join": {"type": "array", "items": {"type": "array"}},
        "groups": {"type": "object", "additionalProperties": _GROUP},
        "homs": {"type": "object", "additionalProperties": {"type": "array"}},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["type", "nodes", "join", "groups", "homs"],
    "additionalProperties": False,
}

SCHEMAS = {"numerical": NUMERICAL_SCHEMA, "cone": CONE_SCHEMA, "spine": SPINE_SCHEMA}


def load_json(source: str | Path) -> Any:
    """Parse a JSON file; syntax errors become ``InvalidSpec`` with line/column."""
    text = Path(source).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def validate_spec(doc: Any) -> dict:
    """Validate against the schema selected by ``doc["type"]`` (default numerical)."""
    if not isinstance(doc, dict):
        raise InvalidSpec("spec must be a JSON object")
    kind = doc.get("type", "numerical")
    if kind not in SCHEMAS:
        raise InvalidSpec(f"field 'type': unknown spec type {kind!r}")
    errors = sorted(Draft202012Validator(SCHEMAS[kind]).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.path) or "<root>"
            lines.append(f"field '{where}': {err.message}")
        raise InvalidSpec("; ".join(lines))
    return doc


def semigroup_from_spec(doc: Any) -> NumericalSemigroup | ProductCone:
    doc = validate_spec(doc)
    kind = doc.get("type", "numerical")
    if kind == "numerical":
        return NumericalSemigroup(tuple(doc["generators"]), bool(doc.get("include_zero", False)))
    if kind == "cone":
        return ProductCone(doc["l"], tuple(doc["thresholds"]), np.asarray(doc["basis"], dtype=float))
    raise InvalidSpec(f"field 'type': expected a semigroup spec, got {kind!r}")


def spine_from_spec(doc: Any) -> SpineSystem:
    doc = validate_spec(doc)
    if doc.get("type") != "spine":
        raise InvalidSpec("field 'type': expected 'spine'")
    return build_system(doc["nodes"], doc["join"], doc["groups"], doc["homs"], doc.get("notes", ()))


def parse_complex(value) -> complex:
    """Accept numbers, ``[re, im]`` pairs and strings such as ``1+2i``,
    ``0.5i``, ``-1+i`` or ``2``."""
    if isinstance(value, (int, float, complex)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if not isinstance(value, str):
        raise InvalidSpec(f"cannot read {value!r} as a complex number")
    text = value.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not text:
        raise InvalidSpec("empty complex number")
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise InvalidSpec(f"cannot read {value!r} as a complex number") from None


def parse_matrix(rows) -> np.ndarray:
    """Row-major matrix whose entries are ``[re, im]`` pairs or plain numbers."""
    try:
        return np.array([[parse_complex(e) for e in row] for row in rows], dtype=complex)
    except TypeError:
        raise InvalidSpec("matrix must be a list of rows") from None


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(e.real), float(e.imag)] for e in row] for row in m]


def format_complex(v: complex) -> str:
    """``re,im`` with 15 significant digits."""
    v = complex(v)
    return f"{_g15(v.real)},{_g15(v.imag)}"


def _g15(x: float) -> str:
    out = f"{x:.15g}"
    return "0" if out == "-0" else out


CSV_HEADER = ("re", "im", "value_re", "value_im")


def csv_text(rows: Iterable[tuple[float, float, float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_g15(x) for x in row])
    return buf.getvalue()


def dump_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, fixed indentation."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"
