"""Serialisation for CLI outputs: fixed-precision JSON and CSV, plus schema checks.

JSON floats carry 17 significant digits (enough to round-trip a double) and
CSV floats carry 12.  Non-finite floats become ``null`` in JSON and
``inf``/``nan`` in CSV.  CSV files may start with ``# key=value`` lines.
"""

from __future__ import annotations

import csv
import io
import json
import math

import jsonschema
import numpy as np

from .errors import ParameterError

__all__ = [
    "dumps_json",
    "loads_json",
    "write_csv",
    "read_csv",
    "REPORT_SCHEMA",
    "WITNESS_SCHEMA",
    "NORMS_SCHEMA",
    "validate_report",
    "validate_witness",
    "validate_norms",
    "read_trace_csv",
]

JSON_DIGITS = 17
CSV_DIGITS = 12


def _json_float(x):
    if not math.isfinite(x):
        return "null"
    s = format(x, f".{JSON_DIGITS}g")
    # keep integral floats recognisable as numbers json parses back to float
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _json_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps_json(obj, indent=2):
    """Deterministic JSON text; keys keep insertion order."""
    return _encode(obj, indent, 0) + "\n"


def loads_json(text):
    return json.loads(text)


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), f".{CSV_DIGITS}g")
    if v is None:
        return ""
    return str(v)


def write_csv(header, rows, meta=None):
    """CSV text with optional ``# key=value`` preamble."""
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}={_csv_cell(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def read_csv(text):
    """Inverse of :func:`write_csv`: ``(meta, header, rows)`` with cells as strings."""
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            k, sep, v = line[1:].strip().partition("=")
            if sep:
                meta[k.strip()] = v.strip()
        elif line.strip():
            body.append(line)
    if not body:
        raise ParameterError("CSV has no header row")
    reader = csv.reader(body)
    header = next(reader)
    rows = [r for r in reader]
    for r in rows:
        if len(r) != len(header):
            raise ParameterError(f"CSV row has {len(r)} cells, header has {len(header)}")
    return meta, header, rows


_VERDICT = {"enum": ["yes-symbolic", "evidence-yes", "evidence-no", "no-symbolic", "inconclusive"]}
_NUM_LIST = {"type": "array", "items": {"type": ["number", "null"]}}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["space", "p", "weights", "horizon", "criteria", "verdicts"],
    "properties": {
        "space": {"type": "string"},
        "p": {"type": "number", "minimum": 1},
        "weights": {"type": "string"},
        "horizon": {"type": "integer", "minimum": 1},
        "criteria": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "paper_anchor", "values_head", "values_tail", "symbolic", "verdict"],
                "properties": {
                    "name": {"type": "string"},
                    "paper_anchor": {"type": "string"},
                    "values_head": _NUM_LIST,
                    "values_tail": _NUM_LIST,
                    "symbolic": {"type": ["string", "null"]},
                    "verdict": _VERDICT,
                },
            },
        },
        "verdicts": {
            "type": "object",
            "required": ["boundedness", "hypercyclic", "mixing", "chaotic", "periodic"],
            "additionalProperties": _VERDICT,
        },
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}

WITNESS_SCHEMA = {
    "type": "object",
    "required": ["m", "dist1", "dist2", "truncation"],
    "properties": {
        "m": {"type": "integer", "minimum": 1},
        "dist1": {"type": ["number", "null"], "minimum": 0},
        "dist2": {"type": ["number", "null"], "minimum": 0},
        "truncation": {"type": "integer", "minimum": 0},
    },
}

NORMS_SCHEMA = {
    "type": "object",
    "required": ["space", "p", "rows"],
    "properties": {
        "space": {"type": "string"},
        "p": {"type": "number", "minimum": 1},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "I", "logI", "norm", "method"],
                "properties": {
                    "n": {"type": "integer", "minimum": 0},
                    "I": {"type": "number"},
                    "logI": {"type": "number"},
                    "norm": {"type": "number", "minimum": 0},
                    "method": {"type": "string"},
                },
            },
        },
    },
}


def _validate(doc, schema):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise ParameterError(f"schema violation: {exc.message}") from exc
    return doc


def validate_report(doc):
    return _validate(doc, REPORT_SCHEMA)


def validate_witness(doc):
    return _validate(doc, WITNESS_SCHEMA)


def validate_norms(doc):
    return _validate(doc, NORMS_SCHEMA)


def read_trace_csv(text):
    """Parse a ``k,norm`` trace; returns ``(meta, k, norms)``."""
    meta, header, rows = read_csv(text)
    if header != ["k", "norm"]:
        raise ParameterError("trace CSV must have columns k,norm")
    k = np.array([int(r[0]) for r in rows], dtype=int)
    norms = np.array([float(r[1]) for r in rows])
    if np.any(norms < 0) or np.any(np.diff(k) != 1):
        raise ParameterError("trace CSV has negative norms or non-consecutive k")
    return meta, k, norms
