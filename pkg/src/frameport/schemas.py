"""JSON schemas for the file formats read and written by the CLI."""

_number = {"type": "number"}
_vector = {"type": "array", "items": _number, "minItems": 1}

MEASURE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "measure",
    "type": "object",
    "required": ["dim", "atoms", "weights"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "atoms": {"type": "array", "items": _vector, "minItems": 1},
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
    },
}

MATRIX = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "matrix",
    "type": "object",
    "required": ["dim", "rows"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "rows": {"type": "array", "items": _vector, "minItems": 1},
    },
}

COUPLING = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "coupling",
    "type": "object",
    "required": ["dim", "pairs"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "pairs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["x", "y", "mass"],
                "properties": {
                    "x": _vector,
                    "y": _vector,
                    "mass": {"type": "number", "minimum": 0},
                },
            },
        },
    },
}

H_TABLE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "h-table",
    "type": "object",
    "required": ["dim", "h"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "h": {"type": "array", "items": _vector, "minItems": 1},
    },
}

REPORT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "report",
    "type": "object",
    "required": ["command", "inputs", "parameters", "tolerances", "provenance", "result"],
    "properties": {
        "command": {"type": "string"},
        "version": {"type": "string"},
        "inputs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["path", "sha256", "kind"],
                "properties": {
                    "path": {"type": "string"},
                    "sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
                    "kind": {"enum": ["measure", "matrix", "coupling", "h-table"]},
                },
            },
        },
        "parameters": {"type": "object"},
        "tolerances": {"type": "object"},
        "provenance": {"type": "object", "additionalProperties": {"type": "string"}},
        "result": {"type": "object"},
    },
}

ERROR = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "error",
    "type": "object",
    "required": ["error"],
    "properties": {
        "error": {
            "type": "object",
            "required": ["code", "type", "message"],
            "properties": {
                "code": {"enum": [2, 3]},
                "type": {"type": "string"},
                "message": {"type": "string"},
            },
        }
    },
}

INPUT_KINDS = {
    "measure": MEASURE,
    "matrix": MATRIX,
    "coupling": COUPLING,
    "h-table": H_TABLE,
}


def detect_kind(obj):
    """Input kind from the distinguishing key of a parsed JSON object."""
    if not isinstance(obj, dict):
        return None
    for key, kind in (("atoms", "measure"), ("rows", "matrix"),
                      ("pairs", "coupling"), ("h", "h-table")):
        if key in obj:
            return kind
    return None
