"""JSON documents for protocols and patterns.

Protocol document::

    {"n": 4, "edges": [[0, 2], [0, 3], [1, 2], [1, 3]], "encoding": [0, 1, 2, 3]}

Pattern document::

    {"n": 2, "edges": [[0, 1]], "inputs": [0], "outputs": [1],
     "angles": {"0": 0.0}, "x_corrections": {"0": [1]}, "z_corrections": {}}

Patterns may also carry ``"z_measured": [ids]`` and ``"order": [ids]``.
Edges must satisfy ``i < j`` with no duplicates.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from graphsecret.errors import InvalidInput
from graphsecret.graph import MAX_VERTICES, Graph, Protocol, members, vertex_set
from graphsecret.mbqc.pattern import Pattern

_IDS = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_EDGES = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2},
}
_CORRECTIONS = {"type": "object", "patternProperties": {"^[0-9]+$": _IDS}, "additionalProperties": False}

PROTOCOL_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": MAX_VERTICES},
        "edges": _EDGES,
        "encoding": _IDS,
    },
    "required": ["n", "edges", "encoding"],
    "additionalProperties": False,
}

PATTERN_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": MAX_VERTICES},
        "edges": _EDGES,
        "inputs": _IDS,
        "outputs": _IDS,
        "angles": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "number"}},
            "additionalProperties": False,
        },
        "x_corrections": _CORRECTIONS,
        "z_corrections": _CORRECTIONS,
        "z_measured": _IDS,
        "order": _IDS,
    },
    "required": ["n", "edges", "inputs", "outputs", "angles", "x_corrections", "z_corrections"],
    "additionalProperties": False,
}


def _validate(doc, schema, what: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "document"
        raise InvalidInput(f"invalid {what} at {where}: {exc.message}") from None


def _edges(doc: dict) -> list[tuple[int, int]]:
    n = doc["n"]
    seen = set()
    out = []
    for i, j in doc["edges"]:
        if i == j:
            raise InvalidInput(f"self-loop at vertex {i}")
        if i > j:
            raise InvalidInput(f"edge [{i}, {j}] must be written with i < j")
        if j >= n:
            raise InvalidInput(f"edge [{i}, {j}] has a vertex outside 0..{n - 1}")
        if (i, j) in seen:
            raise InvalidInput(f"duplicate edge [{i}, {j}]")
        seen.add((i, j))
        out.append((i, j))
    return out


def _ids(doc: dict, key: str) -> list[int]:
    ids = doc.get(key, [])
    bad = [v for v in ids if v >= doc["n"]]
    if bad:
        raise InvalidInput(f"{key} contain vertex ids {bad} outside 0..{doc['n'] - 1}")
    if len(set(ids)) != len(ids):
        raise InvalidInput(f"{key} contain duplicates")
    return ids


def protocol_from_dict(doc) -> Protocol:
    _validate(doc, PROTOCOL_SCHEMA, "protocol")
    g = Graph.from_edges(doc["n"], _edges(doc))
    return Protocol(g, vertex_set(_ids(doc, "encoding")))


def protocol_to_dict(p: Protocol) -> dict:
    return {"n": p.n, "edges": [list(e) for e in p.graph.edges()], "encoding": members(p.encoding)}


def pattern_from_dict(doc) -> Pattern:
    _validate(doc, PATTERN_SCHEMA, "pattern")
    g = Graph.from_edges(doc["n"], _edges(doc))
    for key in ("inputs", "outputs", "z_measured", "order"):
        _ids(doc, key)
    order = tuple(doc["order"]) if "order" in doc else None
    return Pattern(
        graph=g,
        inputs=frozenset(doc["inputs"]),
        outputs=frozenset(doc["outputs"]),
        angles={int(k): float(a) for k, a in doc["angles"].items()},
        x_corrections={int(k): v for k, v in doc["x_corrections"].items()},
        z_corrections={int(k): v for k, v in doc["z_corrections"].items()},
        z_measured=frozenset(doc.get("z_measured", [])),
        order=order,
    )


def pattern_to_dict(pat: Pattern) -> dict:
    def corr(m):
        return {str(s): sorted(t) for s, t in sorted(m.items())}

    doc = {
        "n": pat.n,
        "edges": [list(e) for e in pat.graph.edges()],
        "inputs": sorted(pat.inputs),
        "outputs": sorted(pat.outputs),
        "angles": {str(v): a for v, a in sorted(pat.angles.items())},
        "x_corrections": corr(pat.x_corrections),
        "z_corrections": corr(pat.z_corrections),
    }
    if pat.z_measured:
        doc["z_measured"] = sorted(pat.z_measured)
    doc["order"] = list(pat.order)
    return doc


def read_json(path: str | Path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def load_protocol(path: str | Path) -> Protocol:
    return protocol_from_dict(read_json(path))


def load_pattern(path: str | Path) -> Pattern:
    return pattern_from_dict(read_json(path))


def dumps(doc) -> str:
    """Canonical JSON text: insertion key order, two-space indent, trailing newline."""
    return json.dumps(doc, indent=2) + "\n"
