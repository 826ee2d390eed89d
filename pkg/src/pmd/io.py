"""JSON module files and report files.

A module file looks like::

    {
      "field_char": 32003,
      "poset": {"type": "grid", "m": 2, "n": 2},
      "dims": [1, 1, 1, 1],
      "maps": {"0->1": [[1]], "0->2": [[1]], "1->3": [[1]], "2->3": [[1]]}
    }

Poset descriptors are ``chain`` (``n``), ``grid`` (``m``, ``n``),
``triangle`` (``m``, ``n``, ``cutoff``), ``zigzag`` (``start``, ``steps``,
``window``), ``opposite`` (``base``) and ``custom`` (``n``, ``covers``,
optional ``labels`` and ``name``).  Matrices are row-major; every entry is
reduced mod ``field_char`` on load.  Cover maps that are omitted are zero.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import InputError, MalformedShape, ParseError
from .linalg import FieldSpec, is_prime, MAX_CHAR
from .module import PersistenceModule, make_module
from .poset import (Chain, Custom, FinitePoset, Grid, Opposite, TriangleRegion,
                    ZigzagFence, ZigzagPath, chain, custom, grid, opposite,
                    triangle_region, zigzag_fence)

MODULE_KEYS = {"field_char", "poset", "dims", "maps"}
_SHAPE_KEYS = {
    "chain": {"type", "n"},
    "grid": {"type", "m", "n"},
    "triangle": {"type", "m", "n", "cutoff"},
    "zigzag": {"type", "start", "steps", "window"},
    "opposite": {"type", "base"},
    "custom": {"type", "n", "covers", "labels", "name"},
}
_REQUIRED = {k: v - {"labels", "name"} for k, v in _SHAPE_KEYS.items()}


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None


def _int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", key=key)
    return value


def _pair(value, key: str) -> tuple[int, int]:
    if not isinstance(value, list) or len(value) != 2:
        raise ParseError(f"expected a pair, got {value!r}", key=key)
    return _int(value[0], key), _int(value[1], key)


def _label(value):
    return tuple(_label(v) for v in value) if isinstance(value, list) else value


def poset_from_json(desc: Any, key: str = "poset") -> FinitePoset:
    if not isinstance(desc, dict) or "type" not in desc:
        raise ParseError("poset must be an object with a 'type'", key=key)
    kind = desc["type"]
    if kind not in _SHAPE_KEYS:
        raise ParseError(f"unknown poset type {kind!r}", key=f"{key}.type")
    extra = set(desc) - _SHAPE_KEYS[kind]
    if extra:
        raise ParseError(f"unknown keys {sorted(extra)}", key=key)
    missing = _REQUIRED[kind] - set(desc)
    if missing:
        raise ParseError(f"missing keys {sorted(missing)}", key=key)
    try:
        if kind == "chain":
            return chain(_int(desc["n"], f"{key}.n"))
        if kind == "grid":
            return grid(_int(desc["m"], f"{key}.m"), _int(desc["n"], f"{key}.n"))
        if kind == "triangle":
            return triangle_region(_int(desc["m"], f"{key}.m"), _int(desc["n"], f"{key}.n"),
                                   _int(desc["cutoff"], f"{key}.cutoff"))
        if kind == "zigzag":
            win = desc["window"]
            if not isinstance(win, list) or len(win) != 2:
                raise ParseError("window must be [[x0, x1], [y0, y1]]", key=f"{key}.window")
            steps = desc["steps"]
            if not isinstance(steps, str):
                raise ParseError("steps must be a string over R and D", key=f"{key}.steps")
            path = ZigzagPath(_pair(desc["start"], f"{key}.start"), steps,
                              (_pair(win[0], f"{key}.window"), _pair(win[1], f"{key}.window")))
            return zigzag_fence(path)
        if kind == "opposite":
            return opposite(poset_from_json(desc["base"], f"{key}.base"))
        covers = desc["covers"]
        if not isinstance(covers, list):
            raise ParseError("covers must be a list of pairs", key=f"{key}.covers")
        labels = desc.get("labels")
        if labels is not None:
            labels = [_label(v) for v in labels]
        return custom(_int(desc["n"], f"{key}.n"),
                      [_pair(c, f"{key}.covers") for c in covers],
                      labels, desc.get("name", "custom"))
    except MalformedShape as exc:
        raise ParseError(str(exc), key=f"{key}.{exc.field}") from None


def poset_to_json(poset: FinitePoset) -> dict:
    shape = poset.shape
    if isinstance(shape, Chain):
        return {"type": "chain", "n": shape.n}
    if isinstance(shape, Grid):
        return {"type": "grid", "m": shape.m, "n": shape.n}
    if isinstance(shape, TriangleRegion):
        return {"type": "triangle", "m": shape.m, "n": shape.n, "cutoff": shape.cutoff}
    if isinstance(shape, ZigzagFence):
        path = shape.path
        return {"type": "zigzag", "start": list(path.start), "steps": path.steps,
                "window": [list(path.window[0]), list(path.window[1])]}
    if isinstance(shape, Opposite):
        return {"type": "opposite", "base": poset_to_json(shape.base)}
    out = {"type": "custom", "n": poset.size, "covers": [list(c) for c in poset.covers]}
    if poset.labels != tuple(range(poset.size)):
        out["labels"] = [list(v) if isinstance(v, tuple) else v for v in poset.labels]
    if isinstance(shape, Custom) and shape.name != "custom":
        out["name"] = shape.name
    return out


def module_from_json(doc: Any, field: FieldSpec | None = None) -> PersistenceModule:
    """Build a validated module from a decoded module document."""
    if not isinstance(doc, dict):
        raise ParseError("module file must be a JSON object")
    extra = set(doc) - MODULE_KEYS
    if extra:
        raise ParseError(f"unknown keys {sorted(extra)}", key=sorted(extra)[0])
    for k in ("poset", "dims"):
        if k not in doc:
            raise ParseError("missing key", key=k)
    if "field_char" in doc:
        p = _int(doc["field_char"], "field_char")
        if not (2 <= p <= MAX_CHAR and is_prime(p)):
            raise ParseError(f"{p} is not a supported prime", key="field_char")
        field = FieldSpec(p)
    field = field or FieldSpec.from_env()
    poset = poset_from_json(doc["poset"])
    dims_doc = doc["dims"]
    if isinstance(dims_doc, dict):
        try:
            dims = [0] * poset.size
            for k, v in dims_doc.items():
                dims[int(k)] = _int(v, f"dims.{k}")
        except (ValueError, IndexError):
            raise ParseError("dims keys must be element ids", key="dims") from None
    elif isinstance(dims_doc, list):
        dims = [_int(v, f"dims[{k}]") for k, v in enumerate(dims_doc)]
    else:
        raise ParseError("dims must be a list or an object", key="dims")
    maps = {}
    for k, mat in (doc.get("maps") or {}).items():
        try:
            a, b = (int(t) for t in k.split("->"))
        except ValueError:
            raise ParseError("map keys look like 'src->dst'", key=f"maps.{k}") from None
        if not isinstance(mat, list) or not all(isinstance(r, list) for r in mat):
            raise ParseError("matrices are lists of rows", key=f"maps.{k}")
        for row in mat:
            for v in row:
                _int(v, f"maps.{k}")
        if not mat:
            rows = dims[b] if 0 <= b < len(dims) else 0
            cols = dims[a] if 0 <= a < len(dims) else 0
            if rows:
                raise ParseError(f"expected {rows} rows", key=f"maps.{k}")
            mat = np.zeros((0, cols), dtype=np.int64)
        maps[(a, b)] = mat
    try:
        return make_module(poset, dims, maps, field, check=True)
    except InputError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), key="maps") from None


def parse_module(text: str, field: FieldSpec | None = None) -> PersistenceModule:
    return module_from_json(_loads(text), field)


def module_to_json(module: PersistenceModule) -> dict:
    return {
        "field_char": module.p,
        "poset": poset_to_json(module.poset),
        "dims": list(module.dims),
        "maps": {f"{a}->{b}": module.maps[(a, b)].tolist() for a, b in module.poset.covers},
    }


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def serialize_module(module: PersistenceModule) -> str:
    return dumps(module_to_json(module))


def read_module(path: str, field: FieldSpec | None = None) -> PersistenceModule:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_module(text, field)


def write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


# --- reports -------------------------------------------------------------------

def carrier_to_json(poset: FinitePoset, carrier) -> list:
    return sorted(int(x) for x in carrier)


def barcode_payload(barcode) -> dict:
    from .structure import BlockList

    out = {"bars": [{"carrier": carrier_to_json(barcode.poset, c), "multiplicity": k}
                    for c, k in barcode.bars]}
    if isinstance(barcode, BlockList):
        for item, tags in zip(out["bars"], barcode.tags):
            item["blocks"] = sorted(tags or ())
    return out


def decomposition_payload(dec) -> dict:
    return {"summands": [{"support": sorted(s.support), "dims": list(s.module.dims),
                          "certificate": str(s.certificate)} for s in dec]}


def make_report(command: list[str], seed: int | None, result: dict,
                counterexample: dict | None = None) -> dict:
    doc = {"command": list(command), "seed": seed, "result": result}
    if counterexample is not None:
        doc["counterexample"] = counterexample
    return doc


def parse_report(text: str) -> dict:
    doc = _loads(text)
    if not isinstance(doc, dict) or not {"command", "seed", "result"} <= set(doc):
        raise ParseError("report needs command, seed and result")
    extra = set(doc) - {"command", "seed", "result", "counterexample"}
    if extra:
        raise ParseError(f"unknown keys {sorted(extra)}", key=sorted(extra)[0])
    return doc


def serialize_report(report: dict) -> str:
    return dumps(report)
