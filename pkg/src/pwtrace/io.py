"""Sequence files and deterministic JSON output."""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptyGrid, PWTraceError


class MalformedInput(PWTraceError):
    pass


@dataclass
class SequenceFile:
    """Nodes, an optional trace and the space parameters read from JSON."""

    nodes: np.ndarray
    trace: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict) or "nodes" not in doc:
            raise MalformedInput("document must be an object with a 'nodes' list")
        nodes = _complex_list(doc["nodes"], "nodes")
        if len(nodes) == 0:
            raise MalformedInput("'nodes' is empty")
        if np.any(nodes == 0):
            raise MalformedInput("0 is not allowed as a node")
        if len(np.unique(nodes)) != len(nodes):
            raise MalformedInput("nodes must be distinct")
        trace = None
        if doc.get("trace") is not None:
            trace = _complex_list(doc["trace"], "trace")
            if len(trace) != len(nodes):
                raise MalformedInput("trace and nodes differ in length")
        params = doc.get("params") or {}
        if not isinstance(params, dict):
            raise MalformedInput("'params' must be an object")
        return cls(nodes, trace, dict(params))

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedInput(f"cannot read {path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self):
        doc = {"nodes": list(self.nodes)}
        if self.trace is not None:
            doc["trace"] = list(self.trace)
        doc["params"] = self.params
        return doc


def _complex_list(items, what):
    if not isinstance(items, list):
        raise MalformedInput(f"'{what}' must be a list")
    out = []
    for it in items:
        try:
            if isinstance(it, dict):
                z = complex(float(it["re"]), float(it.get("im", 0.0)))
            elif isinstance(it, (int, float)) and not isinstance(it, bool):
                z = complex(float(it), 0.0)
            else:
                raise TypeError
        except (KeyError, TypeError, ValueError):
            raise MalformedInput(f"bad entry in '{what}': {it!r}") from None
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise MalformedInput(f"non-finite entry in '{what}'")
        out.append(z)
    return np.array(out, dtype=complex)


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _plain(obj):
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    return obj


def dumps(obj, indent=2, _level=0):
    """JSON text with 17 significant digits, complex numbers as {"re", "im"}
    and non-finite floats as strings. Output depends only on the input."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, complex):
        obj = {"re": obj.real, "im": obj.imag}
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_grid(text):
    """``XMIN:XMAX:STEP`` to an array of grid points, endpoints included."""
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise MalformedInput(f"grid must look like XMIN:XMAX:STEP, got {text!r}") from None
    if not (step > 0 and hi >= lo and math.isfinite(lo) and math.isfinite(hi)):
        raise EmptyGrid(f"grid {text!r} has no points")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 12)
