"""GraphonSpec JSON documents and graph/bigraph file loading.

Supported kinds::

    {"kind": "step", "measures": [...], "values": [[...], ...]}
    {"kind": "diagonal-block", "depth": d}
    {"kind": "transversal", "alpha": {"form": "inverse"}, "k_max": 4}
    {"kind": "ktt-mixture", "t": 2, "nmax": 5, "lengths": [...]}

Numbers may be JSON numbers or exact strings such as "1/3". The alpha forms are
"inverse" (1/n), "inverse-power" with "exponent", and "exponential" with "base".
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .constructions import (
    DiagonalBlock,
    KttMixture,
    TransversalUniform,
    alpha_partition,
    diagonal_block_graphon,
    exponential_alpha,
    inverse_alpha,
    inverse_power_alpha,
    ktt_mixture_graphon,
    layer_sizes,
)
from .core import StepFunction
from .graphs import Bigraph, LabeledGraph

DEFAULT_K_MAX = 4


class SpecError(ValueError):
    """Malformed GraphonSpec document."""


def _number(x):
    if isinstance(x, bool):
        raise SpecError("booleans are not numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise SpecError(f"bad number {x!r}") from exc
    if isinstance(x, float):
        return x
    raise SpecError(f"bad number {x!r}")


def _format_number(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return x


def _alpha(doc: dict):
    form = doc.get("form")
    if form == "inverse":
        return inverse_alpha()
    if form == "inverse-power":
        return inverse_power_alpha(_number(doc.get("exponent", 1)))
    if form == "exponential":
        return exponential_alpha(int(doc.get("base", 2)))
    raise SpecError(f"unknown alpha form {form!r}")


def graphon_from_spec(doc: dict):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SpecError("a GraphonSpec is an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "step":
            return StepFunction(
                tuple(_number(m) for m in doc["measures"]),
                tuple(tuple(_number(v) for v in row) for row in doc["values"]),
            )
        if kind == "diagonal-block":
            return diagonal_block_graphon(int(doc.get("depth", 64)))
        if kind == "transversal":
            alpha = _alpha(doc.get("alpha", {"form": "inverse"}))
            part = alpha_partition(alpha, int(doc.get("k_max", DEFAULT_K_MAX)))
            return TransversalUniform(part, layer_sizes(5))
        if kind == "ktt-mixture":
            lengths = doc.get("lengths")
            return ktt_mixture_graphon(
                int(doc["t"]),
                int(doc["nmax"]),
                None if lengths is None else [_number(x) for x in lengths],
            )
    except KeyError as exc:
        raise SpecError(f"{kind} spec is missing {exc}") from exc
    raise SpecError(f"unknown graphon kind {kind!r}")


def spec_from_graphon(w, alpha_doc: dict | None = None) -> dict:
    if isinstance(w, StepFunction):
        return {
            "kind": "step",
            "measures": [_format_number(m) for m in w.measures],
            "values": [[_format_number(v) for v in row] for row in w.values],
        }
    if isinstance(w, DiagonalBlock):
        return {"kind": "diagonal-block", "depth": w.depth_cap}
    if isinstance(w, KttMixture):
        return {
            "kind": "ktt-mixture",
            "t": w.t,
            "nmax": w.n_max,
            "lengths": [_format_number(x) for x in w.lengths],
        }
    if isinstance(w, TransversalUniform):
        return {
            "kind": "transversal",
            "alpha": alpha_doc or {"form": "inverse"},
            "k_max": len(w.partition.groups()),
        }
    raise SpecError(f"cannot serialise {type(w).__name__}")


def load_graphon(path) -> object:
    with open(path) as fh:
        return graphon_from_spec(json.load(fh))


def load_graph_or_graphon(path):
    """A graph edge-list file, or a GraphonSpec if the file is JSON."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return graphon_from_spec(json.loads(text))
    return LabeledGraph.from_text(text)


def load_pattern(path, bigraph: bool):
    text = Path(path).read_text()
    return Bigraph.from_text(text) if bigraph else LabeledGraph.from_text(text)
