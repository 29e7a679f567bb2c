"""
JSON and DOT serialization of Stallings graphs

Author: PSL2 Subgroups Team
License: MIT
"""

import json
import logging
from typing import Any, Dict, Union

from pydantic import ValidationError

from psl2.exceptions import InvalidGraphError
from psl2.schemas import GraphSchema
from .graphs import StallingsGraph, ValidationMode, validate

logger = logging.getLogger(__name__)


def graph_to_dict(g: StallingsGraph) -> Dict[str, Any]:
    return {
        "n": g.n,
        "root": g.root,
        "a": {"loops": list(g.a_loops), "pairs": [list(p) for p in g.a_pairs]},
        "b": {
            "loops": list(g.b_loops),
            "edges": [list(e) for e in g.b_edges],
            "triangles": [list(t) for t in g.b_triangles],
        },
    }


def graph_to_json(g: StallingsGraph) -> str:
    """One-line JSON document"""
    return json.dumps(graph_to_dict(g), separators=(",", ":"))


def graph_from_json(data: Union[str, bytes, Dict[str, Any]]) -> StallingsGraph:
    """
    Parse and validate a JSON graph

    Rooted graphs are checked in rooted mode and unrooted ones in
    cyclically reduced mode.

    Raises:
        InvalidGraphError: on schema errors or structural violations
    """
    try:
        if isinstance(data, dict):
            schema = GraphSchema.model_validate(data)
        else:
            schema = GraphSchema.model_validate_json(data)
    except ValidationError as e:
        raise InvalidGraphError(f"Graph does not match the schema: {e}") from e

    graph = StallingsGraph.create(
        schema.n,
        a_loops=schema.a.loops,
        a_pairs=schema.a.pairs,
        b_loops=schema.b.loops,
        b_edges=schema.b.edges,
        b_triangles=schema.b.triangles,
        root=schema.root,
    )
    mode = ValidationMode.ROOTED if graph.root is not None else ValidationMode.CYCLICALLY_REDUCED
    violations = validate(graph, mode)
    if violations:
        raise InvalidGraphError("; ".join(str(v) for v in violations))
    logger.debug(f"Loaded graph with {graph.n} vertices")
    return graph


def graph_to_dot(g: StallingsGraph, name: str = "G") -> str:
    """Graphviz source: a-items undirected, b-orbits directed"""
    lines = [f"digraph {name} {{"]
    for v in range(g.n):
        shape = "doublecircle" if v == g.root else "circle"
        lines.append(f'  {v} [shape={shape}];')
    for v in g.a_loops:
        lines.append(f'  {v} -> {v} [label="a", dir=none, color=red];')
    for p, q in g.a_pairs:
        lines.append(f'  {p} -> {q} [label="a", dir=none, color=red];')
    for v, w in enumerate(g.b_next):
        if w is not None:
            lines.append(f'  {v} -> {w} [label="b", color=blue];')
    lines.append("}")
    return "\n".join(lines) + "\n"
