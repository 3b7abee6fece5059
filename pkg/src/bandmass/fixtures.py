"""Built-in fundamental graphs, stored as ordinary graph documents."""

from __future__ import annotations

import json

from .graph import FundamentalGraph, GraphError, parse_graph

GRAPHENE = """
{
  "dimension": 2,
  "vertices": ["v1", "v2"],
  "edges": [
    ["v1", "v2", [0, 0]],
    ["v1", "v2", [1, 0]],
    ["v1", "v2", [0, 1]]
  ]
}
"""

# hexagonal lattice with a pendant edge at every vertex
STANENE = """
{
  "dimension": 2,
  "vertices": ["v1", "v2", "v3", "v4"],
  "edges": [
    ["v1", "v2", [0, 0]],
    ["v1", "v2", [1, 0]],
    ["v1", "v2", [0, 1]],
    ["v1", "v3", [0, 0]],
    ["v2", "v4", [0, 0]]
  ]
}
"""

KAGOME = """
{
  "dimension": 2,
  "vertices": ["a", "b", "c"],
  "edges": [
    ["a", "b", [0, 0]],
    ["a", "c", [0, 0]],
    ["b", "c", [0, 0]],
    ["b", "a", [1, 0]],
    ["c", "a", [0, 1]],
    ["b", "c", [1, -1]]
  ]
}
"""


def lattice_document(d: int) -> str:
    """Square lattice Z^d: one vertex with d loops along the unit vectors."""
    if d < 1:
        raise GraphError(f"lattice dimension must be >= 1, got {d}")
    edges = []
    for a in range(d):
        unit = [0] * d
        unit[a] = 1
        edges.append(["v", "v", unit])
    return json.dumps({"dimension": d, "vertices": ["v"], "edges": edges}, indent=2)


_NAMED = {"graphene": GRAPHENE, "stanene": STANENE, "kagome": KAGOME}


def fixture_document(name: str) -> str:
    if name in _NAMED:
        return _NAMED[name]
    if name.startswith("lattice:"):
        try:
            d = int(name.split(":", 1)[1])
        except ValueError:
            raise GraphError(f"bad lattice fixture {name!r}") from None
        return lattice_document(d)
    if name == "lattice":
        return lattice_document(2)
    raise GraphError(f"unknown fixture {name!r}")


def is_fixture(name: str) -> bool:
    return name in _NAMED or name == "lattice" or name.startswith("lattice:")


def load_fixture(name: str) -> FundamentalGraph:
    return parse_graph(fixture_document(name))


def fixture_names() -> list[str]:
    return ["lattice:d", *_NAMED]
