"""Fundamental graphs of Z^d-periodic graphs.

A periodic graph is described by its finite quotient: a list of vertices and
a list of undirected edges, each stored once with a chosen orientation
``tail -> head`` and an integer index vector recording how many period cells
the edge crosses.  Reversing an edge negates its index.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised when a graph document or graph data fails validation."""


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    index: tuple[int, ...]

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    @property
    def is_bridge(self) -> bool:
        return any(self.index)


@dataclass(frozen=True)
class BridgeData:
    """Bridge indices and the Gram-matrix eigenvalues built from them.

    ``t0`` holds the d bridges chosen to maximise the smallest singular value,
    ``t1`` every bridge.  ``lambda0``/``lambda1`` are the smallest eigenvalue
    of ``t0.T @ t0`` and the largest eigenvalue of ``t1.T @ t1``.
    """

    bridges: tuple[int, ...]
    t0_rows: tuple[int, ...]
    t0: np.ndarray
    t1: np.ndarray
    lambda0: float
    lambda1: float
    lambda0_floor: float
    lambda1_ceiling: float

    @property
    def count(self) -> int:
        return len(self.bridges)


@dataclass(frozen=True)
class FundamentalGraph:
    """Validated quotient graph with integer edge indices.

    Vertices are opaque labels kept in input order; edges refer to vertices by
    position.  Construct through :func:`build_graph` or :func:`parse_graph`,
    which run the validation.
    """

    dim: int
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    @property
    def nv(self) -> int:
        return len(self.vertices)

    @property
    def ne(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.nv, dtype=np.int64)
        for e in self.edges:
            deg[e.tail] += 1
            deg[e.head] += 1
        return deg

    @property
    def total_degree(self) -> int:
        return int(self.degrees.sum())

    @cached_property
    def tails(self) -> np.ndarray:
        return np.array([e.tail for e in self.edges], dtype=np.int64)

    @cached_property
    def heads(self) -> np.ndarray:
        return np.array([e.head for e in self.edges], dtype=np.int64)

    @cached_property
    def indices(self) -> np.ndarray:
        """Edge index vectors stacked as an (ne, d) integer array."""
        return np.array([e.index for e in self.edges], dtype=np.int64).reshape(self.ne, self.dim)

    def oriented_edges(self) -> list[tuple[int, int, tuple[int, ...]]]:
        """Both orientations of every edge, ``(u, v, index)`` with reversed index negated."""
        out = []
        for e in self.edges:
            out.append((e.tail, e.head, e.index))
            out.append((e.head, e.tail, tuple(-t for t in e.index)))
        return out

    def vertex_position(self, label: str) -> int:
        try:
            return self.vertices.index(label)
        except ValueError:
            raise GraphError(f"unknown vertex {label!r}") from None

    def to_document(self) -> dict:
        return {
            "dimension": self.dim,
            "vertices": list(self.vertices),
            "edges": [
                [self.vertices[e.tail], self.vertices[e.head], list(e.index)] for e in self.edges
            ],
        }


def build_graph(dim: int, vertices: Sequence[str], edges: Sequence[tuple]) -> FundamentalGraph:
    """Validate raw data and return a :class:`FundamentalGraph`.

    ``edges`` holds ``(tail_label, head_label, index)`` triples.
    """
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise GraphError(f"dimension must be a positive integer, got {dim!r}")
    labels = tuple(str(v) for v in vertices)
    if not labels:
        raise GraphError("graph has no vertices")
    if len(set(labels)) != len(labels):
        raise GraphError("duplicate vertex labels")
    pos = {v: i for i, v in enumerate(labels)}

    parsed = []
    for k, rec in enumerate(edges):
        if not isinstance(rec, (list, tuple)) or len(rec) != 3:
            raise GraphError(f"edge {k}: expected [tail, head, index]")
        tail, head, index = rec
        if str(tail) not in pos or str(head) not in pos:
            raise GraphError(f"edge {k}: unknown vertex in {rec!r}")
        if not isinstance(index, (list, tuple)):
            raise GraphError(f"edge {k}: index must be a list of integers")
        if len(index) != dim:
            raise GraphError(
                f"edge {k}: index dimension mismatch (got {len(index)}, expected {dim})"
            )
        if any(isinstance(t, bool) or not isinstance(t, (int, np.integer)) for t in index):
            raise GraphError(f"edge {k}: index entries must be integers")
        parsed.append(Edge(pos[str(tail)], pos[str(head)], tuple(int(t) for t in index)))
    if not parsed:
        raise GraphError("graph has no edges")

    g = FundamentalGraph(dim, labels, tuple(parsed))
    _check_connected(g)
    if np.linalg.matrix_rank(g.indices.astype(float)) < dim:
        raise GraphError(
            f"graph not d-periodic: bridge indices span fewer than {dim} dimensions"
        )
    return g


def _check_connected(g: FundamentalGraph) -> None:
    parent = list(range(g.nv))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        parent[find(e.tail)] = find(e.head)
    roots = {find(v) for v in range(g.nv)}
    if len(roots) > 1:
        raise GraphError(f"disconnected quotient: {len(roots)} components")


_FIELDS = {"dimension", "vertices", "edges"}


def parse_graph(text: str) -> FundamentalGraph:
    """Parse a JSON graph document.

    The document is an object with exactly the keys ``dimension`` (int),
    ``vertices`` (list of strings) and ``edges`` (list of
    ``[tail, head, [t1, ..., td]]``).  Unknown keys are rejected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed document: {exc}") from None
    return graph_from_document(doc)


def graph_from_document(doc: Mapping) -> FundamentalGraph:
    if not isinstance(doc, Mapping):
        raise GraphError("malformed document: top level must be an object")
    unknown = set(doc) - _FIELDS
    if unknown:
        raise GraphError(f"malformed document: unknown fields {sorted(unknown)}")
    missing = _FIELDS - set(doc)
    if missing:
        raise GraphError(f"malformed document: missing fields {sorted(missing)}")
    if not isinstance(doc["vertices"], list) or not all(isinstance(v, str) for v in doc["vertices"]):
        raise GraphError("malformed document: vertices must be a list of strings")
    if not isinstance(doc["edges"], list):
        raise GraphError("malformed document: edges must be a list")
    return build_graph(doc["dimension"], doc["vertices"], doc["edges"])


def spanning_tree(g: FundamentalGraph) -> list[int]:
    """Breadth-first spanning tree from the first vertex; returns edge positions."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.nv)]
    for k, e in enumerate(g.edges):
        if e.is_loop:
            continue
        adj[e.tail].append((k, e.head))
        adj[e.head].append((k, e.tail))
    seen = [False] * g.nv
    seen[0] = True
    tree = []
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for k, w in adj[u]:
            if not seen[w]:
                seen[w] = True
                tree.append(k)
                queue.append(w)
    return tree


def normalize_indices(g: FundamentalGraph, shifts: Mapping) -> FundamentalGraph:
    """Re-index edges for a shifted fundamental vertex set.

    Each edge ``u -> v`` with index ``t`` gets ``t + shift(u) - shift(v)``.
    ``shifts`` maps vertex labels (or positions) to integer vectors; missing
    vertices are not allowed.
    """
    s = _shift_array(g, shifts)
    new_edges = []
    for e in g.edges:
        t = np.asarray(e.index) + s[e.tail] - s[e.head]
        new_edges.append(Edge(e.tail, e.head, tuple(int(x) for x in t)))
    return FundamentalGraph(g.dim, g.vertices, tuple(new_edges))


def _shift_array(g: FundamentalGraph, shifts: Mapping) -> np.ndarray:
    out = np.zeros((g.nv, g.dim), dtype=np.int64)
    covered = set()
    for key, vec in shifts.items():
        v = key if isinstance(key, (int, np.integer)) else g.vertex_position(key)
        vec = np.asarray(vec, dtype=np.int64)
        if vec.shape != (g.dim,):
            raise GraphError(f"shift for {key!r} has wrong length")
        out[v] = vec
        covered.add(int(v))
    if len(covered) != g.nv:
        raise GraphError("shifts must be given for every vertex")
    return out


def tree_shifts(g: FundamentalGraph) -> dict[str, tuple[int, ...]]:
    """Shifts that make every spanning-tree edge index zero."""
    s = np.zeros((g.nv, g.dim), dtype=np.int64)
    done = [False] * g.nv
    done[0] = True
    tree = spanning_tree(g)
    # BFS order guarantees one endpoint of each tree edge is already placed
    for k in tree:
        e = g.edges[k]
        t = np.asarray(e.index)
        if done[e.tail] and not done[e.head]:
            s[e.head] = s[e.tail] + t
            done[e.head] = True
        else:
            s[e.tail] = s[e.head] - t
            done[e.tail] = True
    return {g.vertices[v]: tuple(int(x) for x in s[v]) for v in range(g.nv)}


def tree_normalized(g: FundamentalGraph) -> FundamentalGraph:
    return normalize_indices(g, tree_shifts(g))


def bridges(g: FundamentalGraph, exhaustive_limit: int = 10_000) -> BridgeData:
    """Bridge list, index matrices and the eigenvalues Lambda0, Lambda1."""
    idx = [k for k, e in enumerate(g.edges) if e.is_bridge]
    d = g.dim
    t1 = g.indices[idx].astype(np.int64).reshape(len(idx), d)
    if len(idx) < d or np.linalg.matrix_rank(t1.astype(float)) < d:
        raise GraphError("graph not d-periodic: bridge index matrix has rank below d")

    if math.comb(len(idx), d) <= exhaustive_limit:
        rows = _best_subset_exhaustive(t1, d)
    else:
        rows = _best_subset_greedy(t1, d)
    t0 = t1[list(rows)]
    lam0 = float(np.linalg.eigvalsh((t0.T @ t0).astype(float))[0])
    lam1 = float(np.linalg.eigvalsh((t1.T @ t1).astype(float))[-1])

    c = float((t0.astype(float) ** 2).sum())
    floor = ((d - 1) / c) ** (d - 1)
    tplus = np.abs(t1)
    ceiling = float((tplus @ tplus.sum(axis=0)).max())
    return BridgeData(
        bridges=tuple(idx),
        t0_rows=tuple(idx[r] for r in rows),
        t0=t0,
        t1=t1,
        lambda0=lam0,
        lambda1=lam1,
        lambda0_floor=floor,
        lambda1_ceiling=ceiling,
    )


def _best_subset_exhaustive(t1: np.ndarray, d: int) -> tuple[int, ...]:
    best, best_s = None, -1.0
    for rows in itertools.combinations(range(len(t1)), d):
        s = np.linalg.svd(t1[list(rows)].astype(float), compute_uv=False)[-1]
        if s > best_s + 1e-12:
            best, best_s = rows, s
    return best


def _best_subset_greedy(t1: np.ndarray, d: int) -> tuple[int, ...]:
    # pivoted Gram-Schmidt on the rows, largest residual first
    a = t1.astype(float)
    chosen: list[int] = []
    resid = a.copy()
    for _ in range(d):
        norms = np.linalg.norm(resid, axis=1)
        norms[chosen] = -1.0
        k = int(np.argmax(norms))
        chosen.append(k)
        q = resid[k] / norms[k]
        resid = resid - np.outer(resid @ q, q)
    return tuple(sorted(chosen))


def cycle_kernel_basis(g: FundamentalGraph) -> np.ndarray:
    """Signed indicator vectors of the tree+chord cycles, one row per non-tree edge.

    Row ``k`` has +1 on the chord and +/-1 on the tree path closing it, the
    sign recording whether the cycle runs along or against the stored edge
    orientation.  Shape ``(ne - nv + 1, ne)``.
    """
    tree = spanning_tree(g)
    in_tree = set(tree)
    # parent pointers of the BFS tree rooted at vertex 0
    parent: dict[int, tuple[int, int]] = {}
    depth = [0] * g.nv
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.nv)]
    for k in tree:
        e = g.edges[k]
        adj[e.tail].append((k, e.head))
        adj[e.head].append((k, e.tail))
    queue = deque([0])
    seen = {0}
    while queue:
        u = queue.popleft()
        for k, w in adj[u]:
            if w not in seen:
                seen.add(w)
                parent[w] = (k, u)
                depth[w] = depth[u] + 1
                queue.append(w)

    def path_to_root(v: int) -> list[tuple[int, int, int]]:
        steps = []
        while v != 0:
            k, u = parent[v]
            steps.append((k, v, u))
            v = u
        return steps

    rows = []
    for k, e in enumerate(g.edges):
        if k in in_tree:
            continue
        xi = np.zeros(g.ne)
        xi[k] = 1.0
        if not e.is_loop:
            # walk head -> tail through the tree: up from head, down to tail
            up = path_to_root(e.head)
            down = path_to_root(e.tail)
            while up and down and up[-1][0] == down[-1][0]:
                up.pop()
                down.pop()
            for kk, a, b in up:
                xi[kk] += 1.0 if g.edges[kk].tail == a else -1.0
            for kk, a, b in down:
                # traversed b -> a
                xi[kk] += 1.0 if g.edges[kk].tail == b else -1.0
        rows.append(xi)
    return np.array(rows).reshape(len(rows), g.ne)
