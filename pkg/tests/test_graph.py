import itertools
import json

import numpy as np
import pytest

from bandmass.fixtures import lattice_document, load_fixture
from bandmass.floquet import incidence
from bandmass.graph import (
    GraphError,
    bridges,
    build_graph,
    cycle_kernel_basis,
    normalize_indices,
    parse_graph,
    spanning_tree,
    tree_normalized,
    tree_shifts,
)


def test_graphene_counts(graphene):
    assert graphene.nv == 2
    assert graphene.ne == 3
    assert graphene.degrees.tolist() == [3, 3]
    assert graphene.total_degree == 6


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_lattice_counts(d):
    g = load_fixture(f"lattice:{d}")
    assert g.nv == 1
    # each loop counts twice
    assert g.total_degree == 2 * d


def test_stanene_degrees(stanene):
    assert stanene.degrees.tolist() == [4, 4, 1, 1]
    assert stanene.total_degree == 10


def test_oriented_edges_reverse_index(any_graph):
    arcs = any_graph.oriented_edges()
    assert len(arcs) == 2 * any_graph.ne
    for (u, v, t), (u2, v2, t2) in zip(arcs[::2], arcs[1::2]):
        assert (u2, v2) == (v, u)
        assert t2 == tuple(-x for x in t)


def test_index_dimension_mismatch():
    doc = {"dimension": 2, "vertices": ["a"], "edges": [["a", "a", [1]]]}
    with pytest.raises(GraphError, match="index dimension mismatch"):
        parse_graph(json.dumps(doc))


def test_disconnected():
    doc = {"dimension": 1, "vertices": ["a", "b"], "edges": [["a", "a", [1]], ["b", "b", [1]]]}
    with pytest.raises(GraphError, match="disconnected quotient"):
        parse_graph(json.dumps(doc))


def test_not_periodic():
    doc = {"dimension": 2, "vertices": ["a"], "edges": [["a", "a", [1, 0]], ["a", "a", [2, 0]]]}
    with pytest.raises(GraphError, match="not d-periodic"):
        parse_graph(json.dumps(doc))


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"dimension": 1, "vertices": ["a"], "edges": [["a", "a", [1]]], "extra": 1}',
        '{"dimension": 1, "vertices": ["a"]}',
        '{"dimension": 1, "vertices": ["a"], "edges": [["a", "b", [1]]]}',
        '{"dimension": 1, "vertices": ["a"], "edges": [["a", "a", [1.5]]]}',
        '{"dimension": 0, "vertices": ["a"], "edges": [["a", "a", []]]}',
    ],
)
def test_malformed_documents(text):
    with pytest.raises(GraphError):
        parse_graph(text)


def test_document_round_trip(any_graph):
    again = parse_graph(json.dumps(any_graph.to_document()))
    assert again == any_graph


def _is_spanning_tree(g, tree):
    parent = list(range(g.nv))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for k in tree:
        a, b = find(g.edges[k].tail), find(g.edges[k].head)
        if a == b:
            return False
        parent[a] = b
    return len(tree) == g.nv - 1 and len({find(v) for v in range(g.nv)}) == 1


def test_spanning_tree(any_graph):
    tree = spanning_tree(any_graph)
    assert _is_spanning_tree(any_graph, tree)


def test_spanning_tree_small_cases(graphene):
    assert spanning_tree(graphene) == [0]
    assert spanning_tree(load_fixture("lattice:3")) == []
    assert len(spanning_tree(load_fixture("stanene"))) == 3


def test_normalize_graphene_example(graphene):
    g2 = normalize_indices(graphene, {"v1": (0, 0), "v2": (1, 0)})
    assert g2.indices.tolist() == [[-1, 0], [0, 0], [-1, 1]]


def test_identity_shifts(any_graph):
    zero = {v: (0,) * any_graph.dim for v in any_graph.vertices}
    assert normalize_indices(any_graph, zero) == any_graph


def test_shifts_must_cover_vertices(graphene):
    with pytest.raises(GraphError):
        normalize_indices(graphene, {"v1": (0, 0)})


def _closed_walk_sums(g, max_len=5):
    """Brute force: index sums of every closed trail up to max_len arcs."""
    arcs = []
    for k, e in enumerate(g.edges):
        arcs.append((k, e.tail, e.head, np.array(e.index)))
        arcs.append((k, e.head, e.tail, -np.array(e.index)))
    out = {}

    def walk(start, here, used, total, path):
        if path and here == start:
            out[tuple(path)] = total.copy()
        if len(path) == max_len:
            return
        for k, u, v, t in arcs:
            if u == here and k not in used:
                walk(start, v, used | {k}, total + t, path + [(k, u)])

    for s in range(g.nv):
        walk(s, s, frozenset(), np.zeros(g.dim, dtype=int), [])
    return out


@pytest.mark.parametrize("name", ["graphene", "stanene", "kagome"])
def test_cycle_sums_invariant_under_reindexing(name, rng):
    g = load_fixture(name)
    before = _closed_walk_sums(g)
    assert before
    for _ in range(3):
        shifts = {v: tuple(rng.integers(-3, 4, g.dim)) for v in g.vertices}
        after = _closed_walk_sums(normalize_indices(g, shifts))
        assert before.keys() == after.keys()
        for key in before:
            assert np.array_equal(before[key], after[key])


def test_tree_normalization_zeroes_tree(rng):
    g = load_fixture("kagome")
    shifted = normalize_indices(g, {v: tuple(rng.integers(-2, 3, 2)) for v in g.vertices})
    norm = tree_normalized(shifted)
    for k in spanning_tree(norm):
        assert not any(norm.edges[k].index)
    assert set(tree_shifts(shifted)) == set(g.vertices)


def test_bridge_data_fixtures():
    for name, count in [("graphene", 2), ("stanene", 2), ("lattice:3", 3)]:
        b = bridges(load_fixture(name))
        assert b.count == count
        assert b.lambda0 == pytest.approx(1.0, abs=1e-14)
        assert b.lambda1 == pytest.approx(1.0, abs=1e-14)
    b = bridges(load_fixture("graphene"))
    assert np.array_equal(np.abs(np.linalg.det(b.t0)), 1.0)


def test_bridge_bounds_hold(any_graph):
    b = bridges(any_graph)
    assert abs(np.linalg.det(b.t0)) > 0.5
    assert b.lambda0 > 0
    assert b.lambda0_floor <= b.lambda0 + 1e-12
    assert b.lambda0 <= b.lambda1 + 1e-12
    assert b.lambda1 <= b.lambda1_ceiling + 1e-12


def test_t0_maximizes_smallest_singular_value():
    g = build_graph(
        2, ["a"], [("a", "a", [1, 0]), ("a", "a", [1, 1]), ("a", "a", [0, 1]), ("a", "a", [3, 1])]
    )
    b = bridges(g)
    best = max(
        np.linalg.svd(b.t1[list(r)].astype(float), compute_uv=False)[-1]
        for r in itertools.combinations(range(b.count), 2)
    )
    assert np.linalg.svd(b.t0.astype(float), compute_uv=False)[-1] == pytest.approx(best)


def test_greedy_selection_used_for_many_bridges():
    edges = [("a", "a", [i % 5 - 2, (3 * i) % 7 - 3]) for i in range(1, 200)]
    edges = [e for e in edges if any(e[2])]
    g = build_graph(2, ["a"], edges)
    b = bridges(g, exhaustive_limit=10)
    assert abs(np.linalg.det(b.t0)) > 0.5
    assert b.lambda0_floor <= b.lambda0


def test_bridge_invariants_under_edge_permutation(rng):
    g = load_fixture("kagome")
    doc = g.to_document()
    ref = bridges(g)
    for _ in range(5):
        doc["edges"] = [doc["edges"][i] for i in rng.permutation(len(doc["edges"]))]
        b = bridges(parse_graph(json.dumps(doc)))
        assert b.count == ref.count
        assert b.lambda0 == pytest.approx(ref.lambda0)
        assert b.lambda1 == pytest.approx(ref.lambda1)


def test_cycle_basis_graphene(graphene):
    basis = cycle_kernel_basis(graphene)
    assert basis.shape == (2, 3)
    expected = [np.array([1, -1, 0]), np.array([1, 0, -1])]
    for row, exp in zip(basis, expected):
        assert np.array_equal(row, exp) or np.array_equal(row, -exp)


def test_cycle_basis_lattice():
    basis = cycle_kernel_basis(load_fixture("lattice:3"))
    assert np.array_equal(basis, np.eye(3))


def test_cycle_basis_tree_plus_loop():
    g = build_graph(1, ["a", "b", "c"], [("a", "b", [0]), ("b", "c", [0]), ("c", "c", [1])])
    basis = cycle_kernel_basis(g)
    assert np.array_equal(basis, [[0, 0, 1]])


def test_cycle_basis_is_kernel_basis(any_graph):
    basis = cycle_kernel_basis(any_graph)
    assert basis.shape[0] == any_graph.ne - any_graph.nv + 1
    assert np.linalg.matrix_rank(basis) == basis.shape[0]
    assert np.all(np.isin(basis, [-1, 0, 1]))
    assert np.abs(incidence(any_graph).T @ basis.T).max() <= 1e-12


def test_lattice_document_rejects_zero():
    with pytest.raises(GraphError):
        lattice_document(0)
