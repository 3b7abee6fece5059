import io

import numpy as np
import pytest

from bandmass.errors import DegenerateEdgeError
from bandmass.fixtures import load_fixture
from bandmass.floquet import eigvals_batch
from bandmass.spectrum import (
    band_structure,
    bottom_edge,
    flat_bands,
    locate_band_edge,
    spectral_distance,
    spectral_gaps,
    torus_grid,
    write_samples_csv,
)


@pytest.fixture(scope="module")
def bs_graphene():
    return band_structure(load_fixture("graphene"), 64)


@pytest.fixture(scope="module")
def bs_stanene():
    return band_structure(load_fixture("stanene"), 64)


def test_torus_grid():
    grid = torus_grid(2, 8)
    assert grid.shape == (64, 2)
    assert grid.min() == -np.pi and grid.max() < np.pi
    assert np.array_equal(grid[1], [-np.pi, -np.pi + np.pi / 4])


def test_graphene_bands(bs_graphene):
    (a1, b1), (a2, b2) = bs_graphene.bands
    assert a1 == 0.0
    assert b1 == pytest.approx(1, abs=1e-9)
    assert a2 == pytest.approx(1, abs=1e-9)
    assert b2 == pytest.approx(2, abs=1e-9)
    assert bs_graphene.gaps == []
    assert bs_graphene.flat_bands == []


def test_stanene_bands(bs_stanene):
    expected = [(0, 0.5), (0.5, 0.75), (1.25, 1.5), (1.5, 2)]
    for got, exp in zip(bs_stanene.bands, expected):
        assert got == pytest.approx(exp, abs=1e-6)
    assert len(bs_stanene.gaps) == 1
    assert bs_stanene.gaps[0] == pytest.approx((0.75, 1.25), abs=1e-6)
    assert flat_bands(bs_stanene) == []


def test_lattice_single_band():
    bs = band_structure(load_fixture("lattice:2"), 32)
    assert bs.nbands == 1
    assert bs.bands[0] == pytest.approx((0, 2), abs=1e-9)


def test_kagome_flat_band():
    g = load_fixture("kagome")
    bs = band_structure(g, 32)
    assert len(bs.flat_bands) == 1
    n, value = bs.flat_bands[0]
    assert n == 3 and value == pytest.approx(1.5, abs=1e-12)
    assert bs.is_flat(3)
    assert np.abs(bs.samples[:, 2] - 1.5).max() < 1e-12
    assert (3, "min") not in bs.edges


def test_samples_sorted_and_count(any_graph):
    bs = band_structure(any_graph, 8 if any_graph.dim > 2 else 16, refine=False)
    assert bs.samples.shape == (bs.thetas.shape[0], any_graph.nv)
    assert np.all(np.diff(bs.samples, axis=1) >= 0)
    assert bs.bands[0][0] == 0.0


def test_deterministic():
    g = load_fixture("stanene")
    a, b = band_structure(g, 16), band_structure(g, 16)
    assert np.array_equal(a.samples, b.samples)
    assert a.bands == b.bands


def test_grid_too_small(graphene):
    with pytest.raises(ValueError):
        band_structure(graphene, 4)


def test_spectral_gaps_merge():
    assert spectral_gaps([(0, 1), (1, 2)]) == []
    assert spectral_gaps([(0, 0.5), (0.75, 1)]) == [(0.5, 0.75)]
    assert spectral_gaps([(1.5, 2), (0, 0.5), (0.4, 1)]) == [(1, 1.5)]


def test_graphene_edges(bs_graphene):
    lo = bs_graphene.edges[(1, "min")]
    assert np.array_equal(lo.theta0, [0, 0])
    assert lo.value == pytest.approx(0, abs=1e-14) and lo.simple and lo.rho == pytest.approx(2)
    hi = bs_graphene.edges[(1, "max")]
    assert hi.value == pytest.approx(1, abs=1e-12)
    assert not hi.simple
    k = 2 * np.pi / 3
    pts = [hi.theta0] + list(hi.partners)
    assert any(np.allclose(p, [k, -k], atol=1e-9) for p in pts)
    assert any(np.allclose(p, [-k, k], atol=1e-9) for p in pts)


def test_stanene_band2_max(bs_stanene):
    e = bs_stanene.edges[(2, "max")]
    assert np.array_equal(e.theta0, [0, 0])
    assert e.value == pytest.approx(0.75, abs=1e-14)
    assert e.simple
    assert e.rho == pytest.approx(0.5, abs=1e-12)


def test_edge_values_match_intervals(bs_stanene):
    for (n, which), e in bs_stanene.edges.items():
        lo, hi = bs_stanene.bands[n - 1]
        assert e.value == pytest.approx(lo if which == "min" else hi, abs=1e-12)


def test_locate_rejects_bad_args(bs_graphene, graphene):
    with pytest.raises(ValueError):
        locate_band_edge(graphene, bs_graphene, 3, "min")
    with pytest.raises(ValueError):
        locate_band_edge(graphene, bs_graphene, 1, "top")


def test_spectral_distance(graphene, stanene):
    assert spectral_distance(graphene, [0, 0], 1) == pytest.approx(2)
    assert spectral_distance(stanene, [0, 0], 1) == pytest.approx(0.75)
    assert spectral_distance(load_fixture("lattice:2"), [0.1, 0.2], 1) == np.inf
    k = 2 * np.pi / 3
    with pytest.raises(DegenerateEdgeError):
        spectral_distance(graphene, [k, -k], 1)


def test_bottom_edge(any_graph):
    e = bottom_edge(any_graph)
    assert e.value == 0.0 and e.simple
    assert np.array_equal(e.theta0, np.zeros(any_graph.dim))


@pytest.mark.parametrize("name", ["lattice:2", "lattice:3", "graphene", "stanene"])
def test_bipartite_symmetry(name):
    g = load_fixture(name)
    bs = band_structure(g, 16 if g.dim < 3 else 8, refine=False)
    s = np.sort(bs.samples.ravel())
    assert np.abs(s + s[::-1] - 2).max() <= 1e-10


def test_kagome_not_symmetric():
    bs = band_structure(load_fixture("kagome"), 16, refine=False)
    s = np.sort(bs.samples.ravel())
    assert np.abs(s + s[::-1] - 2).max() > 0.1


def test_continuity_improves_with_refinement(stanene):
    def jump(n):
        vals = eigvals_batch(stanene, torus_grid(2, n)).reshape(n, n, -1)
        return max(np.abs(np.diff(vals, axis=a)).max() for a in (0, 1))

    j16, j32, j64 = jump(16), jump(32), jump(64)
    assert j64 < j32 < j16


def test_csv(bs_graphene):
    buf = io.StringIO()
    write_samples_csv(bs_graphene, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "theta_1,theta_2,lambda_1,lambda_2"
    assert len(lines) == 1 + 64 * 64
    row = [float(x) for x in lines[1].split(",")]
    assert row[:2] == [-np.pi, -np.pi]
    assert row[2:] == bs_graphene.samples[0].tolist()


def test_combinatorial_band_structure(graphene):
    bs = band_structure(graphene, 32, "combinatorial")
    assert bs.bands[0][0] == 0.0
    assert bs.bands[-1][1] == pytest.approx(6, abs=1e-9)
