"""Band functions sampled over the Brillouin torus, band edges and gaps."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateEdgeError
from .floquet import band_values, canonical, check_flavor, eigvals_batch
from .graph import FundamentalGraph

SIMPLE_GAP = 1e-8
FLAT_TOL = 1e-8
GAP_TOL = 1e-8
_SNAP_STEP = np.pi / 12
_SNAP_TOL = 1e-6


def default_grid(d: int) -> int:
    return {1: 256, 2: 64, 3: 24}.get(d, 12)


@dataclass(frozen=True)
class BandEdge:
    """An extremum of one band function.

    ``band`` is 1-based.  ``rho`` is the distance from ``value`` to the other
    eigenvalues of the fiber matrix at ``theta0`` (``inf`` for a single band).
    """

    band: int
    which: str
    theta0: np.ndarray
    value: float
    simple: bool
    rho: float
    flavor: str = "normalized"
    partners: tuple = ()
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BandStructure:
    flavor: str
    n_grid: int
    thetas: np.ndarray
    samples: np.ndarray
    bands: list
    flat_bands: list
    gaps: list
    edges: dict = field(default_factory=dict)

    @property
    def nbands(self) -> int:
        return self.samples.shape[1]

    def is_flat(self, n: int) -> bool:
        return any(b == n for b, _ in self.flat_bands)


def torus_grid(d: int, n: int) -> np.ndarray:
    """Uniform ``n^d`` grid on [-pi, pi)^d in C order."""
    axis = -np.pi + 2 * np.pi * np.arange(n) / n
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def band_structure(
    g: FundamentalGraph,
    n_grid: int | None = None,
    flavor: str = "normalized",
    refine: bool = True,
    flat_tol: float = FLAT_TOL,
) -> BandStructure:
    """Sample all band functions and derive band intervals, flat bands and gaps.

    With ``refine`` the sampled extrema of every non-flat band are polished
    by :func:`locate_band_edge` and the intervals use the polished values.
    """
    check_flavor(flavor)
    n_grid = default_grid(g.dim) if n_grid is None else int(n_grid)
    if n_grid < 8:
        raise ValueError(f"grid size must be >= 8, got {n_grid}")
    thetas = torus_grid(g.dim, n_grid)
    samples = eigvals_batch(g, thetas, flavor)

    lo = samples.min(axis=0)
    hi = samples.max(axis=0)
    flat = [(n + 1, float(samples[:, n].mean())) for n in range(g.nv) if hi[n] - lo[n] < flat_tol]
    bs = BandStructure(flavor, n_grid, thetas, samples, [], flat, [])

    edges = {}
    bands = []
    for n in range(1, g.nv + 1):
        if bs.is_flat(n):
            v = dict(flat)[n]
            bands.append((v, v))
            continue
        if refine:
            emin = locate_band_edge(g, bs, n, "min")
            emax = locate_band_edge(g, bs, n, "max")
            edges[(n, "min")] = emin
            edges[(n, "max")] = emax
            bands.append((emin.value, emax.value))
        else:
            bands.append((float(lo[n - 1]), float(hi[n - 1])))
    # bottom of the spectrum is exactly 0 (attained at theta = 0)
    bands[0] = (0.0, bands[0][1])
    if flavor == "normalized":
        bands[-1] = (bands[-1][0], min(bands[-1][1], 2.0))
    bands = [(float(a), float(b)) for a, b in bands]

    object.__setattr__(bs, "bands", bands)
    object.__setattr__(bs, "gaps", spectral_gaps(bands))
    object.__setattr__(bs, "edges", edges)
    return bs


def spectral_gaps(bands, tol: float = GAP_TOL) -> list:
    """Open intervals between the union of ``bands``."""
    merged: list[list[float]] = []
    for a, b in sorted(bands):
        if merged and a <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(merged[k][1], merged[k + 1][0]) for k in range(len(merged) - 1)]


def flat_bands(bs: BandStructure, tol: float = FLAT_TOL) -> list:
    """``(band, value)`` for every band whose sampled spread is below ``tol``."""
    out = []
    for n in range(bs.nbands):
        col = bs.samples[:, n]
        if col.max() - col.min() < tol:
            out.append((n + 1, float(col.mean())))
    return out


def _eig_gap(vals: np.ndarray, n: int) -> float:
    others = np.delete(vals, n - 1)
    if others.size == 0:
        return np.inf
    return float(np.min(np.abs(others - vals[n - 1])))


def spectral_distance(g: FundamentalGraph, theta0, n: int, flavor: str = "normalized") -> float:
    """Distance from the n-th eigenvalue at ``theta0`` to the rest of the fiber spectrum."""
    vals = band_values(g, canonical(theta0), flavor)
    rho = _eig_gap(vals, n)
    if rho < SIMPLE_GAP:
        raise DegenerateEdgeError(
            f"degenerate eigenvalue: band {n} at theta={np.round(theta0, 12).tolist()} "
            f"has gap {rho:.3e}"
        )
    return rho


def _local_extrema(values: np.ndarray, d: int, n_grid: int, sign: float) -> np.ndarray:
    """Grid positions that are local minima of ``sign * values`` on the periodic grid."""
    f = (sign * values).reshape((n_grid,) * d)
    mask = np.ones(f.shape, dtype=bool)
    for ax in range(d):
        for shift in (1, -1):
            mask &= f <= np.roll(f, shift, axis=ax) + 1e-14
    return np.flatnonzero(mask.ravel())


def _snap(theta: np.ndarray) -> np.ndarray:
    k = np.round(theta / _SNAP_STEP)
    snapped = k * _SNAP_STEP
    return np.where(np.abs(snapped - theta) < _SNAP_TOL, snapped, theta)


def locate_band_edge(
    g: FundamentalGraph,
    bs: BandStructure,
    n: int,
    which: str,
    max_candidates: int = 8,
) -> BandEdge:
    """Find the global minimum or maximum of band ``n`` (1-based).

    The best grid-local extrema are polished with Nelder-Mead on the sorted
    eigenvalue, then snapped to multiples of pi/12 when that is no worse.
    Global optimality is only as good as the grid; degenerate edges are
    returned with ``simple=False`` rather than raised.
    """
    if which not in ("min", "max"):
        raise ValueError("which must be 'min' or 'max'")
    if not 1 <= n <= g.nv:
        raise ValueError(f"band index {n} out of range 1..{g.nv}")
    flavor = bs.flavor
    sign = 1.0 if which == "min" else -1.0
    col = bs.samples[:, n - 1]
    cand = _local_extrema(col, g.dim, bs.n_grid, sign)
    cand = cand[np.argsort(sign * col[cand], kind="stable")][:max_candidates]

    def f(x):
        return sign * band_values(g, x, flavor)[n - 1]

    step = np.pi / bs.n_grid
    best_x, best_f, best_start = None, np.inf, None
    for idx in cand:
        x0 = bs.thetas[idx]
        simplex = np.vstack([x0, x0 + step * np.eye(g.dim)])
        res = minimize(
            f,
            x0,
            method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-15, "maxiter": 20000},
        )
        x, fx = res.x, float(res.fun)
        if fx < best_f - 1e-15:
            best_x, best_f, best_start = x, fx, x0
    snapped = _snap(best_x)
    if f(snapped) <= best_f + 1e-13:
        best_x = snapped
    theta0 = canonical(best_x)
    vals = band_values(g, theta0, flavor)
    rho = _eig_gap(vals, n)
    partner = canonical(-theta0)
    diff = canonical(partner - theta0)
    partners = (partner,) if np.max(np.abs(diff)) > 1e-9 else ()
    return BandEdge(
        band=n,
        which=which,
        theta0=theta0,
        value=float(vals[n - 1]),
        simple=bool(rho >= SIMPLE_GAP),
        rho=rho,
        flavor=flavor,
        partners=partners,
        provenance={
            "method": "grid+nelder-mead",
            "grid": bs.n_grid,
            "start": [float(t) for t in best_start],
        },
    )


def bottom_edge(g: FundamentalGraph, flavor: str = "normalized") -> BandEdge:
    """Band-1 minimum at theta = 0, where the bottom of the spectrum is attained."""
    theta0 = np.zeros(g.dim)
    vals = band_values(g, theta0, flavor)
    rho = _eig_gap(vals, 1)
    return BandEdge(
        band=1,
        which="min",
        theta0=theta0,
        value=0.0,
        simple=bool(rho >= SIMPLE_GAP),
        rho=rho,
        flavor=flavor,
        provenance={"method": "bottom of spectrum at theta=0"},
    )


def write_samples_csv(bs: BandStructure, fh) -> None:
    """One row per grid point: theta_1..theta_d, lambda_1..lambda_nu."""
    d = bs.thetas.shape[1]
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([f"theta_{a + 1}" for a in range(d)] + [f"lambda_{n + 1}" for n in range(bs.nbands)])
    for th, lam in zip(bs.thetas, bs.samples):
        w.writerow([format(float(x), ".17g") for x in itertools.chain(th, lam)])
