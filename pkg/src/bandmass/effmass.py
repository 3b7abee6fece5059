"""Effective forms, mass tensors and the bounds that constrain them.

Convention: the effective form of a band edge is the eps^2 coefficient
``mu(w)`` of ``lambda(theta0 + eps w)``, and ``M`` is the symmetric matrix
with ``mu(w) = <M w, w>``.  The Hessian of the band function is ``2 M``.

Three routes compute ``mu``:

* ``mu_perturbative``: second-order perturbation theory at a simple eigenvalue,
  using the reduced resolvent built from the eigendecomposition.
* ``mu_bottom_exact``: the squared norm of a projected edge vector, valid at
  the bottom of the spectrum only.
* ``mu_finite_difference``: Richardson-extrapolated central differences of the
  sorted eigenvalue, kept independent of both.

Degree-related names: ``deg`` is the per-vertex degree array, ``total_degree``
its sum; the degeneracy factor of the density-of-states mass is
``degeneracy``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEdgeError, DegenerateMassError
from .floquet import band_values, canonical, check_flavor, derivative_matrices, fiber_matrix, incidence
from .graph import FundamentalGraph, bridges
from .spectrum import SIMPLE_GAP, BandEdge

BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class EffectiveForm:
    matrix: np.ndarray
    band: int
    theta0: np.ndarray
    flavor: str
    method: str

    def __call__(self, omega) -> float:
        w = np.asarray(omega, dtype=float)
        return float(w @ self.matrix @ w)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


@dataclass(frozen=True)
class MassTensor:
    tensor: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        """Descending, so ``m_1 >= ... >= m_d``."""
        return np.sort(np.linalg.eigvalsh(self.tensor))[::-1]


@dataclass
class Check:
    """One inequality ``lhs <= rhs`` with its margin ``rhs - lhs``."""

    name: str
    lhs: float
    rhs: float
    slack: float = BOUND_SLACK

    @property
    def margin(self) -> float:
        return float(self.rhs - self.lhs)

    @property
    def passed(self) -> bool:
        return self.margin >= -self.slack

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "passed": self.passed}


@dataclass
class BoundReport:
    values: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def merge(self, other: "BoundReport") -> "BoundReport":
        return BoundReport({**self.values, **other.values}, self.checks + other.checks)

    def as_dict(self) -> dict:
        return {
            "values": self.values,
            "checks": [c.as_dict() for c in self.checks],
            "passed": self.passed,
        }


def _unit(omega) -> np.ndarray:
    w = np.asarray(omega, dtype=float)
    norm = np.linalg.norm(w)
    if not np.isclose(norm, 1.0, atol=1e-12):
        raise ValueError(f"direction must be a unit vector, |w| = {norm}")
    return w


def directions(d: int, count: int | None = None) -> np.ndarray:
    """Deterministic unit directions: uniform angles for d = 2, Fibonacci-type points otherwise."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        count = 360 if count is None else count
        a = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    count = 512 if count is None else count
    # Halton points pushed through the inverse normal CDF, then normalised
    from scipy.stats import norm, qmc

    pts = qmc.Halton(d, scramble=False).random(count + 1)[1:]
    x = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_directions(d: int, count: int, seed: int = 0) -> np.ndarray:
    x = np.random.default_rng(seed).standard_normal((count, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


# -- the three routes to mu ------------------------------------------------


def _simple_eigenpair(g, theta0, n, flavor):
    f = fiber_matrix(g, theta0, flavor)
    vals, vecs = np.linalg.eigh(f)
    if not 1 <= n <= g.nv:
        raise ValueError(f"band index {n} out of range 1..{g.nv}")
    others = np.delete(vals, n - 1)
    if others.size and np.min(np.abs(others - vals[n - 1])) < SIMPLE_GAP:
        raise DegenerateEdgeError(
            f"degenerate edge: band {n} at theta={np.round(np.asarray(theta0), 12).tolist()} "
            "is not a simple eigenvalue"
        )
    return vals, vecs


def mu_perturbative(g: FundamentalGraph, theta0, n: int, omega, flavor: str = "normalized") -> float:
    check_flavor(flavor)
    w = _unit(omega)
    vals, vecs = _simple_eigenpair(g, theta0, n, flavor)
    psi = vecs[:, n - 1]
    d1, d2, _ = derivative_matrices(g, theta0, w, flavor)
    first = np.vdot(psi, d2 @ psi).real
    coupling = vecs.conj().T @ (d1 @ psi)
    denom = vals - vals[n - 1]
    keep = np.arange(g.nv) != n - 1
    second = np.sum(np.abs(coupling[keep]) ** 2 / denom[keep])
    return float(first - second)


def _bottom_edge_vector(g: FundamentalGraph, omega, flavor: str) -> np.ndarray:
    scale = g.total_degree if flavor == "normalized" else g.nv
    return 1j * (g.indices @ omega) / np.sqrt(scale)


def cycle_space_projector(g: FundamentalGraph) -> np.ndarray:
    """Orthogonal projector of C^{ne} onto the kernel of the adjoint incidence."""
    u, s, _ = np.linalg.svd(incidence(g, "normalized"), full_matrices=True)
    rank = int(np.sum(s > 1e-9 * max(1, g.nv)))
    q = u[:, :rank]
    return np.eye(g.ne) - q @ q.T


def mu_bottom_exact(g: FundamentalGraph, omega, flavor: str = "normalized") -> float:
    check_flavor(flavor)
    w = _unit(omega)
    h = _bottom_edge_vector(g, w, flavor)
    return float(np.linalg.norm(cycle_space_projector(g) @ h) ** 2)


def mu_bottom_identity(g: FundamentalGraph, omega, flavor: str = "normalized") -> tuple[float, float]:
    """The two gradient-factor expressions for the bottom effective form.

    Returns ``(|g1 psi0 + g0 psi1|^2, |g1 psi0|^2 - |g0 psi1|^2)`` with ``psi1``
    the first-order eigenvector correction.
    """
    check_flavor(flavor)
    w = _unit(omega)
    theta0 = np.zeros(g.dim)
    vals, vecs = _simple_eigenpair(g, theta0, 1, flavor)
    psi0 = vecs[:, 0]
    d1, _, g1 = derivative_matrices(g, theta0, w, flavor)
    g0 = incidence(g, flavor)
    # psi1 = -(P D0)^{-1} P D1 psi0 on the complement of psi0
    coeff = (vecs.conj().T @ (d1 @ psi0))[1:] / vals[1:]
    psi1 = -vecs[:, 1:] @ coeff
    a = g1 @ psi0
    b = g0 @ psi1
    return float(np.linalg.norm(a + b) ** 2), float(np.linalg.norm(a) ** 2 - np.linalg.norm(b) ** 2)


def mu_finite_difference(
    g: FundamentalGraph, theta0, n: int, omega, h: float = 1e-2, flavor: str = "normalized"
) -> float:
    """Half the Richardson-extrapolated central second difference of ``lambda_n``.

    Uses steps ``h`` and ``h/2``.  The default balances round-off, which
    grows like eps / h^2, against the O(h^4) truncation.  Accuracy degrades
    near eigenvalue crossings.
    """
    if not 0 < h <= 0.1:
        raise ValueError("step must lie in (0, 0.1]")
    w = _unit(omega)
    theta0 = np.asarray(theta0, dtype=float)

    def lam(eps):
        return band_values(g, theta0 + eps * w, flavor)[n - 1]

    f0 = lam(0.0)

    def second(step):
        return (lam(step) - 2 * f0 + lam(-step)) / step**2

    rich = (4 * second(h / 2) - second(h)) / 3
    return float(rich / 2)


_METHODS = {
    "perturbative": lambda g, t, n, w, fl: mu_perturbative(g, t, n, w, fl),
    "finite-difference": lambda g, t, n, w, fl: mu_finite_difference(g, t, n, w, flavor=fl),
    "bottom-exact": lambda g, t, n, w, fl: mu_bottom_exact(g, w, fl),
}


def effective_matrix(
    g: FundamentalGraph, theta0, n: int, flavor: str = "normalized", method: str = "perturbative"
) -> EffectiveForm:
    """Assemble ``M`` from ``mu`` by polarization on coordinate directions."""
    check_flavor(flavor)
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    theta0 = np.asarray(theta0, dtype=float)
    if method == "bottom-exact" and (n != 1 or np.any(canonical(theta0) != 0)):
        raise ValueError("bottom-exact applies to band 1 at theta = 0 only")
    mu = _METHODS[method]
    d = g.dim
    eye = np.eye(d)
    m = np.zeros((d, d))
    for a in range(d):
        m[a, a] = mu(g, theta0, n, eye[a], flavor)
    for a in range(d):
        for b in range(a + 1, d):
            val = mu(g, theta0, n, (eye[a] + eye[b]) / np.sqrt(2), flavor)
            m[a, b] = m[b, a] = val - (m[a, a] + m[b, b]) / 2
    return EffectiveForm(m, n, theta0, flavor, method)


def mass_tensor(form: EffectiveForm) -> MassTensor:
    m = form.matrix
    scale = max(np.linalg.norm(m, 2), np.finfo(float).tiny)
    if np.min(np.abs(np.linalg.eigvalsh(m))) < 1e-12 * scale or not np.any(m):
        raise DegenerateMassError("degenerate effective mass: effective form matrix is singular")
    return MassTensor(np.linalg.inv(m))


# -- bounds ----------------------------------------------------------------


def edge_constants(g: FundamentalGraph, flavor: str = "normalized") -> tuple[float, float]:
    """``(T1, T2)``: max over vertices of the weighted sums of |index|^s / s over outgoing edges."""
    check_flavor(flavor)
    deg = g.degrees.astype(float)
    sums = np.zeros((2, g.nv))
    for u, v, t in g.oriented_edges():
        norm = float(np.linalg.norm(t))
        w = 1.0 / np.sqrt(deg[u] * deg[v]) if flavor == "normalized" else 1.0
        sums[0, u] += norm * w
        sums[1, u] += norm**2 * w
    return float(sums[0].max()), float(sums[1].max() / 2)


def band_edge_bound(
    g: FundamentalGraph, edge: BandEdge, flavor: str | None = None, sweep: np.ndarray | None = None
) -> BoundReport:
    """Check ``|mu(w)| <= T1^2 / rho + T2`` over a direction sweep."""
    flavor = edge.flavor if flavor is None else flavor
    if not edge.simple:
        raise DegenerateEdgeError(f"degenerate edge: band {edge.band} {edge.which}")
    t1, t2 = edge_constants(g, flavor)
    rho = edge.rho
    bound = t2 if np.isinf(rho) else t1**2 / rho + t2
    form = effective_matrix(g, edge.theta0, edge.band, flavor)
    sweep = directions(g.dim) if sweep is None else sweep
    mus = np.einsum("ka,ab,kb->k", sweep, form.matrix, sweep)
    worst = float(np.max(np.abs(mus)))
    tag = "combinatorial " if flavor == "combinatorial" else ""
    return BoundReport(
        {"T1": t1, "T2": t2, "rho": rho, "edge_bound": bound, "max_abs_mu": worst},
        [Check(f"{tag}band {edge.band} {edge.which}: max|mu| <= T1^2/rho + T2", worst, bound)],
    )


def _bottom_mus(g: FundamentalGraph, sweep: np.ndarray, flavor: str) -> np.ndarray:
    proj = cycle_space_projector(g)
    scale = g.total_degree if flavor == "normalized" else g.nv
    h = (g.indices @ sweep.T) / np.sqrt(scale)  # (ne, K), the factor i drops out of the norm
    return np.sum((proj @ h) ** 2, axis=0)


def bottom_constants(g: FundamentalGraph, flavor: str = "normalized") -> dict:
    check_flavor(flavor)
    b = bridges(g)
    nu, d = g.nv, g.dim
    if flavor == "normalized":
        k = float(g.total_degree)
        lower_den, mid_den, bridge_den = k * nu * d, k, k * nu
    else:
        lower_den, mid_den, bridge_den = nu * nu * d, float(nu), float(nu * nu)
    return {
        "Lambda0": b.lambda0,
        "Lambda1": b.lambda1,
        "lower": b.lambda0 / lower_den,
        "upper": b.lambda1 / mid_den,
        "mid_denominator": mid_den,
        "bridge_denominator": bridge_den,
        "bridges": b,
    }


def bottom_bounds(g: FundamentalGraph, flavor: str = "normalized", sweep: np.ndarray | None = None) -> BoundReport:
    """Two-sided bottom-of-spectrum bounds, every layer checked over ``sweep``."""
    c = bottom_constants(g, flavor)
    b = c["bridges"]
    sweep = directions(g.dim) if sweep is None else sweep
    mus = _bottom_mus(g, sweep, flavor)
    proj_b = (b.t1 @ sweep.T).astype(float) ** 2  # (nbridges, K)
    mid = proj_b.sum(axis=0) / c["mid_denominator"]
    per_bridge = proj_b.max(axis=0) / c["bridge_denominator"]
    tag = "combinatorial " if flavor == "combinatorial" else ""
    checks = [
        Check(f"{tag}bottom: 0 < lower", 0.0, c["lower"], slack=0.0),
        Check(f"{tag}bottom: lower <= min mu", c["lower"], float(mus.min())),
        Check(f"{tag}bottom: mu(w) <= bridge sum(w)", 0.0, float(np.min(mid - mus))),
        Check(f"{tag}bottom: max bridge sum <= Lambda1 term", float(mid.max()), c["upper"]),
        Check(f"{tag}bottom: per-bridge lower bound", 0.0, float(np.min(mus - per_bridge))),
        Check(f"{tag}Lambda0 floor", b.lambda0_floor, b.lambda0),
        Check(f"{tag}Lambda0 <= Lambda1", b.lambda0, b.lambda1),
        Check(f"{tag}Lambda1 ceiling", b.lambda1, b.lambda1_ceiling),
    ]
    values = {
        "Lambda0": c["Lambda0"],
        "Lambda1": c["Lambda1"],
        "Lambda0_floor": b.lambda0_floor,
        "Lambda1_ceiling": b.lambda1_ceiling,
        "bottom_lower": c["lower"],
        "bottom_upper": c["upper"],
        "mu_min": float(mus.min()),
        "mu_max": float(mus.max()),
        "total_degree": g.total_degree,
        "nu": g.nv,
        "d": g.dim,
    }
    return BoundReport(values, checks)


def trace_constants(g: FundamentalGraph, flavor: str = "normalized") -> dict:
    c = bottom_constants(g, flavor)
    b = c["bridges"]
    norms2 = (b.t1.astype(float) ** 2).sum(axis=1)
    nu, d = g.nv, g.dim
    if flavor == "normalized":
        k = float(g.total_degree)
        c0 = norms2.max() / (k * nu)
        c1 = norms2.sum() / k
        m_cap = k * nu * d / b.lambda0
    else:
        c0 = norms2.max() / (nu * nu)
        c1 = norms2.sum() / nu
        m_cap = nu * nu * d / b.lambda0
    return {"C0": float(c0), "C1": float(c1), "mass_cap": float(m_cap)}


def trace_bounds(g: FundamentalGraph, form: EffectiveForm, flavor: str | None = None) -> BoundReport:
    """``C0 <= Tr M <= C1`` and the induced bracket on the mass eigenvalues."""
    flavor = form.flavor if flavor is None else flavor
    c = trace_constants(g, flavor)
    masses = mass_tensor(form).eigenvalues
    tr = form.trace
    tag = "combinatorial " if flavor == "combinatorial" else ""
    checks = [
        Check(f"{tag}trace: C0 <= Tr M", c["C0"], tr),
        Check(f"{tag}trace: Tr M <= C1", tr, c["C1"]),
        Check(f"{tag}mass: m_1 <= cap", float(masses[0]), c["mass_cap"]),
        Check(f"{tag}mass: 1/C1 <= m_d", 1.0 / c["C1"], float(masses[-1])),
    ]
    return BoundReport({**c, "trace_M": tr, "masses": masses.tolist()}, checks)


@dataclass(frozen=True)
class DosMass:
    value: float
    lower: float | None = None
    upper: float | None = None


def dos_effective_mass(m: MassTensor, degeneracy: float = 1.0, graph: FundamentalGraph | None = None) -> DosMass:
    """Density-of-states mass ``(degeneracy^2 m1 m2 m3)^(1/3)`` in three dimensions.

    With ``graph`` the bracket implied by the bottom-of-spectrum mass bounds
    is attached.
    """
    ev = m.eigenvalues
    if ev.size != 3:
        raise ValueError("density-of-states mass is defined for d = 3 only")
    if np.any(ev <= 0):
        raise ValueError("density-of-states mass needs positive masses")
    if degeneracy <= 0:
        raise ValueError("degeneracy must be positive")
    value = float((degeneracy**2 * np.prod(ev)) ** (1 / 3))
    if graph is None:
        return DosMass(value)
    c = trace_constants(graph)
    factor = degeneracy ** (2 / 3)
    return DosMass(value, factor / c["C1"], factor * c["mass_cap"])
