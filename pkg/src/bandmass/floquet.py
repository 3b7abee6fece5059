"""Floquet fiber matrices, their gradient factor and epsilon-derivatives.

Two flavors are supported: ``"normalized"`` (I - D^{-1/2} A D^{-1/2}) and
``"combinatorial"`` (D - A).  An undirected edge ``u -> v`` with index ``t``
adds ``-w exp(i<t, theta>)`` at ``(u, v)`` and the conjugate at ``(v, u)``,
so loops land twice on the diagonal.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._backend import assemble
from .graph import FundamentalGraph, _shift_array, normalize_indices

FLAVORS = ("normalized", "combinatorial")


def check_flavor(flavor: str) -> str:
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}, got {flavor!r}")
    return flavor


def canonical(theta) -> np.ndarray:
    """Map quasimomenta onto [-pi, pi)^d."""
    theta = np.asarray(theta, dtype=float)
    out = np.mod(theta + np.pi, 2 * np.pi) - np.pi
    # mod can round up to exactly pi
    return np.where(out >= np.pi, out - 2 * np.pi, out)


@lru_cache(maxsize=64)
def _operands(g: FundamentalGraph, flavor: str):
    deg = g.degrees.astype(float)
    taus = np.ascontiguousarray(g.indices, dtype=float)
    tails = np.ascontiguousarray(g.tails, dtype=np.int64)
    heads = np.ascontiguousarray(g.heads, dtype=np.int64)
    if flavor == "normalized":
        weights = 1.0 / np.sqrt(deg[tails] * deg[heads])
        diag = np.ones(g.nv)
    else:
        weights = np.ones(g.ne)
        diag = deg.copy()
    return taus, tails, heads, np.ascontiguousarray(weights), np.ascontiguousarray(diag)


def fiber_batch(g: FundamentalGraph, thetas, flavor: str = "normalized") -> np.ndarray:
    """Fiber matrices for a stack of quasimomenta, shape ``(B, nv, nv)``."""
    check_flavor(flavor)
    thetas = np.ascontiguousarray(np.atleast_2d(np.asarray(thetas, dtype=float)))
    if thetas.shape[1] != g.dim:
        raise ValueError(f"quasimomentum has length {thetas.shape[1]}, expected {g.dim}")
    return assemble(thetas, *_operands(g, flavor))


def fiber_matrix(g: FundamentalGraph, theta, flavor: str = "normalized") -> np.ndarray:
    return fiber_batch(g, np.asarray(theta, dtype=float).reshape(1, -1), flavor)[0]


def floquet_normalized(g: FundamentalGraph, theta) -> np.ndarray:
    return fiber_matrix(g, theta, "normalized")


def floquet_combinatorial(g: FundamentalGraph, theta) -> np.ndarray:
    return fiber_matrix(g, theta, "combinatorial")


def eigvals_batch(g: FundamentalGraph, thetas, flavor: str = "normalized") -> np.ndarray:
    """Ascending eigenvalues for each quasimomentum, shape ``(B, nv)``."""
    return np.linalg.eigvalsh(fiber_batch(g, thetas, flavor))


def band_values(g: FundamentalGraph, theta, flavor: str = "normalized") -> np.ndarray:
    return np.linalg.eigvalsh(fiber_matrix(g, theta, flavor))


def gradient_matrix(g: FundamentalGraph, theta, flavor: str = "normalized") -> np.ndarray:
    """The ``(ne, nv)`` factor with ``fiber = grad^* grad``.

    Row ``e = u -> v`` carries ``exp(i<t, theta>)`` at ``v`` and ``-1`` at ``u``
    (their sum for a loop), divided by ``sqrt(deg)`` in the normalized flavor.
    """
    check_flavor(flavor)
    theta = np.asarray(theta, dtype=float)
    phase = np.exp(1j * (g.indices @ theta))
    out = np.zeros((g.ne, g.nv), dtype=complex)
    rows = np.arange(g.ne)
    np.add.at(out, (rows, g.heads), phase)
    np.add.at(out, (rows, g.tails), -1.0)
    if flavor == "normalized":
        out /= np.sqrt(g.degrees)[None, :]
    return out


def incidence(g: FundamentalGraph, flavor: str = "normalized") -> np.ndarray:
    """Gradient factor at theta = 0 (real)."""
    return gradient_matrix(g, np.zeros(g.dim), flavor).real


def derivative_matrices(g: FundamentalGraph, theta0, omega, flavor: str = "normalized"):
    """First and half-second epsilon-derivatives along ``theta0 + eps * omega``.

    Returns ``(d1, d2, g1)``: ``d1`` is the first derivative of the fiber
    matrix, ``d2`` half its second derivative, ``g1`` the first derivative of
    the gradient factor.  All at ``eps = 0``.
    """
    check_flavor(flavor)
    theta0 = np.asarray(theta0, dtype=float)
    omega = np.asarray(omega, dtype=float)
    taus, tails, heads, weights, _ = _operands(g, flavor)
    proj = taus @ omega
    phase = np.exp(1j * (taus @ theta0))
    d1 = np.zeros((g.nv, g.nv), dtype=complex)
    d2 = np.zeros((g.nv, g.nv), dtype=complex)
    c1 = -1j * proj * phase * weights
    c2 = 0.5 * proj**2 * phase * weights
    np.add.at(d1, (tails, heads), c1)
    np.add.at(d1, (heads, tails), c1.conj())
    np.add.at(d2, (tails, heads), c2)
    np.add.at(d2, (heads, tails), c2.conj())

    g1 = np.zeros((g.ne, g.nv), dtype=complex)
    np.add.at(g1, (np.arange(g.ne), heads), 1j * proj * phase)
    if flavor == "normalized":
        g1 /= np.sqrt(g.degrees)[None, :]
    return d1, d2, g1


def unitary_equivalence_check(g: FundamentalGraph, shifts, theta, flavor: str = "normalized"):
    """Compare the fiber matrix before and after re-indexing by ``shifts``.

    Returns ``(residual, eig_deviation)`` where ``residual`` is the spectral
    norm of ``U F U^{-1} - F'`` with ``U = diag(exp(i<shift(v), theta>))``.
    """
    g2 = normalize_indices(g, shifts)
    theta = np.asarray(theta, dtype=float)
    s = _shift_array(g, shifts)
    u = np.exp(1j * (s @ theta))
    f = fiber_matrix(g, theta, flavor)
    f2 = fiber_matrix(g2, theta, flavor)
    conj = u[:, None] * f * u.conj()[None, :]
    residual = float(np.linalg.norm(conj - f2, 2))
    dev = float(np.max(np.abs(np.linalg.eigvalsh(f) - np.linalg.eigvalsh(f2))))
    return residual, dev
