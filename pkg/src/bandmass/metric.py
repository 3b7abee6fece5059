"""Equilateral metric-graph spectra obtained from the discrete bands.

Every edge of the metric graph has length 1.  With ``z = arccos(1 - lambda)``
in [0, pi], the metric band functions are ``E_{n,j} = z_{n,j}^2`` where
``z_{n,j} = z + pi j`` for even ``j`` and ``(pi - z) + pi j`` for odd ``j``;
the Dirichlet energies ``(pi k)^2`` are flat bands in addition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .effmass import BoundReport, Check, EffectiveForm, bottom_bounds, directions, effective_matrix
from .errors import ResonanceError
from .floquet import band_values
from .graph import FundamentalGraph
from .spectrum import BandStructure

RESONANCE_TOL = 1e-8


def arc(lam) -> np.ndarray:
    """``arccos(1 - lam)`` evaluated as ``2 arcsin(sqrt(lam / 2))`` for accuracy near 0."""
    lam = np.clip(np.asarray(lam, dtype=float), 0.0, 2.0)
    return 2.0 * np.arcsin(np.sqrt(lam / 2.0))


def branch(z, j: int):
    return z + np.pi * j if j % 2 == 0 else (np.pi - z) + np.pi * j


def metric_band_function(lam, j: int):
    """``E_{n,j}`` from discrete band values ``lam``."""
    return branch(arc(lam), j) ** 2


@dataclass
class MetricSpectrum:
    ac_bands: dict = field(default_factory=dict)
    flat_points: list = field(default_factory=list)
    flat_band_families: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "ac_bands": [
                {"n": n, "j": j, "interval": list(iv)} for (n, j), iv in sorted(self.ac_bands.items())
            ],
            "flat_points": self.flat_points,
            "flat_band_families": [
                {"n": n, "energies": es} for n, es in sorted(self.flat_band_families.items())
            ],
        }


def metric_spectrum(bs: BandStructure, j_max: int = 4, k_max: int = 4) -> MetricSpectrum:
    """Metric bands for ``j = 0..j_max`` and Dirichlet points for ``k = 1..k_max``."""
    if bs.flavor != "normalized":
        raise ValueError("metric spectrum needs the normalized band structure")
    out = MetricSpectrum()
    for n, (lo, hi) in enumerate(bs.bands, start=1):
        if bs.is_flat(n):
            z = float(arc(lo))
            out.flat_band_families[n] = [float(branch(z, j) ** 2) for j in range(j_max + 1)]
            continue
        z_lo, z_hi = float(arc(lo)), float(arc(hi))
        for j in range(j_max + 1):
            if j % 2 == 0:
                iv = ((z_lo + np.pi * j) ** 2, (z_hi + np.pi * j) ** 2)
            else:
                # z -> pi - z reverses order, so the endpoints swap
                iv = (((np.pi - z_hi) + np.pi * j) ** 2, ((np.pi - z_lo) + np.pi * j) ** 2)
            out.ac_bands[(n, j)] = (float(iv[0]), float(iv[1]))
    out.flat_points = [float((np.pi * k) ** 2) for k in range(1, k_max + 1)]
    return out


def resonance_factor(energy: float) -> float:
    """``2 sqrt(E) / sin(sqrt(E))``, equal to 2 at ``E = 0``."""
    if energy < 0:
        raise ValueError("metric energy must be non-negative")
    z = np.sqrt(energy)
    k = np.round(z / np.pi)
    if k >= 1 and abs(z - np.pi * k) < RESONANCE_TOL:
        raise ResonanceError(f"resonance point: sqrt(E) = {z!r} is within {RESONANCE_TOL} of {int(k)} pi")
    if z < 1e-6:
        return 2.0 + z**2 / 3.0
    return float(2 * z / np.sin(z))


def metric_effective_form(energy: float, form: EffectiveForm) -> EffectiveForm:
    """Scale a discrete effective form to the metric band through ``energy``.

    The factor is negative on branches where ``sin sqrt(E) < 0``; it is
    applied as is, which turns discrete minima into metric maxima there.
    """
    factor = resonance_factor(energy)
    return EffectiveForm(factor * form.matrix, form.band, form.theta0, form.flavor, "metric")


def metric_mu_finite_difference(
    g: FundamentalGraph, theta0, n: int, j: int, omega, h: float = 1e-2
) -> float:
    """Half the Richardson second difference of ``E_{n,j}`` along ``omega``."""
    theta0 = np.asarray(theta0, dtype=float)
    w = np.asarray(omega, dtype=float)

    def e(eps):
        return float(metric_band_function(band_values(g, theta0 + eps * w)[n - 1], j))

    e0 = e(0.0)

    def second(step):
        return (e(step) - 2 * e0 + e(-step)) / step**2

    return ((4 * second(h / 2) - second(h)) / 3) / 2


def metric_bottom_bounds(g: FundamentalGraph, sweep: np.ndarray | None = None) -> BoundReport:
    """Doubled discrete bottom bounds, checked against the metric effective form."""
    sweep = directions(g.dim) if sweep is None else sweep
    discrete = bottom_bounds(g, "normalized", sweep)
    lower = 2 * discrete.values["bottom_lower"]
    upper = 2 * discrete.values["bottom_upper"]
    form = effective_matrix(g, np.zeros(g.dim), 1, "normalized", "bottom-exact")
    metric = metric_effective_form(0.0, form)
    mus = np.einsum("ka,ab,kb->k", sweep, metric.matrix, sweep)
    # independent check on a few directions via differences of E_{1,0}
    probes = sweep[:: max(1, len(sweep) // 8)]
    fd_dev = max(
        abs(metric_mu_finite_difference(g, np.zeros(g.dim), 1, 0, w) - float(w @ metric.matrix @ w))
        for w in probes
    )
    checks = [
        Check("metric bottom: lower <= min mu_10", lower, float(mus.min())),
        Check("metric bottom: max mu_10 <= upper", float(mus.max()), upper),
        Check("metric bottom: finite differences agree", fd_dev, 1e-5, slack=0.0),
    ]
    return BoundReport(
        {
            "metric_lower": lower,
            "metric_upper": upper,
            "metric_matrix": metric.matrix.tolist(),
            "finite_difference_deviation": fd_dev,
        },
        checks,
    )
