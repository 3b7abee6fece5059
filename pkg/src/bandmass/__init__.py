"""Band structures and effective masses of Laplacians on Z^d-periodic graphs."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .effmass import (
    EffectiveForm,
    MassTensor,
    bottom_bounds,
    band_edge_bound,
    dos_effective_mass,
    effective_matrix,
    mass_tensor,
    mu_bottom_exact,
    mu_finite_difference,
    mu_perturbative,
    trace_bounds,
)
from .errors import DegenerateEdgeError, DegenerateMassError, RefusalError, ResonanceError
from .fixtures import load_fixture
from .floquet import floquet_combinatorial, floquet_normalized, gradient_matrix
from .graph import FundamentalGraph, GraphError, bridges, parse_graph
from .spectrum import BandEdge, BandStructure, band_structure, locate_band_edge

__all__ = [
    "BACKEND",
    "BandEdge",
    "BandStructure",
    "DegenerateEdgeError",
    "DegenerateMassError",
    "EffectiveForm",
    "FundamentalGraph",
    "GraphError",
    "MassTensor",
    "RefusalError",
    "ResonanceError",
    "band_edge_bound",
    "band_structure",
    "bottom_bounds",
    "bridges",
    "dos_effective_mass",
    "effective_matrix",
    "floquet_combinatorial",
    "floquet_normalized",
    "gradient_matrix",
    "load_fixture",
    "locate_band_edge",
    "mass_tensor",
    "mu_bottom_exact",
    "mu_finite_difference",
    "mu_perturbative",
    "parse_graph",
    "trace_bounds",
]
