"""coarsetop: exact combinatorial topology on finite windows.

The package computes integer simplicial (co)homology of finite windows of
unbounded complexes, builds R-indexed towers of groups with approximate
(mono/epi/iso) verdicts, constructs duality chain maps with measured
displacement, and generates the example spaces (grid windows, books of
half-planes, Cayley 2-complex windows, Baumslag-Solitar complexes) the
experiments run on.
"""

__version__ = "0.1.0"

from .simplicial import (
    SimplicialComplex,
    Subcomplex,
    GeometryStats,
    ComplexError,
    build_complex,
    neighborhood,
    frontier,
    complement_closure,
    annulus,
    edge_distance,
    components,
    geometry_stats,
)

__all__ = [
    "SimplicialComplex",
    "Subcomplex",
    "GeometryStats",
    "ComplexError",
    "build_complex",
    "neighborhood",
    "frontier",
    "complement_closure",
    "annulus",
    "edge_distance",
    "components",
    "geometry_stats",
]
