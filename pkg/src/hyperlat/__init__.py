"""Hyperbolic {p,q} lattices on Riemann surfaces and their CSS surface codes.

The pipeline: Fuchsian translation-group generators (fuchsian) act on a
{p,q} unit cell (lattice) to produce periodic graphs; cycle bases
(cycles) split their cycle space into plaquettes and logicals; the CSS
code (css) puts qubits on edges; exact matching decoding (decoder) and
threshold Monte Carlo (montecarlo) estimate logical error rates.
"""

from .css import CssCode, assemble, distance_X, distance_Z, gf2_in_span, gf2_rank
from .cycles import (
    HyperbolicCycleBasis,
    fundamental_cycle_basis,
    hyperbolic_cycle_basis,
    minimum_cycle_basis,
    spanning_tree,
)
from .decoder import Matching, Syndrome, decode, extract_syndrome, residual_is_logical
from .errors import HyperlatError
from .fuchsian import (
    BravaisFamily,
    BravaisSignature,
    GeneratorSet,
    QuotientSpec,
    build_generators,
    check_relator,
    intersect_quotients,
    load_quotient,
    transversal_words,
)
from .geometry import (
    DiskPoint,
    IsometryClass,
    MobiusTransform,
    RegularPolygon,
    hyperbolic_distance,
    isometry_from_point_pairs,
    regular_polygon,
)
from .lattice import (
    PeriodicGraph,
    UnitCell,
    build_open_graph,
    build_periodic_graph,
    build_unit_cell,
    dual_graph,
    predicted_counts,
    trace_faces,
)
from .montecarlo import SimConfig, SimResult, estimate_threshold, run

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
