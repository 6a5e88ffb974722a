"""CSS surface code assembly and distance computation.

Qubits sit on edges; Z checks are face boundaries, X checks are vertex
stars. Logical operators come from the hyperbolic cycle bases of the
primal and dual lattices, and distances are minimum weights of
homologically non-trivial cycles, found by double-cover searches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cycles import (
    EdgeVector,
    Gf2Span,
    HyperbolicCycleBasis,
    edges_of,
    min_odd_cycle,
    parity,
    vector_from_edges,
    weight,
)
from .errors import DimensionMismatch, PairingDegenerate
from .lattice import PeriodicGraph


def _as_rows(matrix) -> list[int]:
    """Bit-pack a matrix given as numpy array / nested lists / int rows."""
    if isinstance(matrix, np.ndarray):
        if matrix.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d matrix, got shape {matrix.shape}")
        return [vector_from_edges(np.nonzero(row % 2)[0]) for row in matrix]
    rows = list(matrix)
    if all(isinstance(r, int) for r in rows):
        return rows
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DimensionMismatch(f"ragged rows of widths {sorted(widths)}")
    return [vector_from_edges(i for i, x in enumerate(r) if x % 2) for r in rows]


def gf2_rank(matrix) -> int:
    span = Gf2Span()
    for row in _as_rows(matrix):
        span.add(row)
    return span.rank


def gf2_in_span(vector, basis) -> bool:
    span = Gf2Span()
    for row in _as_rows(basis):
        span.add(row)
    if isinstance(vector, (list, tuple, np.ndarray)):
        vector = _as_rows([list(vector)])[0]
    return span.contains(vector)


@dataclass(frozen=True)
class CssCode:
    """A CSS surface code over the edges of a periodic lattice."""

    h_z: tuple[EdgeVector, ...]
    h_x: tuple[EdgeVector, ...]
    z_logicals: tuple[EdgeVector, ...]
    x_logicals: tuple[EdgeVector, ...]
    n: int
    k: int

    def syndrome_x(self, error: EdgeVector) -> tuple[int, ...]:
        """Indices of X checks anti-commuting with a Z-error pattern."""
        return tuple(v for v, row in enumerate(self.h_x) if parity(row, error))


def vertex_stars(graph: PeriodicGraph) -> list[EdgeVector]:
    stars = [0] * graph.n_vertices
    for e in graph.edges:
        stars[e.tail] ^= 1 << e.index
        stars[e.head] ^= 1 << e.index
    return stars


def assemble(
    gpbc: PeriodicGraph,
    hcb: HyperbolicCycleBasis,
    dual_hcb: HyperbolicCycleBasis,
) -> CssCode:
    """Build the code; all structural invariants are checked here.

    Dual edges share ids with their primal edges, so dual-lattice
    logicals are already expressed on primal edge ids.
    """
    h_z = tuple(hcb.all_faces())
    h_x = tuple(vertex_stars(gpbc))
    z_logicals = tuple(hcb.logicals)
    x_logicals = tuple(dual_hcb.logicals)
    n = gpbc.n_edges
    for z_row in h_z:
        for x_row in h_x:
            if parity(z_row, x_row):
                raise PairingDegenerate("an X check anti-commutes with a Z check")
    k = n - gf2_rank(h_z) - gf2_rank(h_x)
    if len(z_logicals) != k or len(x_logicals) != k:
        raise PairingDegenerate(
            f"logical counts ({len(z_logicals)}, {len(x_logicals)}) do not match k = {k}"
        )
    pairing = [vector_from_edges(j for j, x in enumerate(x_logicals) if parity(z, x)) for z in z_logicals]
    if gf2_rank(pairing) != k:
        raise PairingDegenerate("logical pairing matrix is singular")
    return CssCode(h_z=h_z, h_x=h_x, z_logicals=z_logicals, x_logicals=x_logicals, n=n, k=k)


def _support_vertices(graph: PeriodicGraph, mask: EdgeVector) -> list[int]:
    out = set()
    for e in edges_of(mask):
        out.add(graph.edges[e].tail)
        out.add(graph.edges[e].head)
    return sorted(out)


def distance_Z(gpbc: PeriodicGraph, x_logicals) -> int:
    """Minimum weight of a cycle with odd overlap against some X logical.

    Per logical, the double-cover search from the logical's support
    vertices finds the shortest odd cycle; the distance is the minimum
    over logicals.
    """
    best = None
    for mask in x_logicals:
        starts = _support_vertices(gpbc, mask)
        w, cyc = min_odd_cycle(gpbc, mask, starts=starts, best_bound=best)
        if cyc:
            best = weight(cyc) if best is None else min(best, weight(cyc))
    if best is None:
        raise PairingDegenerate("no logical has an odd-crossing cycle")
    return best


def distance_X(dual: PeriodicGraph, z_logicals) -> int:
    """Distance of the X sector: the same search on the dual lattice."""
    return distance_Z(dual, z_logicals)


def export_code(code: CssCode, meta: dict | None = None) -> str:
    meta = meta or {}
    header = "n k dZ dX p q N h\n" + " ".join(
        str(meta.get(f, "-"))
        for f in ("n", "k", "dZ", "dX", "p", "q", "N", "h")
    )
    lines = [header]
    for tag, rows in (("HZ", code.h_z), ("HX", code.h_x), ("LZ", code.z_logicals), ("LX", code.x_logicals)):
        for row in rows:
            lines.append(tag + " " + " ".join(map(str, edges_of(row))))
    return "\n".join(lines) + "\n"
