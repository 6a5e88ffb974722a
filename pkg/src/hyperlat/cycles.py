"""Cycle-space machinery over GF(2).

Edge subsets are bit-packed integers indexed by edge id. Provides
spanning trees, fundamental and minimum cycle bases, and the hyperbolic
cycle basis splitting the cycle space into F-1 plaquettes plus 2h
minimum-length non-contractible cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BasisIncomplete, Disconnected, InvariantViolation
from .lattice import PeriodicGraph, trace_faces

EdgeVector = int


def vector_from_edges(edge_ids) -> EdgeVector:
    v = 0
    for e in edge_ids:
        v ^= 1 << int(e)
    return v


def edges_of(v: EdgeVector) -> list[int]:
    out = []
    i = 0
    while v:
        if v & 1:
            out.append(i)
        v >>= 1
        i += 1
    return out


def weight(v: EdgeVector) -> int:
    return v.bit_count()


def parity(a: EdgeVector, b: EdgeVector) -> int:
    return (a & b).bit_count() & 1


def is_cycle(graph: PeriodicGraph, v: EdgeVector) -> bool:
    """True iff every vertex has even degree in the support."""
    deg = {}
    for e in edges_of(v):
        edge = graph.edges[e]
        deg[edge.tail] = deg.get(edge.tail, 0) + 1
        deg[edge.head] = deg.get(edge.head, 0) + 1
    return all(d % 2 == 0 for d in deg.values())


class Gf2Span:
    """Incremental row-echelon basis for span queries over GF(2)."""

    def __init__(self):
        self._rows: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v: int) -> int:
        while v:
            p = v.bit_length() - 1
            row = self._rows.get(p)
            if row is None:
                return v
            v ^= row
        return 0

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def add(self, v: int) -> bool:
        """Insert if independent; returns whether the rank grew."""
        r = self.reduce(v)
        if r == 0:
            return False
        self._rows[r.bit_length() - 1] = r
        return True


def spanning_tree(graph: PeriodicGraph) -> tuple[set[int], list[int]]:
    """BFS spanning tree; returns (tree edge ids, non-tree edge ids)."""
    seen = {0} if graph.n_vertices else set()
    tree: set[int] = set()
    frontier = [0] if graph.n_vertices else []
    while frontier:
        nxt = []
        for v in frontier:
            for e, w in graph.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    tree.add(e)
                    nxt.append(w)
        frontier = nxt
    if len(seen) != graph.n_vertices:
        raise Disconnected(f"only {len(seen)} of {graph.n_vertices} vertices reachable")
    non_tree = [e.index for e in graph.edges if e.index not in tree]
    return tree, non_tree


def fundamental_cycle_basis(graph: PeriodicGraph, tree: set[int]) -> list[EdgeVector]:
    """One cycle per non-tree edge: the edge plus its unique tree path."""
    parent_edge = [-1] * graph.n_vertices
    parent = [-1] * graph.n_vertices
    order = [0]
    seen = {0}
    for v in order:
        for e, w in graph.adjacency[v]:
            if e in tree and w not in seen:
                seen.add(w)
                parent[w] = v
                parent_edge[w] = e
                order.append(w)

    def path_to_root(v: int) -> int:
        vec = 0
        while parent[v] != -1:
            vec ^= 1 << parent_edge[v]
            v = parent[v]
        return vec

    basis = []
    for e in graph.edges:
        if e.index in tree:
            continue
        basis.append((1 << e.index) ^ path_to_root(e.tail) ^ path_to_root(e.head))
    return basis


def min_odd_cycle(graph: PeriodicGraph, mask: EdgeVector, starts=None, best_bound=None):
    """Minimum-weight cycle with odd overlap against `mask`.

    Breadth-first search in the double cover where mask edges cross
    sheets: the shortest v+ to v- path, minimized over start vertices,
    is the shortest odd closed walk. Returns (weight, EdgeVector) or
    (None, 0) if no odd cycle exists under `best_bound`.
    """
    n = graph.n_vertices
    if starts is None:
        starts = range(n)
    best = best_bound
    best_vec = None
    adj = graph.adjacency
    for s in starts:
        # BFS from (s, sheet 0) to (s, sheet 1); mask edges flip the sheet
        dist = {(s, 0): 0}
        prev: dict[tuple[int, int], tuple[int, int, int]] = {}
        frontier = [(s, 0)]
        d = 0
        found = None
        while frontier and found is None:
            if best is not None and d + 1 >= best:
                break
            nxt = []
            for (v, sheet) in frontier:
                for e, w in adj[v]:
                    t = (w, sheet ^ ((mask >> e) & 1))
                    if t in dist:
                        continue
                    dist[t] = d + 1
                    prev[t] = (v, sheet, e)
                    if t == (s, 1):
                        found = t
                        break
                    nxt.append(t)
                if found:
                    break
            frontier = nxt
            d += 1
        if found is None:
            continue
        # reconstruct the edge set (repeated edges cancel over GF(2))
        vec = 0
        cur = found
        while cur != (s, 0):
            v, sheet, e = prev[cur]
            vec ^= 1 << e
            cur = (v, sheet)
        best = dist[found]
        best_vec = vec
    if best_vec is None:
        return None, 0
    return best, best_vec


def minimum_cycle_basis(graph: PeriodicGraph) -> list[EdgeVector]:
    """Exact minimum cycle basis via the witness-vector method.

    Witnesses start as unit vectors on the non-tree edges; each round
    extracts the minimum cycle with odd inner product against the current
    witness and updates the rest by symmetric difference.
    """
    tree, non_tree = spanning_tree(graph)
    witnesses = [1 << e for e in non_tree]
    basis = []
    for k in range(len(witnesses)):
        w_k = witnesses[k]
        wgt, cyc = min_odd_cycle(graph, w_k)
        if cyc == 0:
            raise BasisIncomplete(k, f"no cycle with odd parity against witness {k}")
        basis.append(cyc)
        for i in range(k + 1, len(witnesses)):
            if parity(cyc, witnesses[i]):
                witnesses[i] ^= w_k
    return basis


@dataclass(frozen=True)
class HyperbolicCycleBasis:
    """Cycle basis split into plaquettes and non-contractible logicals.

    `faces` stores F-1 independent plaquettes (the F-th is their GF(2)
    sum, available via all_faces); `logicals` holds the 2h minimum-length
    non-trivial cycles. `witness_history` records (witness, cycle) pairs
    in selection order.
    """

    faces: tuple[EdgeVector, ...]
    logicals: tuple[EdgeVector, ...]
    n_edges: int
    witness_history: tuple[tuple[EdgeVector, EdgeVector], ...] = field(default=())

    @property
    def dimension(self) -> int:
        return len(self.faces) + len(self.logicals)

    def derived_face(self) -> EdgeVector:
        acc = 0
        for f in self.faces:
            acc ^= f
        return acc

    def all_faces(self) -> list[EdgeVector]:
        return list(self.faces) + [self.derived_face()]


def _face_pool(gpbc: PeriodicGraph) -> list[EdgeVector]:
    faces = [vector_from_edges(walk) for walk in trace_faces(gpbc)]
    return sorted(faces)


def hyperbolic_cycle_basis(
    open_graph: PeriodicGraph | None,
    gpbc: PeriodicGraph,
    n_faces: int | None = None,
) -> HyperbolicCycleBasis:
    """Build the hyperbolic cycle basis of a periodic lattice.

    Plaquette candidates are the face walks of the embedded rotation
    system; when `open_graph` is given, its minimum cycle basis seeds the
    plaquette set first (the open patch's cycles are all faces), which
    cross-checks the two constructions. Witness vectors guarantee
    independence; the remaining 2h slots are filled by minimum-length
    cycles of odd witness parity found in the double cover.
    """
    m = gpbc.n_edges - gpbc.n_vertices + 1
    pool = _face_pool(gpbc)
    if n_faces is not None and len(pool) != n_faces:
        raise InvariantViolation(f"traced {len(pool)} faces, expected {n_faces}")
    seeds: list[EdgeVector] = []
    if open_graph is not None:
        remap = _edge_id_map(open_graph, gpbc)
        pool_set = set(pool)
        for cyc in minimum_cycle_basis(open_graph):
            mapped = vector_from_edges(remap[e] for e in edges_of(cyc))
            if mapped not in pool_set:
                raise InvariantViolation("open-patch minimum cycle is not a plaquette")
            seeds.append(mapped)

    _, non_tree = spanning_tree(gpbc)
    witnesses = [1 << e for e in non_tree]
    span = Gf2Span()
    faces: list[EdgeVector] = []
    history: list[tuple[EdgeVector, EdgeVector]] = []

    def consume(cycle: EdgeVector) -> None:
        """Pick the witness this cycle pays for, update the rest."""
        for idx, w in enumerate(witnesses):
            if parity(cycle, w):
                witnesses.pop(idx)
                for j in range(len(witnesses)):
                    if parity(cycle, witnesses[j]):
                        witnesses[j] ^= w
                history.append((w, cycle))
                return
        raise InvariantViolation("cycle has even parity against every remaining witness")

    ordered = seeds + [f for f in pool if f not in set(seeds)]
    for f in ordered:
        if len(faces) == len(pool) - 1:
            break
        if span.add(f):
            faces.append(f)
            consume(f)
    if len(faces) != len(pool) - 1:
        raise BasisIncomplete(len(faces), "independent plaquette set is short")

    logicals: list[EdgeVector] = []
    while witnesses:
        w = witnesses[0]
        wgt, cyc = min_odd_cycle(gpbc, w)
        if cyc == 0:
            raise BasisIncomplete(len(faces) + len(logicals))
        if not span.add(cyc):
            raise InvariantViolation("selected non-trivial cycle is dependent")
        logicals.append(cyc)
        consume(cyc)

    hcb = HyperbolicCycleBasis(
        faces=tuple(faces),
        logicals=tuple(logicals),
        n_edges=gpbc.n_edges,
        witness_history=tuple(history),
    )
    _post_check(gpbc, hcb, len(pool))
    return hcb


def _edge_id_map(sub: PeriodicGraph, full: PeriodicGraph) -> dict[int, int]:
    """Edge ids of `sub` (open patch) to edge ids of `full` (periodic)."""
    lookup = {}
    for e in full.edges:
        key = (min(e.tail, e.head), max(e.tail, e.head), e.word)
        lookup.setdefault(key, []).append(e.index)
    remap = {}
    used: dict[tuple, int] = {}
    for e in sub.edges:
        key = (min(e.tail, e.head), max(e.tail, e.head), e.word)
        if key not in lookup:
            raise InvariantViolation("open-patch edge missing from the periodic graph")
        slot = used.get(key, 0)
        used[key] = slot + 1
        remap[e.index] = lookup[key][slot]
    return remap


def _post_check(gpbc: PeriodicGraph, hcb: HyperbolicCycleBasis, n_faces: int) -> None:
    m = gpbc.n_edges - gpbc.n_vertices + 1
    if hcb.dimension != m:
        raise InvariantViolation(f"basis dimension {hcb.dimension} != E-V+1 = {m}")
    span = Gf2Span()
    for v in hcb.faces:
        if not span.add(v):
            raise InvariantViolation("dependent plaquette in basis")
    for v in hcb.logicals:
        if span.contains(v):
            raise InvariantViolation("logical lies in the plaquette span")
        span.add(v)
    if span.rank != m:
        raise InvariantViolation("basis does not span the cycle space")
    acc = 0
    for f in hcb.all_faces():
        acc ^= f
    if acc != 0:
        raise InvariantViolation("faces do not sum to zero over GF(2)")
    for v in list(hcb.faces) + list(hcb.logicals):
        if not is_cycle(gpbc, v):
            raise InvariantViolation("basis element is not a cycle")


def export_basis(hcb: HyperbolicCycleBasis) -> str:
    lines = []
    for f in hcb.faces:
        lines.append("F " + " ".join(map(str, edges_of(f))))
    for l in hcb.logicals:
        lines.append("L " + " ".join(map(str, edges_of(l))))
    return "\n".join(lines) + "\n"
