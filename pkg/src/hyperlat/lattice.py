"""Construction of {p,q} lattices inside Bravais fundamental domains.

Builds the unit cell (sites of the {p,q} tessellation assigned to one
fundamental polygon of the translation group), the open planar graph over
a transversal word set, and the periodic graph over a quotient spec.
Face tracing through the embedded rotation system and the dual graph
live here too, since both are read straight off the embedding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    CoverageFailure,
    DegreeViolation,
    Disconnected,
    NonIntegerCount,
    NotTwoManifold,
)
from .fuchsian import (
    BravaisSignature,
    GeneratorSet,
    QuotientSpec,
    Word,
    build_generators,
    transversal_words,
)
from .geometry import (
    DiskPoint,
    MobiusTransform,
    hyperbolic_distance,
    polygon_radius,
    regular_polygon,
    tangent_angle,
)

#: relative tolerance for matching an edge length
EDGE_REL_TOL = 1e-6
#: deduplication radius for lattice sites
SITE_TOL = 1e-7

_ORIGIN = 0.0j


def _mat_key(m: MobiusTransform) -> tuple:
    """Hashable fingerprint of a transform, canonical under global sign."""
    t = (round(m.a.real, 6), round(m.a.imag, 6), round(m.b.real, 6), round(m.b.imag, 6))
    tn = tuple(-x + 0.0 for x in t)
    return min(t, tn)


def _point_key(z: complex) -> tuple:
    return (round(z.real, 6), round(z.imag, 6))


def _match_transform(target: MobiusTransform, mats, by_key) -> int | None:
    """Index of `target` among `mats`, robust to float drift.

    The rounded-key lookup misses when composition error crosses a rounding
    boundary; entries of long translation products are large, so the
    fallback comparison uses a relative tolerance.
    """
    j = by_key.get(_mat_key(target))
    if j is not None:
        return j
    scale = max(abs(target.a), abs(target.b), 1.0)
    best, best_d = None, 1e-6 * scale
    for idx, m in enumerate(mats):
        d = m.distance_to(target)
        if d < best_d:
            best, best_d = idx, d
    return best


@dataclass(frozen=True)
class InterRule:
    """Cross-cell adjacency: site u connects to site v of the cell shifted by `word`."""

    word: Word
    transform: MobiusTransform
    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class UnitCell:
    """The {p,q} sites of one fundamental domain plus their adjacency rules."""

    pattern: tuple[int, int]
    bravais: BravaisSignature
    generators: GeneratorSet
    sites: tuple[DiskPoint, ...]
    intra: tuple[tuple[int, int], ...]
    inter: tuple[InterRule, ...]
    edge_length: float
    phase: float

    @property
    def site_count(self) -> int:
        return len(self.sites)

    def intra_matrix(self) -> np.ndarray:
        n = self.site_count
        m = np.zeros((n, n), dtype=np.uint8)
        for u, v in self.intra:
            m[u, v] = m[v, u] = 1
        return m

    def inter_matrix(self, letter: int) -> np.ndarray:
        """0/1 matrix for the single-letter word (+j or -j); zero if absent."""
        n = self.site_count
        m = np.zeros((n, n), dtype=np.uint8)
        for rule in self.inter:
            if rule.word == (letter,):
                for u, v in rule.pairs:
                    m[u, v] = 1
        return m

    def edges_per_cell(self) -> int:
        return len(self.intra) + sum(len(r.pairs) for r in self.inter) // 2


@dataclass(frozen=True)
class PredictedCounts:
    """Closed-form vertex/edge/face counts for a {p,q} pattern on N cells."""

    V: int
    E: int
    F: int
    genus: int
    n: int
    k: int


def predicted_counts(pattern: tuple[int, int], bravais: BravaisSignature, N: int) -> PredictedCounts:
    p, q = pattern
    denom = p * q - 2 * p - 2 * q
    if denom <= 0:
        raise NonIntegerCount(f"{{{p},{q}}} is not hyperbolic")
    h = N * (bravais.genus - 1) + 1
    f_num = 4 * q * (h - 1)
    if f_num % denom:
        raise NonIntegerCount(f"face count 4q(h-1)/(pq-2p-2q) = {f_num}/{denom} is not an integer")
    F = f_num // denom
    if (p * F) % 2 or (p * F) % q:
        raise NonIntegerCount(f"edge/vertex counts are not integers for {{{p},{q}}}, N={N}")
    E = p * F // 2
    V = p * F // q
    return PredictedCounts(V=V, E=E, F=F, genus=h, n=E, k=2 * h)


def _rotation_cloud(p, q, phase, gens, cutoff, budget=200_000):
    """All {p,q} vertices within `cutoff` of the origin, via the rotation group."""
    poly = regular_polygon(p, q, phase)
    pv = [poly.vertex_z(k) for k in range(p)]
    a_rot = MobiusTransform.rotation(2.0 * math.pi / p)
    t1 = MobiusTransform.translation_to_origin(pv[0])
    b_rot = t1.inverse() @ MobiusTransform.rotation(2.0 * math.pi / q) @ t1
    steps = [a_rot, a_rot.inverse(), b_rot, b_rot.inverse()]
    start = MobiusTransform.identity()
    elems = {_mat_key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for e in frontier:
            for s in steps:
                ne = e @ s
                k = _mat_key(ne)
                if k in elems:
                    continue
                if hyperbolic_distance(_ORIGIN, ne.apply_z(_ORIGIN)) > cutoff:
                    continue
                if len(elems) >= budget:
                    raise CoverageFailure("rotation-group search exceeded its element budget")
                elems[k] = ne
                nxt.append(ne)
        frontier = nxt
    cloud: dict[tuple, complex] = {}
    for e in elems.values():
        for v in pv:
            w = e.apply_z(v)
            if hyperbolic_distance(_ORIGIN, w) > cutoff:
                continue
            cloud.setdefault(_point_key(w), w)
    return cloud, poly.edge_length


def _canonical_site(z, pairings):
    """Dirichlet-domain representative of z under the translation group.

    Greedy descent toward the origin, then a full sweep of the distance
    tie set, resolved by a fixed angular convention so boundary sites get
    exactly one representative.
    """
    cur = z
    improved = True
    while improved:
        improved = False
        for g in pairings:
            z2 = g.apply_z(cur)
            if hyperbolic_distance(_ORIGIN, z2) < hyperbolic_distance(_ORIGIN, cur) - 1e-9:
                cur = z2
                improved = True
    best = hyperbolic_distance(_ORIGIN, cur)
    seen = {_point_key(cur): cur}
    frontier = [cur]
    while frontier:
        nxt = []
        for w in frontier:
            for g in pairings:
                z2 = g.apply_z(w)
                if hyperbolic_distance(_ORIGIN, z2) < best + 1e-7:
                    k = _point_key(z2)
                    if k not in seen:
                        seen[k] = z2
                        nxt.append(z2)
        frontier = nxt

    def angle_key(w):
        a = cmath.phase(w) % (2.0 * math.pi)
        if a > 2.0 * math.pi - 1e-6:
            a = 0.0
        return (round(a, 6), round(abs(w), 6))

    return min(seen.values(), key=angle_key)


def build_unit_cell(pattern: tuple[int, int], gs: GeneratorSet) -> UnitCell:
    """Collect the {p,q} sites of one fundamental domain and their adjacency.

    The polygon phase is chosen so the site cloud is invariant under the
    translation generators; sites are canonicalized into the Dirichlet
    domain about the origin; adjacency rules pair sites at hyperbolic
    distance equal to the {p,q} edge length, within cells (intra) and
    across translated cells (inter, keyed by group words found by a
    bounded search). Every site must end with degree exactly q.
    """
    p, q = pattern
    sig = gs.signature
    rb = hyperbolic_distance(_ORIGIN, polygon_radius(sig.p, sig.q))
    cutoff = rb + 1.6
    # phase selection: the cloud must be stabilized by gamma_1
    for phase in (math.pi / p, 0.0):
        cloud, ell = _rotation_cloud(p, q, phase, gs, cutoff)
        keys = set(cloud)
        tested = bad = 0
        for z in cloud.values():
            w = gs.generators[0].apply_z(z)
            if hyperbolic_distance(_ORIGIN, w) > cutoff - 0.2:
                continue
            tested += 1
            if _point_key(w) not in keys:
                bad += 1
        if tested > 0 and bad == 0:
            break
    else:
        raise CoverageFailure(
            f"no polygon phase aligns {{{p},{q}}} with the {{{sig.p},{sig.q}}} translations"
        )

    ngen = sig.independent_count
    # all side-pairing maps and inverses, including dependent ones: the
    # Dirichlet tie sets of boundary sites are only closed under the full set
    pairings = [m for _, m in gs.side_maps()]
    sites_map: dict[tuple, complex] = {}
    for z in cloud.values():
        if hyperbolic_distance(_ORIGIN, z) > rb + 0.2:
            continue
        c = _canonical_site(z, pairings)
        sites_map.setdefault(_point_key(c), c)
    site_z = sorted(
        sites_map.values(),
        key=lambda z: (round(hyperbolic_distance(_ORIGIN, z), 6), round(cmath.phase(z) % (2 * math.pi), 6)),
    )
    n = len(site_z)

    intra = tuple(
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if abs(hyperbolic_distance(site_z[u], site_z[v]) - ell) < EDGE_REL_TOL * ell
    )

    # candidate shift words: group elements whose translation keeps some
    # translated site within one edge length of the domain; the search ball
    # is padded by one generator translation length because a useful word
    # can pass through elements farther out than its endpoint
    dmax = 2.0 * rb + ell + 0.1
    tau = max(
        2.0 * math.acosh(0.5 * g.trace_magnitude) for g in gs.generators
    )
    search_max = dmax + tau + 0.2
    words: dict[tuple, Word] = {_mat_key(MobiusTransform.identity()): ()}
    mats: dict[tuple, MobiusTransform] = {_mat_key(MobiusTransform.identity()): MobiusTransform.identity()}
    frontier = [(MobiusTransform.identity(), ())]
    letters = [l for j in range(1, ngen + 1) for l in (j, -j)]
    while frontier:
        nxt = []
        for base, w in frontier:
            for l in letters:
                m2 = base @ gs.element(l)
                k = _mat_key(m2)
                if k in words:
                    continue
                if hyperbolic_distance(_ORIGIN, m2.apply_z(_ORIGIN)) > search_max:
                    continue
                if len(words) >= 100_000:
                    raise CoverageFailure("translation-word search exceeded its element budget")
                words[k] = w + (l,)
                mats[k] = m2
                nxt.append((m2, w + (l,)))
        frontier = nxt

    rules = []
    for k, word in sorted(words.items(), key=lambda kv: (len(kv[1]), kv[1])):
        if not word:
            continue
        m = mats[k]
        if hyperbolic_distance(_ORIGIN, m.apply_z(_ORIGIN)) > dmax:
            continue
        pairs = tuple(
            (u, v)
            for u in range(n)
            for v in range(n)
            if abs(hyperbolic_distance(site_z[u], m.apply_z(site_z[v])) - ell) < EDGE_REL_TOL * ell
        )
        if pairs:
            rules.append(InterRule(word=word, transform=m, pairs=pairs))

    degree = [0] * n
    for u, v in intra:
        degree[u] += 1
        degree[v] += 1
    for rule in rules:
        for u, _ in rule.pairs:
            degree[u] += 1
    if any(d != q for d in degree):
        raise DegreeViolation([u for u, d in enumerate(degree) if d != q], q)

    return UnitCell(
        pattern=pattern,
        bravais=sig,
        generators=gs,
        sites=tuple(DiskPoint.from_complex(z) for z in site_z),
        intra=intra,
        inter=tuple(rules),
        edge_length=ell,
        phase=phase,
    )


@dataclass(frozen=True)
class LatticeEdge:
    """One edge of a (periodic or open) lattice graph.

    `angle_tail`/`angle_head` are the outgoing geodesic directions at the
    two endpoints, fixing the rotation system used for face tracing.
    `word` is the cell-shift word (empty for intra-cell edges); `wrapped`
    marks edges absent from the open graph over the same transversal.
    """

    index: int
    tail: int
    head: int
    angle_tail: float
    angle_head: float
    word: Word
    wrapped: bool


@dataclass(frozen=True)
class PeriodicGraph:
    """An immutable embedded graph with a rotation system.

    Vertex id = cell * site_count + site for lattice graphs; dual graphs
    reuse the type with faces as vertices.
    """

    n_vertices: int
    edges: tuple[LatticeEdge, ...]
    cell: UnitCell | None = None
    spec: QuotientSpec | None = None
    coords: tuple[DiskPoint, ...] | None = None

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for e in self.edges:
            deg[e.tail] += 1
            deg[e.head] += 1
        return deg

    @cached_property
    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per vertex: (edge index, other endpoint)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for e in self.edges:
            adj[e.tail].append((e.index, e.head))
            adj[e.head].append((e.index, e.tail))
        return adj

    @cached_property
    def rotation_system(self) -> list[list[tuple[int, int]]]:
        """Per vertex: outgoing half-edges (edge index, direction) by angle.

        Direction 0 runs tail->head, 1 runs head->tail.
        """
        out: list[list[tuple[float, int, int]]] = [[] for _ in range(self.n_vertices)]
        for e in self.edges:
            out[e.tail].append((e.angle_tail, e.index, 0))
            out[e.head].append((e.angle_head, e.index, 1))
        return [[(i, d) for _, i, d in sorted(lst)] for lst in out]

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return True
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for v in frontier:
                for _, w in self.adjacency[v]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return len(seen) == self.n_vertices


def _half_edge_angles(cell: UnitCell, rule: InterRule | None, u: int, v: int) -> tuple[float, float]:
    zu = cell.sites[u].z
    zv = cell.sites[v].z
    if rule is None:
        return tangent_angle(zu, zv), tangent_angle(zv, zu)
    m = rule.transform
    return tangent_angle(zu, m.apply_z(zv)), tangent_angle(zv, m.inverse().apply_z(zu))


def build_periodic_graph(cell: UnitCell, spec: QuotientSpec) -> PeriodicGraph:
    """Assemble the quotient lattice: N copies of the cell glued by the coset action."""
    if spec.signature != cell.bravais:
        raise DegreeViolation([], cell.pattern[1])
    N = spec.index
    n = cell.site_count
    p, q = cell.pattern
    gs = cell.generators
    raw = []
    for u, v in cell.intra:
        at, ah = _half_edge_angles(cell, None, u, v)
        for i in range(N):
            raw.append((i * n + u, i * n + v, at, ah, ()))
    seen = set()
    trans = transversal_words(spec)
    trans_mats = [gs.word_transform(w) for w in trans]
    trans_keys = {_mat_key(m): i for i, m in enumerate(trans_mats)}
    wrapped_flags = []
    for rule in cell.inter:
        perm = spec.permutation_of_word(rule.word)
        k = _mat_key(rule.transform)
        ik = _mat_key(rule.transform.inverse())
        for i in range(N):
            j = perm[i]
            open_neighbor = _match_transform(trans_mats[i] @ rule.transform, trans_mats, trans_keys) == j
            for u, v in rule.pairs:
                key = min((k, i, u, v), (ik, j, v, u))
                if key in seen:
                    continue
                seen.add(key)
                at, ah = _half_edge_angles(cell, rule, u, v)
                raw.append((i * n + u, j * n + v, at, ah, rule.word))
                wrapped_flags.append((len(raw) - 1, not open_neighbor))
    wrapped_map = dict(wrapped_flags)
    order = sorted(range(len(raw)), key=lambda t: (min(raw[t][0], raw[t][1]), max(raw[t][0], raw[t][1]), raw[t][4]))
    edges = tuple(
        LatticeEdge(
            index=idx,
            tail=raw[t][0],
            head=raw[t][1],
            angle_tail=raw[t][2],
            angle_head=raw[t][3],
            word=raw[t][4],
            wrapped=wrapped_map.get(t, False),
        )
        for idx, t in enumerate(order)
    )
    coords = tuple(
        DiskPoint.from_complex(trans_mats[i].apply_z(cell.sites[u].z))
        for i in range(N)
        for u in range(n)
    )
    graph = PeriodicGraph(n_vertices=N * n, edges=edges, cell=cell, spec=spec, coords=coords)
    bad = [v for v, d in enumerate(graph.degrees) if d != q]
    if bad:
        raise DegreeViolation(bad, q)
    pred = predicted_counts(cell.pattern, cell.bravais, N)
    if (graph.n_vertices, graph.n_edges) != (pred.V, pred.E):
        raise DegreeViolation([], q)
    if (2 * graph.n_edges) % p:
        raise NonIntegerCount(f"2E = {2 * graph.n_edges} is not divisible by p = {p}")
    if not graph.is_connected():
        raise Disconnected(f"periodic graph over N={N} cells is not connected")
    return graph


def build_open_graph(cell: UnitCell, words: list[Word]) -> PeriodicGraph:
    """Open planar patch: one cell copy per word, nearest-neighbor edges only.

    `words` must start with the empty word and be hierarchical (BFS order);
    copies that are not geometric neighbors stay unconnected, so boundary
    vertices have degree below q.
    """
    if not words or words[0] != ():
        raise CoverageFailure("transversal must start with the empty word")
    gs = cell.generators
    n = cell.site_count
    mats = [gs.word_transform(w) for w in words]
    by_key = {_mat_key(m): i for i, m in enumerate(mats)}
    raw = []
    for u, v in cell.intra:
        at, ah = _half_edge_angles(cell, None, u, v)
        for i in range(len(words)):
            raw.append((i * n + u, i * n + v, at, ah, ()))
    seen = set()
    for rule in cell.inter:
        k = _mat_key(rule.transform)
        ik = _mat_key(rule.transform.inverse())
        for i in range(len(words)):
            j = _match_transform(mats[i] @ rule.transform, mats, by_key)
            if j is None:
                continue
            for u, v in rule.pairs:
                key = min((k, i, u, v), (ik, j, v, u))
                if key in seen:
                    continue
                seen.add(key)
                at, ah = _half_edge_angles(cell, rule, u, v)
                raw.append((i * n + u, j * n + v, at, ah, rule.word))
    order = sorted(range(len(raw)), key=lambda t: (min(raw[t][0], raw[t][1]), max(raw[t][0], raw[t][1]), raw[t][4]))
    edges = tuple(
        LatticeEdge(
            index=idx, tail=raw[t][0], head=raw[t][1],
            angle_tail=raw[t][2], angle_head=raw[t][3], word=raw[t][4], wrapped=False,
        )
        for idx, t in enumerate(order)
    )
    coords = tuple(
        DiskPoint.from_complex(mats[i].apply_z(cell.sites[u].z))
        for i in range(len(words))
        for u in range(n)
    )
    return PeriodicGraph(n_vertices=len(words) * n, edges=edges, cell=cell, spec=None, coords=coords)


def trace_faces(graph: PeriodicGraph) -> list[list[int]]:
    """Face walks of the embedded graph, as edge-index sequences.

    Faces are the orbits of directed half-edges under "turn to the next
    outgoing direction counterclockwise from the reversed arrival
    direction" — the standard face tracing of a rotation system.
    """
    rot = graph.rotation_system
    pos = {}
    for v, lst in enumerate(rot):
        for slot, he in enumerate(lst):
            pos[he] = (v, slot)
    edges = graph.edges
    faces = []
    visited = set()
    for start in sorted(pos):
        if start in visited:
            continue
        walk = []
        he = start
        while he not in visited:
            visited.add(he)
            walk.append(he[0])
            e = edges[he[0]]
            head = e.head if he[1] == 0 else e.tail
            rev = (he[0], 1 - he[1])
            v, slot = pos[rev]
            assert v == head
            nxt = rot[v][(slot + 1) % len(rot[v])]
            he = nxt
        faces.append(walk)
    return faces


def check_two_manifold(graph: PeriodicGraph, faces: list[list[int]]) -> None:
    """Every edge must occur exactly twice over all face walks."""
    count = [0] * graph.n_edges
    for f in faces:
        for e in f:
            count[e] += 1
    bad = [e for e, c in enumerate(count) if c != 2]
    if bad:
        raise NotTwoManifold(f"edges {bad[:8]} are not in exactly two faces")


def dual_graph(graph: PeriodicGraph, faces: list[list[int]]) -> PeriodicGraph:
    """Dual lattice: one vertex per face, edges shared with the primal by id.

    The dual rotation system orders each face's edges along its walk, so
    dual face tracing recovers the primal vertex stars.
    """
    check_two_manifold(graph, faces)
    slots: dict[int, list[tuple[int, float]]] = {}
    for fi, walk in enumerate(faces):
        L = len(walk)
        for k, e in enumerate(walk):
            slots.setdefault(e, []).append((fi, 2.0 * math.pi * k / L))
    dual_edges = []
    for e in range(graph.n_edges):
        (f1, a1), (f2, a2) = slots[e]
        dual_edges.append(
            LatticeEdge(
                index=e, tail=f1, head=f2, angle_tail=a1, angle_head=a2,
                word=graph.edges[e].word, wrapped=graph.edges[e].wrapped,
            )
        )
    return PeriodicGraph(n_vertices=len(faces), edges=tuple(dual_edges), cell=graph.cell, spec=graph.spec)


def standard_lattice(p: int, q: int, spec: QuotientSpec) -> PeriodicGraph:
    """Convenience: unit cell + periodic graph for a {p,q} pattern over `spec`."""
    gs = build_generators(spec.signature)
    cell = build_unit_cell((p, q), gs)
    return build_periodic_graph(cell, spec)


# --- exports ---


def export_edge_list(graph: PeriodicGraph) -> str:
    lines = []
    for e in graph.edges:
        u, v = sorted((e.tail + 1, e.head + 1))
        lines.append(f"{u} {v}")
    return "\n".join(sorted(lines, key=lambda s: tuple(map(int, s.split())))) + "\n"


def export_coordinates(graph: PeriodicGraph) -> str:
    if graph.coords is None:
        return ""
    return "".join(
        f"{i + 1} {pt.re:.12f} {pt.im:.12f}\n" for i, pt in enumerate(graph.coords)
    )


def export_dot(graph: PeriodicGraph) -> str:
    lines = ["graph lattice {"]
    for e in graph.edges:
        style = ' [style=dashed]' if e.wrapped else ""
        lines.append(f"  v{e.tail + 1} -- v{e.head + 1}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
