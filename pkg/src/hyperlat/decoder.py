"""Exact minimum-weight perfect-matching decoding of Z-error syndromes.

Defect pairs are matched on the complete defect graph with shortest-path
weights; exactness comes from networkx's blossom implementation, and a
deterministic optimum is forced by an integer tie-break perturbation.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import networkx as nx

from .cycles import EdgeVector, edges_of, parity
from .css import CssCode, Gf2Span
from .errors import OddDefectCount, ResidualHasSyndrome
from .lattice import PeriodicGraph


@dataclass(frozen=True)
class Syndrome:
    """Violated X checks (vertex ids) of a Z-error pattern."""

    defects: tuple[int, ...]


@dataclass(frozen=True)
class Matching:
    """A perfect matching of the defects with realizing paths."""

    pairs: tuple[tuple[int, int], ...]
    paths: tuple[EdgeVector, ...]
    total_weight: int

    def correction(self) -> EdgeVector:
        acc = 0
        for p in self.paths:
            acc ^= p
        return acc


def extract_syndrome(code: CssCode, error: EdgeVector) -> Syndrome:
    return Syndrome(defects=code.syndrome_x(error))


def _bfs(graph: PeriodicGraph, source: int):
    """Unit-weight shortest paths; returns (dist, predecessor edge) arrays."""
    dist = [-1] * graph.n_vertices
    prev = [-1] * graph.n_vertices
    dist[source] = 0
    frontier = [source]
    d = 0
    adj = graph.adjacency
    while frontier:
        nxt = []
        for v in frontier:
            for e, w in adj[v]:
                if dist[w] < 0:
                    dist[w] = d + 1
                    prev[w] = e
                    nxt.append(w)
        frontier = nxt
        d += 1
    return dist, prev


def decode(gpbc: PeriodicGraph, s: Syndrome) -> Matching:
    """Minimum-total-weight perfect matching of the defect set.

    Weights are graph distances. Among equal-weight optima the matching
    with the lexicographically smallest sorted pair list is returned,
    enforced by adding a per-pair integer perturbation smaller than any
    true weight difference.
    """
    defects = tuple(sorted(s.defects))
    if len(defects) % 2:
        raise OddDefectCount(f"{len(defects)} defects cannot be paired")
    if not defects:
        return Matching(pairs=(), paths=(), total_weight=0)
    bfs = {v: _bfs(gpbc, v) for v in defects}
    n_pairs = len(defects) * (len(defects) - 1) // 2
    scale = n_pairs + 1
    g = nx.Graph()
    g.add_nodes_from(defects)
    rank = 0
    for i, u in enumerate(defects):
        for v in defects[i + 1:]:
            g.add_edge(u, v, weight=bfs[u][0][v] * scale + rank)
            rank += 1
    matched = nx.min_weight_matching(g)
    pairs = tuple(sorted(tuple(sorted(p)) for p in matched))
    paths = []
    total = 0
    for u, v in pairs:
        dist, prev = bfs[u]
        vec = 0
        cur = v
        while cur != u:
            e = prev[cur]
            vec ^= 1 << e
            edge = gpbc.edges[e]
            cur = edge.tail if edge.head == cur else edge.head
        paths.append(vec)
        total += dist[v]
    return Matching(pairs=pairs, paths=tuple(paths), total_weight=total)


_SPAN_CACHE: "weakref.WeakKeyDictionary[CssCode, Gf2Span]" = weakref.WeakKeyDictionary()


def _face_span(code: CssCode) -> Gf2Span:
    span = _SPAN_CACHE.get(code)
    if span is None:
        span = Gf2Span()
        for row in code.h_z:
            span.add(row)
        _SPAN_CACHE[code] = span
    return span


def residual_is_logical(code: CssCode, error: EdgeVector, correction: EdgeVector) -> bool:
    """Whether error + correction acts on an encoded qubit.

    Classified by parity against the X logicals, and cross-checked
    against face-span membership; the two must agree.
    """
    residual = error ^ correction
    if code.syndrome_x(residual):
        raise ResidualHasSyndrome("error + correction is not a closed loop")
    by_parity = any(parity(residual, x) for x in code.x_logicals)
    by_span = not _face_span(code).contains(residual)
    if by_parity != by_span:
        raise ResidualHasSyndrome(
            "logical classification routes disagree (pairing vs face span)"
        )
    return by_parity


def dump_decode(s: Syndrome, m: Matching) -> str:
    lines = [f"defects {' '.join(map(str, s.defects))}"]
    for (u, v), path in zip(m.pairs, m.paths):
        lines.append(f"pair {u} {v} path {' '.join(map(str, edges_of(path)))}")
    lines.append(f"total_weight {m.total_weight}")
    return "\n".join(lines) + "\n"
