"""Unit cells, periodic graphs, faces, and duals."""

import math

import numpy as np
import pytest

from hyperlat.errors import NonIntegerCount, NotTwoManifold
from hyperlat.fuchsian import BravaisSignature, transversal_words
from hyperlat.geometry import hyperbolic_distance
from hyperlat.lattice import (
    build_open_graph,
    build_periodic_graph,
    check_two_manifold,
    dual_graph,
    export_coordinates,
    export_dot,
    export_edge_list,
    predicted_counts,
    trace_faces,
)

from conftest import BRAVAIS_OF, cyclic_spec

STANDARD = [
    ((8, 3), 1, ()),
    ((8, 3), 9, (1, 2, 4, 8)),
    ((10, 3), 1, ()),
    ((10, 3), 9, (1, 2, 4, 8)),
]


class TestPredictedCounts:
    def test_8_3_n9(self):
        sig = BravaisSignature.from_pq(8, 8)
        pred = predicted_counts((8, 3), sig, 9)
        assert (pred.V, pred.E, pred.F) == (144, 216, 54)
        assert pred.genus == 10
        assert (pred.n, pred.k) == (216, 20)

    def test_10_3_n9(self):
        sig = BravaisSignature.from_pq(10, 5)
        pred = predicted_counts((10, 3), sig, 9)
        assert (pred.V, pred.E, pred.F) == (90, 135, 27)
        assert pred.k == 20

    def test_minimal_bravais(self):
        sig = BravaisSignature.from_pq(8, 8)
        pred = predicted_counts((8, 8), sig, 1)
        assert (pred.F, pred.E, pred.V) == (1, 4, 1)
        assert pred.genus == 2

    def test_non_hyperbolic_rejected(self):
        sig = BravaisSignature.from_pq(8, 8)
        with pytest.raises(NonIntegerCount):
            predicted_counts((4, 4), sig, 1)


class TestUnitCell:
    def test_8_3_cell(self, unit_cells):
        cell = unit_cells[(8, 3)]
        assert cell.site_count == 16
        assert cell.edges_per_cell() == 24

    def test_10_3_cell(self, unit_cells):
        cell = unit_cells[(10, 3)]
        assert cell.site_count == 10
        assert cell.edges_per_cell() == 15

    def test_bravais_in_itself(self, unit_cells):
        assert unit_cells[(8, 8)].site_count == 1
        assert unit_cells[(8, 8)].edges_per_cell() == 4
        assert unit_cells[(10, 5)].site_count == 2
        assert unit_cells[(10, 5)].edges_per_cell() == 5

    @pytest.mark.parametrize("pattern", [(8, 3), (10, 3)])
    def test_adjacency_at_edge_length(self, pattern, unit_cells):
        cell = unit_cells[pattern]
        ell = cell.edge_length
        for u, v in cell.intra:
            d = hyperbolic_distance(cell.sites[u], cell.sites[v])
            assert abs(d - ell) < 1e-6 * ell
        for rule in cell.inter:
            for u, v in rule.pairs:
                d = hyperbolic_distance(cell.sites[u].z, rule.transform.apply_z(cell.sites[v].z))
                assert abs(d - ell) < 1e-6 * ell

    @pytest.mark.parametrize("pattern", [(8, 3), (10, 3)])
    def test_inter_words_come_in_inverse_pairs(self, pattern, unit_cells):
        cell = unit_cells[pattern]
        by_word = {rule.word: rule for rule in cell.inter}
        for rule in cell.inter:
            inv = None
            for other in cell.inter:
                if other.transform.equivalent_to(rule.transform.inverse(), 1e-8):
                    inv = other
            assert inv is not None
            # the transpose relation between a shift and its inverse
            assert sorted(inv.pairs) == sorted((v, u) for u, v in rule.pairs)

    def test_single_letter_matrices_transpose(self, unit_cells):
        cell = unit_cells[(8, 3)]
        for j in range(1, 5):
            fwd = cell.inter_matrix(j)
            back = cell.inter_matrix(-j)
            assert np.array_equal(fwd, back.T)
            assert fwd.sum() > 0


class TestPeriodicGraph:
    @pytest.mark.parametrize("pattern,N,exps", STANDARD)
    def test_counts_and_degrees(self, pattern, N, exps, built):
        b = built(pattern, N, exps) if N > 1 else built(pattern, N)
        assert b.gpbc.n_vertices == b.pred.V
        assert b.gpbc.n_edges == b.pred.E
        assert set(b.gpbc.degrees) == {pattern[1]}
        assert b.gpbc.is_connected()

    @pytest.mark.parametrize("pattern,N,exps", STANDARD)
    def test_euler_characteristic(self, pattern, N, exps, built):
        b = built(pattern, N, exps) if N > 1 else built(pattern, N)
        chi = len(b.faces) - b.gpbc.n_edges + b.gpbc.n_vertices
        assert chi == 2 - 2 * b.pred.genus
        assert b.pred.genus == N * (2 - 1) + 1  # genus-2 Bravais: h = N + 1

    @pytest.mark.parametrize("pattern,N,exps", STANDARD)
    def test_faces_are_p_gons(self, pattern, N, exps, built):
        b = built(pattern, N, exps) if N > 1 else built(pattern, N)
        assert len(b.faces) == b.pred.F
        assert all(len(f) == pattern[0] for f in b.faces)
        check_two_manifold(b.gpbc, b.faces)

    def test_two_manifold_violation_detected(self, built):
        b = built((8, 3), 1)
        with pytest.raises(NotTwoManifold):
            check_two_manifold(b.gpbc, b.faces[:-1])

    def test_pf_2e_qv(self, built):
        for pattern, N, exps in STANDARD:
            b = built(pattern, N, exps) if N > 1 else built(pattern, N)
            p, q = pattern
            F, E, V = len(b.faces), b.gpbc.n_edges, b.gpbc.n_vertices
            assert p * F == 2 * E == q * V


class TestOpenGraph:
    def test_single_cell(self, built):
        b = built((8, 3), 1)
        single = build_open_graph(b.cell, [()])
        assert single.n_vertices == 16
        assert single.n_edges == len(b.cell.intra)

    def test_nine_cell_patch(self, built):
        b = built((8, 3), 9, (1, 2, 4, 8))
        assert b.open.n_vertices == 144
        assert max(b.open.degrees) == 3
        assert min(b.open.degrees) >= 1

    def test_open_is_subgraph_of_pbc(self, built):
        for pattern, N, exps in STANDARD:
            b = built(pattern, N, exps) if N > 1 else built(pattern, N)
            pbc = {(min(e.tail, e.head), max(e.tail, e.head), e.word) for e in b.gpbc.edges}
            opn = {(min(e.tail, e.head), max(e.tail, e.head), e.word) for e in b.open.edges}
            assert opn <= pbc
            wrapped = sum(1 for e in b.gpbc.edges if e.wrapped)
            assert len(pbc) - len(opn) == wrapped

    def test_open_matches_pbc_under_float_drift(self, built):
        # long translation products have entries of order cosh(length), so
        # composition error can exceed any absolute tolerance; this quotient
        # used to produce open edges whose orientation disagreed with the
        # periodic graph
        b = built((8, 3), 15, (1, 14, 14, 1))

        def canon(e):
            if e.tail < e.head:
                return (e.tail, e.head, e.word)
            return (e.head, e.tail, tuple(-w for w in reversed(e.word)))

        pbc = {canon(e) for e in b.gpbc.edges}
        opn = {canon(e) for e in b.open.edges}
        assert opn <= pbc
        wrapped = sum(1 for e in b.gpbc.edges if e.wrapped)
        assert len(pbc) - len(opn) == wrapped


class TestDual:
    @pytest.mark.parametrize("pattern,N,exps", STANDARD)
    def test_count_swap(self, pattern, N, exps, built):
        b = built(pattern, N, exps) if N > 1 else built(pattern, N)
        assert b.dual.n_vertices == len(b.faces)
        assert b.dual.n_edges == b.gpbc.n_edges
        dual_faces = trace_faces(b.dual)
        assert len(dual_faces) == b.gpbc.n_vertices
        # dual faces are primal vertex stars: q-gons
        assert all(len(f) == pattern[1] for f in dual_faces)
        # dual vertices have degree p
        assert set(b.dual.degrees) == {pattern[0]}

    def test_dual_of_dual(self, built):
        b = built((8, 3), 9, (1, 2, 4, 8))
        dd = dual_graph(b.dual, trace_faces(b.dual))
        assert dd.n_vertices == b.gpbc.n_vertices
        assert dd.n_edges == b.gpbc.n_edges
        deg_dd = sorted(dd.degrees)
        deg_primal = sorted(b.gpbc.degrees)
        assert deg_dd == deg_primal


class TestExports:
    def test_edge_list_stable_and_sorted(self, built):
        b = built((8, 3), 1)
        text = export_edge_list(b.gpbc)
        assert text == export_edge_list(b.gpbc)
        rows = [tuple(map(int, line.split())) for line in text.strip().splitlines()]
        assert rows == sorted(rows)
        assert len(rows) == b.gpbc.n_edges
        assert min(r[0] for r in rows) >= 1

    def test_coordinates(self, built):
        b = built((8, 3), 1)
        text = export_coordinates(b.gpbc)
        lines = text.strip().splitlines()
        assert len(lines) == b.gpbc.n_vertices
        _, re_, im_ = lines[0].split()
        assert float(re_) ** 2 + float(im_) ** 2 < 1.0

    def test_dot(self, built):
        b = built((8, 3), 1)
        dot = export_dot(b.gpbc)
        assert dot.startswith("graph")
        assert dot.count("--") == b.gpbc.n_edges
