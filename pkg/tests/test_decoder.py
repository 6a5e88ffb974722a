"""Syndrome extraction, exact matching, and residual classification."""

import random

import pytest

from hyperlat.cycles import edges_of, parity, weight
from hyperlat.decoder import (
    Matching,
    Syndrome,
    _bfs,
    decode,
    dump_decode,
    extract_syndrome,
    residual_is_logical,
)
from hyperlat.errors import OddDefectCount, ResidualHasSyndrome


class TestSyndrome:
    def test_zero_error(self, built):
        b = built((8, 3), 1)
        assert extract_syndrome(b.code, 0).defects == ()

    def test_single_edge(self, built):
        b = built((8, 3), 1)
        e = b.gpbc.edges[5]
        s = extract_syndrome(b.code, 1 << e.index)
        assert set(s.defects) == {e.tail, e.head}

    def test_face_boundary_invisible(self, built):
        b = built((8, 3), 1)
        for f in b.code.h_z:
            assert extract_syndrome(b.code, f).defects == ()

    def test_logical_invisible(self, built):
        b = built((8, 3), 1)
        for z in b.code.z_logicals:
            assert extract_syndrome(b.code, z).defects == ()


def all_pairings(items):
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        for rest in all_pairings(items[1:i] + items[i + 1:]):
            yield [(first, items[i])] + rest


class TestDecode:
    def test_empty(self, built):
        b = built((8, 3), 1)
        m = decode(b.gpbc, Syndrome(()))
        assert m.pairs == () and m.total_weight == 0

    def test_odd_rejected(self, built):
        b = built((8, 3), 1)
        with pytest.raises(OddDefectCount):
            decode(b.gpbc, Syndrome((0, 1, 2)))

    def test_two_defects(self, built):
        b = built((8, 3), 1)
        dist, _ = _bfs(b.gpbc, 0)
        m = decode(b.gpbc, Syndrome((0, 7)))
        assert m.pairs == ((0, 7),)
        assert m.total_weight == dist[7]

    def test_paths_realize_weights(self, built):
        b = built((8, 3), 9, (1, 2, 4, 8))
        rng = random.Random(3)
        defects = tuple(sorted(rng.sample(range(b.gpbc.n_vertices), 8)))
        m = decode(b.gpbc, Syndrome(defects))
        total = 0
        for (u, v), path in zip(m.pairs, m.paths):
            s = extract_syndrome(b.code, path)
            assert set(s.defects) == {u, v}
            total += weight(path)
        assert total == m.total_weight

    @pytest.mark.parametrize("ndef", [2, 4, 6, 8, 10])
    def test_exhaustive_pairing_oracle(self, ndef, built):
        b = built((8, 3), 9, (1, 2, 4, 8))
        rng = random.Random(ndef)
        for _ in range(8):
            defects = tuple(sorted(rng.sample(range(b.gpbc.n_vertices), ndef)))
            m = decode(b.gpbc, Syndrome(defects))
            dmat = {v: _bfs(b.gpbc, v)[0] for v in defects}
            best = min(
                sum(dmat[a][b_] for a, b_ in pairing)
                for pairing in all_pairings(list(defects))
            )
            assert m.total_weight == best

    def test_deterministic(self, built):
        b = built((8, 3), 9, (1, 2, 4, 8))
        s = Syndrome((3, 17, 40, 90))
        assert decode(b.gpbc, s) == decode(b.gpbc, s)

    def test_metric_properties(self, built):
        b = built((8, 3), 9, (1, 2, 4, 8))
        rng = random.Random(11)
        for _ in range(20):
            u, v, w = rng.sample(range(b.gpbc.n_vertices), 3)
            du = _bfs(b.gpbc, u)[0]
            dv = _bfs(b.gpbc, v)[0]
            assert du[v] == dv[u]
            assert du[w] <= du[v] + dv[w]


class TestResidual:
    def test_perfect_correction(self, built):
        b = built((8, 3), 1)
        err = b.code.h_z[0] ^ b.code.h_z[1]
        assert residual_is_logical(b.code, err, err) is False
        assert residual_is_logical(b.code, err, 0) is False

    def test_logical_residual(self, built):
        b = built((8, 3), 1)
        for z in b.code.z_logicals:
            assert residual_is_logical(b.code, z, 0) is True

    def test_open_syndrome_rejected(self, built):
        b = built((8, 3), 1)
        with pytest.raises(ResidualHasSyndrome):
            residual_is_logical(b.code, 1, 0)

    def test_classification_routes_agree_on_decodes(self, built):
        b = built((8, 3), 9, (1, 2, 4, 8))
        rng = random.Random(5)
        for _ in range(50):
            err = 0
            for e in range(b.code.n):
                if rng.random() < 0.03:
                    err ^= 1 << e
            s = extract_syndrome(b.code, err)
            m = decode(b.gpbc, s)
            # residual_is_logical raises if the parity and span routes disagree
            residual_is_logical(b.code, err, m.correction())


def test_dump_decode(built):
    b = built((8, 3), 1)
    s = Syndrome((0, 7))
    m = decode(b.gpbc, s)
    text = dump_decode(s, m)
    assert "defects 0 7" in text
    assert "total_weight" in text
