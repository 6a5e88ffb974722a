"""Shared fixtures: built lattices and codes, cached per session."""

import pytest

from hyperlat import css, cycles, fuchsian, lattice


@pytest.fixture(scope="session")
def generator_sets():
    return {
        (8, 8): fuchsian.build_generators(fuchsian.BravaisSignature.from_pq(8, 8)),
        (10, 5): fuchsian.build_generators(fuchsian.BravaisSignature.from_pq(10, 5)),
    }


@pytest.fixture(scope="session")
def unit_cells(generator_sets):
    return {
        (8, 3): lattice.build_unit_cell((8, 3), generator_sets[(8, 8)]),
        (10, 3): lattice.build_unit_cell((10, 3), generator_sets[(10, 5)]),
        (8, 8): lattice.build_unit_cell((8, 8), generator_sets[(8, 8)]),
        (10, 5): lattice.build_unit_cell((10, 5), generator_sets[(10, 5)]),
    }


BRAVAIS_OF = {(8, 3): (8, 8), (10, 3): (10, 5), (8, 8): (8, 8), (10, 5): (10, 5)}


def cyclic_spec(bravais, N, exps):
    sig = fuchsian.BravaisSignature.from_pq(*bravais)
    if N == 1:
        return fuchsian.QuotientSpec.trivial(sig)
    perms = [[(x + a) % N for x in range(N)] for a in exps]
    return fuchsian.validate_quotient(sig, N, perms)


#: shift exponents of the bundled cyclic quotients, keyed by Bravais pattern
BUNDLED = {
    (8, 8): [
        (1, ()),
        (5, (1, 0, 0, 3)),
        (7, (1, 5, 2, 3)),
        (9, (1, 2, 6, 3)),
        (15, (1, 2, 4, 11)),
        (17, (1, 2, 4, 9)),
        (21, (1, 2, 4, 8)),
    ],
    (10, 5): [
        (1, ()),
        (5, (1, 0, 1, 2)),
        (6, (1, 0, 1, 2)),
        (7, (1, 5, 6, 3)),
        (9, (1, 3, 4, 5)),
        (11, (1, 5, 8, 2)),
        (21, (1, 2, 4, 8)),
    ],
}


class Built:
    """Everything derived from one (pattern, N) instance."""

    def __init__(self, cell, spec):
        self.cell = cell
        self.spec = spec
        self.pred = lattice.predicted_counts(cell.pattern, cell.bravais, spec.index)
        self.gpbc = lattice.build_periodic_graph(cell, spec)
        self.open = lattice.build_open_graph(cell, fuchsian.transversal_words(spec))
        self.faces = lattice.trace_faces(self.gpbc)
        self.dual = lattice.dual_graph(self.gpbc, self.faces)
        self.hcb = cycles.hyperbolic_cycle_basis(self.open, self.gpbc, self.pred.F)
        self.dual_hcb = cycles.hyperbolic_cycle_basis(None, self.dual, self.gpbc.n_vertices)
        self.code = css.assemble(self.gpbc, self.hcb, self.dual_hcb)


@pytest.fixture(scope="session")
def built(unit_cells):
    cache = {}

    def get(pattern, N, exps=(1, 2, 4, 8)):
        key = (pattern, N, exps if N > 1 else ())
        if key not in cache:
            cell = unit_cells[pattern]
            spec = cyclic_spec(BRAVAIS_OF[pattern], N, exps)
            cache[key] = Built(cell, spec)
        return cache[key]

    return get
