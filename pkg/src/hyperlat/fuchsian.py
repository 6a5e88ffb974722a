"""Fuchsian translation groups of hyperbolic Bravais lattices.

Covers the two Bravais families {4g,4g} and {2(2g+1),2g+1}: side-pairing
generator construction on the fundamental polygon, the group relator, and
quotient specifications (permutation actions on cosets) that define
periodic boundary conditions.

Words over the generators are sequences of signed 1-based indices:
+j means gamma_j, -j means gamma_j^{-1}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from pathlib import Path

from .errors import (
    IndexOutOfRange,
    NotRegular,
    NotTransitive,
    ParseError,
    RelatorNotIdentity,
    RelatorViolation,
    SignatureMismatch,
)
from .geometry import (
    GEOM_TOL,
    IsometryClass,
    MobiusTransform,
    angle_between,
    isometry_from_point_pairs,
    regular_polygon,
)

Word = tuple[int, ...]


class BravaisFamily(Enum):
    FOUR_G = "4g,4g"
    TWO_TIMES_ODD_G = "2(2g+1),2g+1"


@dataclass(frozen=True)
class BravaisSignature:
    """A {p_B, q_B} Bravais lattice of genus g from one of the two families."""

    p: int
    q: int
    genus: int
    family: BravaisFamily

    def __post_init__(self):
        g = self.genus
        if g < 2:
            raise ValueError(f"genus must be >= 2, got {g}")
        if self.family is BravaisFamily.FOUR_G:
            expect = (4 * g, 4 * g)
        else:
            expect = (2 * (2 * g + 1), 2 * g + 1)
        if (self.p, self.q) != expect:
            raise ValueError(
                f"{{{self.p},{self.q}}} does not match family {self.family.value} at genus {g}"
            )

    @classmethod
    def from_pq(cls, p: int, q: int) -> "BravaisSignature":
        if p == q and p % 4 == 0:
            return cls(p, q, p // 4, BravaisFamily.FOUR_G)
        if p == 2 * q and q % 2 == 1 and q >= 5:
            return cls(p, q, (q - 1) // 2, BravaisFamily.TWO_TIMES_ODD_G)
        raise ValueError(f"{{{p},{q}}} is not a supported Bravais signature")

    @property
    def independent_count(self) -> int:
        return 2 * self.genus

    @property
    def side_pairing_count(self) -> int:
        return self.p // 2

    @property
    def minimal_counts(self) -> tuple[int, int, int]:
        """(F, E, V) of the single-cell lattice."""
        if self.family is BravaisFamily.FOUR_G:
            return (1, 2 * self.genus, 1)
        return (1, 2 * self.genus + 1, 2)


def relator_word(genus: int) -> Word:
    """The defining word gamma_1 gamma_2^-1 ... gamma_1^-1 gamma_2 ... gamma_2g."""
    first = [j + 1 if j % 2 == 0 else -(j + 1) for j in range(2 * genus)]
    second = [-w for w in first]
    return tuple(first + second)


@dataclass(frozen=True)
class GeneratorSet:
    """Side-pairing translations of the Bravais fundamental polygon.

    generators[m-1] is gamma_m = R((m-1) alpha) gamma_1 R(-(m-1) alpha)
    with alpha = 2 pi / p_B; only the first 2g are independent.
    """

    signature: BravaisSignature
    generators: tuple[MobiusTransform, ...]

    @property
    def independent_count(self) -> int:
        return self.signature.independent_count

    def element(self, letter: int) -> MobiusTransform:
        """The transform for a signed 1-based generator index."""
        g = self.generators[abs(letter) - 1]
        return g if letter > 0 else g.inverse()

    def word_transform(self, word: Word) -> MobiusTransform:
        out = MobiusTransform.identity()
        for letter in word:
            out = out @ self.element(letter)
        return out

    def side_maps(self) -> list[tuple[Word, MobiusTransform]]:
        """All side pairings and their inverses over the independent generators.

        Dependent pairings (family {2(2g+1),2g+1}) are returned as words in
        the independent generators.
        """
        out = []
        for j in range(1, self.independent_count + 1):
            out.append(((j,), self.element(j)))
            out.append(((-j,), self.element(-j)))
        for word in dependent_generator_words(self):
            out.append((word, self.word_transform(word)))
            inv = tuple(-l for l in reversed(word))
            out.append((inv, self.word_transform(inv)))
        return out


def check_relator(gs: GeneratorSet) -> float:
    """Max-entry deviation of the relator word from +-identity."""
    x = gs.word_transform(relator_word(gs.signature.genus))
    return x.distance_to(MobiusTransform.identity())


def build_generators(sig: BravaisSignature, tol: float = GEOM_TOL) -> GeneratorSet:
    """Construct the side-pairing translations of the fundamental polygon.

    gamma_1 maps the opposite edge of the polygon onto the edge whose
    midpoint lies on the positive real axis, with reversed orientation
    (the orientation under which the vertex-class angle sums are 2 pi);
    the rest follow by conjugation with rotations.
    """
    poly = regular_polygon(sig.p, sig.q)
    v = [poly.vertex_z(k) for k in range(sig.p)]
    m = sig.p // 2
    # edge m-1 = (v[m-1], v[m]) is opposite edge p-1 = (v[p-1], v[0])
    gamma1 = isometry_from_point_pairs(v[m - 1], v[m], v[0], v[sig.p - 1])
    alpha = 2.0 * math.pi / sig.p
    gens = []
    for k in range(m):
        rot = MobiusTransform.rotation(k * alpha)
        gens.append(rot @ gamma1 @ rot.inverse())
    gs = GeneratorSet(signature=sig, generators=tuple(gens))
    residual = check_relator(gs)
    if residual > tol:
        raise RelatorViolation(residual)
    for g in gens:
        if g.classify() is not IsometryClass.HYPERBOLIC:
            raise RelatorViolation(residual)
    return gs


def side_pairing_residual(gs: GeneratorSet) -> float:
    """Worst endpoint mismatch of each pairing map on its paired edge."""
    sig = gs.signature
    poly = regular_polygon(sig.p, sig.q)
    v = [poly.vertex_z(k) for k in range(sig.p)]
    m = sig.p // 2
    worst = 0.0
    for j, g in enumerate(gs.generators):
        src = ((m - 1 + j) % sig.p, (m + j) % sig.p)
        dst = ((j) % sig.p, (sig.p - 1 + j) % sig.p)
        worst = max(
            worst,
            abs(g.apply_z(v[src[0]]) - v[dst[0]]),
            abs(g.apply_z(v[src[1]]) - v[dst[1]]),
        )
    return worst


def vertex_class_angle_sums(gs: GeneratorSet) -> list[float]:
    """Interior-angle sums over the polygon-vertex classes identified by the pairings."""
    sig = gs.signature
    poly = regular_polygon(sig.p, sig.q)
    v = [poly.vertex_z(k) for k in range(sig.p)]
    parent = list(range(sig.p))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    maps = [g for g in gs.generators] + [g.inverse() for g in gs.generators]
    for g in maps:
        for i in range(sig.p):
            w = g.apply_z(v[i])
            for j in range(sig.p):
                if abs(w - v[j]) < 1e-7:
                    parent[find(i)] = find(j)
    classes: dict[int, list[int]] = {}
    for i in range(sig.p):
        classes.setdefault(find(i), []).append(i)
    sums = []
    for members in classes.values():
        sums.append(sum(poly.interior_angle(k) for k in members))
    return sorted(sums)


_DEPENDENT_WORD_CACHE: dict[tuple[int, int, int], tuple[Word, ...]] = {}


def dependent_generator_words(gs: GeneratorSet) -> tuple[Word, ...]:
    """Words over the independent generators for the dependent side pairings.

    The {4g,4g} family has none; the {2(2g+1),2g+1} family has one
    (gamma_{2g+1}). Found by a breadth-first search over short words
    matched numerically against the conjugation-constructed matrix.
    """
    sig = gs.signature
    key = (sig.p, sig.q, sig.genus)
    if key in _DEPENDENT_WORD_CACHE:
        return _DEPENDENT_WORD_CACHE[key]
    ngen = sig.independent_count
    targets = list(range(ngen, sig.side_pairing_count))
    words: list[Word] = []
    letters = [j for j in range(1, ngen + 1)] + [-j for j in range(1, ngen + 1)]
    for t in targets:
        target = gs.generators[t]
        found = None
        for length in range(1, ngen + 3):
            for cand in product(letters, repeat=length):
                if any(a == -b for a, b in zip(cand, cand[1:])):
                    continue
                if gs.word_transform(cand).equivalent_to(target, 1e-8):
                    found = cand
                    break
            if found is not None:
                break
        if found is None:
            raise RelatorViolation(math.inf)
        words.append(found)
    out = tuple(words)
    _DEPENDENT_WORD_CACHE[key] = out
    return out


# --- quotient specifications ---


def _invert_perm(perm: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(perm)
    for i, x in enumerate(perm):
        out[x] = i
    return tuple(out)


@dataclass(frozen=True)
class QuotientSpec:
    """A permutation action of the translation group on N cosets.

    perms[j] is the image array (0-based internally) of gamma_{j+1} acting
    on the right cosets of a normal subgroup of index N; validity means the
    relator acts as the identity and the action is transitive and regular.
    """

    signature: BravaisSignature
    index: int
    perms: tuple[tuple[int, ...], ...]

    @classmethod
    def trivial(cls, sig: BravaisSignature) -> "QuotientSpec":
        return validate_quotient(sig, 1, [(0,)] * sig.independent_count)

    def permutation_of_letter(self, letter: int) -> tuple[int, ...]:
        j = abs(letter)
        if not 1 <= j <= self.signature.independent_count:
            raise IndexOutOfRange(f"generator index {letter} outside 1..{self.signature.independent_count}")
        p = self.perms[j - 1]
        return p if letter > 0 else _invert_perm(p)

    def permutation_of_word(self, word: Word) -> tuple[int, ...]:
        """Left-to-right composition of the letter permutations."""
        cur = tuple(range(self.index))
        for letter in word:
            p = self.permutation_of_letter(letter)
            cur = tuple(p[x] for x in cur)
        return cur


def coset_action(spec: QuotientSpec, word) -> tuple[int, ...]:
    """Permutation of the coset indices under a word (signed 1-based letters)."""
    return spec.permutation_of_word(tuple(word))


def validate_quotient(sig: BravaisSignature, index: int, perms) -> QuotientSpec:
    """Run all quotient invariants; rejection is total."""
    ngen = sig.independent_count
    if index < 1:
        raise ParseError(f"index must be >= 1, got {index}")
    if len(perms) != ngen:
        raise ParseError(f"expected {ngen} generator permutations, got {len(perms)}")
    norm = []
    for j, p in enumerate(perms):
        p = tuple(int(x) for x in p)
        if len(p) != index or sorted(p) != list(range(index)):
            raise ParseError(f"generator {j + 1} image array is not a permutation of 0..{index - 1}")
        norm.append(p)
    spec = QuotientSpec(signature=sig, index=index, perms=tuple(norm))
    rel = spec.permutation_of_word(relator_word(sig.genus))
    if rel != tuple(range(index)):
        raise RelatorNotIdentity(f"relator permutation is {rel}")
    # transitivity: orbit of coset 0 under the letters
    seen = {0}
    frontier = [0]
    letter_perms = [spec.permutation_of_letter(l) for l in range(1, ngen + 1)]
    letter_perms += [spec.permutation_of_letter(-l) for l in range(1, ngen + 1)]
    while frontier:
        nxt = []
        for x in frontier:
            for p in letter_perms:
                y = p[x]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    if len(seen) != index:
        raise NotTransitive(f"orbit of coset 1 has size {len(seen)}, expected {index}")
    # regularity: the generated group has order exactly N
    group = {tuple(range(index))}
    frontier = [tuple(range(index))]
    while frontier:
        nxt = []
        for g in frontier:
            for p in letter_perms:
                h = tuple(p[x] for x in g)
                if h not in group:
                    if len(group) >= index:
                        raise NotRegular(
                            f"generated permutation group exceeds order {index}"
                        )
                    group.add(h)
                    nxt.append(h)
        frontier = nxt
    if len(group) != index:
        raise NotRegular(f"generated group has order {len(group)}, expected {index}")
    return spec


def load_quotient(path) -> QuotientSpec:
    """Load and fully validate a quotient spec JSON file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read quotient spec {path}: {exc}") from exc
    try:
        bv = data["bravais"]
        sig = BravaisSignature.from_pq(int(bv["p"]), int(bv["q"]))
        if sig.genus != int(bv["genus"]):
            raise ParseError(
                f"genus {bv['genus']} inconsistent with {{{bv['p']},{bv['q']}}}"
            )
        index = int(data["index"])
        perms_1based = data["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed quotient spec {path}: {exc}") from exc
    perms = []
    for arr in perms_1based:
        try:
            perms.append(tuple(int(x) - 1 for x in arr))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"malformed permutation array in {path}") from exc
    return validate_quotient(sig, index, perms)


def save_quotient(spec: QuotientSpec, path) -> None:
    data = {
        "bravais": {"p": spec.signature.p, "q": spec.signature.q, "genus": spec.signature.genus},
        "index": spec.index,
        "generators": [[x + 1 for x in p] for p in spec.perms],
    }
    Path(path).write_text(json.dumps(data) + "\n", encoding="utf-8")


def intersect_quotients(q1: QuotientSpec, q2: QuotientSpec) -> QuotientSpec:
    """Quotient by the intersection of the two normal subgroups.

    Acts on the orbit of (1,1) under the product action; the resulting
    index l satisfies lcm(N1,N2) <= l <= N1*N2.
    """
    if q1.signature != q2.signature:
        raise SignatureMismatch(f"{q1.signature} vs {q2.signature}")
    ngen = q1.signature.independent_count
    # enumerate the orbit of (0, 0) with a deterministic BFS order
    order: dict[tuple[int, int], int] = {(0, 0): 0}
    frontier = [(0, 0)]
    letters = [l for j in range(1, ngen + 1) for l in (j, -j)]
    pairs = {l: (q1.permutation_of_letter(l), q2.permutation_of_letter(l)) for l in letters}
    while frontier:
        nxt = []
        for (x, y) in frontier:
            for l in letters:
                p1, p2 = pairs[l]
                t = (p1[x], p2[y])
                if t not in order:
                    order[t] = len(order)
                    nxt.append(t)
        frontier = nxt
    n = len(order)
    perms = []
    for j in range(1, ngen + 1):
        p1, p2 = pairs[j]
        img = [0] * n
        for (x, y), i in order.items():
            img[i] = order[(p1[x], p2[y])]
        perms.append(tuple(img))
    return validate_quotient(q1.signature, n, perms)


def transversal_words(spec: QuotientSpec) -> list[Word]:
    """BFS words from the identity coset; hierarchical (shortest-first) order.

    Guarantees the open lattice built from these representatives is
    connected. Word i sends coset 1 to coset i+1.
    """
    ngen = spec.signature.independent_count
    letters = [l for l in range(1, ngen + 1)] + [-l for l in range(1, ngen + 1)]
    letter_perms = {l: spec.permutation_of_letter(l) for l in letters}
    words: dict[int, Word] = {0: ()}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for l in letters:
                y = letter_perms[l][x]
                if y not in words:
                    words[y] = words[x] + (l,)
                    nxt.append(y)
        frontier = nxt
    return [words[i] for i in range(spec.index)]
