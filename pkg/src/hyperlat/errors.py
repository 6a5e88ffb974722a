"""Exception types raised across the package."""


class HyperlatError(Exception):
    """Base class for all errors raised by hyperlat."""


# --- geometry ---

class NonHyperbolicPattern(HyperlatError):
    """A {p,q} pattern with (p-2)(q-2) <= 4 was requested."""


class DistanceMismatch(HyperlatError):
    """The two point pairs handed to the isometry solver are not congruent."""

    def __init__(self, d_source: float, d_target: float):
        self.d_source = d_source
        self.d_target = d_target
        super().__init__(
            f"point pairs are not isometric: d_source={d_source!r}, d_target={d_target!r}"
        )


# --- fuchsian ---

class RelatorViolation(HyperlatError):
    """The constructed generator set does not satisfy the group relator."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"relator residual {residual:.3e} exceeds tolerance")


class ParseError(HyperlatError):
    """A quotient spec file could not be parsed."""


class RelatorNotIdentity(HyperlatError):
    """The relator word does not act as the identity permutation."""


class NotTransitive(HyperlatError):
    """The quotient permutations do not act transitively on the cosets."""


class NotRegular(HyperlatError):
    """The generated permutation group is larger than the coset count."""


class SignatureMismatch(HyperlatError):
    """Two quotient specs over different Bravais signatures were combined."""


class IndexOutOfRange(HyperlatError):
    """A generator index outside 1..2g was used in a word."""


# --- lattice ---

class CoverageFailure(HyperlatError):
    """Unit-cell generation exhausted its budget before covering the domain."""


class DegreeViolation(HyperlatError):
    """A periodic-graph vertex does not have degree q."""

    def __init__(self, vertices, expected: int):
        self.vertices = list(vertices)
        self.expected = expected
        super().__init__(
            f"vertices {self.vertices[:8]} do not have degree {expected}"
        )


class NonIntegerCount(HyperlatError):
    """The face-count formulas do not yield integers for this input."""


class NotTwoManifold(HyperlatError):
    """An edge is not contained in exactly two faces."""


class Disconnected(HyperlatError):
    """The graph is not connected."""


# --- cycles ---

class BasisIncomplete(HyperlatError):
    """The cycle-basis search exhausted its budget before filling a slot."""

    def __init__(self, slot: int, message: str = ""):
        self.slot = slot
        super().__init__(message or f"could not fill basis slot {slot}")


class InvariantViolation(HyperlatError):
    """A structural post-check on a constructed object failed."""


# --- css ---

class PairingDegenerate(HyperlatError):
    """The logical pairing matrix is singular."""


class DimensionMismatch(HyperlatError):
    """GF(2) operands have inconsistent dimensions."""


# --- decoder ---

class OddDefectCount(HyperlatError):
    """A syndrome with an odd number of defects cannot be matched."""


class ResidualHasSyndrome(HyperlatError):
    """error + correction does not form a closed loop."""


# --- montecarlo ---

class ConfigInvalid(HyperlatError):
    """A simulation configuration failed validation."""


class InsufficientData(HyperlatError):
    """Not enough sizes or grid points to estimate a threshold."""
