"""Poincare-disk primitives.

Points live in the open unit disk; orientation-preserving isometries are
unit-determinant pairs (a, b) acting as z -> (a z + b) / (b* z + a*).
Everything here is an immutable value type and a pure function.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import DistanceMismatch, NonHyperbolicPattern

#: tolerance for pure arithmetic identities
ARITH_TOL = 1e-12
#: tolerance for geometric constructions that chain many operations
GEOM_TOL = 1e-9


def _as_complex(z) -> complex:
    if isinstance(z, DiskPoint):
        return z.z
    return complex(z)


@dataclass(frozen=True)
class DiskPoint:
    """A point strictly inside the unit disk."""

    re: float
    im: float

    def __post_init__(self):
        if self.re * self.re + self.im * self.im >= 1.0:
            raise ValueError(f"point ({self.re}, {self.im}) is not inside the unit disk")

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return self.z


class IsometryClass(Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class MobiusTransform:
    """An SU(1,1) matrix [[a, b], [b*, a*]], taken modulo global sign.

    The constructor renormalizes |a|^2 - |b|^2 to 1 to arrest drift from
    chained compositions.
    """

    a: complex
    b: complex

    def __post_init__(self):
        det = abs(self.a) ** 2 - abs(self.b) ** 2
        if det <= 0.0:
            raise ValueError(f"({self.a}, {self.b}) is not an SU(1,1) pair")
        s = math.sqrt(det)
        object.__setattr__(self, "a", self.a / s)
        object.__setattr__(self, "b", self.b / s)

    # -- group structure --

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1.0 + 0.0j, 0.0j)

    @classmethod
    def rotation(cls, theta: float) -> "MobiusTransform":
        """Rotation by theta about the origin."""
        return cls(cmath.exp(0.5j * theta), 0.0j)

    @classmethod
    def translation_to_origin(cls, z0) -> "MobiusTransform":
        """The isometry sending z0 to the origin along the geodesic through 0."""
        z0 = _as_complex(z0)
        s = math.sqrt(1.0 - abs(z0) ** 2)
        return cls(1.0 / s, -z0 / s)

    @classmethod
    def rotation_about(cls, center, theta: float) -> "MobiusTransform":
        t = cls.translation_to_origin(center)
        return t.inverse() @ cls.rotation(theta) @ t

    def apply(self, z):
        """Apply to a point; accepts and returns the caller's point type."""
        w = self.apply_z(_as_complex(z))
        if isinstance(z, DiskPoint):
            return DiskPoint.from_complex(w)
        return w

    def apply_z(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.b.conjugate() * z + self.a.conjugate())

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        a1, b1 = self.a, self.b
        a2, b2 = other.a, other.b
        return MobiusTransform(a1 * a2 + b1 * b2.conjugate(), a1 * b2 + b1 * a2.conjugate())

    def __matmul__(self, other: "MobiusTransform") -> "MobiusTransform":
        return self.compose(other)

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.a.conjugate(), -self.b)

    # -- classification and comparison --

    @property
    def trace_magnitude(self) -> float:
        return abs(2.0 * self.a.real)

    def classify(self, tol: float = GEOM_TOL) -> IsometryClass:
        t = self.trace_magnitude
        if t < 2.0 - tol:
            return IsometryClass.ELLIPTIC
        if t > 2.0 + tol:
            return IsometryClass.HYPERBOLIC
        # the identity has trace exactly 2; by convention it is elliptic
        if self.is_identity(tol):
            return IsometryClass.ELLIPTIC
        return IsometryClass.PARABOLIC

    def is_identity(self, tol: float = GEOM_TOL) -> bool:
        return self.distance_to(MobiusTransform.identity()) < tol

    def distance_to(self, other: "MobiusTransform") -> float:
        """Max entry deviation from `other`, modulo global sign."""
        d_plus = max(abs(self.a - other.a), abs(self.b - other.b))
        d_minus = max(abs(self.a + other.a), abs(self.b + other.b))
        return min(d_plus, d_minus)

    def equivalent_to(self, other: "MobiusTransform", tol: float = GEOM_TOL) -> bool:
        return self.distance_to(other) < tol


def hyperbolic_distance(z1, z2) -> float:
    """Geodesic distance between two disk points."""
    z1 = _as_complex(z1)
    z2 = _as_complex(z2)
    num = 2.0 * abs(z1 - z2) ** 2
    den = (1.0 - abs(z1) ** 2) * (1.0 - abs(z2) ** 2)
    return math.acosh(1.0 + num / den)


def tangent_angle(at, toward) -> float:
    """Direction at `at` of the geodesic from `at` to `toward`.

    Measured as a Euclidean angle after translating `at` to the origin,
    where geodesics are straight lines.
    """
    t = MobiusTransform.translation_to_origin(at)
    return cmath.phase(t.apply_z(_as_complex(toward)))


def angle_between(vertex, w1, w2) -> float:
    """Interior angle at `vertex` between the geodesics toward w1 and w2."""
    d = abs(tangent_angle(vertex, w1) - tangent_angle(vertex, w2))
    return min(d, 2.0 * math.pi - d)


def polygon_radius(p: int, q: int) -> float:
    """Euclidean circumradius of the regular {p,q} cell centered at 0."""
    if (p - 2) * (q - 2) <= 4:
        raise NonHyperbolicPattern(f"{{{p},{q}}} is not hyperbolic")
    return math.sqrt(math.cos(math.pi / p + math.pi / q) / math.cos(math.pi / p - math.pi / q))


@dataclass(frozen=True)
class RegularPolygon:
    """A regular {p,q} cell centered at the origin."""

    p: int
    q: int
    radius: float
    phase: float
    vertices: tuple

    def vertex_z(self, k: int) -> complex:
        return _as_complex(self.vertices[k % self.p])

    @property
    def edge_length(self) -> float:
        return hyperbolic_distance(self.vertex_z(0), self.vertex_z(1))

    def interior_angle(self, k: int) -> float:
        return angle_between(self.vertex_z(k), self.vertex_z(k - 1), self.vertex_z(k + 1))


def regular_polygon(p: int, q: int, phase: float | None = None) -> RegularPolygon:
    """Build the regular {p,q} cell; vertex k sits at radius*e^{i(2 pi k/p + phase)}.

    The default phase pi/p puts the midpoint of one edge on the positive
    real axis.
    """
    if phase is None:
        phase = math.pi / p
    r = polygon_radius(p, q)
    verts = tuple(
        DiskPoint.from_complex(r * cmath.exp(1j * (2.0 * math.pi * k / p + phase)))
        for k in range(p)
    )
    return RegularPolygon(p=p, q=q, radius=r, phase=phase, vertices=verts)


def isometry_from_point_pairs(z_a, z_b, w_a, w_b, tol: float = GEOM_TOL) -> MobiusTransform:
    """The unique isometry g with g(z_a) = w_a and g(z_b) = w_b.

    Exists iff the two pairs are congruent; raises DistanceMismatch otherwise.
    """
    d_src = hyperbolic_distance(z_a, z_b)
    d_dst = hyperbolic_distance(w_a, w_b)
    if abs(d_src - d_dst) > tol:
        raise DistanceMismatch(d_src, d_dst)
    # move each pair to a canonical position (first point at 0, second on
    # the positive real axis), then conjugate
    t_src = MobiusTransform.translation_to_origin(z_a)
    t_src = MobiusTransform.rotation(-cmath.phase(t_src.apply_z(_as_complex(z_b)))) @ t_src
    t_dst = MobiusTransform.translation_to_origin(w_a)
    t_dst = MobiusTransform.rotation(-cmath.phase(t_dst.apply_z(_as_complex(w_b)))) @ t_dst
    return t_dst.inverse() @ t_src
