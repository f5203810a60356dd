"""Exact spheres, tangency predicates, contact points and rational rotations.

Every quantity is a :class:`fractions.Fraction`; there is no floating-point
path and no tolerance anywhere in this module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Iterable, Iterator, List, Sequence, Tuple

from . import linalg

Rational = Fraction
Vector = Tuple[Fraction, ...]

SIGNED = "signed"
UNSIGNED = "unsigned"
MODES = (SIGNED, UNSIGNED)


class GeometryError(ValueError):
    """Invalid geometric input (bad dimension, degenerate pair, ...)."""


class TangencyStatus(enum.Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"
    NOT_TANGENT = "not_tangent"

    @property
    def tangent(self) -> bool:
        return self is not TangencyStatus.NOT_TANGENT


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings; floats are refused."""
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
    return Fraction(value)


def as_vector(values: Iterable) -> Vector:
    return tuple(as_rational(v) for v in values)


@dataclass(frozen=True)
class Sphere:
    center: Vector
    radius: Fraction
    id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        object.__setattr__(self, "radius", as_rational(self.radius))
        if self.radius == 0:
            raise GeometryError(f"sphere {self.id}: radius must be nonzero")
        if len(self.center) < 2:
            raise GeometryError(f"sphere {self.id}: dimension must be at least 2")

    @property
    def dim(self) -> int:
        return len(self.center)

    def equation(self, x: Sequence) -> Fraction:
        """Value of r^2 - |x - c|^2; zero exactly on the sphere."""
        return self.radius ** 2 - sum((xi - ci) ** 2 for xi, ci in zip(x, self.center))

    def contains(self, x: Sequence) -> bool:
        return self.equation(x) == 0


@dataclass(frozen=True)
class Collection:
    """A finite collection of spheres of one dimension, with a tangency mode."""

    spheres: Tuple[Sphere, ...]
    dimension: int
    mode: str = UNSIGNED

    def __post_init__(self):
        object.__setattr__(self, "spheres", tuple(self.spheres))
        if self.mode not in MODES:
            raise GeometryError(f"unknown mode {self.mode!r}")
        if self.dimension < 2:
            raise GeometryError("dimension must be at least 2")
        seen = set()
        for s in self.spheres:
            if s.dim != self.dimension:
                raise GeometryError(
                    f"sphere {s.id} has dimension {s.dim}, collection has {self.dimension}"
                )
            if s.id in seen:
                raise GeometryError(f"duplicate sphere id {s.id}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.spheres)

    def __iter__(self) -> Iterator[Sphere]:
        return iter(self.spheres)

    def by_id(self, sphere_id: int) -> Sphere:
        for s in self.spheres:
            if s.id == sphere_id:
                return s
        raise KeyError(sphere_id)


def _dist2(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x - y) ** 2 for x, y in zip(a, b))


def _check_pair(s1: Sphere, s2: Sphere) -> None:
    if s1.dim != s2.dim:
        raise GeometryError(f"dimension mismatch: {s1.dim} vs {s2.dim}")
    if s1.center == s2.center and s1.radius == s2.radius:
        raise GeometryError(f"spheres {s1.id} and {s2.id} are the same sphere")


def tangency_status(s1: Sphere, s2: Sphere, mode: str = UNSIGNED) -> TangencyStatus:
    """Exact tangency classification of two spheres.

    In signed mode two spheres are in contact iff |c1 - c2|^2 = (r1 - r2)^2,
    internally if the radii share a sign. In unsigned mode the usual
    geometric notion is used; concentric pairs are never tangent.
    """
    _check_pair(s1, s2)
    d2 = _dist2(s1.center, s2.center)
    r1, r2 = s1.radius, s2.radius
    if mode == SIGNED:
        if d2 != (r1 - r2) ** 2:
            return TangencyStatus.NOT_TANGENT
        return TangencyStatus.INTERNAL if (r1 > 0) == (r2 > 0) else TangencyStatus.EXTERNAL
    if mode != UNSIGNED:
        raise GeometryError(f"unknown mode {mode!r}")
    a1, a2 = abs(r1), abs(r2)
    if d2 == (a1 + a2) ** 2:
        return TangencyStatus.EXTERNAL
    if d2 > 0 and d2 == (a1 - a2) ** 2:
        return TangencyStatus.INTERNAL
    return TangencyStatus.NOT_TANGENT


def contact_parameter(s1: Sphere, s2: Sphere, status: TangencyStatus, mode: str) -> Fraction:
    """t with contact point c1 + t (c2 - c1)."""
    r1, r2 = s1.radius, s2.radius
    if mode == SIGNED:
        return r1 / (r1 - r2)
    a1, a2 = abs(r1), abs(r2)
    if status is TangencyStatus.EXTERNAL:
        return a1 / (a1 + a2)
    return a1 / (a1 - a2)


def contact_point(s1: Sphere, s2: Sphere, mode: str = UNSIGNED) -> Vector:
    status = tangency_status(s1, s2, mode)
    if not status.tangent:
        raise GeometryError(f"spheres {s1.id} and {s2.id} are not tangent")
    t = contact_parameter(s1, s2, status, mode)
    return tuple(a + t * (b - a) for a, b in zip(s1.center, s2.center))


# -- rotations ---------------------------------------------------------------


@dataclass(frozen=True)
class RationalRotation:
    matrix: Tuple[Tuple[Fraction, ...], ...]
    skew: Tuple[Fraction, ...] = field(default=(), compare=False)

    def __post_init__(self):
        m = tuple(tuple(as_rational(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = len(m)
        if any(len(row) != n for row in m):
            raise GeometryError("rotation matrix must be square")
        if linalg.matmul(linalg.transpose(m), m) != linalg.identity(n):
            raise GeometryError("matrix is not orthogonal")
        if linalg.determinant(m) != 1:
            raise GeometryError("matrix has determinant -1")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply(self, v: Sequence[Fraction]) -> Vector:
        return tuple(linalg.matvec(self.matrix, v))

    @classmethod
    def identity(cls, n: int) -> "RationalRotation":
        return cls(tuple(map(tuple, linalg.identity(n))))


def skew_matrix(n: int, params: Sequence) -> linalg.Matrix:
    """Skew-symmetric matrix filled row-major from its strict upper triangle."""
    params = [as_rational(p) for p in params]
    if len(params) != n * (n - 1) // 2:
        raise GeometryError(f"need {n * (n - 1) // 2} skew parameters, got {len(params)}")
    a = [[Fraction(0)] * n for _ in range(n)]
    it = iter(params)
    for i in range(n):
        for j in range(i + 1, n):
            v = next(it)
            a[i][j] = v
            a[j][i] = -v
    return a


def cayley_rotation(n: int, params: Sequence) -> RationalRotation:
    """(I - A)(I + A)^-1 for the skew matrix A built from ``params``."""
    a = skew_matrix(n, params)
    eye = linalg.identity(n)
    minus = [[e - x for e, x in zip(er, ar)] for er, ar in zip(eye, a)]
    plus = [[e + x for e, x in zip(er, ar)] for er, ar in zip(eye, a)]
    m = linalg.matmul(minus, linalg.inverse(plus))
    return RationalRotation(tuple(map(tuple, m)), skew=tuple(as_rational(p) for p in params))


def apply_rotation(collection: Collection, rotation: RationalRotation) -> Collection:
    if rotation.dim != collection.dimension:
        raise GeometryError(
            f"rotation is {rotation.dim}-dimensional, collection is {collection.dimension}"
        )
    spheres = tuple(Sphere(rotation.apply(s.center), s.radius, s.id) for s in collection)
    return Collection(spheres, collection.dimension, collection.mode)


def small_rationals() -> Iterator[Fraction]:
    """1/7, then p/q in order of height max(p, q), both signs, skipping repeats."""
    yield Fraction(1, 7)
    seen = {Fraction(1, 7)}
    for h in count(1):
        for p in range(1, h + 1):
            for q in (h,) if p < h else range(1, h + 1):
                f = Fraction(p, q)
                if f not in seen:
                    seen.add(f)
                    yield f
                    yield -f


def rotation_candidates(n: int) -> Iterator[Tuple[Fraction, ...]]:
    k = n * (n - 1) // 2
    for t in small_rationals():
        # distinct entries per slot so that no coordinate plane is favoured
        yield tuple(t * Fraction(j + 1, j + 2) * (-1) ** j for j in range(k))


class RotationSearchError(RuntimeError):
    def __init__(self, tried: List[Tuple[Fraction, ...]]):
        super().__init__(
            f"no admissible rotation among {len(tried)} Cayley candidates "
            f"(last skew parameters {tuple(map(str, tried[-1])) if tried else ()})"
        )
        self.tried = tried


def _admissible(last_row: Sequence[Fraction], offsets: Iterable[Tuple[Vector, Vector]]) -> bool:
    # (R x)_n - (R c)_n = last_row . (x - c)
    for d1, d2 in offsets:
        if sum(a * b for a, b in zip(last_row, d1)) == 0:
            return False
        if sum(a * b for a, b in zip(last_row, d2)) == 0:
            return False
    return True


def find_generic_rotation(
    collection: Collection, mode: str | None = None, max_tries: int = 500
) -> RationalRotation:
    """Rotation putting every contact point off both centres' equators.

    Tries the identity first, then Cayley rotations over a fixed enumeration
    of small rational skew parameters. The check is exact.
    """
    from .tangency import count_pairs_hashed

    mode = mode or collection.mode
    n = collection.dimension
    graph = count_pairs_hashed(collection, mode)
    offsets = []
    for e in graph.edges:
        c1 = collection.by_id(e.id1).center
        c2 = collection.by_id(e.id2).center
        offsets.append(
            (
                tuple(x - c for x, c in zip(e.point, c1)),
                tuple(x - c for x, c in zip(e.point, c2)),
            )
        )
    identity = RationalRotation.identity(n)
    if _admissible(identity.matrix[-1], offsets):
        return identity
    tried = []
    for params in rotation_candidates(n):
        if len(tried) >= max_tries:
            break
        tried.append(params)
        rot = cayley_rotation(n, params)
        if _admissible(rot.matrix[-1], offsets):
            return rot
    raise RotationSearchError(tried)


def is_generic(collection: Collection, mode: str | None = None) -> bool:
    from .tangency import count_pairs_hashed

    graph = count_pairs_hashed(collection, mode or collection.mode)
    for e in graph.edges:
        xn = e.point[-1]
        if xn == collection.by_id(e.id1).center[-1] or xn == collection.by_id(e.id2).center[-1]:
            return False
    return True
