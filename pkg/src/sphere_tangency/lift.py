"""The lift of a sphere to R^(2n-1) and its differential geometry.

A point x of sphere s off the equator x_n = c_n lifts to (x, y) with
y_j = (x_j - c_j) / (x_n - c_n); (y, 1) is then the normal of the tangent
hyperplane at x. Two lifts meet iff the spheres are tangent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from . import linalg
from .exact import (
    GeometryError,
    Sphere,
    Vector,
    as_vector,
    contact_point,
    tangency_status,
)
from .polyalg import evaluate, partial_derivative, q_poly, sphere_poly


class GenericPositionError(GeometryError):
    """A contact point sits on a centre's equator; the collection needs rotating."""


@dataclass(frozen=True)
class LiftedPoint:
    x: Vector
    y: Vector

    @property
    def coords(self) -> Vector:
        return self.x + self.y

    def to_strings(self) -> List[str]:
        return [str(v) for v in self.coords]

    @classmethod
    def from_strings(cls, values: Sequence[str]) -> "LiftedPoint":
        coords = as_vector(values)
        if len(coords) % 2 == 0:
            raise ValueError("a lifted point has an odd number (2n-1) of coordinates")
        n = (len(coords) + 1) // 2
        return cls(coords[:n], coords[n:])


def lift_point(s: Sphere, x: Sequence) -> LiftedPoint:
    x = as_vector(x)
    if len(x) != s.dim:
        raise GeometryError("point and sphere dimensions differ")
    if not s.contains(x):
        raise GeometryError(f"point {tuple(map(str, x))} is not on sphere {s.id}")
    h = x[-1] - s.center[-1]
    if h == 0:
        raise GenericPositionError(f"point lies on the equator of sphere {s.id}")
    y = tuple((x[j] - s.center[j]) / h for j in range(s.dim - 1))
    return LiftedPoint(x, y)


def on_lift(s: Sphere, p: LiftedPoint) -> bool:
    """Membership in the non-vertical component of the lifted variety."""
    n = s.dim
    if len(p.x) != n or len(p.y) != n - 1:
        return False
    h = p.x[-1] - s.center[-1]
    if h == 0 or not s.contains(p.x):
        return False
    return all(h * p.y[j] == p.x[j] - s.center[j] for j in range(n - 1))


def defining_polys(s: Sphere):
    return [sphere_poly(s)] + [q_poly(s.center, j) for j in range(1, s.dim)]


def lifted_intersection(s1: Sphere, s2: Sphere, mode: str = "unsigned") -> Optional[LiftedPoint]:
    """The common point of the two lifts, or None if the spheres are not tangent."""
    if not tangency_status(s1, s2, mode).tangent:
        return None
    x = contact_point(s1, s2, mode)
    p1 = lift_point(s1, x)
    p2 = lift_point(s2, x)
    if p1 != p2:
        raise GeometryError(f"lifts of tangent spheres {s1.id}, {s2.id} disagree")
    return p1


def _require_on(s: Sphere, p: LiftedPoint) -> None:
    if not on_lift(s, p):
        raise GeometryError(f"point is not on the lift of sphere {s.id}")


def jacobian(s: Sphere, p: LiftedPoint) -> linalg.Matrix:
    _require_on(s, p)
    pt = p.coords
    polys = defining_polys(s)
    return [[evaluate(partial_derivative(f, i), pt) for i in range(2 * s.dim - 1)] for f in polys]


def jacobian_rank(s: Sphere, p: LiftedPoint) -> int:
    return linalg.rank(jacobian(s, p))


def second_derivatives(s: Sphere, x: Sequence[Fraction]) -> linalg.Matrix:
    """Hessian of the local graph x_n = phi(x~) of the sphere at x."""
    n = s.dim
    d = [xi - ci for xi, ci in zip(x, s.center)]
    h = d[-1]
    return [
        [-((h * h if j == k else 0) + d[j] * d[k]) / h ** 3 for k in range(n - 1)]
        for j in range(n - 1)
    ]


def tangent_basis(s: Sphere, p: LiftedPoint) -> List[Vector]:
    """Vectors (e_j, d_j phi, -grad d_j phi) spanning the tangent space at p."""
    _require_on(s, p)
    n = s.dim
    hess = second_derivatives(s, p.x)
    basis = []
    for j in range(n - 1):
        e = [Fraction(int(k == j)) for k in range(n - 1)]
        # d_j phi = -y_j because y = -grad phi
        basis.append(tuple(e) + (-p.y[j],) + tuple(-hess[j][k] for k in range(n - 1)))
    return basis


def parametrisation(s: Sphere, p: LiftedPoint) -> Callable[[Sequence[float]], List[float]]:
    """Float chart t -> (x~ + t, x_n + phi(t), -grad phi(t)) of the lift around p."""
    c = [float(v) for v in s.center]
    r = float(s.radius)
    xt = [float(v) for v in p.x[:-1]]
    sign = 1.0 if p.x[-1] > s.center[-1] else -1.0

    def chart(t):
        u = [a + b for a, b in zip(xt, t)]
        rest = r * r - sum((a - b) ** 2 for a, b in zip(u, c[:-1]))
        xn = c[-1] + sign * math.sqrt(rest)
        y = [(a - b) / (xn - c[-1]) for a, b in zip(u, c[:-1])]
        return u + [xn] + y

    return chart


def det_identity(z: Sequence) -> Tuple[Fraction, Fraction]:
    """(det(I + z z^T), 1 + |z|^2), both exact."""
    z = as_vector(z)
    m = [[int(i == j) + z[i] * z[j] for j in range(len(z))] for i in range(len(z))]
    return linalg.determinant(m), 1 + sum(v * v for v in z)


def _verticals(n: int) -> List[Vector]:
    return [
        (Fraction(0),) * n + tuple(Fraction(int(k == j)) for k in range(n - 1))
        for j in range(n - 1)
    ]


def spans_verticals(vectors: Sequence[Sequence[Fraction]], n: int) -> Tuple[bool, int, int]:
    """Whether span(vectors) contains {0} x R^(n-1); returns (holds, rank, rank with verticals)."""
    base = linalg.rank(vectors) if vectors else 0
    full = linalg.rank(list(vectors) + _verticals(n))
    return base == full, base, full


@dataclass(frozen=True)
class VerticalSpanCertificate:
    holds: bool
    point: LiftedPoint
    rank_tangents: int
    rank_with_verticals: int
    lam: Fraction
    collinear: bool
    z: Vector
    det: Fraction
    one_plus_norm: Fraction
    differences_match: bool


def vertical_span_check(s1: Sphere, s2: Sphere, mode: str = "unsigned") -> VerticalSpanCertificate:
    p = lifted_intersection(s1, s2, mode)
    if p is None:
        raise GeometryError(f"spheres {s1.id} and {s2.id} are not tangent")
    n = s1.dim
    t1, t2 = tangent_basis(s1, p), tangent_basis(s2, p)
    holds, r_base, r_full = spans_verticals(t1 + t2, n)

    a = [xi - ci for xi, ci in zip(p.x, s1.center)]
    b = [xi - ci for xi, ci in zip(p.x, s2.center)]
    k = next(i for i, v in enumerate(a) if v != 0)
    lam = b[k] / a[k]
    collinear = all(bi == lam * ai for ai, bi in zip(a, b)) and lam not in (0, 1)

    h = a[-1]
    z = tuple(v / h for v in a[:-1])
    det, norm = det_identity(z)

    # v1_j - v2_j = (1 - 1/lam) (0, 0, w_j) with w_j = e_j/h + a_j/h^3 * a~
    factor = 1 - 1 / lam
    differences_match = True
    for j in range(n - 1):
        w = [Fraction(int(i == j)) / h + a[j] / h ** 3 * a[i] for i in range(n - 1)]
        expect = (Fraction(0),) * n + tuple(factor * v for v in w)
        got = tuple(u - v for u, v in zip(t1[j], t2[j]))
        differences_match &= expect == got
    return VerticalSpanCertificate(
        holds, p, r_base, r_full, lam, collinear, z, det, norm, differences_match
    )


@dataclass(frozen=True)
class LiftingCheck:
    pairs_checked: int
    tangent_ordered: int
    lift_ordered: int
    single_point: bool
    jacobian_ok: bool
    span_ok: bool
    failures: Tuple[Tuple[int, int], ...] = ()

    @property
    def passed(self) -> bool:
        return (
            self.tangent_ordered == self.lift_ordered
            and self.single_point
            and self.jacobian_ok
            and self.span_ok
            and not self.failures
        )

    def to_text(self) -> str:
        return (
            f"pairs_checked {self.pairs_checked}\n"
            f"tangent_ordered {self.tangent_ordered}\n"
            f"lift_intersecting_ordered {self.lift_ordered}\n"
            f"single_point {self.single_point}\n"
            f"jacobian_rank_n {self.jacobian_ok}\n"
            f"vertical_span {self.span_ok}\n"
            f"failures {' '.join(f'{a}-{b}' for a, b in self.failures)}".rstrip() + "\n"
        )


def check_lifting(collection, mode: str | None = None) -> LiftingCheck:
    """Compare tangency with lift intersection over every ordered pair.

    The collection must already be in generic position.
    """
    mode = mode or collection.mode
    spheres = sorted(collection, key=lambda s: s.id)
    n = collection.dimension
    tangent = lifted = checked = 0
    single = jac = span = True
    failures = []
    for s1 in spheres:
        for s2 in spheres:
            if s1.id == s2.id:
                continue
            checked += 1
            st = tangency_status(s1, s2, mode)
            p = lifted_intersection(s1, s2, mode)
            tangent += st.tangent
            lifted += p is not None
            if st.tangent != (p is not None):
                failures.append((s1.id, s2.id))
            if p is None:
                continue
            # every common point of the lifts projects to a contact point,
            # and there is exactly one contact point
            single &= on_lift(s1, p) and on_lift(s2, p)
            if s1.id < s2.id:
                jac &= jacobian_rank(s1, p) == n and jacobian_rank(s2, p) == n
                span &= vertical_span_check(s1, s2, mode).holds
    return LiftingCheck(checked, tangent, lifted, single, jac, span, tuple(failures))
