"""Sampled sign-cell assignment of lifted spheres and candidate partitions.

Cells of R^(2n-1) \\ Z(P) are approximated from below: lifted sample
points of equal sign are joined when the straight segment between them
avoids Z(P). Eight interior probes reject most segments cheaply; a
segment that passes them is confirmed by exact root counting of P along
it. Joins are therefore sound, but two samples in one cell whose segment
leaves the cell stay apart, so the result under-approximates true cell
incidence. It is meant for falsifying a candidate partition rather than
certifying one.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import count, product
from math import gcd
from typing import Dict, Iterator, List, Sequence, Tuple

import sympy

from .exact import Collection, Sphere, Vector
from .lift import LiftedPoint, lift_point
from .polyalg import MultiPoly, evaluate, from_linear
from .tangency import count_pairs_hashed

PROBES = 8


def _heights() -> Iterator[Fraction]:
    yield Fraction(0)
    seen = {Fraction(0)}
    for h in count(2):
        for p in range(1, h + 1):
            for q in (h,) if p < h else range(1, h + 1):
                f = Fraction(p, q)
                if f not in seen:
                    seen.add(f)
                    yield f
                    yield -f


def stereo_parameters(dim: int) -> Iterator[Tuple[Fraction, ...]]:
    """Deterministic enumeration of u in Q^dim, skipping |u| = 1 (the equator)."""
    values: List[Fraction] = []
    gen = _heights()
    for level in count(0):
        values.append(next(gen))
        # every tuple whose largest index is exactly ``level``
        for idx in product(range(level + 1), repeat=dim):
            if max(idx) != level:
                continue
            u = tuple(values[i] for i in idx)
            if sum(v * v for v in u) != 1:
                yield u


def sphere_sample(s: Sphere, u: Sequence[Fraction]) -> Vector:
    """Inverse stereographic projection from the north pole, scaled onto s."""
    q = sum(v * v for v in u)
    d = 1 + q
    direction = tuple(2 * v / d for v in u) + ((q - 1) / d,)
    return tuple(c + s.radius * w for c, w in zip(s.center, direction))


def sample_net(s: Sphere, k: int) -> List[LiftedPoint]:
    """First k lifted samples; nets are nested as k grows."""
    out = []
    for u in stereo_parameters(s.dim - 1):
        if len(out) == k:
            break
        out.append(lift_point(s, sphere_sample(s, u)))
    return out


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


@dataclass
class CellAssignment:
    cells: Dict[str, List[int]]
    samples_per_sphere: int

    def cells_of(self, sphere_id: int) -> List[str]:
        return [label for label, ids in self.cells.items() if sphere_id in ids]

    @property
    def max_occupancy(self) -> int:
        return max((len(v) for v in self.cells.values()), default=0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cell", "sphere_id"])
        for label in sorted(self.cells):
            for sid in self.cells[label]:
                w.writerow([label, sid])
        return buf.getvalue()


def _integer_form(p: MultiPoly):
    """Terms of a positive multiple of p as (int coefficient, exponents, degree deficit)."""
    deg = max(p.degree, 0)
    scale = 1
    for c in p.terms.values():
        scale = scale * c.denominator // gcd(scale, c.denominator)
    return [(int(c * scale), e, deg - sum(e)) for e, c in sorted(p.terms.items())]


def _scaled(point: Vector) -> Tuple[Tuple[int, ...], int]:
    den = 1
    for v in point:
        den = den * v.denominator // gcd(den, v.denominator)
    return tuple(int(v * den) for v in point), den


def _segment_poly(form, a, b) -> List[int]:
    """Integer coefficients (lowest first) of a positive multiple of t -> p(a + t (b - a))."""
    (pa, da), (pb, db) = a, b
    base = [x * db for x in pa]
    step = [y * da - x for x, y in zip(base, pb)]
    lden = da * db
    out: List[int] = []
    for c, e, deficit in form:
        acc = [c * lden ** deficit]
        for i, k in enumerate(e):
            for _ in range(k):
                nxt = [0] * (len(acc) + 1)
                for m, v in enumerate(acc):
                    nxt[m] += v * base[i]
                    nxt[m + 1] += v * step[i]
                acc = nxt
        if len(acc) > len(out):
            out.extend([0] * (len(acc) - len(out)))
        for m, v in enumerate(acc):
            out[m] += v
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out or [0]


_T = sympy.Symbol("t")


def _segment_keeps_sign(form, a, b, sign: int) -> bool:
    coeffs = _segment_poly(form, a, b)
    if len(coeffs) == 1:
        return True
    top = len(coeffs) - 1
    for i in range(1, PROBES):
        # PROBES^top * g(i / PROBES)
        v = sum(c * i ** m * PROBES ** (top - m) for m, c in enumerate(coeffs))
        if _sign(v) != sign:
            return False
    g = sympy.Poly(list(reversed(coeffs)), _T, domain="ZZ")
    # endpoints are nonzero, so any root in [0, 1] is interior
    return g.count_roots(0, 1) == 0


def assign_cells(collection: Collection, p: MultiPoly, samples_per_sphere: int) -> CellAssignment:
    """Group lifted samples into sign cells and list the spheres meeting each.

    Labels read ``"+:<id>.<k>"`` / ``"-:<id>.<k>"``: the sign, then the
    smallest (sphere id, sample index) in the cell.
    """
    if samples_per_sphere < 1:
        raise ValueError("need at least one sample per sphere")
    keys: List[Tuple[int, int]] = []
    points = []
    signs: List[int] = []
    for s in sorted(collection, key=lambda s: s.id):
        for k, lp in enumerate(sample_net(s, samples_per_sphere)):
            sg = _sign(evaluate(p, lp.coords))
            if sg:
                keys.append((s.id, k))
                points.append(_scaled(lp.coords))
                signs.append(sg)
    form = _integer_form(p)

    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if signs[i] != signs[j] or find(i) == find(j):
                continue
            if _segment_keeps_sign(form, points[i], points[j], signs[i]):
                parent[find(j)] = find(i)

    groups: Dict[int, List[int]] = {}
    for i in range(len(points)):
        groups.setdefault(find(i), []).append(i)
    cells: Dict[str, List[int]] = {}
    for members in groups.values():
        rep = min(keys[i] for i in members)
        label = f"{'+' if signs[members[0]] > 0 else '-'}:{rep[0]}.{rep[1]}"
        cells[label] = sorted({keys[i][0] for i in members})
    return CellAssignment(dict(sorted(cells.items())), samples_per_sphere)


@dataclass(frozen=True)
class CellBoundReport:
    max_occupancy: int
    nonempty_cells: int
    occupancy_bound: Fraction
    cell_count_bound: Fraction
    occupancy_ok: bool
    cell_count_ok: bool

    @property
    def passed(self) -> bool:
        return self.occupancy_ok and self.cell_count_ok


def verify_cell_bound(
    assignment: CellAssignment,
    c1,
    d_degree: int,
    n: int,
    n_count: int,
    c2=2,
) -> CellBoundReport:
    """Compare occupancy with C1 2^n N / D^n and cell count with C2 (D/2)^(2n-1).

    C2 defaults to 2: a single hyperplane (D = 2) already makes two cells.
    """
    c1, c2 = Fraction(c1), Fraction(c2)
    occ_bound = c1 * 2 ** n * n_count / Fraction(d_degree) ** n
    cell_bound = c2 * (Fraction(d_degree, 2)) ** (2 * n - 1)
    occ = assignment.max_occupancy
    cells = sum(1 for v in assignment.cells.values() if v)
    return CellBoundReport(occ, cells, occ_bound, cell_bound, occ <= occ_bound, cells <= cell_bound)


def contact_cloud(collection: Collection, mode: str | None = None) -> List[Vector]:
    """Lifted contact points of all tangent pairs (pairs on an equator skipped)."""
    graph = count_pairs_hashed(collection, mode or collection.mode)
    cloud = []
    for e in graph.edges:
        s = collection.by_id(e.id1)
        if e.point[-1] == s.center[-1]:
            continue
        cloud.append(lift_point(s, e.point).coords)
    return sorted(set(cloud))


def _median(values: List[Fraction]) -> Fraction:
    v = sorted(values)
    m = len(v) // 2
    return v[m] if len(v) % 2 else (v[m - 1] + v[m]) / 2


def heuristic_partition(collection: Collection, d_target: int, mode: str | None = None) -> MultiPoly:
    """Product of d_target/2 axis-parallel hyperplanes from median splits of the contact cloud.

    Each split takes the largest remaining group, cuts it at the median of
    its widest coordinate, and keeps points off the cut in the two halves.
    """
    if d_target < 2 or d_target % 2:
        raise ValueError("target degree must be even and at least 2")
    n = collection.dimension
    nv = 2 * n - 1
    cloud = contact_cloud(collection, mode)
    if len(cloud) < 2:
        if len(collection) == 0:
            return from_linear(n, [1], 0)
        centroid = sum((s.center[0] for s in collection), Fraction(0)) / len(collection)
        return from_linear(n, [1], -centroid)
    groups = [cloud]
    poly = MultiPoly.constant(n, 1)
    for _ in range(d_target // 2):
        groups.sort(key=len, reverse=True)
        g = groups.pop(0)
        if len(g) < 2:
            groups.append(g)
            break
        spreads = [max(p[a] for p in g) - min(p[a] for p in g) for a in range(nv)]
        axis = max(range(nv), key=lambda a: (spreads[a], -a))
        cut = _median([p[axis] for p in g])
        coeffs = [0] * nv
        coeffs[axis] = 1
        poly = poly * from_linear(n, coeffs, -cut)
        groups.append([p for p in g if p[axis] < cut])
        groups.append([p for p in g if p[axis] > cut])
    return poly
