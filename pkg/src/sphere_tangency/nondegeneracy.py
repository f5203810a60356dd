"""Witness search for concentrations of tangency points on low-degree sections.

A witness is a polynomial g(X) of degree <= d together with the partner
spheres whose contact point with sphere s lies on Z(g). Hyperplanes
(d = 1) are searched exhaustively; higher degrees use a greedy search over
evaluation-matrix kernels. Witnesses are always re-verified exactly, but
NoWitnessFound is not a proof of non-degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from . import linalg
from .exact import Collection, GeometryError, Sphere, Vector
from .polyalg import MultiPoly, evaluate, to_text, x_monomials
from .tangency import TangencyGraph, common_point_triples, count_pairs_hashed

VIOLATION = "ViolationWitnessed"
NO_WITNESS = "NoWitnessFound"


class ConditionIViolation(GeometryError):
    def __init__(self, triples):
        point, ids = triples[0]
        super().__init__(
            f"condition (i) violated: spheres {sorted(ids)} mutually tangent at "
            f"({', '.join(map(str, point))})"
        )
        self.triples = triples


def contacts_of(graph: TangencyGraph, sphere_id: int) -> List[Tuple[int, Vector]]:
    out = []
    for e in graph.edges:
        if e.id1 == sphere_id:
            out.append((e.id2, e.point))
        elif e.id2 == sphere_id:
            out.append((e.id1, e.point))
    return sorted(out)


def tangency_points_on(collection: Collection, s: Sphere, mode: str | None = None) -> List[Vector]:
    if s not in collection.spheres:
        raise GeometryError(f"sphere {s.id} is not in the collection")
    graph = count_pairs_hashed(collection, mode or collection.mode)
    return sorted({p for _, p in contacts_of(graph, s.id)})


def _normalise(v: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    lead = next(x for x in v if x != 0)
    return tuple(x / lead for x in v)


def _monomial_value(x: Sequence[Fraction], e) -> Fraction:
    v = Fraction(1)
    for xi, a in zip(x, e):
        if a:
            v *= xi ** a
    return v


def _poly_from_coeffs(n: int, monos, coeffs) -> MultiPoly:
    return MultiPoly(n, {tuple(e) + (0,) * (n - 1): c for e, c in zip(monos, coeffs)})


@dataclass(frozen=True)
class Hyperplane:
    """a . x = b, scaled so the first nonzero entry of (a, b) is 1."""

    normal: Tuple[Fraction, ...]
    offset: Fraction

    def contains(self, x: Sequence[Fraction]) -> bool:
        return sum(a * xi for a, xi in zip(self.normal, x)) == self.offset

    def poly(self) -> MultiPoly:
        n = len(self.normal)
        terms = {(0,) * (2 * n - 1): -self.offset}
        for i, a in enumerate(self.normal):
            e = [0] * (2 * n - 1)
            e[i] = 1
            terms[tuple(e)] = a
        return MultiPoly(n, terms)


def _hyperplane_from_kernel(v) -> Hyperplane:
    # rows are (x, -1), so a kernel vector (a, c) means a . x = c
    v = _normalise(v)
    return Hyperplane(tuple(v[:-1]), v[-1])


def hyperplane_witness(points: Sequence[Sequence[Fraction]], n: int) -> Tuple[Hyperplane, int]:
    """A hyperplane containing the most points, with that count (exact maximum)."""
    pts = [tuple(Fraction(v) for v in p) for p in dict.fromkeys(map(tuple, points))]
    if not pts:
        return Hyperplane((Fraction(1),) + (Fraction(0),) * (n - 1), Fraction(0)), 0
    rows = [list(p) + [Fraction(-1)] for p in pts]
    ker = linalg.nullspace(rows)
    if ker:
        return _hyperplane_from_kernel(ker[0]), len(pts)
    best: Tuple[Hyperplane, int] | None = None
    seen = set()
    for subset in combinations(range(len(pts)), n):
        ker = linalg.nullspace([rows[i] for i in subset])
        if len(ker) != 1:
            continue
        h = _hyperplane_from_kernel(ker[0])
        if h in seen:
            continue
        seen.add(h)
        c = sum(1 for p in pts if h.contains(p))
        if best is None or c > best[1]:
            best = (h, c)
    return best


@dataclass(frozen=True)
class VeroneseCertificate:
    points: int
    degree: int
    raw_rank: int
    raw_columns: int
    reduced_rank: int
    reduced_columns: int
    raw_kernel: Tuple[Tuple[Fraction, ...], ...]
    reduced_kernel: Tuple[Tuple[Fraction, ...], ...]

    @property
    def raw_vanishing(self) -> bool:
        """Some nonzero polynomial of degree <= d vanishes at every point."""
        return self.raw_rank < self.raw_columns

    @property
    def reduced_vanishing(self) -> bool:
        """Some such polynomial exists that is not a multiple of the sphere equation."""
        return self.reduced_rank < self.reduced_columns


def standard_monomials(n: int, d: int):
    # the leading monomial of the sphere equation is X1^2 in grlex
    return [e for e in x_monomials(n, d) if e[0] <= 1]


def veronese_certificate(points: Sequence[Sequence], s: Sphere, d: int) -> VeroneseCertificate:
    """Ranks of the degree-<=d evaluation matrix, raw and modulo the sphere equation."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    n = s.dim
    pts = list(dict.fromkeys(tuple(Fraction(v) for v in p) for p in points))
    raw_monos = x_monomials(n, d)
    red_monos = standard_monomials(n, d)
    raw = [[_monomial_value(p, e) for e in raw_monos] for p in pts]
    red = [[_monomial_value(p, e) for e in red_monos] for p in pts]
    raw_ker = linalg.nullspace(raw, len(raw_monos))
    red_ker = linalg.nullspace(red, len(red_monos))
    return VeroneseCertificate(
        len(pts),
        d,
        len(raw_monos) - len(raw_ker),
        len(raw_monos),
        len(red_monos) - len(red_ker),
        len(red_monos),
        tuple(map(tuple, raw_ker)),
        tuple(map(tuple, red_ker)),
    )


@dataclass(frozen=True)
class Witness:
    degree: int
    poly: MultiPoly
    partners: Tuple[int, ...]
    points: Tuple[Vector, ...]

    @property
    def count(self) -> int:
        return len(self.partners)


def verify_witness(s: Sphere, w: Witness) -> bool:
    return all(s.contains(p) and evaluate(w.poly, p) == 0 for p in w.points) and (
        not w.poly.is_zero()
    )


def _witness_from_poly(degree, g: MultiPoly, contacts) -> Witness:
    hits = [(pid, p) for pid, p in contacts if evaluate(g, p) == 0]
    return Witness(degree, g, tuple(pid for pid, _ in hits), tuple(sorted({p for _, p in hits})))


def _greedy_kernel_witness(s: Sphere, contacts, d: int) -> Witness | None:
    n = s.dim
    monos = standard_monomials(n, d)
    pts = sorted({p for _, p in contacts})
    if not pts:
        return None
    values = {p: [_monomial_value(p, e) for e in monos] for p in pts}
    best = None
    for start in range(len(pts)):
        chosen: List[Vector] = []
        for p in pts[start:] + pts[:start]:
            trial = chosen + [p]
            if len(trial) < len(monos) or linalg.rank([values[q] for q in trial]) < len(monos):
                chosen = trial
        ker = linalg.nullspace([values[q] for q in chosen], len(monos))
        g = _poly_from_coeffs(n, monos, _normalise(ker[0]))
        w = _witness_from_poly(d, g, contacts)
        if best is None or w.count > best.count:
            best = w
        if best.count == len(contacts):
            break
    return best


@dataclass(frozen=True)
class SphereAudit:
    sphere_id: int
    tangency_points: int
    partners: int
    best: Witness | None
    certificate: VeroneseCertificate | None


@dataclass
class AuditVerdict:
    verdict: str
    b: int
    d: int
    b_found: int
    records: List[SphereAudit] = field(default_factory=list)

    @property
    def worst(self) -> SphereAudit | None:
        cands = [r for r in self.records if r.best is not None]
        return max(cands, key=lambda r: (r.best.count, -r.sphere_id), default=None)


def audit(
    collection: Collection,
    b: int,
    d: int,
    mode: str | None = None,
    require_condition_i: bool = True,
) -> AuditVerdict:
    """Search every sphere for a degree-<=d section carrying more than b contacts."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    mode = mode or collection.mode
    graph = count_pairs_hashed(collection, mode)
    if require_condition_i:
        triples = common_point_triples(graph)
        if triples:
            raise ConditionIViolation(triples)
    n = collection.dimension
    records = []
    for s in sorted(collection, key=lambda s: s.id):
        contacts = contacts_of(graph, s.id)
        pts = sorted({p for _, p in contacts})
        best = None
        cert = None
        if contacts:
            h, _ = hyperplane_witness(pts, n)
            best = _witness_from_poly(1, h.poly(), contacts)
            cert = veronese_certificate(pts, s, 1)
            for deg in range(2, d + 1):
                w = _greedy_kernel_witness(s, contacts, deg)
                if w is not None and w.count > best.count:
                    best = w
            if not verify_witness(s, best):
                raise GeometryError(f"witness for sphere {s.id} failed re-verification")
        records.append(SphereAudit(s.id, len(pts), len(contacts), best, cert))
    b_found = max((r.best.count for r in records if r.best is not None), default=0)
    verdict = VIOLATION if b_found > b else NO_WITNESS
    return AuditVerdict(verdict, b, d, b_found, records)


def verdict_text(v: AuditVerdict) -> str:
    head = f"{v.verdict}({v.b_found})" if v.verdict == VIOLATION else v.verdict
    lines = [f"verdict {head}", f"b {v.b}", f"d {v.d}", f"max_witness {v.b_found}"]
    for r in v.records:
        if r.best is None:
            lines.append(f"sphere {r.sphere_id} points 0")
            continue
        c = r.certificate
        lines.append(
            f"sphere {r.sphere_id} points {r.tangency_points} partners {r.partners} "
            f"witness_degree {r.best.degree} witness_count {r.best.count} "
            f"rank_raw {c.raw_rank}/{c.raw_columns} rank_mod_sphere {c.reduced_rank}/{c.reduced_columns} "
            f"witness {to_text(r.best.poly)}"
        )
    return "\n".join(lines) + "\n"
