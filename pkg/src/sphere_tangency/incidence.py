"""Incidences between lifted spheres relative to a polynomial P(X, Y).

Ordered incidences are split into
  I1: witness off Z(P);
  I3: witness on Z(P), at least one of the two lifts not inside Z(P);
  I4: both lifts inside Z(P).
The lifts contained in Z(P) are then fed to the derivative chain
P_{k+1} = d/dY_j P_k, which ends in a Y-free polynomial R(X).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .exact import Collection, GeometryError, Sphere
from .lift import GenericPositionError, LiftedPoint, lift_point
from .polyalg import (
    MultiPoly,
    divides,
    evaluate,
    partial_derivative,
    sphere_poly,
    tilde_substitute,
    to_text,
)
from .tangency import count_pairs_hashed


class ChainInconsistency(RuntimeError):
    """An identity the chain relies on failed on concrete data."""

    def __init__(self, message: str, pair: Tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class Incidence:
    id1: int
    id2: int
    witness: LiftedPoint


def lift_contained(s: Sphere, p: MultiPoly) -> bool:
    """Whether the lift of ``s`` lies in Z(p): S_s divides the substituted polynomial."""
    return divides(sphere_poly(s), tilde_substitute(p, s))


def incidences(collection: Collection, mode: str | None = None) -> List[Incidence]:
    """All ordered incidences with their lifted witnesses, sorted by id pair."""
    mode = mode or collection.mode
    graph = count_pairs_hashed(collection, mode)
    out = []
    for e in graph.edges:
        s1, s2 = collection.by_id(e.id1), collection.by_id(e.id2)
        w1 = lift_point(s1, e.point)
        if lift_point(s2, e.point) != w1:
            raise GeometryError(f"lifts of {e.id1} and {e.id2} disagree at the contact point")
        out.append(Incidence(e.id1, e.id2, w1))
        out.append(Incidence(e.id2, e.id1, w1))
    out.sort(key=lambda inc: (inc.id1, inc.id2))
    return out


@dataclass
class IncidenceReport:
    i1: List[Incidence]
    i3: List[Incidence]
    i4: List[Incidence]
    contained: FrozenSet[int]
    # per sphere outside the contained set: number of its incidences on Z(P)
    zp_counts: Dict[int, int] = field(default_factory=dict)
    tilde_vanishes: bool = True

    @property
    def total(self) -> int:
        return len(self.i1) + len(self.i3) + len(self.i4)

    @property
    def b_prime(self) -> int:
        return max(self.zp_counts.values(), default=0)

    @property
    def outside_count(self) -> int:
        return len(self.zp_counts)

    @property
    def i3_bound(self) -> int:
        return 2 * self.b_prime * self.outside_count

    @property
    def i3_bound_holds(self) -> bool:
        return len(self.i3) <= self.i3_bound


def classify_incidences(
    collection: Collection, p: MultiPoly, mode: str | None = None
) -> IncidenceReport:
    if p.n != collection.dimension:
        raise GeometryError("polynomial and collection dimensions differ")
    incs = incidences(collection, mode)
    contained = frozenset(s.id for s in collection if lift_contained(s, p))
    tildes = {s.id: tilde_substitute(p, s) for s in collection if s.id not in contained}
    i1, i3, i4 = [], [], []
    zp_counts = {sid: 0 for sid in tildes}
    tilde_ok = True
    for inc in incs:
        if evaluate(p, inc.witness.coords) != 0:
            i1.append(inc)
            continue
        if inc.id1 in contained and inc.id2 in contained:
            i4.append(inc)
            continue
        i3.append(inc)
        if inc.id1 in tildes:
            zp_counts[inc.id1] += 1
            # the contact point must lie on Z(P~_sigma)
            tilde_ok &= evaluate(tildes[inc.id1], inc.witness.x) == 0
    return IncidenceReport(i1, i3, i4, contained, zp_counts, tilde_ok)


def report_text(report: IncidenceReport) -> str:
    lines = [
        f"total {report.total}",
        f"I1 {len(report.i1)}",
        f"I3 {len(report.i3)}",
        f"I4 {len(report.i4)}",
        f"contained {' '.join(map(str, sorted(report.contained)))}".rstrip(),
        f"I3_bound 2*{report.b_prime}*{report.outside_count} = {report.i3_bound} "
        f"{'ok' if report.i3_bound_holds else 'VIOLATED'}",
        f"tilde_witnesses {'ok' if report.tilde_vanishes else 'VIOLATED'}",
    ]
    for name, items in (("I1", report.i1), ("I3", report.i3), ("I4", report.i4)):
        for inc in items:
            lines.append(f"{name} {inc.id1} {inc.id2} " + " ".join(inc.witness.to_strings()))
    return "\n".join(lines) + "\n"


# -- derivative chain ----------------------------------------------------------


@dataclass(frozen=True)
class ChainStep:
    k: int
    members: Tuple[int, ...]
    poly: MultiPoly
    index: int | None  # j with P_{k+1} = d/dY_j P_k, None at the last step
    removed_incidences: int = 0
    removed_spheres: int = 0
    b_step: int = 0


@dataclass(frozen=True)
class AlgebraicChain:
    steps: Tuple[ChainStep, ...]
    terminal_poly: MultiPoly
    terminal: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    def members(self, k: int) -> Tuple[int, ...]:
        return self.steps[k - 1].members


def first_y_derivative(p: MultiPoly) -> Tuple[int | None, MultiPoly | None]:
    """Smallest j with d/dY_j p nonzero, and that derivative."""
    for j in range(1, p.n):
        d = partial_derivative(p, f"Y{j}")
        if not d.is_zero():
            return j, d
    return None, None


def algebraic_chain(
    collection: Collection, p: MultiPoly, mode: str | None = None
) -> AlgebraicChain:
    """Run the derivative chain, checking each step's identities exactly.

    C_1 holds the spheres whose lifts lie in Z(p); P_1 is the first
    nonvanishing Y-derivative of p, and C_{k+1} keeps the members of C_k
    whose lifts lie in Z(P_k). When P_k is Y-free it is the terminal R and
    the terminal collection is {s in C_k : S_s divides R}.
    """
    if p.is_zero():
        raise GeometryError("the chain needs a nonzero polynomial")
    mode = mode or collection.mode
    incs = incidences(collection, mode)
    spheres = {s.id: s for s in collection}

    def among(ids):
        return [inc for inc in incs if inc.id1 in ids and inc.id2 in ids]

    members = frozenset(sid for sid in spheres if lift_contained(spheres[sid], p))
    current = p
    steps: List[ChainStep] = []
    k = 0
    while True:
        j, deriv = first_y_derivative(current)
        if j is None:
            break
        k += 1
        current = deriv
        for inc in among(members):
            if evaluate(current, inc.witness.coords) != 0:
                raise ChainInconsistency(
                    f"incidence ({inc.id1}, {inc.id2}) of C_{k} is not on Z(P_{k})",
                    (inc.id1, inc.id2),
                )
        nxt = frozenset(sid for sid in members if lift_contained(spheres[sid], current))
        removed = members - nxt
        lost = [inc for inc in among(members) if not (inc.id1 in nxt and inc.id2 in nxt)]
        per_sphere = defaultdict(int)
        for inc in lost:
            if inc.id1 in removed:
                per_sphere[inc.id1] += 1
        b_step = max(per_sphere.values(), default=0)
        if len(lost) > 2 * b_step * len(removed):
            raise ChainInconsistency(f"step {k}: removed incidences exceed 2 B |C_k \\ C_k+1|")
        steps.append(
            ChainStep(k, tuple(sorted(members)), current, j, len(lost), len(removed), b_step)
        )
        members = nxt
    r = current
    s_r = frozenset(sid for sid in members if divides(sphere_poly(spheres[sid]), r))
    if s_r != members and steps:
        # lifts inside Z(R) for Y-free R mean the sphere itself lies in Z(R)
        raise ChainInconsistency("terminal divisibility disagrees with lift containment")
    terminal = tuple(sorted(s_r))
    # opposite signed radii share a zero set, so count distinct sphere polynomials
    distinct = len({sphere_poly(spheres[sid]) for sid in terminal})
    if 2 * distinct > r.degree:
        raise ChainInconsistency(
            f"terminal collection with {distinct} distinct spheres exceeds deg R / 2 = {r.degree}/2"
        )
    return AlgebraicChain(tuple(steps), r, terminal)


def chain_text(chain: AlgebraicChain) -> str:
    lines = [f"length {chain.length}"]
    for st in chain.steps:
        lines.append(
            f"step {st.k} j={st.index} members={list(st.members)} "
            f"removed_incidences={st.removed_incidences} removed_spheres={st.removed_spheres} "
            f"B={st.b_step} P={to_text(st.poly)}"
        )
    lines.append(f"R {to_text(chain.terminal_poly)}")
    lines.append(f"terminal {list(chain.terminal)}")
    return "\n".join(lines) + "\n"


__all__ = [
    "AlgebraicChain",
    "ChainInconsistency",
    "ChainStep",
    "GenericPositionError",
    "Incidence",
    "IncidenceReport",
    "algebraic_chain",
    "chain_text",
    "classify_incidences",
    "incidences",
    "lift_contained",
    "report_text",
]
