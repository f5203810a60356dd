"""Enumeration of tangent pairs and detection of triple contact points."""

from __future__ import annotations

import csv
import io
import itertools
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .exact import (
    SIGNED,
    UNSIGNED,
    Collection,
    GeometryError,
    Sphere,
    TangencyStatus,
    Vector,
)

HASH_DIMS = 3


@dataclass(frozen=True, order=True)
class TangencyEdge:
    id1: int
    id2: int
    status: TangencyStatus
    point: Vector


@dataclass(frozen=True)
class TangencyGraph:
    vertices: Tuple[int, ...]
    edges: Tuple[TangencyEdge, ...]

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def ordered_count(self) -> int:
        return 2 * len(self.edges)

    def edge_set(self) -> set:
        return set(self.edges)

    def neighbours(self, sphere_id: int) -> List[TangencyEdge]:
        return [e for e in self.edges if sphere_id in (e.id1, e.id2)]


class _Scaled:
    """Collection scaled to a common denominator so predicates run on ints."""

    def __init__(self, collection: Collection):
        self.spheres = collection.spheres
        denoms = [c.denominator for s in self.spheres for c in s.center]
        denoms += [s.radius.denominator for s in self.spheres]
        self.scale = math.lcm(*denoms) if denoms else 1
        L = self.scale
        self.centers = [tuple(int(c * L) for c in s.center) for s in self.spheres]
        self.radii = [int(s.radius * L) for s in self.spheres]


def _status_int(c1, r1, c2, r2, mode) -> TangencyStatus:
    d2 = 0
    for a, b in zip(c1, c2):
        d2 += (a - b) * (a - b)
    if mode == SIGNED:
        if d2 != (r1 - r2) ** 2:
            return TangencyStatus.NOT_TANGENT
        if d2 == 0:
            raise GeometryError("identical spheres in collection")
        return TangencyStatus.INTERNAL if (r1 > 0) == (r2 > 0) else TangencyStatus.EXTERNAL
    a1, a2 = abs(r1), abs(r2)
    if d2 == (a1 + a2) ** 2:
        return TangencyStatus.EXTERNAL
    if d2 == 0:
        if r1 == r2:
            raise GeometryError("identical spheres in collection")
        return TangencyStatus.NOT_TANGENT
    if d2 == (a1 - a2) ** 2:
        return TangencyStatus.INTERNAL
    return TangencyStatus.NOT_TANGENT


def _make_edge(s1: Sphere, s2: Sphere, status: TangencyStatus, mode: str) -> TangencyEdge:
    from .exact import contact_parameter

    if s1.id > s2.id:
        s1, s2 = s2, s1
    t = contact_parameter(s1, s2, status, mode)
    point = tuple(a + t * (b - a) for a, b in zip(s1.center, s2.center))
    return TangencyEdge(s1.id, s2.id, status, point)


def _scan_rows(sc: _Scaled, rows: Sequence[int], candidates, mode: str) -> List[TangencyEdge]:
    out = []
    for i in rows:
        ci, ri = sc.centers[i], sc.radii[i]
        for j in candidates(i):
            st = _status_int(ci, ri, sc.centers[j], sc.radii[j], mode)
            if st is not TangencyStatus.NOT_TANGENT:
                out.append(_make_edge(sc.spheres[i], sc.spheres[j], st, mode))
    return out


def _run(sc: _Scaled, candidates, mode: str, workers: int) -> List[TangencyEdge]:
    n = len(sc.spheres)
    if workers <= 1 or n < 2:
        return _scan_rows(sc, range(n), candidates, mode)
    chunks = [range(k, n, workers) for k in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda rows: _scan_rows(sc, rows, candidates, mode), chunks)
        return [e for part in parts for e in part]


def _graph(collection: Collection, edges: Iterable[TangencyEdge]) -> TangencyGraph:
    return TangencyGraph(
        tuple(sorted(s.id for s in collection)), tuple(sorted(edges, key=lambda e: (e.id1, e.id2)))
    )


def _check_mode(mode: str) -> None:
    if mode not in (SIGNED, UNSIGNED):
        raise GeometryError(f"unknown mode {mode!r}")


def count_pairs_bruteforce(
    collection: Collection, mode: str | None = None, workers: int = 1
) -> TangencyGraph:
    """Exact O(N^2) scan over all unordered pairs."""
    mode = mode or collection.mode
    _check_mode(mode)
    sc = _Scaled(collection)
    n = len(sc.spheres)
    edges = _run(sc, lambda i: range(i + 1, n), mode, workers)
    return _graph(collection, edges)


def count_pairs_hashed(
    collection: Collection, mode: str | None = None, workers: int = 1
) -> TangencyGraph:
    """Same graph as the brute-force scan, with bucketing on centre coordinates.

    Buckets have side max|r|. A tangent pair has centre distance at most
    |r1| + |r2| <= 2 max|r|, so partners sit within two buckets per axis.
    Only the first three coordinates are bucketed.
    """
    mode = mode or collection.mode
    _check_mode(mode)
    sc = _Scaled(collection)
    n = len(sc.spheres)
    if n < 2:
        return _graph(collection, [])
    size = max(abs(r) for r in sc.radii)
    k = min(HASH_DIMS, collection.dimension)
    keys = [tuple(c[a] // size for a in range(k)) for c in sc.centers]
    buckets: Dict[tuple, List[int]] = defaultdict(list)
    for i, key in enumerate(keys):
        buckets[key].append(i)
    if len(buckets) == 1:
        return count_pairs_bruteforce(collection, mode, workers)
    offsets = list(itertools.product(range(-2, 3), repeat=k))

    def candidates(i):
        key = keys[i]
        out = []
        for off in offsets:
            for j in buckets.get(tuple(a + b for a, b in zip(key, off)), ()):
                if j > i:
                    out.append(j)
        return out

    return _graph(collection, _run(sc, candidates, mode, workers))


def common_point_triples(graph: TangencyGraph) -> List[Tuple[Vector, FrozenSet[int]]]:
    """Contact points shared by three or more pairwise tangent spheres.

    Returns (point, ids of every sphere touching there) for each point whose
    contact edges contain a triangle. An empty list certifies that no three
    spheres are mutually tangent at one point.
    """
    by_point: Dict[Vector, List[TangencyEdge]] = defaultdict(list)
    for e in graph.edges:
        by_point[e.point].append(e)
    out = []
    for point, edges in by_point.items():
        if len(edges) < 3:
            continue
        adj: Dict[int, set] = defaultdict(set)
        for e in edges:
            adj[e.id1].add(e.id2)
            adj[e.id2].add(e.id1)
        if any(adj[a] & adj[b] for a, b in ((e.id1, e.id2) for e in edges)):
            out.append((point, frozenset(adj)))
    out.sort(key=lambda item: (item[0], sorted(item[1])))
    return out


def format_rational(q: Fraction) -> str:
    return str(q)


def graph_to_csv(graph: TangencyGraph, dimension: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id1", "id2", "status"] + [f"x{i + 1}" for i in range(dimension)])
    for e in graph.edges:
        w.writerow([e.id1, e.id2, e.status.value] + [format_rational(v) for v in e.point])
    return buf.getvalue()


def graph_from_csv(text: str) -> List[TangencyEdge]:
    rows = list(csv.reader(io.StringIO(text)))
    edges = []
    for row in rows[1:]:
        edges.append(
            TangencyEdge(
                int(row[0]),
                int(row[1]),
                TangencyStatus(row[2]),
                tuple(Fraction(v) for v in row[3:]),
            )
        )
    return edges
