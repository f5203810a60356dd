"""Deterministic rational sphere configurations."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exact import SIGNED, UNSIGNED, Collection, GeometryError, Sphere

KINDS = ("hawaiian", "complementary_conics", "zahl_grid", "random")


def hawaiian(count: int, n: int = 3) -> Collection:
    """Spheres centred (k, 0, ..., 0) with radius k: all tangent at the origin."""
    if count < 2:
        raise GeometryError("a Hawaiian ring needs at least two spheres")
    spheres = [Sphere((k,) + (0,) * (n - 1), k, k) for k in range(1, count + 1)]
    return Collection(spheres, n, UNSIGNED)


def circle_point(t: Fraction):
    """Rational point of the unit circle, ((1 - t^2), 2t) / (1 + t^2)."""
    d = 1 + t * t
    return (1 - t * t) / d, 2 * t / d


def complementary_conics(count: int) -> Collection:
    """Two families in R^3 with every cross pair externally tangent.

    Family A: unit spheres centred on the unit circle of the x1x2-plane at
    parameters t = 1, 2, ... (upper half circle, so no antipodal pair).
    Family B: spheres centred (0, 0, h), h = (m^2 - 1)/(2m), radius
    (m^2 + 1)/(2m) - 1 for m = 2, 3, ...; the centre distance to any A
    centre is sqrt(1 + h^2) = (m^2 + 1)/(2m), one more than the radius.
    """
    if count < 4 or count % 2:
        raise GeometryError("complementary conics need an even count of at least 4")
    half = count // 2
    spheres = []
    for k in range(half):
        a, b = circle_point(Fraction(k + 1))
        spheres.append(Sphere((a, b, 0), 1, k + 1))
    for k in range(half):
        m = Fraction(k + 2)
        h = (m * m - 1) / (2 * m)
        r = (m * m + 1) / (2 * m) - 1
        spheres.append(Sphere((0, 0, h), r, half + k + 1))
    return Collection(spheres, 3, UNSIGNED)


def zahl_grid(m: int) -> Collection:
    """Signed spheres with centres (a, b, c) and radius d, all entries in 1..m."""
    if m < 2:
        raise GeometryError("grid side must be at least 2")
    spheres = []
    sid = 1
    rng = range(1, m + 1)
    for a in rng:
        for b in rng:
            for c in rng:
                for d in rng:
                    spheres.append(Sphere((a, b, c), d, sid))
                    sid += 1
    return Collection(spheres, 3, SIGNED)


def _rational(rng: random.Random, bound: int, positive: bool = False) -> Fraction:
    num = rng.randint(1 if positive else -bound, bound)
    return Fraction(num, rng.randint(1, bound))


def random_collection(
    count: int, n: int = 3, seed: int = 0, coord_bound: int = 100, mode: str = UNSIGNED
) -> Collection:
    """Random rational spheres; numerators and denominators bounded by ``coord_bound``."""
    if count < 1:
        raise GeometryError("count must be positive")
    rng = random.Random(seed)
    spheres = []
    seen = set()
    while len(spheres) < count:
        center = tuple(_rational(rng, coord_bound) for _ in range(n))
        radius = _rational(rng, coord_bound, positive=True)
        if mode == SIGNED and rng.random() < 0.5:
            radius = -radius
        if (center, radius) in seen:
            continue
        seen.add((center, radius))
        spheres.append(Sphere(center, radius, len(spheres) + 1))
    return Collection(spheres, n, mode)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    count: int = 0
    m: int = 2
    n: int = 3
    seed: int = 0
    coord_bound: int = 100
    mode: str | None = None

    def build(self) -> Collection:
        if self.kind == "hawaiian":
            c = hawaiian(self.count, self.n)
        elif self.kind == "complementary_conics":
            c = complementary_conics(self.count)
        elif self.kind == "zahl_grid":
            c = zahl_grid(self.m)
        elif self.kind == "random":
            return random_collection(
                self.count, self.n, self.seed, self.coord_bound, self.mode or UNSIGNED
            )
        else:
            raise GeometryError(f"unknown generator {self.kind!r}")
        if self.mode and self.mode != c.mode:
            c = Collection(c.spheres, c.dimension, self.mode)
        return c
