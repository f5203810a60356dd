from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import strategies as st

from sphere_tangency.exact import Collection, Sphere


def oracle_pairs(collection, mode=None):
    """Plain O(N^2) tangent-pair set, written straight from the contact condition."""
    mode = mode or collection.mode
    out = set()
    for s1, s2 in combinations(collection.spheres, 2):
        d2 = sum((a - b) ** 2 for a, b in zip(s1.center, s2.center))
        r1, r2 = s1.radius, s2.radius
        if mode == "signed":
            hit = d2 == (r1 - r2) ** 2
        else:
            hit = d2 == (abs(r1) + abs(r2)) ** 2 or (d2 > 0 and d2 == (abs(r1) - abs(r2)) ** 2)
        if hit:
            out.add(tuple(sorted((s1.id, s2.id))))
    return out


def oracle_triples(collection, mode=None):
    """Points where three spheres are pairwise tangent, by scanning every triple."""
    from sphere_tangency.exact import contact_point

    mode = mode or collection.mode
    pairs = oracle_pairs(collection, mode)
    spheres = {s.id: s for s in collection}
    found = {}
    for a, b, c in combinations(sorted(spheres), 3):
        if {(a, b), (a, c), (b, c)} <= pairs:
            p = contact_point(spheres[a], spheres[b], mode)
            if p == contact_point(spheres[a], spheres[c], mode) == contact_point(
                spheres[b], spheres[c], mode
            ):
                found.setdefault(p, set()).update((a, b, c))
    return found


def rationals(bound=20, nonzero=False):
    r = st.fractions(min_value=-bound, max_value=bound, max_denominator=bound)
    return r.filter(lambda q: q != 0) if nonzero else r


@st.composite
def spheres_st(draw, n=3, ident=0):
    center = tuple(draw(rationals()) for _ in range(n))
    radius = draw(rationals(nonzero=True))
    return Sphere(center, radius, ident)


@st.composite
def small_grid_collections(draw, n=3, max_size=14):
    """Integer spheres on a tiny grid: tangencies are common, unlike random rationals."""
    size = draw(st.integers(2, max_size))
    mode = draw(st.sampled_from(["signed", "unsigned"]))
    seen = set()
    spheres = []
    for _ in range(size):
        c = tuple(draw(st.integers(-3, 3)) for _ in range(n))
        r = draw(st.integers(1, 4))
        if mode == "signed" and draw(st.booleans()):
            r = -r
        if (c, r) in seen:
            continue
        seen.add((c, r))
        spheres.append(Sphere(c, r, len(spheres) + 1))
    return Collection(spheres, n, mode)


@st.composite
def sphere_with_point(draw, n=3):
    """A rational sphere and a rational point on it off its equator."""
    center = tuple(draw(rationals(10)) for _ in range(n))
    r = draw(rationals(10, nonzero=True))
    u = tuple(draw(rationals(6)) for _ in range(n - 1))
    q = sum(v * v for v in u)
    if q == 1:
        u, q = (Fraction(0),) * (n - 1), Fraction(0)
    direction = tuple(2 * v / (1 + q) for v in u) + ((q - 1) / (1 + q),)
    x = tuple(c + r * d for c, d in zip(center, direction))
    return Sphere(center, r), x


@pytest.fixture
def unit():
    return Sphere((0, 0, 0), 1, 1)


@pytest.fixture
def stacked():
    """Unit spheres at the origin and at (0, 0, 2), tangent at (0, 0, 1)."""
    return Sphere((0, 0, 0), 1, 1), Sphere((0, 0, 2), 1, 2)


F = Fraction
