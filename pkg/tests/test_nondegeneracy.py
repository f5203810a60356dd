import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from sphere_tangency.exact import Collection, GeometryError, Sphere
from sphere_tangency.generators import complementary_conics, hawaiian, random_collection, zahl_grid
from sphere_tangency.nondegeneracy import (
    NO_WITNESS,
    VIOLATION,
    ConditionIViolation,
    audit,
    hyperplane_witness,
    standard_monomials,
    tangency_points_on,
    verdict_text,
    verify_witness,
    veronese_certificate,
)
from sphere_tangency.polyalg import MultiPoly, evaluate, x_monomials

from conftest import oracle_pairs


def circle(t):
    t = F(t)
    return (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)


def unit_sphere_point(u):
    u = [F(v) for v in u]
    q = sum(v * v for v in u)
    return tuple(2 * v / (1 + q) for v in u) + ((q - 1) / (1 + q),)


def best_plane_count(points):
    """Exhaustive triple scan with cross products, independent of the library."""
    pts = list(dict.fromkeys(points))
    if len(pts) <= 3:
        return len(pts)
    best = 0
    for a, b, c in combinations(pts, 3):
        u = [y - x for x, y in zip(a, b)]
        v = [y - x for x, y in zip(a, c)]
        nrm = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
        if nrm == (0, 0, 0):
            continue
        off = sum(x * y for x, y in zip(nrm, a))
        best = max(best, sum(1 for p in pts if sum(x * y for x, y in zip(nrm, p)) == off))
    return best


class TestTangencyPoints:
    def test_conics_family_a(self):
        c = complementary_conics(8)
        for s in c.spheres[:4]:
            assert len(tangency_points_on(c, s)) == 4

    def test_hawaiian_single_point(self):
        c = hawaiian(5)
        assert all(tangency_points_on(c, s) == [(0, 0, 0)] for s in c)

    def test_isolated(self):
        c = Collection((Sphere((0, 0, 0), 1, 1), Sphere((10, 0, 0), 1, 2)), 3)
        assert tangency_points_on(c, c.spheres[0]) == []

    def test_foreign_sphere(self):
        with pytest.raises(GeometryError):
            tangency_points_on(hawaiian(3), Sphere((9, 9, 9), 1, 1))


class TestHyperplaneWitness:
    def test_conics_plane_through_axis(self):
        c = complementary_conics(8)
        s = c.spheres[0]
        h, count = hyperplane_witness(tangency_points_on(c, s), 3)
        assert count == 4
        for p in [(0, 0, 0), (0, 0, 1), s.center]:
            assert h.contains(p)

    def test_random_points_general_position(self):
        rng = random.Random(11)
        for _ in range(10):
            pts = [unit_sphere_point((F(rng.randint(-9, 9), rng.randint(1, 9)), F(rng.randint(-9, 9), rng.randint(1, 9)))) for _ in range(5)]
            _, count = hyperplane_witness(pts, 3)
            assert count == best_plane_count(pts)

    def test_five_generic_points_give_three(self):
        pts = [unit_sphere_point(u) for u in [(0, 0), (F(1, 2), 0), (0, F(1, 3)), (2, 3), (F(-5, 7), F(2, 9))]]
        assert best_plane_count(pts) == 3
        assert hyperplane_witness(pts, 3)[1] == 3

    def test_fewer_than_n_points(self):
        h, count = hyperplane_witness([(1, 2, 3), (4, 5, 7)], 3)
        assert count == 2 and h.contains((1, 2, 3)) and h.contains((4, 5, 7))

    def test_collinear_points_plus_one(self):
        pts = [(k, 0, 0) for k in range(5)] + [(0, 1, 0), (0, 0, 1), (1, 1, 1)]
        assert hyperplane_witness(pts, 3)[1] == best_plane_count(pts) == 6

    def test_agrees_with_veronese_kernel(self):
        rng = random.Random(3)
        s = Sphere((0, 0, 0), 1)
        for k in range(3, 8):
            pts = [unit_sphere_point((F(rng.randint(-6, 6), 5), F(rng.randint(-6, 6), 7))) for _ in range(k)]
            pts = list(dict.fromkeys(pts))
            _, count = hyperplane_witness(pts, 3)
            assert count >= 2
            assert (count == len(pts)) == veronese_certificate(pts, s, 1).raw_vanishing


class TestVeronese:
    S = Sphere((0, 0, 0), 5)

    def test_independent(self):
        cert = veronese_certificate([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], self.S, 1)
        assert cert.raw_rank == 4 and not cert.raw_vanishing

    def test_duplicates_ignored(self):
        pts = [(0, 0, 0), (1, 0, 0), (0, 1, 0)]
        assert veronese_certificate(pts + pts[:2], self.S, 1).raw_rank == veronese_certificate(pts, self.S, 1).raw_rank

    def test_coplanar_kernel_is_plane(self):
        pts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (F(1, 3), F(1, 3), F(1, 3))]
        cert = veronese_certificate(pts, self.S, 1)
        assert cert.raw_rank == 3 and len(cert.raw_kernel) == 1
        monos = x_monomials(3, 1)
        g = MultiPoly(3, {e + (0, 0): c for e, c in zip(monos, cert.raw_kernel[0])})
        plane = MultiPoly.var(3, "X1") + MultiPoly.var(3, "X2") + MultiPoly.var(3, "X3") - 1
        assert all(evaluate(g, p) == 0 for p in pts)
        # proportional to x1 + x2 + x3 - 1: fix the scale at the constant term
        assert g * (-1 / evaluate(g, (0, 0, 0))) == plane

    def test_reduced_drops_sphere_multiple(self):
        # points on the sphere satisfy S itself; modulo S that kernel vanishes
        pts = [tuple(5 * v for v in unit_sphere_point(u)) for u in [(0, 0), (1, 2), (F(1, 2), 3), (2, F(1, 3)), (3, 1), (F(2, 7), F(5, 3)), (4, 2), (F(1, 5), 1), (2, 5), (F(3, 2), F(-1, 4))]]
        cert = veronese_certificate(pts, self.S, 2)
        assert cert.raw_vanishing
        assert cert.reduced_columns == len(standard_monomials(3, 2)) == 9
        assert cert.reduced_rank == 9 and not cert.reduced_vanishing

    def test_bad_degree(self):
        with pytest.raises(ValueError):
            veronese_certificate([(0, 0, 0)], self.S, 0)


def two_circle_fixture():
    """Unit sphere touched at six points of each of the circles x1 = 0 and x2 = 0."""
    centre = Sphere((0, 0, 0), 1, 1)
    spheres = [centre]
    ts = [F(1, 2), 2, F(1, 3), 3, F(2, 7), F(-4, 5)]
    for k, t in enumerate(ts):
        a, b = circle(t)
        for j, p in enumerate([(0, a, b), (a, 0, b)]):
            spheres.append(Sphere(tuple(2 * v for v in p), 1, 10 + 2 * k + j))
    return Collection(spheres, 3)


class TestAudit:
    def test_conics_violation(self):
        v = audit(complementary_conics(40), 10, 1)
        assert v.verdict == VIOLATION and v.b_found == 20
        assert verdict_text(v).splitlines()[0] == "verdict ViolationWitnessed(20)"
        w = v.worst
        s = complementary_conics(40).by_id(w.sphere_id)
        assert w.best.count == 20 and verify_witness(s, w.best)
        assert w.best.poly.degree == 1

    def test_hawaiian_condition_i(self):
        with pytest.raises(ConditionIViolation) as exc:
            audit(hawaiian(4), 2, 1)
        assert "condition (i)" in str(exc.value)

    def test_zahl_grid_at_ceiling(self):
        c = zahl_grid(3)
        v = audit(c, len(c), 2, require_condition_i=False)
        assert v.verdict == NO_WITNESS and v.b_found <= len(c) - 1

    def test_random_collection(self):
        c = random_collection(100, 3, seed=2)
        v = audit(c, 3, 1)
        assert v.verdict == NO_WITNESS
        for r in v.records:
            if r.best is not None:
                assert verify_witness(c.by_id(r.sphere_id), r.best)

    def test_quadric_beats_plane(self):
        c = two_circle_fixture()
        pairs = oracle_pairs(c)
        assert {a for a, _ in pairs} == {1}
        v1 = audit(c, 5, 1)
        assert v1.b_found == 6 and v1.verdict == VIOLATION
        v2 = audit(c, 11, 2)
        assert v2.b_found == 12 and v2.verdict == VIOLATION
        rec = v2.records[0]
        assert rec.best.degree == 2 and verify_witness(c.by_id(1), rec.best)

    def test_deterministic(self):
        c = complementary_conics(12)
        assert verdict_text(audit(c, 3, 2)) == verdict_text(audit(c, 3, 2))

    def test_every_witness_verified(self):
        c = complementary_conics(16)
        for r in audit(c, 1, 2).records:
            s = c.by_id(r.sphere_id)
            assert verify_witness(s, r.best)
            assert all(s.contains(p) for p in r.best.points)
