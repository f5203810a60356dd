"""Exact tangency counting, lifting and incidence tools for sphere collections."""

__version__ = "0.1.0"

from .exact import (  # noqa: E402
    Collection,
    GeometryError,
    RationalRotation,
    Sphere,
    TangencyStatus,
    apply_rotation,
    cayley_rotation,
    contact_point,
    find_generic_rotation,
    tangency_status,
)
from .generators import complementary_conics, hawaiian, random_collection, zahl_grid  # noqa: E402
from .tangency import common_point_triples, count_pairs_bruteforce, count_pairs_hashed  # noqa: E402
