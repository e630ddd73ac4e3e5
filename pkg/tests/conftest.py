import math
import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import strategies as st

from refinery.exactfield import QuadScalar
from refinery.formspace import FormSpace, bounding_direction_count
from refinery.polytope import Polytope
from refinery.refinement import (
    counterexample_section,
    example_parallelogram,
    example_pentagon_edges,
    example_pentagon_midpoint,
)

small_ints = st.integers(min_value=-30, max_value=30)
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def quad5(draw):
    """Elements of Q(sqrt 5), sometimes rational."""
    a = draw(rationals)
    b = draw(st.one_of(st.just(Fraction(0)), rationals))
    return QuadScalar(a, b, 5) if b else a


def random_polytope(rng: random.Random, dim: int, npts: int, box: int = 6) -> Polytope:
    """Full-dimensional hull of random integer points (retries until full-dimensional)."""
    while True:
        pts = [tuple(rng.randint(-box, box) for _ in range(dim)) for _ in range(npts)]
        P = Polytope.from_vertices(pts)
        if P.dim == dim:
            return P


def random_01_polytope(rng: random.Random, dim: int) -> Polytope:
    while True:
        k = rng.randint(dim + 1, min(2 ** dim, dim + 6))
        pts = rng.sample([tuple((i >> j) & 1 for j in range(dim)) for i in range(2 ** dim)], k)
        P = Polytope.from_vertices(pts)
        if P.dim == dim:
            return P


def zonogon(rng: random.Random, m: int) -> Polytope:
    dirs = set()
    while len(dirs) < m:
        a, b = rng.randint(-6, 6), rng.randint(1, 6)
        g = gcd(a, b)
        dirs.add((a // g, b // g))
    pts = {(0, 0)}
    for d in dirs:
        pts |= {(x + d[0], y + d[1]) for x, y in pts}
    return Polytope.from_vertices(sorted(pts))


def generic_polygon(rng: random.Random, n: int) -> Polytope:
    while True:
        angs = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
        P = Polytope.from_vertices([(round(200 * math.cos(a)), round(200 * math.sin(a))) for a in angs])
        if len(P.vertices) == n and bounding_direction_count(P) == n:
            return P


def check_structure(F: FormSpace):
    """Dimension, constant forms, complement involution and bicone attainment."""
    V = set(F.space.vertices)
    assert F.dim == F.base.dim + 1
    assert F.null in V and F.unit in V
    for y in V:
        assert F.complement(y) in V
        assert F.complement(F.complement(y)) == y
        vals = F.values(y)
        assert all(0 <= v <= 1 for v in vals)
        if y not in (F.null, F.unit):
            # every non-constant extreme form attains both 0 and 1 on the base
            assert min(vals) == 0 and max(vals) == 1


@pytest.fixture(scope="session")
def parallelogram_bundle():
    return example_parallelogram()


@pytest.fixture(scope="session")
def midpoint_bundle():
    return example_pentagon_midpoint()


@pytest.fixture(scope="session")
def edges_bundle():
    return example_pentagon_edges()


@pytest.fixture(scope="session")
def square_section():
    return counterexample_section()
