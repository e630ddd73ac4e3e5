import random
from fractions import Fraction

import pytest

from refinery.exactfield import sqrt
from refinery.formspace import (
    AffineForm,
    FormSpace,
    bounding_direction_count,
    build_form_space,
    eval_form,
    extreme_forms,
)
from refinery.polytope import Polytope, pentagon, simplex
from refinery.refinement import golden_alpha, pentagon_form_values, square

from conftest import check_structure, generic_polygon, random_polytope, zonogon

ALPHA = (sqrt(5) - 1) / 2


@pytest.mark.parametrize("n", range(1, 6))
def test_simplex_form_space_is_cube(n):
    F = build_form_space(simplex(n))
    assert len(F.space.vertices) == 2 ** (n + 1)
    vals = {F.values(y) for y in F.space.vertices}
    assert all(set(v) <= {0, 1} for v in vals)
    check_structure(F)


def test_square_gives_octahedron():
    F = build_form_space(square())
    assert len(F.space.vertices) == 6 and len(F.space.inequalities) == 8
    # oracle: the forms 0, 1, x, 1-x, y, 1-y on the unit square
    x, y = AffineForm((1, 0), 0), AffineForm((0, 1), 0)
    one = AffineForm.unit(2)
    expected = {F.coords(w) for w in [AffineForm.null(2), one, x, one - x, y, one - y]}
    assert set(F.space.vertices) == expected
    check_structure(F)


def test_pentagon_trapezohedron():
    F = build_form_space(pentagon())
    assert len(F.space.vertices) == 12 and len(F.space.inequalities) == 10
    check_structure(F)


def test_pentagon_value_matrix():
    F = build_form_space(pentagon())
    values = {F.values(y) for y in F.space.vertices}
    rows = pentagon_form_values()
    for r in rows:
        assert r in values
        assert tuple(1 - x for x in r) in values
    n = (Fraction(0),) * 5
    assert values == set(rows) | {tuple(1 - x for x in r) for r in rows} | {n, (Fraction(1),) * 5}


def test_third_pentagon_form():
    v3 = pentagon_form_values()[2]
    assert v3 == (0, ALPHA, 1, ALPHA, 0)
    assert golden_alpha() == ALPHA


def test_constant_forms_and_complement_action():
    F = build_form_space(pentagon())
    for a in pentagon().vertices:
        assert eval_form(F.to_form(F.null), a) == 0
        assert eval_form(F.to_form(F.unit), a) == 1
    for y in F.space.vertices:
        w = F.to_form(y)
        wc = F.to_form(F.complement(y))
        for s in pentagon().vertices:
            assert wc(s) == 1 - w(s)


def test_to_form_and_coords_are_inverse():
    F = build_form_space(pentagon())
    for y in F.space.vertices:
        assert F.coords(F.to_form(y)) == y
        assert F.admits(F.to_form(y))
    assert F.to_form(F.unit).coeffs == (0, 0)


def test_extreme_forms_list():
    forms = extreme_forms(build_form_space(square()))
    assert len(forms) == 6


def test_bounding_direction_examples():
    assert bounding_direction_count(square()) == 2
    assert bounding_direction_count(pentagon()) == 5
    tri = simplex(2)
    assert bounding_direction_count(tri) == 3
    assert len(build_form_space(tri).space.vertices) == 8
    with pytest.raises(ValueError):
        bounding_direction_count(simplex(3))


@pytest.mark.parametrize("seed", range(10))
def test_two_m_plus_two_zonogons(seed):
    rng = random.Random(seed)
    m = 3 + seed % 6
    Z = zonogon(rng, m)
    assert bounding_direction_count(Z) == m
    assert len(build_form_space(Z).space.vertices) == 2 * m + 2


@pytest.mark.parametrize("seed", range(10))
def test_two_m_plus_two_generic_polygons(seed):
    rng = random.Random(100 + seed)
    n = 3 + seed % 6
    P = generic_polygon(rng, n)
    assert len(build_form_space(P).space.vertices) == 2 * n + 2


@pytest.mark.parametrize("seed", range(8))
def test_structure_random_polytopes(seed):
    rng = random.Random(300 + seed)
    P = random_polytope(rng, rng.choice([2, 3]), rng.randint(4, 7), box=4)
    check_structure(build_form_space(P))


def test_form_space_of_lower_dimensional_base():
    # a triangle sitting in 3-space: value coordinates ignore the ambient space
    P = Polytope.from_vertices([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    F = build_form_space(P)
    assert F.dim == 3 and len(F.space.vertices) == 8
    check_structure(F)
