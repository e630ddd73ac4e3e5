import random
from fractions import Fraction

import pytest

from refinery.affmap import PartialAffineMap, image, preimage, pullback_form
from refinery.exactfield import dot, sqrt
from refinery.formspace import build_form_space
from refinery.lp import verify_farkas
from refinery.polytope import Polytope, pentagon, simplex
from refinery.refinement import (
    Refinement,
    StatisticalModel,
    _listed_form,
    extend_forms,
    golden_alpha,
    holevo_refinement,
    linusson_check,
    maximal_g,
    maximal_g_dimension,
    section_embedding,
    square,
    verify_refinement,
)

from conftest import random_polytope

ALPHA = (sqrt(5) - 1) / 2


def _random_convex_weights(rng, n):
    w = [Fraction(rng.randint(0, 9)) for _ in range(n)]
    if not any(w):
        w[0] = Fraction(1)
    s = sum(w)
    return [x / s for x in w]


def _combine(points, weights):
    return tuple(sum((w * p[c] for w, p in zip(weights, points)), Fraction(0)) for c in range(len(points[0])))


def check_bilinear_compatibility(R, M, rng, samples=100):
    """Compatibility at random convex combinations, not only at vertices."""
    OT, OC = R.omegaT, M.omega
    A, W = R.f.domain.vertices, R.g.domain.vertices
    for _ in range(samples):
        a = _combine(A, _random_convex_weights(rng, len(A)))
        w = _combine(W, _random_convex_weights(rng, len(W)))
        assert R.f(a) is not None and R.g(w) is not None
        lhs = dot(OC.evaluation_row(R.f(a)), R.g(w))
        rhs = dot(OT.evaluation_row(a), w)
        assert lhs == rhs


@pytest.mark.parametrize("C", [square(), pentagon()], ids=["square", "pentagon"])
def test_holevo_named_models(C):
    M = StatisticalModel.of(C)
    R = holevo_refinement(M)
    assert verify_refinement(R, M).passed
    assert R.g.domain.dim == M.omega.dim == C.dim + 1
    assert len(R.T.vertices) == len(C.vertices)


@pytest.mark.parametrize("seed", range(8))
def test_holevo_random_models(seed):
    rng = random.Random(seed)
    C = random_polytope(rng, rng.choice([2, 3]), rng.randint(4, 7), box=3)
    M = StatisticalModel.of(C)
    R = holevo_refinement(M)
    rep = verify_refinement(R, M)
    assert rep.passed, rep.axioms
    assert R.g.domain.dim == C.dim + 1


def test_holevo_simplicial_model_is_total():
    M = StatisticalModel.of(simplex(2))
    R = holevo_refinement(M)
    assert R.g.domain == R.omegaT.space
    assert verify_refinement(R, M).passed


def test_holevo_square_domain_of_g():
    # g is undefined at the forms singling out one vertex; the forms separating
    # two adjacent vertices from the other two do lie in its domain
    M = StatisticalModel.of(square())
    R = holevo_refinement(M)
    for i in range(4):
        d = tuple(Fraction(int(i == j)) for j in range(4))
        assert R.g(d) is None
        assert R.g(tuple(1 - x for x in d)) is None
    assert R.g((0, 0, 1, 1)) is not None
    assert len(R.g.domain.vertices) == 6


def test_holevo_pentagon_compatibility_off_vertices():
    M = StatisticalModel.of(pentagon())
    check_bilinear_compatibility(holevo_refinement(M), M, random.Random(7), samples=30)


def test_parallelogram_example(parallelogram_bundle):
    b = parallelogram_bundle
    assert b.report.passed and b.report.summary() == "axioms: I,II,III,IV pass"
    assert all(b.features.values())
    assert b.report.pairs_checked <= 5 * 16
    M, R = b.model, b.refinement
    g = R.g
    assert g((0, 0, 0, 0)) == M.omega.null and g((1, 1, 1, 1)) == M.omega.unit
    extreme = set(M.omega.space.vertices)
    assert g((0, 0, 1, 1)) in extreme
    check_bilinear_compatibility(R, M, random.Random(11))


def test_self_refinement_of_simplex():
    T = simplex(2)
    M = StatisticalModel.of(T)
    R = Refinement(T, M.omega, PartialAffineMap.identity(T), PartialAffineMap.identity(M.omega.space))
    assert verify_refinement(R, M).passed


def test_section_with_maximal_g_fails_onto(parallelogram_bundle):
    M = parallelogram_bundle.model
    T, f = section_embedding(M.C)
    OT = build_form_space(T)
    R = Refinement(T, OT, f, maximal_g(M, T, f, OT))
    rep = verify_refinement(R, M)
    assert rep.axioms["I"].passed and rep.axioms["II"].passed
    assert not rep.axioms["III"].passed
    missing = rep.axioms["III"].witness["uncovered_extreme_form"]
    assert set(missing) == {0, 1}


def test_wrong_g_breaks_compatibility(parallelogram_bundle):
    M, R = parallelogram_bundle.model, parallelogram_bundle.refinement
    g = R.g
    flipped = PartialAffineMap([[-x for x in row] for row in g.linear], [1 - o for o in g.offset], g.domain)
    rep = verify_refinement(Refinement(R.T, R.omegaT, R.f, flipped), M)
    assert not rep.axioms["IV"].passed
    w = rep.axioms["IV"].witness
    assert w["g(w).f(a)"] != w["w.a"]


def test_non_simplex_source_fails_axiom_one():
    M = StatisticalModel.of(simplex(1))
    sq = square()
    f = PartialAffineMap([[1, 0]], [0], sq)
    rep = verify_refinement(Refinement(sq, build_form_space(sq), f, PartialAffineMap.identity(M.omega.space)), M)
    assert not rep.axioms["I"].passed


def test_midpoint_example(midpoint_bundle):
    b = midpoint_bundle
    assert b.report.passed
    flags = {k: v for k, v in b.features.items() if isinstance(v, bool)}
    assert all(flags.values()), flags
    f = b.refinement.f
    T = b.refinement.T
    assert f(T.vertices[0]) is None
    assert image(f) == pentagon()
    m1 = tuple(Fraction(1, 2) if i < 2 else Fraction(0) for i in range(10))
    assert preimage(f, Polytope.from_vertices([pentagon().vertices[0]])).vertices == (m1,)
    assert b.features["maximal_g_dimension"] >= b.refinement.g.domain.dim


def test_midpoint_segment_endpoints_are_convex_forms(midpoint_bundle):
    OT = midpoint_bundle.refinement.omegaT
    for i in range(5):
        for beta in (2 * ALPHA - 1, Fraction(1)):
            rho = _listed_form(i, beta, 2 * ALPHA - beta)
            assert OT.space.contains(rho)
    rho = _listed_form(0, Fraction(1), 2 * ALPHA - 1)
    m2 = tuple(Fraction(1, 2) if i in (2, 3) else Fraction(0) for i in range(10))
    assert dot(OT.evaluation_row(m2), rho) == ALPHA


def test_edges_example(edges_bundle):
    b = edges_bundle
    assert b.report.passed and all(b.features.values())
    f, T = b.refinement.f, b.refinement.T
    s1 = pentagon().vertices[0]
    assert f(T.vertices[0]) == f(T.vertices[1]) == s1
    edge = preimage(f, Polytope.from_vertices([s1]))
    assert edge == Polytope.from_vertices(T.vertices[:2])


def test_edges_listed_form_values(edges_bundle):
    OT = edges_bundle.refinement.omegaT
    r1 = _listed_form(0, ALPHA, ALPHA)
    assert dot(OT.evaluation_row(simplex(9).vertices[2]), r1) == ALPHA
    # the pullback of v1 along f agrees with r1 on the whole simplex
    M, f = edges_bundle.model, edges_bundle.refinement.f
    v1 = M.omega.to_form(M.omega.space.vertices[0])
    v1 = next(M.omega.to_form(y) for y in M.omega.space.vertices
              if M.omega.values(y) == (1, ALPHA, 0, 0, ALPHA))
    w = pullback_form(f, v1)
    for e in simplex(9).vertices:
        assert w(e) == dot(OT.evaluation_row(e), r1)


def test_counterexample(square_section):
    s = square_section
    assert s.injective
    bad = s.non_extendable
    assert len(bad) == 4
    for r in bad:
        assert r.certificate_verified
        assert sorted(r.form) == [0, 0, 1, 1]
    by_form = {r.form: r for r in s.results}
    assert by_form[(0, 0, 0, 0)].extendable and by_form[(1, 1, 1, 1)].extendable
    assert by_form[(Fraction(1, 2),) * 4].extendable


def test_counterexample_certificate_rechecked_independently(square_section):
    from refinery.refinement import extension_program

    s = square_section
    OT = build_form_space(s.T)
    for r in s.non_extendable:
        program = extension_program(s.model, OT, s.f, r.coords)
        assert verify_farkas(program, r.certificate)


def test_linusson_pentagon():
    M = StatisticalModel.of(pentagon())
    T, f = section_embedding(M.C)
    assert len(T.vertices) == 5
    rep = linusson_check(M, f, T)
    assert rep.non_extendable
    assert all(r.certificate_verified for r in rep.non_extendable)


def test_linusson_simplicial_is_extendable():
    M = StatisticalModel.of(simplex(2))
    T, f = section_embedding(M.C)
    rep = linusson_check(M, f, T)
    assert not rep.non_extendable


def test_linusson_rejects_non_injective():
    M = StatisticalModel.of(square())
    with pytest.raises(ValueError):
        linusson_check(M, holevo_refinement(M).f)


def test_maximal_g_dimension_counts():
    M = StatisticalModel.of(pentagon())
    R = holevo_refinement(M)
    assert maximal_g_dimension(M, R.T, R.f) == 3


def test_extend_forms_for_projection_all_feasible():
    M = StatisticalModel.of(square())
    R = holevo_refinement(M)
    assert all(r.extendable for r in extend_forms(M, R.T, R.f))
