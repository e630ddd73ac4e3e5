"""Statistical models and their simplicial refinements.

A refinement of a model ``(C, Omega_C)`` is a simplex ``T`` with its form
space and two partial, onto, affine maps ``f: T -> C`` and
``g: Omega_T -> Omega_C`` with ``g(w)(f(a)) == w(a)`` wherever both sides are
defined.  Form spaces are handled in value coordinates (see
:mod:`refinery.formspace`), so ``g`` is an ordinary :class:`PartialAffineMap`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import lp as _lp
from .affmap import (
    PartialAffineMap,
    image,
    is_injective_on_domain,
    is_onto,
    preimage,
)
from .exactfield import affine_dependencies, dot, sqrt
from .formspace import FormSpace, build_form_space
from .polytope import HRep, Polytope, pentagon, simplex

__all__ = [
    "StatisticalModel",
    "Refinement",
    "AxiomResult",
    "VerificationReport",
    "verify_refinement",
    "maximal_g",
    "extension_program",
    "extend_forms",
    "holevo_refinement",
    "section_embedding",
    "square",
    "golden_alpha",
    "pentagon_form_values",
    "example_parallelogram",
    "example_pentagon_midpoint",
    "example_pentagon_edges",
    "counterexample_section",
    "linusson_check",
]


@dataclass(frozen=True)
class StatisticalModel:
    C: Polytope
    omega: FormSpace

    @classmethod
    def of(cls, C: Polytope) -> "StatisticalModel":
        return cls(C, build_form_space(C))

    @property
    def is_simplicial(self) -> bool:
        return self.C.is_simplex()


@dataclass
class Refinement:
    T: Polytope
    omegaT: FormSpace
    f: PartialAffineMap
    g: PartialAffineMap


@dataclass
class AxiomResult:
    passed: bool
    witness: dict | None = None


@dataclass
class VerificationReport:
    axioms: dict = field(default_factory=dict)
    pairs_checked: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.axioms.values())

    def summary(self) -> str:
        ok = [k for k, r in self.axioms.items() if r.passed]
        bad = [k for k, r in self.axioms.items() if not r.passed]
        text = f"axioms: {','.join(ok)} pass" if ok else "axioms:"
        if bad:
            text += f"; {','.join(bad)} fail"
        return text


def coords_from_values(omega: FormSpace, values: Sequence) -> tuple:
    """Value coordinates of the form with ``values`` at every base vertex."""
    return tuple(values[i] for i in omega.basis)


def verify_refinement(R: Refinement, M: StatisticalModel) -> VerificationReport:
    """Check the four defining conditions exactly.

    Compatibility is checked at every pair (vertex of dom f, vertex of dom g);
    both sides are affine in each argument separately, so this is sufficient.
    """
    rep = VerificationReport()
    C, OC = M.C, M.omega
    T, OT = R.T, R.omegaT

    # I: T is a simplex and OT is its form space
    if not T.is_simplex():
        dep = affine_dependencies(list(T.vertices))
        rep.axioms["I"] = AxiomResult(False, {"affine_dependence": dep[0] if dep else None})
    elif OT.base != T:
        rep.axioms["I"] = AxiomResult(False, {"reason": "omegaT is not built on T"})
    else:
        rep.axioms["I"] = AxiomResult(True)

    # II: f partial (domain inside T), affine by construction, onto C
    f = R.f
    if f.source_ambient != T.ambient_dim or f.target_ambient != C.ambient_dim:
        rep.axioms["II"] = AxiomResult(False, {"reason": "f has the wrong shape"})
    else:
        outside = next((v for v in f.domain.vertices if not T.contains(v)), None)
        if outside is not None:
            rep.axioms["II"] = AxiomResult(False, {"domain_point_outside_T": outside})
        else:
            img = image(f)
            missed = next((v for v in C.vertices if not img.contains(v)), None)
            rep.axioms["II"] = AxiomResult(
                missed is None, None if missed is None else {"uncovered_vertex": missed}
            )

    # III: g partial (domain inside Omega_T), onto Omega_C
    g = R.g
    if g.source_ambient != OT.space.ambient_dim or g.target_ambient != OC.space.ambient_dim:
        rep.axioms["III"] = AxiomResult(False, {"reason": "g has the wrong shape"})
    else:
        outside = next((y for y in g.domain.vertices if not OT.space.contains(y)), None)
        if outside is not None:
            rep.axioms["III"] = AxiomResult(False, {"domain_form_outside_omegaT": outside})
        else:
            img = image(g)
            missed = next((y for y in OC.space.vertices if not img.contains(y)), None)
            rep.axioms["III"] = AxiomResult(
                missed is None,
                None if missed is None else {"uncovered_extreme_form": OC.values(missed)},
            )

    # IV: compatibility
    if rep.axioms["II"].passed and rep.axioms["III"].passed:
        rows_T = [OT.evaluation_row(a) for a in f.domain.vertices]
        rows_C = [OC.evaluation_row(f.raw(a)) for a in f.domain.vertices]
        g_imgs = [g.raw(y) for y in g.domain.vertices]
        witness = None
        count = 0
        for a, rt, rc in zip(f.domain.vertices, rows_T, rows_C):
            for y, gy in zip(g.domain.vertices, g_imgs):
                count += 1
                if dot(rc, gy) != dot(rt, y):
                    witness = {"point": a, "form": y, "g(w).f(a)": dot(rc, gy), "w.a": dot(rt, y)}
                    break
            if witness:
                break
        rep.pairs_checked = count
        rep.axioms["IV"] = AxiomResult(witness is None, witness)
    else:
        rep.axioms["IV"] = AxiomResult(False, {"reason": "maps not well-formed"})
    return rep


# -- constructions -----------------------------------------------------------

def _fiber_equalities(omegaT: FormSpace, f: PartialAffineMap):
    """Linear conditions on w making ``w`` restricted to dom f factor through f."""
    verts = f.domain.vertices
    rows = [omegaT.evaluation_row(a) for a in verts]
    deps = affine_dependencies([f.raw(a) for a in verts])
    eqs = []
    for lam in deps:
        normal = tuple(dot(lam, col) for col in zip(*rows))
        if any(normal):
            eqs.append((normal, Fraction(0)))
    return eqs


def maximal_g(M: StatisticalModel, T: Polytope, f: PartialAffineMap,
              omegaT: FormSpace | None = None) -> PartialAffineMap:
    """The largest compatible ``g`` for a given ``f``.

    Its domain is every convex form on ``T`` whose restriction to ``dom f``
    factors through ``f``; the image of such a form is the unique form ``v``
    on ``C`` with ``v(f(a)) == w(a)``.  ``g`` is onto exactly when every
    extreme form of ``Omega_C`` extends (see :func:`extend_forms`).
    """
    omegaT = omegaT or build_form_space(T)
    OC = M.omega
    images = [f.raw(a) for a in f.domain.vertices]
    linear = []
    for i in OC.basis:
        s = M.C.vertices[i]
        k = next((k for k, q in enumerate(images) if q == s), None)
        if k is None:
            raise ValueError(f"f is not onto: vertex {s} has no preimage vertex")
        linear.append(omegaT.evaluation_row(f.domain.vertices[k]))
    hrep = omegaT.space.hrep & HRep((), tuple(_fiber_equalities(omegaT, f)))
    domain = Polytope.from_halfspaces(hrep)
    return PartialAffineMap(linear, [Fraction(0)] * len(linear), domain)


def maximal_g_dimension(M: StatisticalModel, T: Polytope, f: PartialAffineMap) -> int:
    """Dimension of the maximal-g domain, without enumerating its vertices.

    The fiber conditions are homogeneous and satisfied by the centre of the
    cube ``Omega_T``, an interior point, so the dimension is that of the
    solution space.
    """
    from .exactfield import rank

    omegaT = build_form_space(T)
    eqs = _fiber_equalities(omegaT, f)
    return omegaT.space.dim - (rank([e for e, _ in eqs]) if eqs else 0)


def extension_program(M: StatisticalModel, omegaT: FormSpace, f: PartialAffineMap,
                      v: Sequence) -> _lp.LinearProgram:
    """LP: a convex form ``w`` on T with ``w(a) == v(f(a))`` at every vertex of dom f.

    ``v`` is in value coordinates of ``M.omega``.
    """
    eqs = []
    for a in f.domain.vertices:
        target = dot(M.omega.evaluation_row(f.raw(a)), v)
        eqs.append((omegaT.evaluation_row(a), target))
    space = omegaT.space
    return _lp.LinearProgram(space.ambient_dim, space.inequalities, space.equalities + tuple(eqs))


@dataclass
class ExtensionResult:
    form: tuple  # values of v at the vertices of C
    coords: tuple
    extendable: bool
    extension: tuple | None = None
    certificate: tuple | None = None
    certificate_verified: bool | None = None


def extend_forms(M: StatisticalModel, T: Polytope, f: PartialAffineMap,
                 forms: Sequence[Sequence] | None = None,
                 omegaT: FormSpace | None = None) -> list[ExtensionResult]:
    """Decide, per form of ``Omega_C``, whether its pullback extends to ``Omega_T``."""
    omegaT = omegaT or build_form_space(T)
    forms = list(M.omega.space.vertices) if forms is None else forms
    out = []
    for v in forms:
        program = extension_program(M, omegaT, f, v)
        res = _lp.solve(program)
        if res.feasible:
            out.append(ExtensionResult(M.omega.values(v), tuple(v), True, extension=res.point))
        else:
            out.append(ExtensionResult(
                M.omega.values(v), tuple(v), False, certificate=res.certificate,
                certificate_verified=_lp.verify_farkas(program, res.certificate),
            ))
    return out


def holevo_refinement(M: StatisticalModel) -> Refinement:
    """Project the ``(m-1)``-simplex onto ``C`` vertex to vertex; ``g`` maximal."""
    verts = M.C.vertices
    m = len(verts)
    T = simplex(m - 1)
    linear = [[v[r] for v in verts] for r in range(M.C.ambient_dim)]
    f = PartialAffineMap(linear, [Fraction(0)] * M.C.ambient_dim, T)
    omegaT = build_form_space(T)
    return Refinement(T, omegaT, f, maximal_g(M, T, f, omegaT))


def section_embedding(C: Polytope) -> tuple[Polytope, PartialAffineMap]:
    """Realize ``C`` as a slice of a simplex with one vertex per facet of ``C``.

    Returns the simplex and the injective partial map from the slice onto
    ``C``.  The facet slacks are weighted by the least positive weights
    (all at least 1) that make their sum constant on ``C``.
    """
    k = len(C.inequalities)
    if k == 0:
        raise ValueError("a point has no facets to slice by")
    ne = len(C.equalities)
    nvars = k + ne
    rows = []
    for c in range(C.ambient_dim):
        rows.append((tuple([a[c] for a, _ in C.inequalities] + [-e[c] for e, _ in C.equalities]),
                     Fraction(0)))
    lower = [(tuple(Fraction(-int(i == j)) for j in range(nvars)), Fraction(-1)) for i in range(k)]
    objective = tuple([Fraction(-1)] * k + [Fraction(0)] * ne)
    res = _lp.solve(_lp.LinearProgram(nvars, tuple(lower), tuple(rows), objective))
    mu = res.point[:k]
    x0 = C.vertices[0]
    K = sum((m * (b - dot(a, x0)) for m, (a, b) in zip(mu, C.inequalities)), Fraction(0))

    def slack(x):
        return tuple(m * (b - dot(a, x)) / K for m, (a, b) in zip(mu, C.inequalities))

    T = simplex(k - 1)
    pts = [slack(v) for v in C.vertices]
    return T, PartialAffineMap.from_images(pts, C.vertices)


# -- the worked examples -----------------------------------------------------

def square() -> Polytope:
    """The parallelogram of the examples: vertices a, b, c, d in cyclic order."""
    return Polytope.from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])


def golden_alpha():
    return (sqrt(5) - 1) / 2


def pentagon_form_values() -> list[tuple]:
    """Rows ``(v_i . s_j)``: 1 on the diagonal, alpha on cyclic neighbours."""
    alpha = golden_alpha()
    rows = []
    for i in range(5):
        row = []
        for j in range(5):
            gap = (j - i) % 5
            row.append(Fraction(1) if gap == 0 else alpha if gap in (1, 4) else Fraction(0))
        rows.append(tuple(row))
    return rows


def _indicator_sum(n: int, weights: dict) -> tuple:
    return tuple(weights.get(j, Fraction(0)) for j in range(n))


@dataclass
class ExampleBundle:
    model: StatisticalModel
    refinement: Refinement
    report: VerificationReport
    features: dict


def example_parallelogram() -> ExampleBundle:
    """Projection of the tetrahedron onto the parallelogram.

    ``g`` is generated by the null and unit forms and the four listed forms
    with values 0 on two adjacent vertices and 1 on the other two.
    """
    M = StatisticalModel.of(square())
    T = simplex(3)
    omegaT = build_form_space(T)
    verts = M.C.vertices
    f = PartialAffineMap([[v[r] for v in verts] for r in range(2)], [0, 0], T)
    listed = [(0, 0, 0, 0), (1, 1, 1, 1), (0, 0, 1, 1), (1, 1, 0, 0), (0, 1, 1, 0), (1, 0, 0, 1)]
    listed = [tuple(Fraction(x) for x in w) for w in listed]
    g = PartialAffineMap.from_images(listed, [coords_from_values(M.omega, w) for w in listed])
    R = Refinement(T, omegaT, f, g)
    rep = verify_refinement(R, M)
    extreme = {M.omega.values(y) for y in M.omega.space.vertices}
    features = {
        "f_total": f.domain == T,
        "f_not_injective": not is_injective_on_domain(f),
        "g_null_to_null": g.raw(omegaT.null) == M.omega.null,
        "g_unit_to_unit": g.raw(omegaT.unit) == M.omega.unit,
        "listed_forms_map_to_extreme_forms": all(
            M.omega.values(g.raw(w)) in extreme for w in listed
        ),
        "g_undefined_on_single_vertex_indicators": all(
            not g.domain.contains(_indicator_sum(4, {i: Fraction(1)})) for i in range(4)
        ),
    }
    return ExampleBundle(M, R, rep, features)


def _pairs():
    # vertex index pairs (e_{2i-1}, e_{2i}) and the neighbouring pairs
    return [(2 * i, 2 * i + 1) for i in range(5)]


def _pentagon_setup():
    M = StatisticalModel.of(pentagon())
    T = simplex(9)
    omegaT = build_form_space(T)
    v = [coords_from_values(M.omega, row) for row in pentagon_form_values()]
    return M, T, omegaT, v


def _listed_form(i: int, near, far) -> tuple:
    """``d_P + near*(first of neighbours) + far*(second of neighbours)``."""
    pairs = _pairs()
    own = pairs[i]
    prev, nxt = pairs[(i - 1) % 5], pairs[(i + 1) % 5]
    weights = {own[0]: Fraction(1), own[1]: Fraction(1)}
    weights[prev[0]] = near
    weights[nxt[0]] = near
    weights[prev[1]] = far
    weights[nxt[1]] = far
    return _indicator_sum(10, weights)


def _g_preimage_report(M, g, omegaT):
    dims, touches_vertex = [], False
    cube_vertices = set(omegaT.space.vertices)
    for y in M.omega.space.vertices:
        if y in (M.omega.null, M.omega.unit):
            continue
        pre = preimage(g, Polytope.from_vertices([y]))
        dims.append(pre.dim)
        touches_vertex |= any(p in cube_vertices for p in pre.vertices)
    return dims, touches_vertex


def example_pentagon_midpoint() -> ExampleBundle:
    """Pentagon refined by the decatope with ``f`` defined on edge midpoints."""
    M, T, omegaT, v = _pentagon_setup()
    alpha = golden_alpha()
    half = Fraction(1, 2)
    mids = [_indicator_sum(10, {a: half, b: half}) for a, b in _pairs()]
    f = PartialAffineMap.from_images(mids, M.C.vertices)
    unit_T = omegaT.unit
    points, images = [omegaT.null, unit_T], [M.omega.null, M.omega.unit]
    for i in range(5):
        for beta in (2 * alpha - 1, Fraction(1)):
            rho = _listed_form(i, beta, 2 * alpha - beta)
            points += [rho, omegaT.complement(rho)]
            images += [v[i], M.omega.complement(v[i])]
    g = PartialAffineMap.from_images(points, images)
    R = Refinement(T, omegaT, f, g)
    rep = verify_refinement(R, M)
    f_pre = [preimage(f, Polytope.from_vertices([s])) for s in M.C.vertices]
    dims, touches = _g_preimage_report(M, g, omegaT)
    features = {
        "a_extreme_points_have_single_non_extreme_preimage": all(
            p is not None and p.dim == 0 and p.vertices[0] not in T.vertices for p in f_pre
        ),
        "b_g_preimages_one_dimensional": dims == [1] * 10,
        "b_g_preimages_avoid_extreme_forms": not touches,
        "c_f_undefined_at_every_vertex": all(f(e) is None for e in T.vertices),
        "d_f_domain_is_4_simplex": f.domain.dim == 4 and f.domain.is_simplex(),
        "d_f_onto": is_onto(f, M.C),
        "maximal_g_dimension": maximal_g_dimension(M, T, f),
    }
    return ExampleBundle(M, R, rep, features)


def example_pentagon_edges() -> ExampleBundle:
    """Pentagon refined by the decatope with ``f`` collapsing five disjoint edges."""
    M, T, omegaT, v = _pentagon_setup()
    alpha = golden_alpha()
    f = PartialAffineMap.from_images(T.vertices, [M.C.vertices[j // 2] for j in range(10)], T)
    points, images = [omegaT.null, omegaT.unit], [M.omega.null, M.omega.unit]
    for i in range(5):
        r = _listed_form(i, alpha, alpha)
        points += [r, omegaT.complement(r)]
        images += [v[i], M.omega.complement(v[i])]
    g = PartialAffineMap.from_images(points, images)
    R = Refinement(T, omegaT, f, g)
    rep = verify_refinement(R, M)
    edges = [Polytope.from_vertices([T.vertices[a], T.vertices[b]]) for a, b in _pairs()]
    f_pre = [preimage(f, Polytope.from_vertices([s])) for s in M.C.vertices]
    dims, touches = _g_preimage_report(M, g, omegaT)
    features = {
        "a_extreme_points_have_edge_preimages": f_pre == edges,
        "b_g_preimages_single_points": dims == [0] * 10,
        "b_g_preimages_avoid_extreme_forms": not touches,
        "c_f_total": f.domain == T,
        "c_f_onto": is_onto(f, M.C),
    }
    return ExampleBundle(M, R, rep, features)


@dataclass
class SectionReport:
    model: StatisticalModel
    T: Polytope
    f: PartialAffineMap
    results: list
    injective: bool

    @property
    def non_extendable(self) -> list:
        return [r for r in self.results if not r.extendable]


def counterexample_section() -> SectionReport:
    """The parallelogram as a slice of the tetrahedron: no compatible onto ``g``."""
    M = StatisticalModel.of(square())
    T, f = section_embedding(M.C)
    forms = list(M.omega.space.vertices)
    half = tuple(Fraction(1, 2) for _ in M.omega.basis)
    results = extend_forms(M, T, f, forms + [half])
    return SectionReport(M, T, f, results, is_injective_on_domain(f))


def linusson_check(M: StatisticalModel, f: PartialAffineMap,
                   T: Polytope | None = None) -> SectionReport:
    """Instance check: which extreme forms fail to extend through an injective ``f``."""
    T = T or simplex(f.source_ambient - 1)
    if not T.is_simplex():
        raise ValueError("the source must be a simplex")
    if not is_injective_on_domain(f):
        raise ValueError("f is not injective on its domain")
    if any(not T.contains(v) for v in f.domain.vertices):
        raise ValueError("f's domain is not inside the simplex")
    if not is_onto(f, M.C):
        raise ValueError("f is not onto C")
    return SectionReport(M, T, f, extend_forms(M, T, f), True)
