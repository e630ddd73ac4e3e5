"""Bounded, certificate-carrying checks around simplicial refinements.

Nothing here proves a general statement.  Every positive answer carries a
witness that is re-verified exactly; every negative answer from an LP
carries a Farkas certificate.  Search verdicts are scoped to the enumerated
family: ``exhausted_no_witness`` only says that no candidate in the family
works.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import lp as _lp
from .affmap import PartialAffineMap, compose, is_onto, preimage
from .exactfield import affine_dependencies, inverse, matmul, matvec, rank, transpose
from .polytope import Polytope, faces_meet, minimal_face, simplex
from .refinement import (
    ExtensionResult,
    Refinement,
    StatisticalModel,
    extend_forms,
    extension_program,
    maximal_g,
    verify_refinement,
)
from .formspace import build_form_space

__all__ = [
    "GExistence",
    "g_exists_for_f",
    "SearchSpec",
    "SearchResult",
    "search_refinement",
    "grid_points",
    "Factorization",
    "factor_through_projection",
    "Conjecture3Report",
    "conjecture3_check",
    "least_simplex_upper_bound",
    "thread_cap",
    "rational_dependency_dimension",
]


# -- does a compatible onto g exist for this f? --------------------------------

@dataclass
class GExistence:
    exists: bool
    g: PartialAffineMap | None
    results: list[ExtensionResult]

    @property
    def certificates(self) -> list[ExtensionResult]:
        return [r for r in self.results if not r.extendable]


def g_exists_for_f(M: StatisticalModel, T: Polytope, f: PartialAffineMap) -> GExistence:
    """Decide by one LP per extreme form of ``Omega_C``; build the maximal g if all extend."""
    if not T.is_simplex():
        raise ValueError("T must be a simplex")
    if not is_onto(f, M.C):
        raise ValueError("f is not onto C")
    omegaT = build_form_space(T)
    results = extend_forms(M, T, f, omegaT=omegaT)
    if all(r.extendable for r in results):
        return GExistence(True, maximal_g(M, T, f, omegaT), results)
    return GExistence(False, None, results)


# -- bounded search --------------------------------------------------------------

def thread_cap() -> int:
    raw = os.environ.get("REFINERY_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SearchSpec:
    model: StatisticalModel
    simplex_vertex_count: int
    grid: int = 1
    face_patterns: bool = True
    budget: int = 1_000_000

    def __post_init__(self):
        if self.grid < 1:
            raise ValueError("grid denominator must be at least 1")
        if self.simplex_vertex_count < 2:
            raise ValueError("the candidate simplex needs at least 2 vertices")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")


@dataclass
class SearchResult:
    verdict: str  # found | exhausted_no_witness | budget_exhausted
    refinement: Refinement | None = None
    family: str | None = None
    assignment: list | None = None
    stats: dict = field(default_factory=dict)


def grid_points(k: int, q: int) -> list[tuple]:
    """Barycentric points of the (k-1)-simplex with coordinates in (1/q)Z, lexicographically descending."""
    out = []

    def rec(prefix, left):
        if len(prefix) == k - 1:
            out.append(tuple(Fraction(c, q) for c in prefix + [left]))
            return
        for c in range(left, -1, -1):
            rec(prefix + [c], left - c)

    rec([], q)
    return out


def _orbit_representatives(points):
    # the symmetric group of the simplex permutes coordinates
    return [p for p in points if list(p) == sorted(p, reverse=True)]


class _Budget(Exception):
    pass


@dataclass
class _BranchOutcome:
    candidates: int = 0
    complete: int = 0
    lp_calls: int = 0
    found: tuple | None = None  # (family, assignment)
    cut: bool = False


def _canonical_second(first, p) -> bool:
    # permutations fixing the first point act on its blocks of equal coordinates
    blocks = {}
    for i, x in enumerate(first):
        blocks.setdefault(x, []).append(p[i])
    return all(list(b) == sorted(b, reverse=True) for b in blocks.values())


class _Frame:
    """An affinely independent set of chosen points with its images.

    ``classify`` says whether a new point is independent of the set, or
    else whether the affine combination it satisfies carries over to the
    images.
    """

    __slots__ = ("points", "images", "residual", "transfer")

    @classmethod
    def build(cls, points, images):
        self = cls()
        self.points, self.images = list(points), list(images)
        p0, s0 = points[0], images[0]
        D = [[a - b for a, b in zip(p, p0)] for p in points[1:]]  # rows
        n = len(p0)
        if D:
            G = inverse(matmul(D, transpose(D)))
            L = matmul(G, D)  # coefficients mu = L (p - p0)
            proj = matmul(transpose(D), L)
            self.residual = [[Fraction(int(i == j)) - proj[i][j] for j in range(n)]
                             for i in range(n)]
            SD = transpose([[a - b for a, b in zip(s, s0)] for s in images[1:]])
            self.transfer = matmul(SD, L)
        else:
            self.residual = None
            self.transfer = None
        return self

    def extend(self, p, s) -> "_Frame":
        return _Frame.build(self.points + [p], self.images + [s])

    def classify(self, p, s) -> str:
        p0 = self.points[0]
        u = [a - b for a, b in zip(p, p0)]
        if self.residual is None:
            if any(u):
                return "independent"
            return "consistent" if tuple(s) == tuple(self.images[0]) else "inconsistent"
        if any(any(x for x in matvec([r], u)) for r in self.residual):
            return "independent"
        pred = [a + b for a, b in zip(self.images[0], matvec(self.transfer, u))]
        return "consistent" if tuple(pred) == tuple(s) else "inconsistent"


def rational_dependency_dimension(points) -> int:
    """Dimension of the rational part of the affine-dependency space of ``points``.

    A grid assignment has rational points, so its dependencies form a
    rational subspace; they must all be dependencies of ``points``.
    """
    deps = affine_dependencies(list(points))
    if not deps:
        return 0
    m = len(points)
    # the rational part of a subspace is its intersection with its conjugate
    rows = [list(r) for r in zip(*[p for p in points])] + [[Fraction(1)] * m]
    conj = [[x.conjugate() if hasattr(x, "conjugate") and not isinstance(x, Fraction) else x
             for x in r] for r in rows]
    return m - rank(rows + conj)


class _Walker:
    def __init__(self, M: StatisticalModel, k: int, budget: int):
        self.M = M
        self.k = k
        self.budget = budget
        self.T = simplex(k - 1)
        self.omegaT = build_form_space(self.T)
        self.out = _BranchOutcome()

    def tick(self):
        if self.out.candidates >= self.budget:
            raise _Budget
        self.out.candidates += 1

    def g_extends(self, f: PartialAffineMap) -> bool:
        for v in self.M.omega.space.vertices:
            self.out.lp_calls += 1
            if not _lp.solve(extension_program(self.M, self.omegaT, f, v)).feasible:
                return False
        return True

    def try_complete(self, family, points):
        self.out.complete += 1
        f = PartialAffineMap.from_images(points, self.M.C.vertices)
        if self.g_extends(f):
            self.out.found = (family, [tuple(p) for p in points])
            return True
        return False

    # grid family: one point of T per vertex of C
    def grid(self, q: int, first):
        S = self.M.C.vertices
        pts = grid_points(self.k, q)
        chosen = [first]
        frames = [_Frame.build([first], [S[0]])]
        self.tick()

        def rec(j):
            if j == len(S):
                return self.try_complete("grid", chosen)
            frame = frames[-1]
            for p in pts:
                if j == 1 and not _canonical_second(first, p):
                    continue
                self.tick()
                status = frame.classify(p, S[j])
                if status == "inconsistent":
                    continue
                chosen.append(p)
                if status == "independent":
                    frames.append(frame.extend(p, S[j]))
                if rec(j + 1):
                    return True
                chosen.pop()
                if status == "independent":
                    frames.pop()
            return False

        return rec(1)

    # face-pattern family: disjoint vertex blocks of T collapsed onto the s_j
    def faces(self):
        S = self.M.C.vertices
        m = len(S)

        def sizes(j, left):
            if j == m:
                yield []
                return
            for n in range(1, left - (m - j - 1) + 1):
                for rest in sizes(j + 1, left - n):
                    yield [n] + rest

        if m > self.k:
            return False
        for sv in sizes(0, self.k):
            self.tick()
            points, images, start = [], [], 0
            for j, n in enumerate(sv):
                for i in range(start, start + n):
                    points.append(self.T.vertices[i])
                    images.append(S[j])
                start += n
            self.out.complete += 1
            f = PartialAffineMap.from_images(points, images)
            if self.g_extends(f):
                self.out.found = ("faces", [tuple(sv)])
                return True
        return False


def _branches(spec: SearchSpec):
    reps = _orbit_representatives(grid_points(spec.simplex_vertex_count, spec.grid))
    out = [("grid", r) for r in reps]
    if spec.face_patterns:
        out.append(("faces", None))
    return out


def _run_branch(M, k, q, budget, branch):
    w = _Walker(M, k, budget)
    kind, first = branch
    try:
        if kind == "grid":
            w.grid(q, first)
        else:
            w.faces()
    except _Budget:
        w.out.cut = True
    return w.out


def search_refinement(spec: SearchSpec, workers: int | None = None) -> SearchResult:
    """Enumerate candidate ``f`` in a bounded family and test each for a compatible ``g``.

    Enumeration order is fixed, and so are the reported statistics whatever
    the number of worker processes.  Candidates are enumeration nodes
    (partial assignments included); the budget caps them.
    """
    M, k, q = spec.model, spec.simplex_vertex_count, spec.grid
    branches = _branches(spec)
    workers = min(workers or thread_cap(), len(branches)) or 1
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            outs = list(pool.map(_run_branch, *zip(*[(M, k, q, spec.budget, b) for b in branches])))
    else:
        outs = None
    totals = {"candidates": 0, "complete_assignments": 0, "lp_calls": 0, "branches": len(branches),
              "rational_dependency_dim": rational_dependency_dimension(M.C.vertices)}
    for n, branch in enumerate(branches):
        remaining = spec.budget - totals["candidates"]
        out = outs[n] if outs is not None else None
        if out is None or out.cut or out.candidates > remaining:
            # same as running this branch in sequence with what is left
            out = _run_branch(M, k, q, remaining, branch)
        totals["candidates"] += out.candidates
        totals["complete_assignments"] += out.complete
        totals["lp_calls"] += out.lp_calls
        if out.found is not None:
            family, assignment = out.found
            R = _rebuild(M, k, family, assignment)
            if not verify_refinement(R, M).passed:
                raise AssertionError("search produced a refinement that fails verification")
            return SearchResult("found", R, family, assignment, totals)
        if out.cut:
            return SearchResult("budget_exhausted", stats=totals)
    return SearchResult("exhausted_no_witness", stats=totals)


def _rebuild(M, k, family, assignment) -> Refinement:
    T = simplex(k - 1)
    omegaT = build_form_space(T)
    if family == "grid":
        f = PartialAffineMap.from_images(assignment, M.C.vertices)
    else:
        points, images, start = [], [], 0
        for j, n in enumerate(assignment[0]):
            for i in range(start, start + n):
                points.append(T.vertices[i])
                images.append(M.C.vertices[j])
            start += n
        f = PartialAffineMap.from_images(points, images)
    return Refinement(T, omegaT, f, maximal_g(M, T, f, omegaT))


def least_simplex_upper_bound(M: StatisticalModel, grid: int = 1, budget: int = 100_000,
                              workers: int | None = None) -> dict:
    """Fewest simplex vertices admitting a refinement, within the searched families.

    The projection of the (m-1)-simplex always works, so ``m`` is the
    fallback bound.  The answer is an upper bound on the true minimum.
    """
    m = len(M.C.vertices)
    tried = []
    for k in range(2, m):
        res = search_refinement(SearchSpec(M, k, grid, True, budget), workers)
        tried.append({"simplex_vertices": k, "verdict": res.verdict, **res.stats})
        if res.verdict == "found":
            return {"upper_bound_vertices": k, "upper_bound_dimension": k - 1, "searched": tried}
    return {"upper_bound_vertices": m, "upper_bound_dimension": m - 1, "searched": tried}


# -- factoring through the projection of the (m-1)-simplex ------------------------

@dataclass
class Factorization:
    factors: bool
    h: PartialAffineMap | None = None
    verified: bool | None = None
    certificate: tuple | None = None
    certificate_verified: bool | None = None


def factor_through_projection(M: StatisticalModel, R: Refinement) -> Factorization:
    """Look for an affine ``h: dom f -> simplex(m-1)`` with ``f == f_p o h``.

    ``f_p`` sends the i-th simplex vertex to the i-th vertex of ``C``.  The
    unknowns are the images ``h(a_k)`` of the vertices of ``dom f``; they
    must be barycentric, map onto ``f(a_k)`` under ``f_p`` and respect every
    affine dependency among the ``a_k``.
    """
    if not verify_refinement(R, M).passed:
        raise ValueError("the refinement does not verify")
    f = R.f
    S = M.C.vertices
    m = len(S)
    A = f.domain.vertices
    K = len(A)
    nv = K * m
    zero = [Fraction(0)] * nv

    def row(entries):
        r = list(zero)
        for idx, val in entries:
            r[idx] = val
        return tuple(r)

    ineqs = [(row([(i, Fraction(-1))]), Fraction(0)) for i in range(nv)]
    eqs = []
    for k, a in enumerate(A):
        eqs.append((row([(k * m + i, Fraction(1)) for i in range(m)]), Fraction(1)))
        fa = f.raw(a)
        for c in range(M.C.ambient_dim):
            eqs.append((row([(k * m + i, S[i][c]) for i in range(m)]), fa[c]))
    for lam in affine_dependencies(list(A)):
        for i in range(m):
            eqs.append((row([(k * m + i, lam[k]) for k in range(K)]), Fraction(0)))
    program = _lp.LinearProgram(nv, tuple(ineqs), tuple(eqs))
    res = _lp.solve(program)
    if not res.feasible:
        return Factorization(False, certificate=res.certificate,
                             certificate_verified=_lp.verify_farkas(program, res.certificate))
    images = [res.point[k * m:(k + 1) * m] for k in range(K)]
    h = PartialAffineMap.from_images(A, images, f.domain)
    Tp = simplex(m - 1)
    fp = PartialAffineMap([[s[c] for s in S] for c in range(M.C.ambient_dim)],
                          [0] * M.C.ambient_dim, Tp)
    ok = all(Tp.contains(h.raw(a)) for a in A)
    if ok:
        composite = compose(fp, h)
        ok = composite.domain == f.domain and all(composite.raw(a) == f.raw(a) for a in A)
    return Factorization(True, h, ok)


# -- preimages of distinct extreme points live on disjoint faces ---------------------

@dataclass
class Conjecture3Report:
    faces: list  # per vertex of C: vertex indices of the minimal face of T
    violations: list  # pairs (i, j) whose faces meet

    @property
    def holds(self) -> bool:
        return not self.violations


def _face_indices(T: Polytope, F: Polytope) -> tuple:
    return tuple(sorted(T.vertices.index(v) for v in F.vertices))


def conjecture3_check(M: StatisticalModel, R: Refinement) -> Conjecture3Report:
    T = R.T
    faces = []
    for s in M.C.vertices:
        pre = preimage(R.f, Polytope.from_vertices([s]))
        if pre is None:
            raise ValueError("f is not onto C")
        faces.append(minimal_face(T, pre.vertices))
    violations = []
    for i in range(len(faces)):
        for j in range(i + 1, len(faces)):
            if faces_meet(faces[i], faces[j]):
                violations.append((i, j))
    return Conjecture3Report([_face_indices(T, F) for F in faces], violations)
