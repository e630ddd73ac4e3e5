"""Compact convex polytopes with an exact double description.

Every :class:`Polytope` carries both its extreme points and an irredundant
inequality description.  Polytopes that are not full-dimensional in their
ambient space carry explicit equalities describing their affine hull.

Conversions use the double description method on the homogenized cone,
inserting constraints in lexicographic order and testing adjacency
combinatorially on zero sets.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import lp as _lp
from .exactfield import (
    EchelonBasis,
    affine_hull,
    dot,
    inverse,
    kernel,
    normalize_direction,
    rank,
    scalar,
    sign,
    solve_linear,
    sqrt,
)

__all__ = [
    "HRep",
    "Polytope",
    "PolytopeError",
    "UnboundedError",
    "InfeasibleError",
    "simplex",
    "parallelotope",
    "pentagon",
    "minimal_face",
    "faces_meet",
    "extreme_rays",
]


class PolytopeError(ValueError):
    pass


class UnboundedError(PolytopeError):
    """The inequality system describes an unbounded set; ``direction`` is a recession ray."""

    def __init__(self, direction):
        super().__init__("polyhedron is unbounded")
        self.direction = direction


class InfeasibleError(PolytopeError):
    """The inequality system is empty; ``certificate`` are Farkas multipliers for ``program``."""

    def __init__(self, program, certificate):
        super().__init__("polyhedron is empty")
        self.program = program
        self.certificate = certificate


@dataclass(frozen=True)
class HRep:
    """``a . x <= b`` for each inequality and ``e . x = f`` for each equality."""

    inequalities: tuple = ()
    equalities: tuple = ()

    @classmethod
    def build(cls, inequalities=(), equalities=()):
        conv = lambda rows: tuple(
            (tuple(scalar(x) for x in a), scalar(b)) for a, b in rows
        )
        return cls(conv(inequalities), conv(equalities))

    @property
    def ambient_dim(self) -> int:
        rows = self.inequalities or self.equalities
        return len(rows[0][0]) if rows else 0

    def __and__(self, other: "HRep") -> "HRep":
        return HRep(self.inequalities + other.inequalities, self.equalities + other.equalities)


def _vec(p) -> tuple:
    return tuple(scalar(x) for x in p)


def _bits(mask: int) -> int:
    return bin(mask).count("1")


def extreme_rays(rows: Sequence[Sequence], dim: int):
    """Extreme rays of the cone ``{z : r . z <= 0 for r in rows}``.

    Returns ``(rays, lineality)``: when the cone is not pointed ``rays`` is
    None and ``lineality`` is a nonzero vector in the lineality space.
    """
    order = sorted(range(len(rows)), key=lambda i: rows[i])
    span = EchelonBasis()
    initial = []
    for i in order:
        if span.add(rows[i]):
            initial.append(i)
            if len(initial) == dim:
                break
    if len(initial) < dim:
        return None, kernel([list(r) for r in rows], dim)[0] if rows else tuple(
            Fraction(int(j == 0)) for j in range(dim)
        )
    inv = inverse([rows[i] for i in initial])
    rays = []
    for k in range(dim):
        ray = normalize_direction([-inv[r][k] for r in range(dim)])
        zero = 0
        for j, i in enumerate(initial):
            if j != k:
                zero |= 1 << i
        rays.append((ray, zero))
    inserted = set(initial)
    for i in order:
        if i in inserted:
            continue
        inserted.add(i)
        row = rows[i]
        bit = 1 << i
        pos, neg, keep = [], [], []
        for ray, zero in rays:
            s = dot(row, ray)
            sg = sign(s)
            if sg > 0:
                pos.append((ray, zero, s))
            elif sg < 0:
                neg.append((ray, zero, s))
                keep.append((ray, zero))
            else:
                keep.append((ray, zero | bit))
        if not pos:
            rays = keep
            continue
        zsets = [z for _, z in rays]
        need = dim - 2
        for pr, pz, ps in pos:
            for nr, nz, ns in neg:
                common = pz & nz
                if _bits(common) < need:
                    continue
                adjacent = True
                for z in zsets:
                    if z != pz and z != nz and common & ~z == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                new = [ps * a - ns * b for a, b in zip(nr, pr)]
                keep.append((normalize_direction(new), common | bit))
        rays = keep
    return [r for r, _ in rays], None


class Polytope:
    """A nonempty compact convex polytope in exact coordinates.

    ``vertices`` are the extreme points in first-occurrence order of the
    input; ``inequalities`` are facet-defining (one per facet) and
    ``equalities`` span exactly the affine hull.
    """

    __slots__ = ("vertices", "inequalities", "equalities", "dim", "ambient_dim", "_basis")

    def __init__(self, vertices, inequalities, equalities, dim, basis=None):
        self.vertices = tuple(vertices)
        self.equalities = tuple(equalities)
        self.inequalities = _canonical_facets(inequalities, self.equalities)
        self.dim = dim
        self.ambient_dim = len(self.vertices[0])
        self._basis = basis

    # -- constructors ----------------------------------------------------
    @classmethod
    def from_vertices(cls, points: Iterable[Sequence]) -> "Polytope":
        """Convex hull of ``points``; non-extreme points are dropped."""
        pts = []
        seen = set()
        for p in points:
            v = _vec(p)
            if v not in seen:
                seen.add(v)
                pts.append(v)
        if not pts:
            raise ValueError("from_vertices needs at least one point")
        if len({len(p) for p in pts}) != 1:
            raise ValueError("points have different ambient dimensions")
        dim, basis = affine_hull(pts)
        return cls._hull(pts, dim, basis)

    @classmethod
    def _hull(cls, pts, dim, basis):
        # polar double description in affine coordinates of the hull; points
        # that are not extreme only add redundant rows
        eqs = _hull_equalities(pts, basis)
        if dim == 0:
            return cls(pts, (), eqs, 0, basis)
        # affine coordinates on the hull: z = Minv (x_R - p0_R)
        p0 = pts[basis[0]]
        dirs = [[a - b for a, b in zip(pts[i], p0)] for i in basis[1:]]
        span = EchelonBasis()
        R = []
        for c in range(len(p0)):
            if span.add([d[c] for d in dirs]):
                R.append(c)
                if len(R) == dim:
                    break
        Minv = inverse([[d[c] for d in dirs] for c in R])
        zs = [[dot(Minv[k], [p[c] - p0[c] for c in R]) for k in range(dim)] for p in pts]
        polar_rows = [z + [Fraction(-1)] for z in zs]
        rays, _ = extreme_rays(polar_rows, dim + 1)
        rays = [r for r in rays if any(r[:dim])]
        if len(pts) > dim + 1:
            keep = []
            for i, z in enumerate(zs):
                tight = [r[:dim] for r in rays if dot(r[:dim], z) == r[dim]]
                if rank(tight) == dim if tight else dim == 0:
                    keep.append(i)
            if len(keep) < len(pts):
                pts = [pts[i] for i in keep]
                return cls._hull(pts, *affine_hull(pts))
        facets = []
        for ray in rays:
            a, beta = ray[:dim], ray[dim]
            normal = [Fraction(0)] * len(p0)
            for j, c in enumerate(R):
                normal[c] = dot(a, [Minv[k][j] for k in range(dim)])
            offset = beta + dot(normal, p0)
            facets.append(_normalize_row(normal, offset))
        facets.sort()
        return cls(pts, facets, eqs, dim, basis)

    @classmethod
    def from_halfspaces(cls, hrep: HRep) -> "Polytope":
        """Vertex enumeration of a bounded, nonempty H-description."""
        hrep = HRep.build(hrep.inequalities, hrep.equalities)
        n = hrep.ambient_dim
        program = _lp.LinearProgram(n, hrep.inequalities, hrep.equalities)
        if hrep.equalities:
            sol = solve_linear([e for e, _ in hrep.equalities], [f for _, f in hrep.equalities])
            if not sol.consistent:
                raise InfeasibleError(program, _lp.solve(program).certificate)
            x0, N = sol.particular, sol.kernel
        else:
            x0 = tuple(Fraction(0) for _ in range(n))
            N = tuple(tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n))
        d = len(N)
        lift = lambda z: tuple(x0[i] + dot([v[i] for v in N], z) for i in range(n))
        if d == 0:
            if all(sign(dot(a, x0) - b) <= 0 for a, b in hrep.inequalities):
                return cls._assemble([x0], hrep.inequalities)
            raise InfeasibleError(program, _lp.solve(program).certificate)
        # restricted to the solution space many rows coincide up to scale
        rows = {}
        for a, b in hrep.inequalities:
            row = [dot(a, v) for v in N] + [dot(a, x0) - b]
            if any(row[:d]):
                rows.setdefault(tuple(normalize_direction(row)), None)
            elif sign(row[d]) > 0:
                raise InfeasibleError(program, _lp.solve(program).certificate)
        rows = list(rows)
        rows.append(tuple([Fraction(0)] * d + [Fraction(-1)]))
        rays, lineality = extreme_rays(rows, d + 1)
        if rays is None:
            outcome = _lp.solve(program)
            if not outcome.feasible:
                raise InfeasibleError(program, outcome.certificate)
            raise UnboundedError(tuple(dot([v[i] for v in N], lineality[:d]) for i in range(n)))
        vertices, recession = [], []
        for r in rays:
            t = r[d]
            if sign(t) > 0:
                vertices.append(lift([x / t for x in r[:d]]))
            else:
                recession.append(r[:d])
        if not vertices:
            outcome = _lp.solve(program)
            raise InfeasibleError(program, outcome.certificate)
        if recession:
            z = recession[0]
            raise UnboundedError(tuple(dot([v[i] for v in N], z) for i in range(n)))
        return cls._assemble(vertices, hrep.inequalities)

    @classmethod
    def _assemble(cls, vertices, candidates):
        """Build from known extreme points and a valid inequality superset."""
        pts = list(dict.fromkeys(_vec(v) for v in vertices))
        dim, basis = affine_hull(pts)
        eqs = _hull_equalities(pts, basis)
        facets = {}
        for a, b in candidates if dim > 0 else ():
            tight = frozenset(i for i, p in enumerate(pts) if sign(dot(a, p) - b) == 0)
            if len(tight) == len(pts) or len(tight) < dim or tight in facets:
                continue
            fdim, _ = affine_hull([pts[i] for i in sorted(tight)], stop_at=dim - 1)
            if fdim == dim - 1:
                facets[tight] = _normalize_row(a, b)
        return cls(pts, sorted(facets.values()), eqs, dim, basis)

    # -- basic queries ---------------------------------------------------
    @property
    def hrep(self) -> HRep:
        return HRep(self.inequalities, self.equalities)

    @property
    def affine_basis(self) -> list[int]:
        if self._basis is None:
            self._basis = affine_hull(self.vertices)[1]
        return self._basis

    def contains(self, x: Sequence) -> bool:
        x = _vec(x)
        if len(x) != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return all(sign(dot(a, x) - b) <= 0 for a, b in self.inequalities) and all(
            dot(e, x) == f for e, f in self.equalities
        )

    def tight_facets(self, x: Sequence) -> list[int]:
        return [i for i, (a, b) in enumerate(self.inequalities) if dot(a, x) == b]

    def facet_vertices(self, i: int) -> list[int]:
        a, b = self.inequalities[i]
        return [k for k, v in enumerate(self.vertices) if dot(a, v) == b]

    def is_simplex(self) -> bool:
        return len(self.vertices) == self.dim + 1

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return set(self.vertices) == set(other.vertices)

    def __hash__(self):
        return hash(frozenset(self.vertices))

    def __repr__(self):
        return (
            f"Polytope(dim={self.dim}, ambient={self.ambient_dim}, "
            f"vertices={len(self.vertices)}, facets={len(self.inequalities)})"
        )

    def __reduce__(self):
        return (Polytope, (self.vertices, self.inequalities, self.equalities, self.dim, self._basis))

    def check(self) -> None:
        """Assert the double-description invariants (used by tests)."""
        for v in self.vertices:
            assert self.contains(v), v
        dim, _ = affine_hull(self.vertices)
        assert dim == self.dim
        assert len(self.equalities) == self.ambient_dim - self.dim
        for i in range(len(self.inequalities)):
            tight = [self.vertices[k] for k in self.facet_vertices(i)]
            assert len(tight) >= self.dim
            assert affine_hull(tight)[0] == self.dim - 1

    def faces(self) -> list[frozenset]:
        """All nonempty faces as vertex-index sets (brute force; small inputs only)."""
        found = {frozenset(range(len(self.vertices)))}
        frontier = [frozenset(range(len(self.vertices)))]
        facet_sets = [frozenset(self.facet_vertices(i)) for i in range(len(self.inequalities))]
        while frontier:
            nxt = []
            for face in frontier:
                for fs in facet_sets:
                    sub = face & fs
                    if sub and sub != face and sub not in found:
                        found.add(sub)
                        nxt.append(sub)
            frontier = nxt
        return sorted(found, key=lambda s: (len(s), sorted(s)))


def _canonical_facets(rows, equalities) -> tuple:
    """Facet rows with normals moved into the direction space of the hull, normalized, sorted."""
    if not equalities:
        return tuple(sorted(_normalize_row(a, b) for a, b in rows))
    E = [e for e, _ in equalities]
    f = [c for _, c in equalities]
    G = inverse([[dot(u, v) for v in E] for u in E])
    out = set()
    for a, b in rows:
        t = [dot(row, [dot(e, a) for e in E]) for row in G]
        a2 = [x - sum((ti * e[j] for ti, e in zip(t, E)), Fraction(0)) for j, x in enumerate(a)]
        out.add(_normalize_row(a2, b - dot(t, f)))
    return tuple(sorted(out))


def _normalize_row(a, b):
    row = normalize_direction(list(a) + [b])
    return (tuple(row[:-1]), row[-1])


def _hull_equalities(pts, basis):
    p0 = pts[basis[0]]
    dirs = [[a - b for a, b in zip(pts[i], p0)] for i in basis[1:]]
    normals = kernel(dirs, len(p0)) if dirs else kernel([], len(p0))
    return tuple((tuple(nu), dot(nu, p0)) for nu in normals)


# -- standard constructors -------------------------------------------------

def simplex(n: int) -> Polytope:
    """Convex hull of the ``n + 1`` standard basis points of ``Q^(n+1)``."""
    if n < 0:
        raise ValueError("simplex dimension must be >= 0")
    pts = [tuple(Fraction(int(i == j)) for i in range(n + 1)) for j in range(n + 1)]
    if n == 0:
        return Polytope._assemble(pts, ())
    facets = [(tuple(Fraction(-int(i == j)) for i in range(n + 1)), Fraction(0)) for j in range(n + 1)]
    eqs = ((tuple(Fraction(1) for _ in range(n + 1)), Fraction(1)),)
    return Polytope(pts, sorted(facets), eqs, n, list(range(n + 1)))


def parallelotope(n: int) -> Polytope:
    """The unit cube ``[0, 1]^n``; vertices in binary counting order."""
    if n < 0:
        raise ValueError("parallelotope dimension must be >= 0")
    pts = [tuple(Fraction((k >> (n - 1 - i)) & 1) for i in range(n)) for k in range(2 ** n)]
    if n == 0:
        return Polytope(pts, (), (), 0, [0])
    facets = []
    for j in range(n):
        e = tuple(Fraction(int(i == j)) for i in range(n))
        facets.append((e, Fraction(1)))
        facets.append((tuple(-x for x in e), Fraction(0)))
    basis = [0] + [2 ** k for k in range(n)]
    return Polytope(pts, sorted(facets), (), n, basis)


def pentagon() -> Polytope:
    """The affinely regular pentagon with coordinates in Q(sqrt(5))."""
    r5 = sqrt(5)
    alpha = (r5 - 1) / 2
    c1 = (r5 - 1) / 4
    c2 = -(1 + r5) / 4
    pts = [
        (Fraction(1), Fraction(0)),
        (c1, Fraction(1)),
        (c2, alpha),
        (c2, -alpha),
        (c1, Fraction(-1)),
    ]
    return Polytope._hull([_vec(p) for p in pts], 2, [0, 1, 2])


# -- faces -----------------------------------------------------------------

def minimal_face(P: Polytope, S: Sequence[Sequence]) -> Polytope:
    """Smallest face of ``P`` containing every point of ``S``."""
    pts = [_vec(s) for s in S]
    for s in pts:
        if not P.contains(s):
            raise ValueError(f"point {s} is not in the polytope")
    tight = [
        i for i, (a, b) in enumerate(P.inequalities) if all(dot(a, s) == b for s in pts)
    ]
    if not tight:
        return P
    verts = [
        v for v in P.vertices if all(dot(P.inequalities[i][0], v) == P.inequalities[i][1] for i in tight)
    ]
    return Polytope.from_vertices(verts)


def faces_meet(F: Polytope, G: Polytope) -> bool:
    """True iff the two polytopes intersect (one LP feasibility problem)."""
    if F.ambient_dim != G.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    program = _lp.LinearProgram(
        F.ambient_dim, F.inequalities + G.inequalities, F.equalities + G.equalities
    )
    return _lp.solve(program).feasible
