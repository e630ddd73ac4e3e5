"""Partial affine maps with an explicit polytopal domain."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .exactfield import dot, matvec, rank, scalar, solve_linear
from .formspace import AffineForm
from .polytope import HRep, InfeasibleError, Polytope

__all__ = [
    "PartialAffineMap",
    "EmptyDomainError",
    "NotAffineError",
    "apply",
    "image",
    "is_onto",
    "uncovered_vertices",
    "is_injective_on_domain",
    "preimage",
    "compose",
    "pullback_form",
    "extension_freedom",
]


class EmptyDomainError(ValueError):
    pass


class NotAffineError(ValueError):
    """Generator images are inconsistent with every affine map."""


class PartialAffineMap:
    """``x -> linear @ x + offset``, defined only on ``domain``."""

    __slots__ = ("linear", "offset", "domain")

    def __init__(self, linear, offset, domain: Polytope):
        self.linear = tuple(tuple(scalar(x) for x in row) for row in linear)
        self.offset = tuple(scalar(x) for x in offset)
        self.domain = domain
        if len(self.linear) != len(self.offset):
            raise ValueError("linear part and offset disagree on target dimension")
        if any(len(row) != domain.ambient_dim for row in self.linear):
            raise ValueError("linear part does not match the domain's ambient dimension")

    @property
    def source_ambient(self) -> int:
        return self.domain.ambient_dim

    @property
    def target_ambient(self) -> int:
        return len(self.offset)

    @classmethod
    def identity(cls, domain: Polytope) -> "PartialAffineMap":
        n = domain.ambient_dim
        eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return cls(eye, [Fraction(0)] * n, domain)

    @classmethod
    def from_images(cls, points: Sequence[Sequence], images: Sequence[Sequence],
                    domain: Polytope | None = None) -> "PartialAffineMap":
        """The affine map sending ``points[k]`` to ``images[k]``.

        The domain defaults to the convex hull of ``points``.  Where the
        points do not span their ambient space the extension is not unique;
        the solution with free unknowns set to zero is used.
        """
        if len(points) != len(images):
            raise ValueError("need one image per point")
        pts = [tuple(scalar(x) for x in p) for p in points]
        A = [list(p) + [Fraction(1)] for p in pts]
        n = len(pts[0])
        linear, offset = [], []
        for r in range(len(images[0])):
            sol = solve_linear(A, [scalar(q[r]) for q in images])
            if not sol.consistent:
                raise NotAffineError(
                    f"no affine map realizes the given images (output coordinate {r})"
                )
            linear.append(sol.particular[:n])
            offset.append(sol.particular[n])
        if domain is None:
            domain = Polytope.from_vertices(pts)
        return cls(linear, offset, domain)

    def __call__(self, x: Sequence):
        return apply(self, x)

    def raw(self, x: Sequence) -> tuple:
        """The affine formula evaluated without a domain check."""
        return tuple(a + b for a, b in zip(matvec(self.linear, x), self.offset))

    def __repr__(self):
        return (
            f"PartialAffineMap(source={self.source_ambient}, target={self.target_ambient}, "
            f"domain={self.domain!r})"
        )

    def __eq__(self, other):
        if not isinstance(other, PartialAffineMap):
            return NotImplemented
        return self.domain == other.domain and all(
            self.raw(v) == other.raw(v) for v in self.domain.vertices
        )

    __hash__ = None


def apply(m: PartialAffineMap, x: Sequence):
    """``m(x)``, or None where ``m`` is undefined."""
    x = tuple(scalar(v) for v in x)
    if not m.domain.contains(x):
        return None
    return m.raw(x)


def image(m: PartialAffineMap) -> Polytope:
    return Polytope.from_vertices([m.raw(v) for v in m.domain.vertices])


def is_onto(m: PartialAffineMap, target: Polytope) -> bool:
    if target.ambient_dim != m.target_ambient:
        raise ValueError("target ambient dimension mismatch")
    return image(m) == target


def uncovered_vertices(m: PartialAffineMap, target: Polytope) -> list[tuple]:
    """Vertices of ``target`` outside the image of ``m``."""
    img = image(m)
    return [v for v in target.vertices if not img.contains(v)]


def is_injective_on_domain(m: PartialAffineMap) -> bool:
    D = m.domain
    if D.dim == 0:
        return True
    base = D.vertices[D.affine_basis[0]]
    dirs = [[a - b for a, b in zip(D.vertices[i], base)] for i in D.affine_basis[1:]]
    mapped = [matvec(m.linear, d) for d in dirs]
    return rank(mapped) == D.dim


def _pull_rows(m: PartialAffineMap, rows):
    out = []
    for a, b in rows:
        normal = tuple(dot(a, col) for col in zip(*m.linear))
        out.append((normal, b - dot(a, m.offset)))
    return tuple(out)


def _preimage_by_vertices(m: PartialAffineMap, Q: Polytope) -> Polytope | None:
    # x = sum_k lam_k V_k over the simplex of weights; cheaper when the domain
    # has few vertices and many facets
    V = m.domain.vertices
    k = len(V)
    images = [m.raw(v) for v in V]
    ineqs = [(tuple(-Fraction(int(i == j)) for j in range(k)), Fraction(0)) for i in range(k)]
    ineqs += [(tuple(dot(a, q) for q in images), b) for a, b in Q.inequalities]
    eqs = [(tuple(Fraction(1) for _ in range(k)), Fraction(1))]
    eqs += [(tuple(dot(e, q) for q in images), f) for e, f in Q.equalities]
    try:
        weights = Polytope.from_halfspaces(HRep(tuple(ineqs), tuple(eqs)))
    except InfeasibleError:
        return None
    pts = [tuple(dot(lam, col) for col in zip(*V)) for lam in weights.vertices]
    return Polytope.from_vertices(pts)


def preimage(m: PartialAffineMap, Q: Polytope) -> Polytope | None:
    """``{x in domain : m(x) in Q}``, or None when empty."""
    if len(m.domain.vertices) < len(m.domain.inequalities):
        return _preimage_by_vertices(m, Q)
    hrep = m.domain.hrep & HRep(_pull_rows(m, Q.inequalities), _pull_rows(m, Q.equalities))
    try:
        return Polytope.from_halfspaces(hrep)
    except InfeasibleError:
        return None


def compose(outer: PartialAffineMap, inner: PartialAffineMap) -> PartialAffineMap:
    """``outer o inner`` on ``inner.domain intersected with inner^-1(outer.domain)``."""
    if inner.target_ambient != outer.source_ambient:
        raise ValueError("inner target and outer source dimensions differ")
    dom = preimage(inner, outer.domain)
    if dom is None:
        raise EmptyDomainError("the composite map has an empty domain")
    linear = [[dot(row, col) for col in zip(*inner.linear)] for row in outer.linear]
    offset = [a + b for a, b in zip(matvec(outer.linear, inner.offset), outer.offset)]
    return PartialAffineMap(linear, offset, dom)


def pullback_form(f: PartialAffineMap, v: AffineForm) -> AffineForm:
    """The form ``a -> v(f(a))``; meaningful on ``f.domain``."""
    coeffs = tuple(dot(v.coeffs, col) for col in zip(*f.linear))
    return AffineForm(coeffs, dot(v.coeffs, f.offset) + v.constant)


def extension_freedom(m: PartialAffineMap, source: Polytope, target: Polytope) -> int:
    """Dimension of the family of affine maps ``aff(source) -> aff(target)`` extending ``m``.

    Zero means the extension from the domain to the whole affine hull is
    unique (the domain is full-dimensional in ``source``).
    """
    return (source.dim - m.domain.dim) * target.dim
