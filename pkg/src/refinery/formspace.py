"""Convex-form spaces of polytopes.

A convex form on a polytope ``C`` is an affine function with values in
``[0, 1]`` on ``C``.  The set of them is again a polytope; here it is stored
in *value coordinates*: a form is the vector of its values at the vertices of
a fixed affine basis of ``C``.  In those coordinates the inequality
description is literally ``0 <= value at s_j <= 1`` for every vertex ``s_j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactfield import dot, inverse, rank, scalar
from .polytope import HRep, Polytope, parallelotope

__all__ = [
    "AffineForm",
    "FormSpace",
    "build_form_space",
    "eval_form",
    "extreme_forms",
    "bounding_direction_count",
]


@dataclass(frozen=True)
class AffineForm:
    """``x -> coeffs . x + constant``.

    Sums and differences are plain affine arithmetic; whether the result is a
    convex form is a separate question (:meth:`FormSpace.admits`).
    """

    coeffs: tuple
    constant: object

    @classmethod
    def constant_form(cls, ambient_dim: int, value) -> "AffineForm":
        return cls(tuple(Fraction(0) for _ in range(ambient_dim)), scalar(value))

    @classmethod
    def null(cls, ambient_dim: int) -> "AffineForm":
        return cls.constant_form(ambient_dim, 0)

    @classmethod
    def unit(cls, ambient_dim: int) -> "AffineForm":
        return cls.constant_form(ambient_dim, 1)

    def __call__(self, x: Sequence):
        return dot(self.coeffs, x) + self.constant

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.constant + other.constant
        )

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.constant - other.constant
        )

    def __neg__(self) -> "AffineForm":
        return AffineForm(tuple(-a for a in self.coeffs), -self.constant)

    def __mul__(self, k) -> "AffineForm":
        return AffineForm(tuple(a * k for a in self.coeffs), self.constant * k)

    __rmul__ = __mul__


def eval_form(form: AffineForm, a: Sequence):
    """The action of ``form`` on the point ``a``."""
    return form(a)


class FormSpace:
    """The convex-form space of ``base`` in value coordinates.

    Coordinate ``k`` of a point of :attr:`space` is the form's value at the
    vertex ``base.vertices[basis[k]]``.
    """

    def __init__(self, base: Polytope, space: Polytope | None = None):
        self.base = base
        self.basis = list(base.affine_basis)
        s0 = base.vertices[self.basis[0]]
        self._origin = s0
        self._dirs = [tuple(a - b for a, b in zip(base.vertices[i], s0)) for i in self.basis[1:]]
        gram = [[dot(u, v) for v in self._dirs] for u in self._dirs]
        self._gram_inv = inverse(gram) if gram else []
        # value of the form at each base vertex, as a linear function of the coordinates
        self.weights = [self.evaluation_row(v) for v in base.vertices]
        self.space = space if space is not None else self._build_space()

    def _build_space(self) -> Polytope:
        n = len(self.basis)
        if self.base.is_simplex():
            return parallelotope(n)
        ineqs = []
        for w in self.weights:
            ineqs.append((tuple(w), Fraction(1)))
            ineqs.append((tuple(-x for x in w), Fraction(0)))
        return Polytope.from_halfspaces(HRep(tuple(ineqs)))

    # -- coordinates -----------------------------------------------------
    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def null(self) -> tuple:
        return tuple(Fraction(0) for _ in self.basis)

    @property
    def unit(self) -> tuple:
        return tuple(Fraction(1) for _ in self.basis)

    def evaluation_row(self, x: Sequence) -> tuple:
        """Row ``r`` with ``to_form(y)(x) == r . y`` for every coordinate vector ``y``."""
        w = [dot(u, [a - b for a, b in zip(x, self._origin)]) for u in self._dirs]
        t = [dot(row, w) for row in self._gram_inv]
        return tuple([1 - sum(t, Fraction(0))] + t)

    def to_form(self, y: Sequence) -> AffineForm:
        """The affine form with the given values at the basis vertices.

        Among all ambient representations the one whose coefficient vector
        lies in the direction space of the base's affine hull is returned, so
        constant forms have zero coefficients.
        """
        y = [scalar(v) for v in y]
        diffs = [v - y[0] for v in y[1:]]
        z = [dot(row, diffs) for row in self._gram_inv]
        coeffs = [Fraction(0)] * self.base.ambient_dim
        for zj, u in zip(z, self._dirs):
            if zj:
                coeffs = [c + zj * x for c, x in zip(coeffs, u)]
        constant = y[0] - dot(coeffs, self._origin)
        return AffineForm(tuple(coeffs), constant)

    def coords(self, form: AffineForm) -> tuple:
        return tuple(form(self.base.vertices[i]) for i in self.basis)

    def values(self, y: Sequence | AffineForm) -> tuple:
        """Values at every vertex of the base, from coordinates or a form."""
        if isinstance(y, AffineForm):
            return tuple(y(v) for v in self.base.vertices)
        return tuple(dot(w, y) for w in self.weights)

    def admits(self, form: AffineForm) -> bool:
        return all(0 <= v <= 1 for v in self.values(form))

    @staticmethod
    def complement(y: Sequence) -> tuple:
        return tuple(1 - v for v in y)

    def extreme_points(self) -> list[tuple]:
        return list(self.space.vertices)

    def __repr__(self):
        return f"FormSpace(base={self.base!r}, space={self.space!r})"


def build_form_space(C: Polytope) -> FormSpace:
    return FormSpace(C)


def extreme_forms(F: FormSpace) -> list[AffineForm]:
    return [F.to_form(y) for y in F.space.vertices]


def bounding_direction_count(C: Polytope) -> int:
    """Number of edge directions, up to sign, of a two-dimensional polytope."""
    if C.dim != 2:
        raise ValueError(f"bounding directions are defined for dim 2, got dim {C.dim}")
    directions: list[tuple] = []
    for i in range(len(C.inequalities)):
        a, b = C.facet_vertices(i)
        d = tuple(x - y for x, y in zip(C.vertices[a], C.vertices[b]))
        if not any(rank([d, e]) == 1 for e in directions):
            directions.append(d)
    return len(directions)
