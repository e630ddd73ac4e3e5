"""Exact scalars over Q and Q(sqrt(d)), and dense exact linear algebra.

Rationals are plain :class:`fractions.Fraction` values.  Elements of a real
quadratic field are :class:`QuadScalar`; any arithmetic result whose
irrational part vanishes collapses back to a ``Fraction``, so rational-only
computations never pay for the extension.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence, Union

__all__ = [
    "Fraction",
    "QuadScalar",
    "FieldContextError",
    "ScalarParseError",
    "Scalar",
    "scalar",
    "sqrt",
    "sign",
    "scalar_cmp",
    "parse_scalar",
    "format_scalar",
    "field_of",
    "to_float",
    "dot",
    "matvec",
    "matmul",
    "transpose",
    "LinearSolution",
    "solve_linear",
    "row_reduce",
    "rank",
    "kernel",
    "inverse",
    "EchelonBasis",
    "affine_hull",
    "affine_dependencies",
    "normalize_direction",
]


class FieldContextError(ValueError):
    """Raised when two quadratic scalars live in different fields."""


class ScalarParseError(ValueError):
    def __init__(self, message: str, column: int = 1):
        super().__init__(message)
        self.column = column


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


@total_ordering
class QuadScalar:
    """The real number ``a + b*sqrt(d)`` with rational ``a``, ``b``.

    ``d`` is a square-free integer greater than one.  Instances are immutable
    and hashable; when ``b == 0`` they hash and compare like the rational ``a``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d: int = 5):
        if not _squarefree(d):
            raise ValueError(f"d must be a square-free integer > 1, got {d}")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    def __reduce__(self):
        return (QuadScalar, (self.a, self.b, self.d))

    # -- helpers ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadScalar):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise FieldContextError(
                    f"cannot combine Q(sqrt({self.d})) with Q(sqrt({other.d}))"
                )
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def _context(self, other) -> int:
        if isinstance(other, QuadScalar) and self.b == 0:
            return other.d
        return self.d

    @staticmethod
    def _make(a: Fraction, b: Fraction, d: int):
        if b == 0:
            return a
        return QuadScalar(a, b, d)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self._make(self.a + c[0], self.b + c[1], self._context(other))

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self._make(self.a - c[0], self.b - c[1], self._context(other))

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self._make(c[0] - self.a, c[1] - self.b, self._context(other))

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a2, b2 = c
        d = self._context(other)
        return self._make(self.a * a2 + self.b * b2 * d, self.a * b2 + self.b * a2, d)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def conjugate(self):
        return self._make(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return self._make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        if isinstance(other, QuadScalar):
            return self * other.inverse()
        if c[0] == 0:
            raise ZeroDivisionError("division by zero")
        return self._make(self.a / c[0], self.b / c[0], self.d)

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self.inverse() * c[0]

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (1 / self) ** (-k)
        result = Fraction(1)
        base = self
        while k:
            if k & 1:
                result = base * result
            base = base * base
            k >>= 1
        return result

    # -- order -----------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(d)`` by integer case analysis."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        lhs = self.a * self.a
        rhs = self.b * self.b * self.d
        if lhs > rhs:
            return sa
        if lhs < rhs:
            return sb
        return 0

    def __eq__(self, other):
        c = self._coerce(other) if isinstance(other, (QuadScalar, int, Fraction)) else None
        if c is None:
            return NotImplemented
        if self.b == 0 and c[1] == 0:
            return self.a == c[0]
        if isinstance(other, QuadScalar) and other.d != self.d:
            return False
        return self.a == c[0] and self.b == c[1]

    def __lt__(self, other):
        diff = self - other
        if diff is NotImplemented:
            return NotImplemented
        return sign(diff) < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadScalar({self.a}, {self.b}, d={self.d})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[Fraction, QuadScalar]


def scalar(x) -> Scalar:
    """Coerce ints, Fractions, QuadScalars and strings to a canonical scalar."""
    if isinstance(x, QuadScalar):
        return x if x.b != 0 else x.a
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def sqrt(d: int, coefficient=1) -> QuadScalar:
    """``coefficient * sqrt(d)`` as an exact scalar."""
    return QuadScalar(0, coefficient, d)


def sign(x) -> int:
    if isinstance(x, QuadScalar):
        return x.sign()
    return (x > 0) - (x < 0)


def scalar_cmp(x, y) -> int:
    """Return -1, 0 or 1 as ``x`` is less than, equal to or greater than ``y``."""
    return sign(x - y)


def field_of(values: Iterable) -> int | None:
    """The ``d`` of the quadratic field the values live in, None if all rational."""
    d = None
    for v in values:
        if isinstance(v, QuadScalar) and v.b != 0:
            if d is None:
                d = v.d
            elif d != v.d:
                raise FieldContextError(f"mixed fields sqrt({d}) and sqrt({v.d})")
    return d


def to_float(x) -> float:
    return float(x)


# -- text syntax -----------------------------------------------------------

_RAT = r"\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?:(?P<a>[+-]?{_RAT})(?=[+-]|$))?"
    rf"(?:(?P<sign>[+-])?(?:(?P<b>{_RAT})\*)?sqrt\((?P<d>\d+)\))?$"
)


def _parse_rational(text: str) -> Fraction:
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ScalarParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def parse_scalar(text: str) -> Scalar:
    """Parse ``p/q`` or ``p/q+r/s*sqrt(d)``; whitespace is ignored."""
    compact = "".join(text.split())
    m = _SCALAR_RE.match(compact)
    if not compact or m is None or (m.group("a") is None and m.group("d") is None):
        bad = next((i for i, ch in enumerate(text) if not (ch.isdigit() or ch in " +-/*sqrt()")), 0)
        raise ScalarParseError(f"malformed scalar {text!r}", bad + 1)
    a = _parse_rational(m.group("a")) if m.group("a") else Fraction(0)
    if m.group("d") is None:
        return a
    d = int(m.group("d"))
    if not _squarefree(d):
        raise ScalarParseError(f"sqrt({d}): d must be square-free and > 1")
    b = _parse_rational(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("sign") == "-":
        b = -b
    return QuadScalar._make(a, b, d)


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Canonical text form; ``parse_scalar(format_scalar(x)) == x``."""
    x = scalar(x)
    if isinstance(x, Fraction):
        return _format_rational(x)
    mag = abs(x.b)
    coef = "" if mag == 1 else _format_rational(mag) + "*"
    term = f"{coef}sqrt({x.d})"
    if x.a == 0:
        return term if x.b > 0 else "-" + term
    return _format_rational(x.a) + ("+" if x.b > 0 else "-") + term


# -- vectors and matrices --------------------------------------------------

def dot(u: Sequence, v: Sequence):
    total = Fraction(0)
    for x, y in zip(u, v):
        if x and y:
            total = total + x * y
    return total


def matvec(A: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(dot(row, x) for row in A)


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    cols = transpose(B)
    return [[dot(row, col) for col in cols] for row in A]


def row_reduce(A: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivots are taken left to right on the first nonzero entry, so the result
    is the unique RREF of ``A``.
    """
    M = [[scalar(x) for x in row] for row in A]
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv if x else x for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y if y else x for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not len(A[0]):
        return 0
    return len(row_reduce(A)[1])


def kernel(A: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    """Basis of the right null space ``{x : A x = 0}``.

    One vector per free column, with a 1 in that column and 0 in the other
    free columns (the canonical RREF basis).
    """
    if ncols is None:
        ncols = len(A[0])
    if not A:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    R, pivots = row_reduce(A)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            if row[f]:
                v[pc] = -row[f]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of :func:`solve_linear`.

    ``particular`` is None when the system is inconsistent; ``witness`` is
    then a row combination ``y`` with ``y A = 0`` and ``y b != 0``.
    """

    particular: tuple | None
    kernel: tuple[tuple, ...]
    witness: tuple | None = None

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def unique(self) -> bool:
        return self.consistent and not self.kernel


def solve_linear(A: Sequence[Sequence], b: Sequence) -> LinearSolution:
    """Solve ``A x = b`` exactly.

    Returns a particular solution (free variables set to zero) together with a
    kernel basis, or an inconsistency witness.
    """
    m = len(A)
    if m != len(b):
        raise ValueError(f"shape mismatch: {m} rows but {len(b)} right-hand sides")
    n = len(A[0]) if m else 0
    if m == 0:
        return LinearSolution(tuple(Fraction(0) for _ in range(n)), tuple(kernel([], n)))
    # track row operations to recover a left witness
    aug = [
        list(A[i]) + [b[i]] + [Fraction(int(i == j)) for j in range(m)]
        for i in range(m)
    ]
    R, pivots = row_reduce(aug)
    for row, pc in zip(R, pivots):
        if pc == n:
            return LinearSolution(None, (), tuple(row[n + 1:]))
        if pc > n:
            break
    x = [Fraction(0)] * n
    for row, pc in zip(R, pivots):
        if pc < n:
            x[pc] = row[n]
    coef_rows = [row[:n] for row, pc in zip(R, pivots) if pc < n]
    return LinearSolution(tuple(x), tuple(kernel(coef_rows, n)) if coef_rows else tuple(kernel([], n)))


def inverse(A: Sequence[Sequence]) -> list[list]:
    n = len(A)
    aug = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


class EchelonBasis:
    """Incrementally maintained echelon basis of a linear span."""

    def __init__(self):
        self.rows: list[tuple[int, list]] = []

    def reduce(self, v: Sequence) -> list:
        v = list(v)
        for pc, row in self.rows:
            if v[pc]:
                f = v[pc]
                v = [x - f * y if y else x for x, y in zip(v, row)]
        return v

    def add(self, v: Sequence) -> bool:
        """Add ``v``; return False if it was already in the span."""
        v = self.reduce(v)
        pc = next((i for i, x in enumerate(v) if x), None)
        if pc is None:
            return False
        inv = 1 / v[pc]
        self.rows.append((pc, [x * inv if x else x for x in v]))
        return True

    def __len__(self):
        return len(self.rows)


def affine_hull(points: Sequence[Sequence], stop_at: int | None = None) -> tuple[int, list[int]]:
    """Dimension of the affine span and indices of a spanning independent subset.

    The subset is the first affinely independent one in list order.  With
    ``stop_at`` the scan ends as soon as that dimension is reached.
    """
    if not points:
        raise ValueError("affine_hull of an empty point list")
    base = points[0]
    chosen = [0]
    span = EchelonBasis()
    for i in range(1, len(points)):
        if stop_at is not None and len(span) >= stop_at:
            break
        if span.add([x - y for x, y in zip(points[i], base)]):
            chosen.append(i)
    return len(span), chosen


def affine_dependencies(points: Sequence[Sequence]) -> list[tuple]:
    """Basis of ``{lam : sum(lam) = 0, sum(lam_i p_i) = 0}``."""
    if not points:
        return []
    dim = len(points[0])
    rows = [[p[k] for p in points] for k in range(dim)]
    rows.append([Fraction(1)] * len(points))
    return kernel(rows, len(points))


def normalize_direction(v: Sequence) -> tuple:
    """Positive rescaling to a canonical representative.

    Rational vectors become primitive integer vectors; vectors with irrational
    entries are divided by the absolute value of their first nonzero entry.
    """
    if all(isinstance(x, Fraction) for x in v):
        den = 1
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
        ints = [int(x * den) for x in v]
        g = 0
        for k in ints:
            g = math.gcd(g, k)
        if g == 0:
            return tuple(Fraction(0) for _ in v)
        return tuple(Fraction(k // g) for k in ints)
    lead = next(x for x in v if x)
    scale = abs(lead)
    return tuple(scalar(x / scale) if x else Fraction(0) for x in v)
