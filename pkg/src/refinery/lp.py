"""Exact linear programming by the two-phase simplex method.

Constraints are ``a . x <= b`` (inequalities) and ``e . x = f`` (equalities)
over free variables.  Equalities are eliminated first by exact Gaussian
elimination, the remaining free variables are split into positive and
negative parts, and Bland's rule guarantees termination.

Every infeasible answer carries Farkas multipliers ``(lam, mu)``, inequality
multipliers first, such that ``sum lam_i a_i + sum mu_j e_j = 0``,
``lam >= 0`` and ``sum lam_i b_i + sum mu_j f_j < 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactfield import dot, scalar, sign, solve_linear

__all__ = ["LinearProgram", "LpOutcome", "solve", "verify_farkas", "feasible_point"]

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    variables: int
    inequalities: tuple = ()
    equalities: tuple = ()
    objective: tuple | None = None  # maximized

    def __post_init__(self):
        for normal, _ in (*self.inequalities, *self.equalities):
            if len(normal) != self.variables:
                raise ValueError(
                    f"constraint row has {len(normal)} entries, expected {self.variables}"
                )
        if self.objective is not None and len(self.objective) != self.variables:
            raise ValueError("objective length does not match variable count")


@dataclass(frozen=True)
class LpOutcome:
    status: str
    point: tuple | None = None
    certificate: tuple | None = None
    value: object = None

    @property
    def feasible(self) -> bool:
        return self.status in (OPTIMAL, FEASIBLE, UNBOUNDED)


def verify_farkas(lp: LinearProgram, certificate: Sequence) -> bool:
    """Re-check an infeasibility certificate with exact vector algebra."""
    k = len(lp.inequalities)
    if len(certificate) != k + len(lp.equalities):
        return False
    lam, mu = certificate[:k], certificate[k:]
    if any(sign(x) < 0 for x in lam):
        return False
    rows = [a for a, _ in lp.inequalities] + [e for e, _ in lp.equalities]
    rhs = [b for _, b in lp.inequalities] + [f for _, f in lp.equalities]
    combo = [dot(certificate, col) for col in zip(*rows)] if rows else []
    if any(combo):
        return False
    return sign(dot(certificate, rhs)) < 0


class _Tableau:
    """Dense simplex tableau in standard form ``A u = r, u >= 0``."""

    def __init__(self, rows, rhs, basis):
        self.T = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        inv = 1 / T[r][c]
        T[r] = [x * inv if x else x for x in T[r]]
        self.rhs[r] = self.rhs[r] * inv
        for i in range(len(T)):
            if i != r and T[i][c]:
                f = T[i][c]
                T[i] = [x - f * y if y else x for x, y in zip(T[i], T[r])]
                self.rhs[i] = self.rhs[i] - f * self.rhs[r]
        self.basis[r] = c

    def reduced_costs(self, cost, allowed):
        cb = [cost[b] for b in self.basis]
        out = {}
        for j in allowed:
            z = Fraction(0)
            for i, c in enumerate(cb):
                if c and self.T[i][j]:
                    z = z + c * self.T[i][j]
            out[j] = cost[j] - z
        return out

    def run(self, cost, allowed):
        """Minimize ``cost . u``; returns None at optimum or the unbounded column."""
        while True:
            rc = self.reduced_costs(cost, allowed)
            entering = next((j for j in sorted(rc) if sign(rc[j]) < 0 and j not in self.basis), None)
            if entering is None:
                return None
            leave, best = None, None
            for i, row in enumerate(self.T):
                if sign(row[entering]) > 0:
                    ratio = self.rhs[i] / row[entering]
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        leave, best = i, ratio
            if leave is None:
                return entering
            self.pivot(leave, entering)


def _reduce_equalities(lp: LinearProgram):
    """Parametrize ``{x : E x = f}`` as ``x0 + N z``; or return a witness."""
    n = lp.variables
    if not lp.equalities:
        ident = tuple(tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n))
        return tuple(Fraction(0) for _ in range(n)), ident, None
    A = [e for e, _ in lp.equalities]
    f = [scalar(v) for _, v in lp.equalities]
    sol = solve_linear(A, f)
    if not sol.consistent:
        y = sol.witness
        s = sign(dot(y, f))
        mu = tuple(-x if s > 0 else x for x in y)
        return None, None, mu
    return sol.particular, sol.kernel, None


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly.

    Without an objective the answer is ``feasible`` or ``infeasible``; with one
    (maximized) it is ``optimal``, ``unbounded`` (certificate = improving ray)
    or ``infeasible`` (certificate = Farkas multipliers).
    """
    k = len(lp.inequalities)
    x0, N, eq_witness = _reduce_equalities(lp)
    if eq_witness is not None:
        return LpOutcome(INFEASIBLE, certificate=tuple([Fraction(0)] * k) + eq_witness)
    nz = len(N)

    def lift(z):
        return tuple(x0[i] + dot([v[i] for v in N], z) for i in range(lp.variables))

    G = [[dot(a, v) for v in N] for a, _ in lp.inequalities]
    h = [scalar(b) - dot(a, x0) for a, b in lp.inequalities]
    c = [dot(lp.objective, v) for v in N] if lp.objective is not None else None

    if k == 0:
        if c is not None and any(c):
            ray = tuple(dot([v[i] for v in N], c) for i in range(lp.variables))
            return LpOutcome(UNBOUNDED, point=x0, certificate=ray)
        status = OPTIMAL if c is not None else FEASIBLE
        value = dot(lp.objective, x0) if c is not None else None
        return LpOutcome(status, point=x0, value=value)

    # columns: z+ (nz), z- (nz), slacks (k), artificials (one per negative rhs)
    flipped = [sign(h[i]) < 0 for i in range(k)]
    art_rows = [i for i in range(k) if flipped[i]]
    ncols = 2 * nz + k + len(art_rows)
    rows, rhs, basis = [], [], []
    art_col = {}
    for j, i in enumerate(art_rows):
        art_col[i] = 2 * nz + k + j
    for i in range(k):
        s = -1 if flipped[i] else 1
        row = [Fraction(0)] * ncols
        for j in range(nz):
            if G[i][j]:
                row[j] = s * G[i][j]
                row[nz + j] = -s * G[i][j]
        row[2 * nz + i] = Fraction(s)
        if flipped[i]:
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            basis.append(2 * nz + i)
        rows.append(row)
        rhs.append(s * h[i])
    init_cols = list(basis)
    tab = _Tableau(rows, rhs, basis)
    structural = list(range(2 * nz + k))

    if art_rows:
        cost1 = [Fraction(0)] * ncols
        for i in art_rows:
            cost1[art_col[i]] = Fraction(1)
        tab.run(cost1, list(range(ncols)))
        phase1 = sum((cost1[b] * tab.rhs[i] for i, b in enumerate(tab.basis)), Fraction(0))
        if sign(phase1) > 0:
            # y = c_B B^{-1}; B^{-1} sits in the columns that started as identity
            cb = [cost1[b] for b in tab.basis]
            y = [dot(cb, [tab.T[r][init_cols[i]] for r in range(k)]) for i in range(k)]
            lam = [-(y[i] * (-1 if flipped[i] else 1)) for i in range(k)]
            return LpOutcome(INFEASIBLE, certificate=_lift_certificate(lp, lam))
        # drive zero-level artificials out of the basis
        artificial = set(art_col.values())
        for r in range(k):
            if tab.basis[r] in artificial:
                col = next((j for j in structural if tab.T[r][j]), None)
                if col is not None:
                    tab.pivot(r, col)
        keep = [r for r in range(k) if tab.basis[r] not in artificial]
        tab = _Tableau([tab.T[r] for r in keep], [tab.rhs[r] for r in keep],
                       [tab.basis[r] for r in keep])

    def current_z():
        u = [Fraction(0)] * ncols
        for r, b in enumerate(tab.basis):
            u[b] = tab.rhs[r]
        return [u[j] - u[nz + j] for j in range(nz)]

    if c is None:
        return LpOutcome(FEASIBLE, point=lift(current_z()))

    cost2 = [Fraction(0)] * ncols
    for j in range(nz):
        cost2[j] = -c[j]
        cost2[nz + j] = c[j]
    unbounded_col = tab.run(cost2, structural)
    if unbounded_col is not None:
        u = [Fraction(0)] * ncols
        u[unbounded_col] = Fraction(1)
        for r, b in enumerate(tab.basis):
            u[b] = -tab.T[r][unbounded_col]
        dz = [u[j] - u[nz + j] for j in range(nz)]
        ray = tuple(dot([v[i] for v in N], dz) for i in range(lp.variables))
        return LpOutcome(UNBOUNDED, point=lift(current_z()), certificate=ray)
    x = lift(current_z())
    return LpOutcome(OPTIMAL, point=x, value=dot(lp.objective, x))


def _lift_certificate(lp: LinearProgram, lam):
    """Turn multipliers on the reduced system into ones on the original rows."""
    combo = [dot(lam, col) for col in zip(*[a for a, _ in lp.inequalities])]
    if not lp.equalities:
        return tuple(lam)
    E = [e for e, _ in lp.equalities]
    sol = solve_linear([list(col) for col in zip(*E)], combo)
    # sol must exist: combo is orthogonal to the kernel of E
    mu = tuple(-x for x in sol.particular)
    return tuple(lam) + mu


def feasible_point(inequalities, equalities=(), variables: int | None = None):
    """Convenience wrapper: a feasible point or None."""
    if variables is None:
        rows = list(inequalities) + list(equalities)
        variables = len(rows[0][0])
    out = solve(LinearProgram(variables, tuple(inequalities), tuple(equalities)))
    return out.point if out.feasible else None
