"""Exact rational linear programming.

Two-phase primal simplex with Bland's anti-cycling rule over exact
rationals.  gmpy2.mpq is used for tableau arithmetic when available
(set TROPFLAG_PURE_FRACTIONS=1 to force stdlib Fractions); all public
inputs and outputs are Fractions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .core import DomainError, as_rational

if os.environ.get("TROPFLAG_PURE_FRACTIONS"):
    Q = Fraction
else:
    try:
        from gmpy2 import mpq as Q
    except ImportError:  # pragma: no cover
        Q = Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

LEQ = "<="
GEQ = ">="
EQ = "=="

_ZERO = Q(0)
_ONE = Q(1)


@dataclass(frozen=True)
class Constraint:
    """A single linear constraint: coeffs . x  <rel>  rhs."""

    coeffs: tuple[Fraction, ...]
    rel: str
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in (LEQ, GEQ, EQ):
            raise DomainError(f"unknown relation {self.rel!r}")


def constraint(coeffs, rel, rhs) -> Constraint:
    return Constraint(tuple(as_rational(c) for c in coeffs), rel, as_rational(rhs))


@dataclass(frozen=True)
class LPResult:
    status: str
    optimum: Fraction | None
    solution: tuple[Fraction, ...] | None


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _simplex_min(a_rows, b, c):
    """min c.x  s.t.  a_rows x = b, x >= 0.  All entries Q.

    Returns (status, x, objective).  Bland's rule throughout, so the
    pivot sequence is deterministic and cycling-free.
    """
    m = len(a_rows)
    n = len(c)
    rows = [list(r) for r in a_rows]
    rhs = list(b)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    # Phase 1: artificial identity basis.
    total = n + m
    for i in range(m):
        rows[i].extend(_ONE if j == i else _ZERO for j in range(m))
    basis = list(range(n, total))
    cost1 = [_ZERO] * n + [_ONE] * m
    obj_row, obj_val = _reduced_costs(rows, rhs, basis, cost1, total)
    _pivot_loop(rows, rhs, basis, obj_row, allow_cols=total)
    obj_val = sum((cost1[basis[i]] * rhs[i] for i in range(m)), _ZERO)
    if obj_val > 0:
        return INFEASIBLE, None, None

    # Drive artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(m):
        if basis[i] < n:
            keep.append(i)
            continue
        pivot_col = next((j for j in range(n) if rows[i][j] != 0), None)
        if pivot_col is None:
            continue  # redundant constraint
        _pivot(rows, rhs, basis, None, i, pivot_col)
        keep.append(i)
    if len(keep) != len(rows):
        rows = [rows[i] for i in keep]
        rhs = [rhs[i] for i in keep]
        basis = [basis[i] for i in keep]
    rows = [r[:n] for r in rows]

    # Phase 2 on original costs.
    obj_row, obj_val = _reduced_costs(rows, rhs, basis, c, n)
    status = _pivot_loop(rows, rhs, basis, obj_row, allow_cols=n)
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    x = [_ZERO] * n
    for i, bi in enumerate(basis):
        x[bi] = rhs[i]
    objective = sum((c[j] * x[j] for j in range(n) if x[j] != 0), _ZERO)
    return OPTIMAL, x, objective


def _reduced_costs(rows, rhs, basis, cost, width):
    obj_row = list(cost[:width])
    obj_val = _ZERO
    for i, bi in enumerate(basis):
        cb = cost[bi]
        if cb != 0:
            row = rows[i]
            for j in range(width):
                if row[j] != 0:
                    obj_row[j] -= cb * row[j]
            obj_val += cb * rhs[i]
    return obj_row, obj_val


def _pivot_loop(rows, rhs, basis, obj_row, allow_cols):
    m = len(rows)
    while True:
        enter = next((j for j in range(allow_cols) if obj_row[j] < 0), None)
        if enter is None:
            return OPTIMAL
        leave = None
        best = None
        for i in range(m):
            coeff = rows[i][enter]
            if coeff > 0:
                ratio = rhs[i] / coeff
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return UNBOUNDED
        _pivot(rows, rhs, basis, obj_row, leave, enter)


def _pivot(rows, rhs, basis, obj_row, leave, enter):
    piv_row = rows[leave]
    piv = piv_row[enter]
    inv = _ONE / piv
    width = len(piv_row)
    for j in range(width):
        if piv_row[j] != 0:
            piv_row[j] *= inv
    rhs[leave] *= inv
    for i, row in enumerate(rows):
        if i == leave:
            continue
        factor = row[enter]
        if factor != 0:
            for j in range(width):
                if piv_row[j] != 0:
                    row[j] -= factor * piv_row[j]
            rhs[i] -= factor * rhs[leave]
    if obj_row is not None:
        factor = obj_row[enter]
        if factor != 0:
            for j in range(width):
                if piv_row[j] != 0:
                    obj_row[j] -= factor * piv_row[j]
    basis[leave] = enter


def lp_max(objective, constraints, nonneg: bool = False) -> LPResult:
    """Maximize objective . x subject to linear constraints.

    Variables are free by default (``nonneg=True`` restricts to x >= 0).
    Returns exact status/optimum/solution; deterministic.
    """
    obj = [as_rational(v) for v in objective]
    nvars = len(obj)
    cons = []
    for con in constraints:
        if not isinstance(con, Constraint):
            coeffs, rel, rhs = con
            con = constraint(coeffs, rel, rhs)
        if len(con.coeffs) != nvars:
            raise DomainError(
                f"constraint has {len(con.coeffs)} coefficients, expected {nvars}"
            )
        cons.append(con)

    # Column layout: x (or x+/x- pairs), then one slack per inequality.
    per_var = 1 if nonneg else 2
    slack_count = sum(1 for c in cons if c.rel != EQ)
    width = nvars * per_var + slack_count
    a_rows = []
    b = []
    slack_at = nvars * per_var
    for con in cons:
        row = [_ZERO] * width
        for j, coeff in enumerate(con.coeffs):
            qc = Q(coeff)
            if nonneg:
                row[j] = qc
            else:
                row[2 * j] = qc
                row[2 * j + 1] = -qc
        if con.rel == LEQ:
            row[slack_at] = _ONE
            slack_at += 1
        elif con.rel == GEQ:
            row[slack_at] = -_ONE
            slack_at += 1
        a_rows.append(row)
        b.append(Q(con.rhs))

    cost = [_ZERO] * width
    for j, coeff in enumerate(obj):
        qc = Q(coeff)
        if nonneg:
            cost[j] = -qc
        else:
            cost[2 * j] = -qc
            cost[2 * j + 1] = qc

    status, x, value = _simplex_min(a_rows, b, cost)
    if status != OPTIMAL:
        return LPResult(status, None, None)
    if nonneg:
        solution = tuple(_to_fraction(x[j]) for j in range(nvars))
    else:
        solution = tuple(_to_fraction(x[2 * j] - x[2 * j + 1]) for j in range(nvars))
    return LPResult(OPTIMAL, _to_fraction(-value), solution)


def support_margin(eq_points, eq_rhs, ineq_points, ineq_rhs) -> Fraction | None:
    """Optimal margin of the supporting-functional LP, or None if none exists.

    Primal: maximize eps subject to a.p + b = r on the tight points,
    a.p + b <= r - eps on the rest, and eps <= 1.  Solved through the
    dual, whose tableau stays small regardless of the ambient dimension.
    Returns the exact optimum (the candidate is a face / lower-hull face
    iff it is > 0), or None when the tightness system is inconsistent.
    """
    if not eq_points:
        raise DomainError("need at least one tight point")
    dim = len(eq_points[0])
    n_eq = len(eq_points)
    n_ineq = len(ineq_points)

    # Dual: min r_eq.mu + r_ineq.y + y0
    #   s.t. per coordinate t: sum_j p_jt mu_j + sum_z p_zt y_z = 0
    #        sum mu + sum y = 0
    #        sum y + y0 = 1,   y >= 0, y0 >= 0, mu free (split below).
    width = 2 * n_eq + n_ineq + 1
    a_rows = []
    b = []
    for t in range(dim):
        row = []
        for p in eq_points:
            qc = Q(p[t])
            row.extend((qc, -qc))
        row.extend(Q(p[t]) for p in ineq_points)
        row.append(_ZERO)
        a_rows.append(row)
        b.append(_ZERO)
    row = []
    for _ in range(n_eq):
        row.extend((_ONE, -_ONE))
    row.extend([_ONE] * n_ineq)
    row.append(_ZERO)
    a_rows.append(row)
    b.append(_ZERO)
    row = [_ZERO] * (2 * n_eq) + [_ONE] * n_ineq + [_ONE]
    a_rows.append(row)
    b.append(_ONE)

    cost = []
    for r in eq_rhs:
        qr = Q(r)
        cost.extend((qr, -qr))
    cost.extend(Q(r) for r in ineq_rhs)
    cost.append(_ONE)
    assert len(cost) == width

    status, _, value = _simplex_min(a_rows, b, cost)
    if status == UNBOUNDED:
        return None  # primal tightness system inconsistent
    assert status == OPTIMAL, "margin dual is always feasible"
    return _to_fraction(value)
