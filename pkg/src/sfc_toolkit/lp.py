"""Exact rational linear programming.

Two-phase tableau simplex over ``gmpy2.mpq`` with Bland's rule, so pivots are
deterministic and cycling cannot occur. Rows are stored sparsely; the flow
models built on top of this module have only a few nonzeros per column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from gmpy2 import mpq

Coeffs = Union[Mapping[int, object], Sequence[object]]

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = {"<=": LE, "==": EQ, "=": EQ, ">=": GE}

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


def _q(value) -> mpq:
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def _frac(value) -> Fraction:
    q = mpq(value)
    return Fraction(int(q.numerator), int(q.denominator))


def _sparse(coeffs: Coeffs) -> dict[int, mpq]:
    items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
    out: dict[int, mpq] = {}
    for j, v in items:
        q = _q(v)
        if q:
            out[j] = out.get(j, mpq(0)) + q
    return {j: v for j, v in out.items() if v}


@dataclass
class LinearProgram:
    """``maximize c.x`` subject to linear rows and per-variable bounds.

    Variables default to ``[0, +inf)``. Lower bounds must be finite.
    """

    num_vars: int
    objective: dict[int, mpq] = field(default_factory=dict)
    constraints: list[tuple[dict[int, mpq], str, mpq]] = field(default_factory=list)
    lower: list[mpq] = field(default_factory=list)
    upper: list[mpq | None] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.lower:
            self.lower = [mpq(0)] * self.num_vars
        if not self.upper:
            self.upper = [None] * self.num_vars

    def add_var(self, lo=0, hi=None) -> int:
        self.num_vars += 1
        self.lower.append(_q(lo))
        self.upper.append(None if hi is None else _q(hi))
        return self.num_vars - 1

    def set_bounds(self, j: int, lo=0, hi=None) -> None:
        self.lower[j] = _q(lo)
        self.upper[j] = None if hi is None else _q(hi)

    def set_objective(self, coeffs: Coeffs) -> None:
        self.objective = _sparse(coeffs)

    def add_constraint(self, coeffs: Coeffs, relation: str, rhs) -> None:
        try:
            rel = _RELATIONS[relation]
        except KeyError:
            raise ValueError(f"unknown relation {relation!r}") from None
        row = _sparse(coeffs)
        if any(j < 0 or j >= self.num_vars for j in row):
            raise ValueError("constraint refers to a variable outside the program")
        self.constraints.append((row, rel, _q(rhs)))


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows: list[dict[int, mpq]], rhs: list[mpq], basis: list[int]) -> None:
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.obj: dict[int, mpq] = {}  # reduced costs; entering candidates are > 0
        self.value = mpq(0)

    def set_objective(self, cost: Mapping[int, mpq]) -> None:
        obj = dict(cost)
        value = mpq(0)
        for i, b in enumerate(self.basis):
            cb = cost.get(b)
            if not cb:
                continue
            value += cb * self.rhs[i]
            for j, a in self.rows[i].items():
                nv = obj.get(j, mpq(0)) - cb * a
                if nv:
                    obj[j] = nv
                else:
                    obj.pop(j, None)
        self.obj = obj
        self.value = value

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        p = prow[c]
        if p != 1:
            prow = {j: v / p for j, v in prow.items()}
            self.rows[r] = prow
            self.rhs[r] /= p
        pr = self.rhs[r]
        items = list(prow.items())
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            a = row.get(c)
            if not a:
                continue
            for j, v in items:
                nv = row.get(j, 0) - a * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            self.rhs[i] -= a * pr
        a = self.obj.get(c)
        if a:
            for j, v in items:
                nv = self.obj.get(j, 0) - a * v
                if nv:
                    self.obj[j] = nv
                else:
                    self.obj.pop(j, None)
            self.value += a * pr
        self.basis[r] = c

    def run(self, allowed: int) -> str:
        """Maximize with Bland's rule over columns ``< allowed``."""
        while True:
            entering = min((j for j, d in self.obj.items() if d > 0 and j < allowed), default=None)
            if entering is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                key = (self.rhs[i] / a, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)


def _standard_form(lp: LinearProgram):
    """Shift lower bounds to zero, turn upper bounds into rows, make rhs >= 0."""
    rows: list[tuple[dict[int, mpq], str, mpq]] = []
    lo = lp.lower
    for coeffs, rel, rhs in lp.constraints:
        shifted = rhs - sum((a * lo[j] for j, a in coeffs.items()), mpq(0))
        rows.append((dict(coeffs), rel, shifted))
    for j, hi in enumerate(lp.upper):
        if hi is not None:
            rows.append(({j: mpq(1)}, LE, hi - lo[j]))
    out = []
    for coeffs, rel, rhs in rows:
        if rhs < 0:
            coeffs = {j: -a for j, a in coeffs.items()}
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        out.append((coeffs, rel, rhs))
    return out


def _phase_one(lp: LinearProgram) -> tuple[_Tableau, int] | None:
    """Feasible basis with artificial columns removed, or ``None`` if infeasible."""
    rows = _standard_form(lp)
    n = lp.num_vars
    col = n
    t_rows: list[dict[int, mpq]] = []
    rhs: list[mpq] = []
    basis: list[int] = []
    artificial_rows = []
    for coeffs, rel, b in rows:
        row = dict(coeffs)
        if rel == LE:
            row[col] = mpq(1)
            basis.append(col)
            col += 1
        elif rel == GE:
            row[col] = mpq(-1)
            col += 1
            basis.append(None)
            artificial_rows.append(len(t_rows))
        else:
            basis.append(None)
            artificial_rows.append(len(t_rows))
        t_rows.append(row)
        rhs.append(b)
    first_art = col
    for i in artificial_rows:
        t_rows[i][col] = mpq(1)
        basis[i] = col
        col += 1
    tab = _Tableau(t_rows, rhs, basis)
    if not artificial_rows:
        return tab, first_art

    tab.set_objective({first_art + k: mpq(-1) for k in range(len(artificial_rows))})
    tab.run(col)
    if tab.value < 0:
        return None

    # drive zero-level artificials out of the basis; rows that cannot pivot are redundant
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= first_art:
            c = min((j for j, a in tab.rows[i].items() if j < first_art and a), default=None)
            if c is None:
                del tab.rows[i], tab.rhs[i], tab.basis[i]
                continue
            tab.pivot(i, c)
        i += 1
    for row in tab.rows:
        for j in [j for j in row if j >= first_art]:
            del row[j]
    return tab, first_art


def _extract(lp: LinearProgram, tab: _Tableau) -> tuple[Fraction, ...]:
    x = [mpq(0)] * lp.num_vars
    for i, b in enumerate(tab.basis):
        if b < lp.num_vars:
            x[b] = tab.rhs[i]
    return tuple(_frac(v + lp.lower[j]) for j, v in enumerate(x))


def solve(lp: LinearProgram) -> LPResult:
    """Exact optimum of ``lp`` (maximization)."""
    start = _phase_one(lp)
    if start is None:
        return LPResult(INFEASIBLE)
    tab, ncols = start
    tab.set_objective(lp.objective)
    if tab.run(ncols) == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = _extract(lp, tab)
    value = sum((_frac(c) * x[j] for j, c in lp.objective.items()), Fraction(0))
    return LPResult(OPTIMAL, value, x)


def feasible(lp: LinearProgram) -> LPResult:
    """Phase-one only: a witness point if the constraints are satisfiable."""
    start = _phase_one(lp)
    if start is None:
        return LPResult(INFEASIBLE)
    tab, _ = start
    return LPResult(OPTIMAL, Fraction(0), _extract(lp, tab))


def check_point(lp: LinearProgram, x: Sequence[Fraction]) -> list[str]:
    """Constraint and bound violations of ``x`` under exact arithmetic."""
    problems = []
    for j, v in enumerate(x):
        if v < _frac(lp.lower[j]):
            problems.append(f"x{j}={v} below lower bound")
        hi = lp.upper[j]
        if hi is not None and v > _frac(hi):
            problems.append(f"x{j}={v} above upper bound")
    for k, (coeffs, rel, rhs) in enumerate(lp.constraints):
        lhs = sum((_frac(a) * x[j] for j, a in coeffs.items()), Fraction(0))
        b = _frac(rhs)
        ok = lhs <= b if rel == LE else lhs >= b if rel == GE else lhs == b
        if not ok:
            problems.append(f"row {k}: {lhs} {rel} {b} fails")
    return problems


def from_dense(
    objective: Sequence,
    rows: Iterable[tuple[Sequence, str, object]],
    bounds: Sequence[tuple[object, object]] | None = None,
) -> LinearProgram:
    """Build a program from dense coefficient lists."""
    lp = LinearProgram(len(objective))
    lp.set_objective(objective)
    for coeffs, rel, rhs in rows:
        lp.add_constraint(coeffs, rel, rhs)
    if bounds:
        for j, (lo, hi) in enumerate(bounds):
            lp.set_bounds(j, lo, hi)
    return lp
