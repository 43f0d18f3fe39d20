"""Exact linear programs: model, two-phase simplex, dual certificates.

All programs are maximizations.  A constraint is ``row . x (<=|=|>=) rhs``
and carries a unique label; dual multipliers are reported per label with
the sign convention of the Lagrangian ``c.x + sum_r y_r (rhs_r - row_r.x)``,
so a certificate ``y`` is dual feasible when

* ``y_r >= 0`` for ``<=`` rows, ``y_r <= 0`` for ``>=`` rows, free for ``=``;
* ``sum_r y_r * row_r[i] >= c_i`` for variables constrained ``>= 0``,
  and ``== c_i`` for free variables,

in which case ``sum_r y_r * rhs_r`` bounds the primal optimum from above.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .rational import as_rational, format_rational

ZERO = Fraction(0)


class LpStructureError(ValueError):
    """The program itself is malformed (bad index, duplicate label, ...)."""


class Relation(str, enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    row: Mapping[int, Fraction]
    relation: Relation
    rhs: Fraction
    label: str

    def __post_init__(self):
        row = {int(i): as_rational(v) for i, v in self.row.items()}
        object.__setattr__(self, "row", {i: v for i, v in sorted(row.items()) if v})
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "rhs", as_rational(self.rhs))

    def activity(self, x) -> Fraction:
        return sum((v * x[i] for i, v in self.row.items()), ZERO)

    def holds(self, x) -> bool:
        lhs = self.activity(x)
        if self.relation is Relation.LE:
            return lhs <= self.rhs
        if self.relation is Relation.GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """``maximize objective . x`` subject to labelled linear constraints."""

    num_vars: int
    objective: tuple
    constraints: tuple
    nonneg_vars: frozenset
    var_names: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(as_rational(c) for c in self.objective))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "nonneg_vars", frozenset(self.nonneg_vars))
        if self.var_names is not None:
            object.__setattr__(self, "var_names", tuple(self.var_names))

    def validate(self) -> None:
        if self.num_vars < 0:
            raise LpStructureError("negative variable count")
        if len(self.objective) != self.num_vars:
            raise LpStructureError(
                f"objective has {len(self.objective)} entries for {self.num_vars} variables"
            )
        if self.var_names is not None and len(self.var_names) != self.num_vars:
            raise LpStructureError("var_names length does not match num_vars")
        for i in self.nonneg_vars:
            if not 0 <= i < self.num_vars:
                raise LpStructureError(f"nonneg index {i} out of range")
        seen = set()
        for con in self.constraints:
            if con.label in seen:
                raise LpStructureError(f"duplicate constraint label {con.label!r}")
            seen.add(con.label)
            for i in con.row:
                if not 0 <= i < self.num_vars:
                    raise LpStructureError(
                        f"constraint {con.label!r} references variable {i} "
                        f"but the program has {self.num_vars}"
                    )

    def constraint(self, label: str) -> Constraint:
        for con in self.constraints:
            if con.label == label:
                return con
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [con.label for con in self.constraints]

    def var_name(self, i: int) -> str:
        return self.var_names[i] if self.var_names is not None else f"x{i}"

    def objective_value(self, x) -> Fraction:
        return sum((c * x[i] for i, c in enumerate(self.objective) if c), ZERO)

    def is_feasible(self, x) -> bool:
        if len(x) != self.num_vars:
            return False
        if any(x[i] < 0 for i in self.nonneg_vars):
            return False
        return all(con.holds(x) for con in self.constraints)


class LpBuilder:
    """Incremental construction of a LinearProgram with named variables."""

    def __init__(self):
        self._names: list[str] = []
        self._index: dict = {}
        self._nonneg: set[int] = set()
        self._objective: dict[int, Fraction] = {}
        self._constraints: list[Constraint] = []
        self._labels: set[str] = set()

    def add_var(self, key, name: str | None = None, nonneg: bool = True) -> int:
        if key in self._index:
            raise LpStructureError(f"variable {key!r} already defined")
        i = len(self._names)
        self._index[key] = i
        self._names.append(name if name is not None else str(key))
        if nonneg:
            self._nonneg.add(i)
        return i

    def var(self, key) -> int:
        return self._index[key]

    def set_objective(self, key, coeff) -> None:
        self._objective[self._index[key]] = as_rational(coeff)

    def add_constraint(self, terms: Iterable, relation, rhs, label: str) -> None:
        """``terms`` is an iterable of ``(variable key, coefficient)`` pairs;
        repeated keys accumulate."""
        if label in self._labels:
            raise LpStructureError(f"duplicate constraint label {label!r}")
        row: dict[int, Fraction] = {}
        for key, coeff in terms:
            i = self._index[key]
            row[i] = row.get(i, ZERO) + as_rational(coeff)
        self._labels.add(label)
        self._constraints.append(Constraint(row, Relation(relation), as_rational(rhs), label))

    def build(self) -> LinearProgram:
        n = len(self._names)
        lp = LinearProgram(
            num_vars=n,
            objective=tuple(self._objective.get(i, ZERO) for i in range(n)),
            constraints=tuple(self._constraints),
            nonneg_vars=frozenset(self._nonneg),
            var_names=tuple(self._names),
        )
        lp.validate()
        return lp


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    value: Fraction | None = None
    primal: tuple = ()
    dual: Mapping[str, Fraction] = field(default_factory=dict)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass(frozen=True)
class DualViolation:
    kind: str  # "sign" or "reduced-cost"
    where: str
    detail: str

    def __str__(self):
        return f"{self.kind} violation at {self.where}: {self.detail}"


@dataclass(frozen=True)
class DualCheck:
    """Outcome of checking a dual certificate; ``bound`` is set only when
    the multipliers are feasible."""

    bound: Fraction | None
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def check_dual_feasible(lp: LinearProgram, dual: Mapping[str, Fraction]) -> DualCheck:
    """Verify dual multipliers by direct arithmetic, without solving anything.

    Labels absent from ``dual`` are taken as zero; unknown labels raise
    :class:`LpStructureError`.
    """
    known = {con.label: con for con in lp.constraints}
    for label in dual:
        if label not in known:
            raise LpStructureError(f"dual multiplier for unknown constraint {label!r}")
    violations = []
    weights = [ZERO] * lp.num_vars
    bound = ZERO
    for con in lp.constraints:
        y = as_rational(dual.get(con.label, ZERO))
        if not y:
            continue
        if con.relation is Relation.LE and y < 0:
            violations.append(DualViolation("sign", con.label, f"<= row needs y >= 0, got {format_rational(y)}"))
        elif con.relation is Relation.GE and y > 0:
            violations.append(DualViolation("sign", con.label, f">= row needs y <= 0, got {format_rational(y)}"))
        for i, a in con.row.items():
            weights[i] += y * a
        bound += y * con.rhs
    for i, (w, c) in enumerate(zip(weights, lp.objective)):
        if i in lp.nonneg_vars:
            if w < c:
                violations.append(
                    DualViolation("reduced-cost", lp.var_name(i),
                                  f"column weight {format_rational(w)} < objective {format_rational(c)}")
                )
        elif w != c:
            violations.append(
                DualViolation("reduced-cost", lp.var_name(i),
                              f"free column weight {format_rational(w)} != objective {format_rational(c)}")
            )
    if violations:
        return DualCheck(None, tuple(violations))
    return DualCheck(bound)


class _Tableau:
    """Dense simplex tableau in equality form with one artificial per row.

    Artificial columns are kept after phase 1: they hold B^-1, from which the
    dual multipliers are read off at the end.
    """

    def __init__(self, lp: LinearProgram):
        cols: list[tuple[int, int]] = []  # (original var, +1/-1)
        for i in range(lp.num_vars):
            cols.append((i, 1))
            if i not in lp.nonneg_vars:
                cols.append((i, -1))
        self.structural = cols
        ns = len(cols)
        col_of = {}
        for j, (i, s) in enumerate(cols):
            col_of.setdefault(i, []).append((j, s))

        m = len(lp.constraints)
        n_slack = sum(1 for con in lp.constraints if con.relation is not Relation.EQ)
        self.m = m
        self.first_slack = ns
        self.first_art = ns + n_slack
        self.ncols = self.first_art + m
        self.row_sign: list[int] = []
        rows = []
        slack = ns
        for r, con in enumerate(lp.constraints):
            row = [ZERO] * (self.ncols + 1)
            for i, a in con.row.items():
                for j, s in col_of[i]:
                    row[j] = a if s > 0 else -a
            if con.relation is Relation.LE:
                row[slack] = Fraction(1)
                slack += 1
            elif con.relation is Relation.GE:
                row[slack] = Fraction(-1)
                slack += 1
            row[-1] = con.rhs
            sign = 1
            if con.rhs < 0:
                sign = -1
                row = [-v if v else v for v in row]
            row[self.first_art + r] = Fraction(1)
            self.row_sign.append(sign)
            rows.append(row)
        self.rows = rows
        self.basis = [self.first_art + r for r in range(m)]
        self.costs = [ZERO] * self.ncols
        for j, (i, s) in enumerate(cols):
            self.costs[j] = lp.objective[i] if s > 0 else -lp.objective[i]
        self.obj: list[Fraction] = []
        self.pivots = 0

    def pivot(self, r: int, c: int) -> None:
        pr = self.rows[r]
        piv = pr[c]
        if piv != 1:
            pr = [v / piv if v else v for v in pr]
            self.rows[r] = pr
        nz = [j for j, v in enumerate(pr) if v]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[c]
                if f:
                    for j in nz:
                        row[j] -= f * pr[j]
        f = self.obj[c]
        if f:
            obj = self.obj
            for j in nz:
                obj[j] -= f * pr[j]
        self.basis[r] = c
        self.pivots += 1

    def entering(self, limit: int) -> int | None:
        # least index with positive reduced cost (Bland)
        obj = self.obj
        for j in range(limit):
            if obj[j] > 0:
                return j
        return None

    def leaving(self, c: int) -> int | None:
        best = None
        best_ratio = None
        for i, row in enumerate(self.rows):
            a = row[c]
            if a > 0:
                ratio = row[-1] / a
                if (
                    best is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[i] < self.basis[best])
                ):
                    best, best_ratio = i, ratio
        return best

    def run(self, limit: int) -> bool:
        """Iterate to optimality over columns ``< limit``; False if unbounded."""
        while True:
            c = self.entering(limit)
            if c is None:
                return True
            r = self.leaving(c)
            if r is None:
                return False
            self.pivot(r, c)

    def phase_one(self) -> bool:
        # maximize -sum(artificials); reduced cost of column j is sum_i a_ij
        obj = [ZERO] * (self.ncols + 1)
        for row in self.rows:
            for j in range(self.first_art):
                if row[j]:
                    obj[j] += row[j]
            obj[-1] += row[-1]
        self.obj = obj
        self.run(self.first_art)
        if self.obj[-1] != 0:
            return False
        # drive zero-level artificials out of the basis where possible;
        # rows with no structural/slack entry left are redundant and stay put
        for r in range(self.m):
            if self.basis[r] >= self.first_art:
                row = self.rows[r]
                for j in range(self.first_art):
                    if row[j]:
                        self.pivot(r, j)
                        break
        return True

    def phase_two(self) -> bool:
        obj = list(self.costs) + [ZERO]
        for r, b in enumerate(self.basis):
            cb = self.costs[b]
            if cb:
                row = self.rows[r]
                for j, v in enumerate(row):
                    if v:
                        obj[j] -= cb * v
        self.obj = obj
        return self.run(self.first_art)

    def primal(self, num_vars: int) -> list[Fraction]:
        x = [ZERO] * num_vars
        for r, b in enumerate(self.basis):
            if b < self.first_slack:
                i, s = self.structural[b]
                x[i] += self.rows[r][-1] if s > 0 else -self.rows[r][-1]
        return x

    def dual(self) -> list[Fraction]:
        return [-self.obj[self.first_art + r] * self.row_sign[r] for r in range(self.m)]


def solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` exactly with the two-phase simplex method.

    Bland's least-index rule picks both the entering and the leaving
    column, so the method terminates on degenerate programs.  On an optimal
    result the returned primal point and dual multipliers are checked
    against each other before returning.
    """
    lp.validate()
    tab = _Tableau(lp)
    if not tab.phase_one():
        return LpSolution(LpStatus.INFEASIBLE, pivots=tab.pivots)
    if not tab.phase_two():
        return LpSolution(LpStatus.UNBOUNDED, pivots=tab.pivots)
    x = tab.primal(lp.num_vars)
    y = tab.dual()
    dual = {con.label: v for con, v in zip(lp.constraints, y)}
    value = lp.objective_value(x)
    if not lp.is_feasible(x):
        raise ArithmeticError("simplex returned an infeasible primal point")
    check = check_dual_feasible(lp, dual)
    if not check.ok or check.bound != value:
        raise ArithmeticError("simplex dual multipliers do not certify the primal value")
    return LpSolution(LpStatus.OPTIMAL, value, tuple(x), dual, tab.pivots)


def dump_lp(lp: LinearProgram) -> str:
    """Line-oriented text dump for debugging; not a stable format."""
    out = [f"vars {lp.num_vars}"]
    obj = " ".join(f"{format_rational(c)}*{lp.var_name(i)}" for i, c in enumerate(lp.objective) if c)
    out.append(f"max {obj or '0'}")
    for con in lp.constraints:
        lhs = " ".join(f"{format_rational(a)}*{lp.var_name(i)}" for i, a in con.row.items()) or "0"
        out.append(f"{con.label}: {lhs} {con.relation.value} {format_rational(con.rhs)}")
    free = [lp.var_name(i) for i in range(lp.num_vars) if i not in lp.nonneg_vars]
    if free:
        out.append("free " + " ".join(free))
    return "\n".join(out) + "\n"
