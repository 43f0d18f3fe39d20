"""Odd-cycle game with one extra player: reduced LP and closed-form dual.

The three players A, B, C of the extended odd-cycle game have a
no-signaling optimum that can be taken invariant under flipping all
outputs, shifting all inputs mod n, and swapping B with C.  Fixing A's
answer and question to 0 leaves the variables

    r(b, c | j, k) = 2 p(0, b, c | 0, j, k)

(the factor 2 makes each (j, k) block sum to 1).  The reduced program
maximizes (r(0,0|0,0) + r(1,1|1,1)) / 2 under four labelled families:

    n(j,k)    sum_{b,c} r(b,c|j,k) = 1
    s(b,c|j,k) r(b,c|j,k) - r(c,b|k,j) = 0          (skipped when trivial)
    y(d|j,k)  A cannot signal to BC:
              r(0,d|0,k) + r(1,~d|0,k) - r(0,d|j,j+k) - r(1,~d|j,j+k) = 0
    z(d|j,k)  B cannot signal to AC:
              r(0,d|0,k) + r(1,d|0,k) - r(0,d|j,k) - r(1,d|j,k) = 0

for d in {0,1}, 1 <= j < n, 0 <= k < n, indices mod n.  The y/z rows are
oriented so that the dual column of r(b,c|j,k), multiplied by 2n, is the
reduced cost ``reduced_cost(cert, b, c, j, k)`` below.

Certificates store multipliers on that 2n scale, so the dual objective
is sum n(j,k) / 2n and the column conditions read: reduced cost >= n for
r(0,0|0,0) and r(1,1|1,1), >= 0 for every other column.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceeded
from .lp import LinearProgram, LpBuilder, LpStatus, solve
from .rational import RationalFormatError, as_rational, dumps_records, format_rational, parse_rational

FAMILIES = ("n", "s", "y", "z")
_ARITY = {"n": 2, "s": 4, "y": 3, "z": 3}

DEFAULT_REDUCED_BUDGET = 99  # largest n solved by default

ZERO = Fraction(0)


class CertificateError(ValueError):
    """Certificate construction or parsing failed."""


class CertificateCollision(CertificateError):
    def __init__(self, key, first, second):
        self.key = key
        self.first = first
        self.second = second
        super().__init__(
            f"{label(*key)} assigned twice with different values: "
            f"{format_rational(first[1])} by '{first[0]}' and "
            f"{format_rational(second[1])} by '{second[0]}'"
        )


def check_odd(n) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 3 or n % 2 == 0:
        raise ValueError(f"cycle length must be an odd integer >= 3, got {n!r}")
    return n


def label(family: str, *idx) -> str:
    """Constraint label shared by the reduced LP and certificates."""
    if family == "n":
        return f"n({idx[0]},{idx[1]})"
    if family == "s":
        return f"s({idx[0]},{idx[1]}|{idx[2]},{idx[3]})"
    return f"{family}({idx[0]}|{idx[1]},{idx[2]})"


def var_name(b, c, j, k) -> str:
    return f"r({b},{c}|{j},{k})"


def build_reduced_lp(n: int) -> LinearProgram:
    n = check_odd(n)
    lp = LpBuilder()
    cells = [(b, c, j, k) for j in range(n) for k in range(n) for b in (0, 1) for c in (0, 1)]
    for key in cells:
        lp.add_var(key, var_name(*key))
    half = Fraction(1, 2)
    lp.set_objective((0, 0, 0, 0), half)
    lp.set_objective((1, 1, 1, 1), half)
    for j in range(n):
        for k in range(n):
            lp.add_constraint((((b, c, j, k), 1) for b in (0, 1) for c in (0, 1)), "=", 1, label("n", j, k))
    for b, c, j, k in cells:
        if b == c and j == k:
            continue
        lp.add_constraint([((b, c, j, k), 1), ((c, b, k, j), -1)], "=", 0, label("s", b, c, j, k))
    for d in (0, 1):
        for j in range(1, n):
            for k in range(n):
                jk = (j + k) % n
                terms = [((0, d, 0, k), 1), ((1, 1 - d, 0, k), 1),
                         ((0, d, j, jk), -1), ((1, 1 - d, j, jk), -1)]
                lp.add_constraint(terms, "=", 0, label("y", d, j, k))
    for d in (0, 1):
        for j in range(1, n):
            for k in range(n):
                terms = [((0, d, 0, k), 1), ((1, d, 0, k), 1),
                         ((0, d, j, k), -1), ((1, d, j, k), -1)]
                lp.add_constraint(terms, "=", 0, label("z", d, j, k))
    return lp.build()


def reduced_ns_value(n: int, budget: int = DEFAULT_REDUCED_BUDGET) -> Fraction:
    n = check_odd(n)
    if n > budget:
        raise BudgetExceeded(f"reduced LP for n={n} exceeds the budget n <= {budget}")
    sol = solve(build_reduced_lp(n))
    if sol.status is not LpStatus.OPTIMAL:
        raise ArithmeticError(f"reduced LP reported {sol.status.value}")
    return sol.value


# --- dual certificates -------------------------------------------------------


@dataclass(frozen=True)
class DualCertificate:
    """Multipliers of the reduced LP, scaled by 2n.

    Keys are index tuples: ``n_vars[j, k]``, ``s_vars[b, c, j, k]``,
    ``y_vars[d, j, k]`` and ``z_vars[d, j, k]``.  Missing keys are zero.
    """

    n: int
    n_vars: dict = field(default_factory=dict)
    s_vars: dict = field(default_factory=dict)
    y_vars: dict = field(default_factory=dict)
    z_vars: dict = field(default_factory=dict)

    def __post_init__(self):
        try:
            check_odd(self.n)
        except ValueError as exc:
            raise CertificateError(str(exc)) from exc
        for fam in FAMILIES:
            table = {tuple(k): as_rational(v) for k, v in self.family(fam).items()}
            for key in table:
                self._check_index(fam, key)
            object.__setattr__(self, f"{fam}_vars", dict(sorted(table.items())))

    def _check_index(self, fam, key):
        n = self.n
        if len(key) != _ARITY[fam] or not all(isinstance(x, int) for x in key):
            raise CertificateError(f"bad index {key} for family {fam}")
        *bits, j, k = key
        if any(x not in (0, 1) for x in bits) or not (0 <= j < n and 0 <= k < n):
            raise CertificateError(f"index {key} out of range for family {fam}, n={n}")
        if fam in ("y", "z") and j == 0:
            raise CertificateError(f"{fam} multipliers need 1 <= j < n, got {key}")
        if fam == "s" and bits[0] == bits[1] and j == k:
            raise CertificateError(f"s{key} belongs to a trivial constraint")

    def family(self, fam: str) -> dict:
        return getattr(self, f"{fam}_vars")

    def get(self, fam: str, *idx) -> Fraction:
        return self.family(fam).get(idx, ZERO)

    def items(self):
        for fam in FAMILIES:
            for key, v in self.family(fam).items():
                yield fam, key, v

    def objective(self) -> Fraction:
        return sum(self.n_vars.values(), ZERO) / (2 * self.n)

    def lp_multipliers(self) -> dict:
        """Multipliers keyed by reduced-LP constraint label (unscaled)."""
        scale = Fraction(1, 2 * self.n)
        return {label(fam, *key): v * scale for fam, key, v in self.items() if v}

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "vars": [
                {"family": fam, "idx": list(key), "v": format_rational(v)}
                for fam, key, v in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> DualCertificate:
        try:
            n = data["n"]
            tables = {fam: {} for fam in FAMILIES}
            for e in data["vars"]:
                fam = e["family"]
                if fam not in tables:
                    raise CertificateError(f"unknown family {fam!r}")
                key = tuple(e["idx"])
                if key in tables[fam]:
                    raise CertificateError(f"duplicate entry {fam}{key}")
                tables[fam][key] = parse_rational(e["v"])
            return cls(n, tables["n"], tables["s"], tables["y"], tables["z"])
        except RationalFormatError as exc:
            raise CertificateError(str(exc)) from exc
        except (KeyError, TypeError) as exc:
            raise CertificateError(f"malformed certificate JSON: {exc!r}") from exc

    def dumps(self) -> str:
        return dumps_records(self.to_json())

    @classmethod
    def loads(cls, text: str) -> DualCertificate:
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise CertificateError(f"invalid JSON: {exc}") from exc


class CertificateTable:
    """Collects certificate entries, refusing conflicting reassignments."""

    def __init__(self, n: int):
        self.n = n
        self.tables = {fam: {} for fam in FAMILIES}
        self.sources = {}

    def put(self, line: str, fam: str, *idx, value) -> None:
        *bits, j, k = idx
        key = (*bits, j % self.n, k % self.n)
        value = Fraction(value)
        if key in self.tables[fam]:
            if self.tables[fam][key] != value:
                raise CertificateCollision((fam, *key), self.sources[fam, key], (line, value))
            return
        self.tables[fam][key] = value
        self.sources[fam, key] = (line, value)

    def build(self) -> DualCertificate:
        t = self.tables
        return DualCertificate(self.n, t["n"], t["s"], t["y"], t["z"])


def closed_form_certificate(n: int) -> DualCertificate:
    """The explicit dual solution for cycle length ``n``.

    Each table line is applied over its index range with indices reduced
    mod n; empty ranges contribute nothing.  Entries that several lines
    assign must agree, otherwise :class:`CertificateCollision` is raised.
    Entries whose formula evaluates to zero are kept.
    """
    n = check_odd(n)
    table = CertificateTable(n)
    put = table.put

    def sign(k):
        return 1 if k % 2 == 0 else -1

    half = Fraction(1, 2)
    put("n(0,0) = 2n-1", "n", 0, 0, value=2 * n - 1)
    put("s(0,1|0,0) = 3n/2", "s", 0, 1, 0, 0, value=Fraction(3 * n, 2))
    put("s(0,1|1,0) = 1-n", "s", 0, 1, 1, 0, value=1 - n)
    put("s(0,0|0,1) = 1-n", "s", 0, 0, 0, 1, value=1 - n)
    put("s(0,1|1,1) = -n/2", "s", 0, 1, 1, 1, value=Fraction(-n, 2))
    for j in range(1, n):
        put("s(0,0|j,j+1) = (-1)^j", "s", 0, 0, j, j + 1, value=sign(j))
        put("s(0,1|j,j+1) = -(-1)^j", "s", 0, 1, j, j + 1, value=-sign(j))
    put("y(0|1,0) = 3-2n", "y", 0, 1, 0, value=3 - 2 * n)
    for k in range(1, n):
        put("y(0|1,k) = k-n+5/2+(-1)^k/2", "y", 0, 1, k, value=k - n + 5 * half + sign(k) * half)
    put("y(1|1,0) = 3-3n/2", "y", 1, 1, 0, value=3 - Fraction(3 * n, 2))
    put("y(1|1,1) = 4-n", "y", 1, 1, 1, value=4 - n)
    for j in range(2, n):
        put("y(1|j,1) = -(-1)^j", "y", 1, j, 1, value=-sign(j))
    for k in range(2, n - 1):
        put("y(1|1,k) = k-n+5/2+(-1)^k/2", "y", 1, 1, k, value=k - n + 5 * half + sign(k) * half)
    put("y(1|1,n-1) = 3-n", "y", 1, 1, n - 1, value=3 - n)
    for j in range(2, n):
        put("y(1|j,n-1) = 1-(-1)^j", "y", 1, j, n - 1, value=1 - sign(j))
    put("z(0|1,0) = n-3", "z", 0, 1, 0, value=n - 3)
    put("z(0|1,1) = 2n-3", "z", 0, 1, 1, value=2 * n - 3)
    put("z(0|1,2) = n-4", "z", 0, 1, 2, value=n - 4)
    for j in range(2, n):
        put("z(0|j,j-1) = -1", "z", 0, j, j - 1, value=-1)
        put("z(0|j,j+1) = (-1)^j", "z", 0, j, j + 1, value=sign(j))
    for k in range(3, n):
        put("z(0|1,k) = n-k-3/2+(-1)^k/2", "z", 0, 1, k, value=n - k - 3 * half + sign(k) * half)
    for j in range(1, n):
        put("z(1|j,j-1) = (-1)^j-1", "z", 1, j, j - 1, value=sign(j) - 1)
    for k in range(1, n):
        put("z(1|1,k) = n-k-3/2+(-1)^k/2", "z", 1, 1, k, value=n - k - 3 * half + sign(k) * half)
    return table.build()


def reduced_cost(cert: DualCertificate, b: int, c: int, j: int, k: int) -> Fraction:
    """Dual column of r(b,c|j,k) on the 2n scale.

    A variable r(b,c|.) enters the y rows with index d = b xor c, since each
    y row pairs r(0,d|.) with r(1,~d|.).
    """
    n = cert.n
    j, k = j % n, k % n
    d = b ^ c
    v = cert.get("n", j, k) + cert.get("s", b, c, j, k) - cert.get("s", c, b, k, j)
    if j == 0:
        for jp in range(1, n):
            v += cert.get("y", d, jp, k) + cert.get("z", c, jp, k)
    else:
        v -= cert.get("y", d, j, (k - j) % n) + cert.get("z", c, j, k)
    return v


def required_reduced_cost(n: int, b, c, j, k) -> int:
    return n if (b, c, j, k) in ((0, 0, 0, 0), (1, 1, 1, 1)) else 0


def expected_reduced_costs(n: int) -> dict:
    """Reduced costs the closed-form certificate is known to attain; every
    tuple not listed is 0."""
    table = {(0, 0, 0, 0): n, (1, 1, 1, 1): n, (0, 1, 0, 0): 2 * n, (1, 0, 0, 1): 2 * n - 2}
    for j in range(1, n):
        table[0, 0, j, j - 1] = 1 + (-1) ** j
    for k in range(1, n):
        table[1, 1, (k + 1) % n, k] = 1 + (-1) ** k
    return table


@dataclass(frozen=True)
class CertificateReport:
    n: int
    bound: Fraction | None
    violations: tuple = ()  # (b, c, j, k, reduced cost, required minimum)
    warnings: tuple = ()  # (b, c, j, k, reduced cost, expected value)

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> list[str]:
        lines = []
        for b, c, j, k, got, need in self.violations:
            lines.append(f"violation: reduced cost of {var_name(b, c, j, k)} is "
                         f"{format_rational(got)}, needs >= {need}")
        for b, c, j, k, got, want in self.warnings:
            lines.append(f"warning: reduced cost of {var_name(b, c, j, k)} is "
                         f"{format_rational(got)}, closed form gives {want}")
        return lines


def verify_certificate(cert: DualCertificate) -> CertificateReport:
    """Check dual feasibility of ``cert`` by direct arithmetic.

    The bound is returned only when every column condition holds.
    Departures from the known reduced-cost table are reported separately
    as warnings; they do not invalidate the bound.
    """
    n = cert.n
    expected = expected_reduced_costs(n)
    violations = []
    warnings = []
    for j in range(n):
        for k in range(n):
            for b in (0, 1):
                for c in (0, 1):
                    rc = reduced_cost(cert, b, c, j, k)
                    need = required_reduced_cost(n, b, c, j, k)
                    if rc < need:
                        violations.append((b, c, j, k, rc, need))
                    want = expected.get((b, c, j, k), 0)
                    if rc != want:
                        warnings.append((b, c, j, k, rc, want))
    bound = None if violations else cert.objective()
    return CertificateReport(n, bound, tuple(violations), tuple(warnings))
