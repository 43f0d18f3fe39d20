"""No-signaling behaviors, the no-signaling LP of a game, and CHSH tradeoffs.

LP variable layout: one variable per cell ``p(a|q)``, indexed
``question_index * num_answer_tuples + answer_index`` with both indices
row-major in player order, so answers vary fastest.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded
from .games import Game
from .lp import LinearProgram, LpBuilder, LpStatus, solve
from .rational import RationalFormatError, as_rational, dumps_records, format_rational, parse_rational

DEFAULT_LP_BUDGET = 4096  # LP variables

ZERO = Fraction(0)


def _tuples(sizes):
    return list(itertools.product(*(range(n) for n in sizes)))


def _fmt(t) -> str:
    return ",".join(map(str, t))


def cell_name(a, q) -> str:
    return f"p({_fmt(a)}|{_fmt(q)})"


class BehaviorError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    """First failed condition found by :func:`validate_behavior`.

    For no-signaling failures, ``parties`` is the set S whose questions
    change the marginal of the complementary parties; ``answers`` and
    ``questions`` fix the complement, and ``settings`` are the two
    question assignments to S whose marginals differ.
    """

    kind: str
    parties: tuple = ()
    answers: tuple = ()
    questions: tuple = ()
    settings: tuple = ()
    values: tuple = ()

    def __str__(self):
        if self.kind == "no-signaling":
            vals = " vs ".join(format_rational(v) for v in self.values)
            return (
                f"no-signaling violated for S={set(i + 1 for i in self.parties)}: marginal of "
                f"answers {self.answers} at questions {self.questions} is {vals} "
                f"under S-questions {self.settings[0]} / {self.settings[1]}"
            )
        vals = ", ".join(format_rational(v) for v in self.values)
        return f"{self.kind} violated at questions {self.questions} answers {self.answers}: {vals}"


@dataclass(frozen=True)
class Behavior:
    """A conditional distribution ``p(answers | questions)`` over all cells."""

    question_sizes: tuple
    answer_sizes: tuple
    table: dict

    def __post_init__(self):
        object.__setattr__(self, "question_sizes", tuple(self.question_sizes))
        object.__setattr__(self, "answer_sizes", tuple(self.answer_sizes))
        table = {(tuple(a), tuple(q)): as_rational(v) for (a, q), v in self.table.items()}
        missing = [
            (a, q)
            for q in _tuples(self.question_sizes)
            for a in _tuples(self.answer_sizes)
            if (a, q) not in table
        ]
        if missing:
            raise BehaviorError(f"behavior table incomplete: {len(missing)} cells missing, e.g. {missing[0]}")
        if len(table) != math.prod(self.question_sizes) * math.prod(self.answer_sizes):
            raise BehaviorError("behavior table has cells outside the alphabets")
        object.__setattr__(self, "table", dict(sorted(table.items(), key=lambda kv: (kv[0][1], kv[0][0]))))

    @property
    def players(self) -> int:
        return len(self.question_sizes)

    def __call__(self, a, q) -> Fraction:
        return self.table[tuple(a), tuple(q)]

    @classmethod
    def from_function(cls, question_sizes, answer_sizes, fn) -> Behavior:
        table = {
            (a, q): fn(a, q) for q in _tuples(question_sizes) for a in _tuples(answer_sizes)
        }
        return cls(question_sizes, answer_sizes, table)

    @classmethod
    def uniform(cls, question_sizes, answer_sizes) -> Behavior:
        w = Fraction(1, math.prod(answer_sizes))
        return cls.from_function(question_sizes, answer_sizes, lambda a, q: w)

    @classmethod
    def deterministic(cls, strategy, question_sizes, answer_sizes) -> Behavior:
        return cls.from_function(
            question_sizes, answer_sizes,
            lambda a, q: Fraction(int(strategy.answers(q) == a)),
        )

    def marginal(self, keep, a_keep, q) -> Fraction:
        """Marginal probability that parties ``keep`` answer ``a_keep`` when
        the full question tuple is ``q``."""
        total = ZERO
        for a in _tuples(self.answer_sizes):
            if all(a[i] == x for i, x in zip(keep, a_keep)):
                total += self.table[a, q]
        return total

    def win_probability(self, game: Game) -> Fraction:
        return sum((p * game.value(a, q) * self.table[a, q]
                    for q, p in game.pi.items() for a in _tuples(self.answer_sizes)), ZERO)

    def to_json(self) -> dict:
        return {
            "questions": list(self.question_sizes),
            "answers": list(self.answer_sizes),
            "p": [
                {"a": list(a), "q": list(q), "v": format_rational(v)}
                for (a, q), v in self.table.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> Behavior:
        try:
            table = {}
            for e in data["p"]:
                key = (tuple(e["a"]), tuple(e["q"]))
                if key in table:
                    raise BehaviorError(f"duplicate cell {key}")
                table[key] = parse_rational(e["v"])
            return cls(tuple(data["questions"]), tuple(data["answers"]), table)
        except RationalFormatError as exc:
            raise BehaviorError(str(exc)) from exc
        except (KeyError, TypeError) as exc:
            raise BehaviorError(f"malformed behavior JSON: {exc!r}") from exc

    def dumps(self) -> str:
        return dumps_records(self.to_json())

    @classmethod
    def loads(cls, text: str) -> Behavior:
        return cls.from_json(json.loads(text))


def validate_behavior(b: Behavior) -> Violation | None:
    """Check positivity, normalization and no-signaling for every subset.

    Returns ``None`` when the behavior is valid, otherwise the first
    violation found (parties in S are reported 0-based in ``parties``).
    """
    qs, as_ = b.question_sizes, b.answer_sizes
    m = len(qs)
    for (a, q), v in b.table.items():
        if v < 0:
            return Violation("positivity", answers=a, questions=q, values=(v,))
    for q in _tuples(qs):
        total = sum((b.table[a, q] for a in _tuples(as_)), ZERO)
        if total != 1:
            return Violation("normalization", questions=q, values=(total,))
    for size in range(1, m):
        for S in itertools.combinations(range(m), size):
            rest = [i for i in range(m) if i not in S]
            s_settings = _tuples([qs[i] for i in S])
            for q_rest in _tuples([qs[i] for i in rest]):
                for a_rest in _tuples([as_[i] for i in rest]):
                    ref = None
                    for setting in s_settings:
                        q = [0] * m
                        for i, x in zip(rest, q_rest):
                            q[i] = x
                        for i, x in zip(S, setting):
                            q[i] = x
                        val = b.marginal(rest, a_rest, tuple(q))
                        if ref is None:
                            ref = (setting, val)
                        elif val != ref[1]:
                            return Violation(
                                "no-signaling", parties=S, answers=a_rest, questions=q_rest,
                                settings=(ref[0], setting), values=(ref[1], val),
                            )
    return None


# --- the no-signaling linear program ---------------------------------------


def ns_builder(question_sizes, answer_sizes) -> LpBuilder:
    """Variables, normalization and single-party no-signaling constraints.

    For each party i, each fixed answers/questions of the others and each
    pair of questions for i, the marginal over a_i must agree.
    """
    qs = tuple(question_sizes)
    as_ = tuple(answer_sizes)
    m = len(qs)
    questions = _tuples(qs)
    answers = _tuples(as_)
    builder = LpBuilder()
    for q in questions:
        for a in answers:
            builder.add_var((a, q), cell_name(a, q))
    for q in questions:
        builder.add_constraint((((a, q), 1) for a in answers), "=", 1, f"norm|q={_fmt(q)}")
    for i in range(m):
        others = [j for j in range(m) if j != i]
        for q_rest in _tuples([qs[j] for j in others]):
            for a_rest in _tuples([as_[j] for j in others]):
                for x, x2 in itertools.combinations(range(qs[i]), 2):
                    terms = []
                    for ai in range(as_[i]):
                        a = _insert(a_rest, i, ai)
                        terms.append(((a, _insert(q_rest, i, x)), 1))
                        terms.append(((a, _insert(q_rest, i, x2)), -1))
                    label = f"ns|party={i + 1}|a={_fmt(a_rest)}|q={_fmt(q_rest)}|{x},{x2}"
                    builder.add_constraint(terms, "=", 0, label)
    return builder


def _insert(t, i, x):
    return tuple(t[:i]) + (x,) + tuple(t[i:])


def build_ns_lp(game: Game) -> LinearProgram:
    builder = ns_builder(game.question_sizes, game.answer_sizes)
    for (a, q), v in game.payoff.items():
        p = game.prob(q)
        if p:
            builder.set_objective((a, q), p * v)
    return builder.build()


def behavior_from_primal(lp: LinearProgram, primal, question_sizes, answer_sizes) -> Behavior:
    answers = _tuples(answer_sizes)
    questions = _tuples(question_sizes)
    table = {}
    k = 0
    for q in questions:
        for a in answers:
            table[a, q] = primal[k]
            k += 1
    return Behavior(question_sizes, answer_sizes, table)


def _check_budget(num_vars, budget):
    if num_vars > budget:
        raise BudgetExceeded(f"LP with {num_vars} variables exceeds the budget of {budget}")


def ns_solve(game: Game, budget: int = DEFAULT_LP_BUDGET):
    """Solve the no-signaling LP; returns ``(lp, solution)``."""
    _check_budget(math.prod(game.question_sizes) * math.prod(game.answer_sizes), budget)
    lp = build_ns_lp(game)
    sol = solve(lp)
    if sol.status is not LpStatus.OPTIMAL:
        raise ArithmeticError(f"no-signaling LP reported {sol.status.value}")
    return lp, sol


def ns_value(game: Game, budget: int = DEFAULT_LP_BUDGET):
    """Exact no-signaling value and an optimal behavior."""
    lp, sol = ns_solve(game, budget)
    behavior = behavior_from_primal(lp, sol.primal, game.question_sizes, game.answer_sizes)
    return sol.value, behavior


# --- CHSH expectations -----------------------------------------------------


def chsh_coefficient(a_x, a_y, q_x, q_y) -> int:
    """Sign of p(a_x, a_y | q_x, q_y) in the CHSH expectation."""
    return (-1) ** (q_x & q_y) * (-1) ** (a_x ^ a_y)


def chsh_expectation(b: Behavior, party_x: int, party_y: int) -> Fraction:
    """CHSH expectation of the two-party marginal of ``b`` (parties 0-based).

    The marginal is read with the other parties' questions at 0, after
    checking that it is the same for every setting of those questions.
    """
    m = b.players
    if party_x == party_y or not (0 <= party_x < m and 0 <= party_y < m):
        raise ValueError(f"invalid party pair ({party_x}, {party_y})")
    for i in (party_x, party_y):
        if b.question_sizes[i] < 2 or b.answer_sizes[i] != 2:
            raise ValueError(f"party {i} needs at least 2 questions and binary answers")
    keep = (party_x, party_y)
    others = [i for i in range(m) if i not in keep]
    total = ZERO
    for qx, qy in itertools.product(range(2), repeat=2):
        for ax, ay in itertools.product(range(2), repeat=2):
            values = set()
            for q_rest in _tuples([b.question_sizes[i] for i in others]):
                q = [0] * m
                q[party_x], q[party_y] = qx, qy
                for i, x in zip(others, q_rest):
                    q[i] = x
                values.add(b.marginal(keep, (ax, ay), tuple(q)))
            if len(values) != 1:
                raise BehaviorError(
                    f"marginal of parties {keep} depends on the other parties' questions"
                )
            total += chsh_coefficient(ax, ay, qx, qy) * values.pop()
    return total


@dataclass(frozen=True)
class FrontierPoint:
    weights: tuple
    optimum: Fraction
    behavior: Behavior
    expectations: tuple  # (<B_AB>, <B_AC>) at the optimizer


def chsh_tradeoff_max(alpha, beta) -> FrontierPoint:
    """Maximize alpha <B_AB> + beta <B_AC> over three-party no-signaling
    behaviors with two questions and two answers per party."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    if not alpha and not beta:
        raise ValueError("weight pair must be nonzero")
    sizes = (2, 2, 2)
    builder = ns_builder(sizes, sizes)
    # correlators read at the third party's question 0
    coeffs = {}
    for a in _tuples(sizes):
        for qa, qb in itertools.product(range(2), repeat=2):
            coeffs[a, (qa, qb, 0)] = coeffs.get((a, (qa, qb, 0)), ZERO) + alpha * chsh_coefficient(a[0], a[1], qa, qb)
            coeffs[a, (qa, 0, qb)] = coeffs.get((a, (qa, 0, qb)), ZERO) + beta * chsh_coefficient(a[0], a[2], qa, qb)
    for key, c in coeffs.items():
        if c:
            builder.set_objective(key, c)
    lp = builder.build()
    sol = solve(lp)
    if sol.status is not LpStatus.OPTIMAL:
        raise ArithmeticError(f"tradeoff LP reported {sol.status.value}")
    behavior = behavior_from_primal(lp, sol.primal, sizes, sizes)
    ab = chsh_expectation(behavior, 0, 1)
    ac = chsh_expectation(behavior, 0, 2)
    if alpha * ab + beta * ac != sol.value:
        raise ArithmeticError("optimizer does not reproduce the LP optimum")
    return FrontierPoint((alpha, beta), sol.value, behavior, (ab, ac))


FRONTIER_DIRECTIONS = (
    (1, 0), (2, 1), (1, 1), (1, 2), (0, 1),
    (-1, 2), (-1, 1), (-2, 1), (-1, 0), (-2, -1), (-1, -1),
    (-1, -2), (0, -1), (1, -2), (1, -1), (2, -1), (3, 2), (Fraction(1, 3), 1),
)


def pr_box() -> Behavior:
    half = Fraction(1, 2)
    return Behavior.from_function(
        (2, 2), (2, 2), lambda a, q: half if a[0] ^ a[1] == q[0] & q[1] else ZERO
    )

