"""Nonlocal games: data model, built-in games, extensions, classical values.

Joint questions and joint answers are tuples with one entry per player.
Both are enumerated row-major with player 1 varying slowest; that order
is shared with the LP builder so variable indices are reproducible.
"""

from __future__ import annotations

import itertools
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded, GameError
from .rational import as_rational, dumps_records, format_rational, parse_rational

DEFAULT_STRATEGY_BUDGET = 2**25

ONE = Fraction(1)


@dataclass(frozen=True)
class Game:
    """An m-player game: question distribution ``pi`` and payoff ``payoff``.

    ``pi`` maps joint question tuples to probabilities and ``payoff`` maps
    ``(answers, questions)`` pairs to values in [0, 1].  Both are sparse:
    absent keys mean zero, and zero entries are dropped on construction.
    """

    name: str
    question_sizes: tuple
    answer_sizes: tuple
    pi: Mapping
    payoff: Mapping

    def __post_init__(self):
        qs = tuple(int(n) for n in self.question_sizes)
        as_ = tuple(int(n) for n in self.answer_sizes)
        object.__setattr__(self, "question_sizes", qs)
        object.__setattr__(self, "answer_sizes", as_)
        pi = {tuple(q): as_rational(p) for q, p in self.pi.items()}
        payoff = {(tuple(a), tuple(q)): as_rational(v) for (a, q), v in self.payoff.items()}
        object.__setattr__(self, "pi", {q: p for q, p in sorted(pi.items()) if p})
        object.__setattr__(self, "payoff", {k: v for k, v in sorted(payoff.items()) if v})
        self.validate()

    @property
    def players(self) -> int:
        return len(self.question_sizes)

    def validate(self) -> None:
        m = len(self.question_sizes)
        if m < 1:
            raise GameError("a game needs at least one player")
        if len(self.answer_sizes) != m:
            raise GameError("question_sizes and answer_sizes differ in length")
        if any(n < 1 for n in self.question_sizes + self.answer_sizes):
            raise GameError("alphabet sizes must be positive")
        for q, p in self.pi.items():
            self._check_tuple(q, self.question_sizes, "question")
            if p < 0:
                raise GameError(f"negative probability {format_rational(p)} at {q}")
        total = sum(self.pi.values(), Fraction(0))
        if total != 1:
            raise GameError(f"question distribution sums to {format_rational(total)}, not 1")
        for (a, q), v in self.payoff.items():
            self._check_tuple(a, self.answer_sizes, "answer")
            self._check_tuple(q, self.question_sizes, "question")
            if not 0 <= v <= 1:
                raise GameError(f"payoff {format_rational(v)} outside [0, 1] at a={a}, q={q}")

    @staticmethod
    def _check_tuple(t, sizes, what):
        if len(t) != len(sizes) or any(not 0 <= x < n for x, n in zip(t, sizes)):
            raise GameError(f"{what} tuple {t} does not fit alphabet sizes {sizes}")

    def prob(self, q) -> Fraction:
        return self.pi.get(tuple(q), Fraction(0))

    def value(self, a, q) -> Fraction:
        return self.payoff.get((tuple(a), tuple(q)), Fraction(0))

    def questions(self):
        return itertools.product(*(range(n) for n in self.question_sizes))

    def answers(self):
        return itertools.product(*(range(n) for n in self.answer_sizes))

    def strategy_count(self) -> int:
        return math.prod(a**q for a, q in zip(self.answer_sizes, self.question_sizes))

    def win_probability(self, strategy: DeterministicStrategy) -> Fraction:
        total = Fraction(0)
        for q, p in self.pi.items():
            total += p * self.value(strategy.answers(q), q)
        return total

    # --- JSON -----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "players": self.players,
            "questions": list(self.question_sizes),
            "answers": list(self.answer_sizes),
            "pi": [{"q": list(q), "p": format_rational(p)} for q, p in self.pi.items()],
            "V": [
                {"q": list(q), "a": list(a), "v": format_rational(v)}
                for (a, q), v in self.payoff.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> Game:
        try:
            m = data["players"]
            questions = data["questions"]
            answers = data["answers"]
            if len(questions) != m or len(answers) != m:
                raise GameError("'players' disagrees with alphabet lists")
            pi = {}
            for entry in data["pi"]:
                q = tuple(entry["q"])
                if q in pi:
                    raise GameError(f"duplicate pi entry for {q}")
                pi[q] = parse_rational(entry["p"])
            payoff = {}
            for entry in data["V"]:
                key = (tuple(entry["a"]), tuple(entry["q"]))
                if key in payoff:
                    raise GameError(f"duplicate V entry for a={key[0]}, q={key[1]}")
                payoff[key] = parse_rational(entry["v"])
            return cls(data["name"], tuple(questions), tuple(answers), pi, payoff)
        except (KeyError, TypeError) as exc:
            raise GameError(f"malformed game JSON: {exc!r}") from exc
        except ValueError as exc:
            if isinstance(exc, GameError):
                raise
            raise GameError(str(exc)) from exc

    def dumps(self) -> str:
        return dumps_records(self.to_json())

    @classmethod
    def loads(cls, text: str) -> Game:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GameError(f"invalid JSON: {exc}") from exc
        return cls.from_json(data)


@dataclass(frozen=True)
class DeterministicStrategy:
    """One answer table per player: ``tables[i][q_i]`` is player i's answer."""

    tables: tuple

    def answers(self, q) -> tuple:
        return tuple(t[x] for t, x in zip(self.tables, q))

    def fits(self, game: Game) -> bool:
        return len(self.tables) == game.players and all(
            len(t) == nq and all(0 <= a < na for a in t)
            for t, nq, na in zip(self.tables, game.question_sizes, game.answer_sizes)
        )


# --- built-in games ------------------------------------------------------


def make_chsh() -> Game:
    pi = {}
    payoff = {}
    for q in itertools.product(range(2), repeat=2):
        pi[q] = Fraction(1, 4)
        for a in itertools.product(range(2), repeat=2):
            if a[0] ^ a[1] == q[0] & q[1]:
                payoff[a, q] = ONE
    return Game("chsh", (2, 2), (2, 2), pi, payoff)


def make_chsh_triangle() -> Game:
    """Three-player CHSH: A plays CHSH against B or C with probability 1/2 each."""
    half = Fraction(1, 2)
    pi = {}
    payoff = {}
    for q in itertools.product(range(2), repeat=3):
        pi[q] = Fraction(1, 8)
        for a in itertools.product(range(2), repeat=3):
            v = half * (a[0] ^ a[1] == q[0] & q[1]) + half * (a[0] ^ a[2] == q[0] & q[2])
            payoff[a, q] = v
    return Game("chsh3", (2, 2, 2), (2, 2, 2), pi, payoff)


def make_odd_cycle(n: int) -> Game:
    if not isinstance(n, int) or n < 3 or n % 2 == 0:
        raise GameError(f"odd cycle length must be an odd integer >= 3, got {n!r}")
    w = Fraction(1, 2 * n)
    pi = {}
    payoff = {}
    for q in range(n):
        pi[q, q] = w
        pi[q, (q + 1) % n] = w
        for a in itertools.product(range(2), repeat=2):
            if a[0] == a[1]:
                payoff[a, (q, q)] = ONE
            else:
                payoff[a, (q, (q + 1) % n)] = ONE
    return Game(f"oddcycle{n}", (n, n), (2, 2), pi, payoff)


def extend(game: Game, copies: int) -> Game:
    """Add ``copies`` clones of player 2 who receive player 2's question and
    must all give player 2's answer.  ``extend(g, 0)`` is ``g`` itself."""
    if game.players != 2:
        raise GameError(f"only two-player games can be extended, got {game.players} players")
    if copies < 0:
        raise GameError("number of extra players must be non-negative")
    if copies == 0:
        return game
    nq1, nq2 = game.question_sizes
    na1, na2 = game.answer_sizes
    pi = {(q1, q2) + (q2,) * copies: p for (q1, q2), p in game.pi.items()}
    payoff = {}
    # the clones' questions do not enter the payoff
    for (a, q), v in game.payoff.items():
        for rest in itertools.product(range(nq2), repeat=copies):
            payoff[a + (a[1],) * copies, q + rest] = v
    return Game(
        f"{game.name}+ext{copies}",
        (nq1,) + (nq2,) * (copies + 1),
        (na1,) + (na2,) * (copies + 1),
        pi,
        payoff,
    )


# --- classical value -----------------------------------------------------


def classical_value(game: Game, budget: int = DEFAULT_STRATEGY_BUDGET):
    """Exact classical value by enumerating deterministic strategies.

    Returns ``(value, strategy)``.  The search runs over the strategies of
    players 2..m; player 1's table is then a per-question best response,
    which is exact because the winning probability is separable in player
    1's answers once the others are fixed.  Among optimal strategies the
    first in enumeration order (player 1's table varying fastest, answers
    ascending) is returned.

    Refuses with :class:`BudgetExceeded` when the total number of
    deterministic strategies exceeds ``budget``.
    """
    count = game.strategy_count()
    if count > budget:
        raise BudgetExceeded(
            f"{count} deterministic strategies exceed the enumeration budget of {budget}"
        )
    nq0, na0 = game.question_sizes[0], game.answer_sizes[0]

    support = []  # (q0, rest questions, {rest answers: [pi(q) V(a|q) for each a0]})
    for q, p in game.pi.items():
        table = {}
        for rest_a in itertools.product(*(range(n) for n in game.answer_sizes[1:])):
            weights = [p * game.value((a0,) + rest_a, q) for a0 in range(na0)]
            if any(weights):
                table[rest_a] = weights
        if table:
            support.append((q[0], q[1:], table))
    # rescale to integers so the search loop avoids Fraction arithmetic
    scale = math.lcm(1, *(w.denominator for _, _, t in support for ws in t.values() for w in ws))
    for _, _, table in support:
        for key, ws in table.items():
            table[key] = [int(w * scale) for w in ws]

    rest_tables = [
        list(itertools.product(range(na), repeat=nq))
        for na, nq in zip(game.answer_sizes[1:], game.question_sizes[1:])
    ]
    best = -1
    best_tables = None
    zero = [0] * na0
    for profile in itertools.product(*rest_tables):
        scores = [[0] * na0 for _ in range(nq0)]
        for q0, rest_q, table in support:
            weights = table.get(tuple(t[x] for t, x in zip(profile, rest_q)), zero)
            row = scores[q0]
            for a0, w in enumerate(weights):
                row[a0] += w
        total = sum(max(row) for row in scores)
        if total > best:
            best = total
            response = tuple(row.index(max(row)) for row in scores)
            best_tables = (response,) + tuple(profile)
    return Fraction(best, scale), DeterministicStrategy(best_tables)


def relabel(game: Game, player: int, question_perm=None, answer_perm=None) -> Game:
    """Rename one player's questions and/or answers by permutations."""
    qp = question_perm or list(range(game.question_sizes[player]))
    ap = answer_perm or list(range(game.answer_sizes[player]))

    def sub(t, perm):
        t = list(t)
        t[player] = perm[t[player]]
        return tuple(t)

    pi = {sub(q, qp): p for q, p in game.pi.items()}
    payoff = {(sub(a, ap), sub(q, qp)): v for (a, q), v in game.payoff.items()}
    return Game(game.name, game.question_sizes, game.answer_sizes, pi, payoff)
