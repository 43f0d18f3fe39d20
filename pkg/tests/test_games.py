import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_lp.errors import BudgetExceeded, GameError
from nonlocal_lp.games import (
    DeterministicStrategy,
    Game,
    classical_value,
    extend,
    make_chsh,
    make_chsh_triangle,
    make_odd_cycle,
    relabel,
)


def brute_force_value(game):
    """Max over every deterministic strategy profile, no shortcuts."""
    tables = [
        list(itertools.product(range(na), repeat=nq))
        for na, nq in zip(game.answer_sizes, game.question_sizes)
    ]
    return max(game.win_probability(DeterministicStrategy(t)) for t in itertools.product(*tables))


def test_chsh_payoffs_and_distribution():
    g = make_chsh()
    assert g.value((0, 0), (1, 1)) == 0
    assert g.value((0, 1), (1, 1)) == 1
    assert g.value((1, 1), (0, 1)) == 1
    assert g.prob((0, 1)) == Fraction(1, 4)
    assert g.players == 2 and len(g.pi) == 4


def test_chsh_triangle_payoffs():
    g = make_chsh_triangle()
    assert g.value((0, 0, 0), (0, 0, 0)) == 1
    assert g.value((0, 0, 1), (1, 1, 1)) == Fraction(1, 2)
    assert g.prob((1, 0, 1)) == Fraction(1, 8)
    assert set(g.payoff.values()) <= {Fraction(1, 2), Fraction(1)}


def test_odd_cycle():
    g = make_odd_cycle(3)
    assert g.prob((2, 0)) == Fraction(1, 6)
    assert g.value((1, 1), (0, 0)) == 1
    assert g.value((1, 1), (0, 1)) == 0
    assert len(g.pi) == 6
    g5 = make_odd_cycle(5)
    assert g5.prob((1, 3)) == 0
    assert len(g5.pi) == 10 and set(g5.pi.values()) == {Fraction(1, 10)}


@pytest.mark.parametrize("n", [4, 1, 2, -3])
def test_odd_cycle_rejects_bad_lengths(n):
    with pytest.raises(GameError):
        make_odd_cycle(n)


def test_extend_zero_is_identity():
    assert extend(make_chsh(), 0) == make_chsh()


def test_first_extension_of_odd_cycle():
    g = extend(make_odd_cycle(3), 1)
    assert g.players == 3
    assert g.value((0, 1, 1), (0, 1, 1)) == 1
    assert g.value((0, 1, 0), (0, 1, 1)) == 0
    assert g.value((1, 1, 1), (2, 2, 2)) == 1
    assert g.prob((0, 1, 1)) == Fraction(1, 6)
    assert g.prob((0, 1, 2)) == 0
    assert len(g.pi) == 6


def test_extend_rejects_non_two_player():
    with pytest.raises(GameError):
        extend(make_chsh_triangle(), 1)


def test_game_invariants_enforced():
    with pytest.raises(GameError):
        Game("bad", (2,), (2,), {(0,): Fraction(1, 2)}, {})
    with pytest.raises(GameError):
        Game("bad", (2,), (2,), {(0,): 1}, {((0,), (0,)): Fraction(3, 2)})
    with pytest.raises(GameError):
        Game("bad", (2,), (2,), {(2,): 1}, {})


@pytest.mark.parametrize("game,value", [
    (make_chsh(), Fraction(3, 4)),
    (make_odd_cycle(3), Fraction(5, 6)),
    (make_odd_cycle(5), Fraction(9, 10)),
    (make_chsh_triangle(), Fraction(3, 4)),
])
def test_classical_values(game, value):
    v, strategy = classical_value(game)
    assert v == value
    assert strategy.fits(game)
    assert game.win_probability(strategy) == v


@pytest.mark.parametrize("game", [make_chsh(), make_chsh_triangle(), make_odd_cycle(3),
                                  extend(make_chsh(), 1), extend(make_odd_cycle(3), 1)])
def test_classical_value_matches_full_enumeration(game):
    assert classical_value(game)[0] == brute_force_value(game)


def test_first_optimal_strategy_is_returned():
    # everyone answering 0 is optimal for CHSH and comes first
    assert classical_value(make_chsh())[1].tables == ((0, 0), (0, 0))


@pytest.mark.parametrize("base", [make_chsh, lambda: make_odd_cycle(3)])
@pytest.mark.parametrize("copies", [0, 1, 2])
def test_extension_keeps_classical_value(base, copies):
    g = base()
    assert classical_value(extend(g, copies))[0] == classical_value(g)[0]


def test_budget_is_a_refusal():
    g = extend(make_odd_cycle(5), 1)  # 2**15 strategies
    with pytest.raises(BudgetExceeded):
        classical_value(g, budget=2**15 - 1)
    assert classical_value(g, budget=2**15)[0] == Fraction(9, 10)


def test_all_ones_game_has_value_one():
    q = list(itertools.product(range(2), range(3)))
    pi = {x: Fraction(1, len(q)) for x in q}
    payoff = {(a, x): 1 for x in q for a in itertools.product(range(2), repeat=2)}
    assert classical_value(Game("ones", (2, 3), (2, 2), pi, payoff))[0] == 1


@st.composite
def small_games(draw):
    m = draw(st.integers(1, 3))
    qs = tuple(draw(st.integers(1, 2)) for _ in range(m))
    as_ = tuple(draw(st.integers(1, 2)) for _ in range(m))
    questions = list(itertools.product(*(range(n) for n in qs)))
    weights = [draw(st.integers(0, 3)) for _ in questions]
    if not any(weights):
        weights[0] = 1
    total = sum(weights)
    pi = {q: Fraction(w, total) for q, w in zip(questions, weights)}
    payoff = {}
    for q in questions:
        for a in itertools.product(*(range(n) for n in as_)):
            payoff[a, q] = Fraction(draw(st.integers(0, 2)), 2)
    return Game("random", qs, as_, pi, payoff)


@settings(max_examples=40, deadline=None)
@given(small_games(), st.randoms(use_true_random=False))
def test_classical_value_relabeling_invariant(game, rnd):
    v = classical_value(game)[0]
    assert 0 <= v <= 1
    assert v == brute_force_value(game)
    for player in range(game.players):
        qp = list(range(game.question_sizes[player]))
        ap = list(range(game.answer_sizes[player]))
        rnd.shuffle(qp)
        rnd.shuffle(ap)
        assert classical_value(relabel(game, player, qp, ap))[0] == v


def test_game_json_round_trip():
    for g in [make_chsh(), make_chsh_triangle(), extend(make_odd_cycle(3), 2)]:
        assert Game.loads(g.dumps()) == g


def test_game_json_rejects_unnormalized_pi():
    data = make_chsh().to_json()
    data["pi"][0]["p"] = "1/2"
    with pytest.raises(GameError):
        Game.from_json(data)
    data = make_chsh().to_json()
    data["pi"][0]["p"] = "2/8"
    with pytest.raises(GameError):
        Game.from_json(data)
    data = make_chsh().to_json()
    del data["V"]
    with pytest.raises(GameError):
        Game.from_json(data)


def test_json_entries_are_sparse_and_exact():
    data = make_odd_cycle(3).to_json()
    assert [e["p"] for e in data["pi"]] == ["1/6"] * 6
    assert all(e["v"] == "1" for e in data["V"])
