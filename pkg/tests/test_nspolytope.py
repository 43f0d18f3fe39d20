import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_lp.games import (
    DeterministicStrategy,
    classical_value,
    extend,
    make_chsh,
    make_chsh_triangle,
    make_odd_cycle,
)
from nonlocal_lp.lp import Relation
from nonlocal_lp.nspolytope import (
    FRONTIER_DIRECTIONS,
    Behavior,
    BehaviorError,
    build_ns_lp,
    chsh_expectation,
    chsh_tradeoff_max,
    ns_value,
    pr_box,
    validate_behavior,
)
from nonlocal_lp.errors import BudgetExceeded

HALF = Fraction(1, 2)


def test_lp_sizes():
    lp = build_ns_lp(make_chsh())
    assert lp.num_vars == 16
    assert sum(1 for c in lp.constraints if c.label.startswith("norm")) == 4
    assert all(c.relation is Relation.EQ for c in lp.constraints)
    assert lp.nonneg_vars == frozenset(range(16))
    assert build_ns_lp(make_chsh_triangle()).num_vars == 64
    assert build_ns_lp(extend(make_odd_cycle(3), 1)).num_vars == 216


def test_variable_layout_answers_fastest():
    lp = build_ns_lp(make_chsh())
    assert lp.var_name(0) == "p(0,0|0,0)"
    assert lp.var_name(1) == "p(0,1|0,0)"
    assert lp.var_name(4) == "p(0,0|0,1)"
    # objective: pi * V = 1/4 on winning cells
    assert lp.objective[0] == Fraction(1, 4) and lp.objective[1] == 0


@pytest.mark.parametrize("game,value", [
    (make_chsh(), Fraction(1)),
    (make_chsh_triangle(), Fraction(3, 4)),
    (extend(make_chsh(), 1), Fraction(3, 4)),
])
def test_ns_values(game, value):
    v, behavior = ns_value(game)
    assert v == value
    assert validate_behavior(behavior) is None
    assert behavior.win_probability(game) == v


@pytest.mark.slow
def test_extension_monotone_for_chsh():
    values = [ns_value(extend(make_chsh(), n))[0] for n in range(3)]
    assert values == sorted(values, reverse=True)
    assert values == [1, Fraction(3, 4), Fraction(3, 4)]


@pytest.mark.parametrize("game", [make_chsh(), make_odd_cycle(3), make_chsh_triangle(), make_odd_cycle(5)])
def test_ns_at_least_classical(game):
    assert ns_value(game)[0] >= classical_value(game)[0]


def test_ns_budget():
    with pytest.raises(BudgetExceeded):
        ns_value(extend(make_odd_cycle(3), 1), budget=215)


def test_uniform_and_pr_box_are_valid():
    assert validate_behavior(Behavior.uniform((2, 2, 2), (2, 2, 2))) is None
    assert validate_behavior(pr_box()) is None
    assert pr_box().win_probability(make_chsh()) == 1


def test_perturbed_table_signals_from_player_one():
    table = dict(Behavior.uniform((2, 2), (2, 2)).table)
    table[(0, 0), (0, 0)] += Fraction(1, 8)
    table[(0, 1), (0, 0)] -= Fraction(1, 8)
    v = validate_behavior(Behavior((2, 2), (2, 2), table))
    assert v.kind == "no-signaling"
    # player 2's marginal p(a2=0) is 5/8 when player 1 is asked 0, 1/2 when asked 1
    assert v.parties == (0,)
    assert v.answers == (0,) and v.questions == (0,)
    assert v.settings == ((0,), (1,))
    assert v.values == (Fraction(5, 8), Fraction(1, 2))
    assert "S={1}" in str(v)


def test_positivity_and_normalization_failures():
    table = dict(Behavior.uniform((2,), (2,)).table)
    table[(0,), (0,)] = Fraction(-1, 4)
    table[(1,), (0,)] = Fraction(5, 4)
    assert validate_behavior(Behavior((2,), (2,), table)).kind == "positivity"
    table[(0,), (0,)] = Fraction(1, 4)
    assert validate_behavior(Behavior((2,), (2,), table)).kind == "normalization"


@given(st.lists(st.integers(0, 1), min_size=6, max_size=6))
def test_local_deterministic_boxes_pass(bits):
    strategy = DeterministicStrategy((tuple(bits[:2]), tuple(bits[2:4]), tuple(bits[4:])))
    assert validate_behavior(Behavior.deterministic(strategy, (2, 2, 2), (2, 2, 2))) is None


def test_copying_a_question_is_signaling():
    # player 3 outputs player 1's question
    b = Behavior.from_function(
        (2, 2, 2), (2, 2, 2),
        lambda a, q: Fraction(int(a == (0, 0, q[0]))),
    )
    v = validate_behavior(b)
    assert v.kind == "no-signaling" and v.parties == (0,)


def test_incomplete_table_rejected():
    table = dict(pr_box().table)
    del table[(0, 0), (0, 0)]
    with pytest.raises(BehaviorError):
        Behavior((2, 2), (2, 2), table)


def test_chsh_expectations():
    assert chsh_expectation(pr_box(), 0, 1) == 4
    assert chsh_expectation(Behavior.uniform((2, 2), (2, 2)), 0, 1) == 0
    zeros = Behavior.deterministic(DeterministicStrategy(((0, 0), (0, 0))), (2, 2), (2, 2))
    assert chsh_expectation(zeros, 0, 1) == 2


def test_chsh_expectation_requires_no_signaling_marginal():
    b = Behavior.from_function(
        (2, 2, 2), (2, 2, 2),
        lambda a, q: Fraction(int(a == (q[2], q[2], 0))),
    )
    with pytest.raises(BehaviorError):
        chsh_expectation(b, 0, 1)


@given(st.tuples(*[st.integers(0, 1)] * 4))
def test_win_probability_maps_to_chsh_expectation(tables):
    strategy = DeterministicStrategy((tables[:2], tables[2:]))
    b = Behavior.deterministic(strategy, (2, 2), (2, 2))
    assert make_chsh().win_probability(strategy) == HALF + chsh_expectation(b, 0, 1) / 8


def _pr_variant(x, y, z):
    return Behavior.from_function(
        (2, 2), (2, 2),
        lambda a, q: HALF if a[0] ^ a[1] == (q[0] & q[1]) ^ (x & q[0]) ^ (y & q[1]) ^ z else Fraction(0),
    )


@st.composite
def ns_mixtures(draw):
    """Convex mixtures of PR-box relabelings and local deterministic boxes."""
    parts = [_pr_variant(*bits) for bits in itertools.product(range(2), repeat=3)]
    parts += [
        Behavior.deterministic(DeterministicStrategy((t[:2], t[2:])), (2, 2), (2, 2))
        for t in itertools.product(range(2), repeat=4)
    ]
    weights = [draw(st.integers(0, 4)) for _ in parts]
    if not any(weights):
        weights[0] = 1
    total = sum(weights)
    table = {k: sum(Fraction(w, total) * p.table[k] for w, p in zip(weights, parts)) for k in parts[0].table}
    return Behavior((2, 2), (2, 2), table)


@settings(max_examples=25, deadline=None)
@given(ns_mixtures())
def test_chsh_expectation_bounded_on_no_signaling_boxes(b):
    assert validate_behavior(b) is None
    assert -4 <= chsh_expectation(b, 0, 1) <= 4


@pytest.mark.parametrize("weights", [(1, 1), (1, 0), (1, -1)])
def test_tradeoff_examples(weights):
    point = chsh_tradeoff_max(*weights)
    assert point.optimum == 4
    ab, ac = point.expectations
    assert weights[0] * ab + weights[1] * ac == 4
    assert abs(ab) + abs(ac) <= 4
    assert validate_behavior(point.behavior) is None


def test_tradeoff_corner_is_attained():
    point = chsh_tradeoff_max(1, 0)
    assert point.expectations == (4, 0)


@pytest.mark.parametrize("alpha,beta", FRONTIER_DIRECTIONS)
def test_support_function_of_the_square(alpha, beta):
    # support function of |x| + |y| <= 4 in direction (alpha, beta)
    alpha, beta = Fraction(alpha), Fraction(beta)
    assert chsh_tradeoff_max(alpha, beta).optimum == 4 * max(abs(alpha), abs(beta))


def test_tradeoff_rejects_zero_direction():
    with pytest.raises(ValueError):
        chsh_tradeoff_max(0, 0)


def test_behavior_json_round_trip():
    _, b = ns_value(make_chsh_triangle())
    assert Behavior.loads(b.dumps()) == b
    data = pr_box().to_json()
    assert {e["v"] for e in data["p"]} == {"0", "1/2"}
