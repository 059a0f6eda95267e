import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_log, truncation_oracle, uncertain_forward_oracle
from tplq import (
    ABSENT,
    BACKWARD,
    CERTAIN,
    END,
    FORWARD,
    START,
    UNCERTAIN,
    PrefixAutomaton,
    Scenario,
    backward_correlations,
    correlation_model,
    forward_correlations,
)
from tplq.correlation import walk_bounds
from tplq.errors import TplqError


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario("sometimes", 1)
    with pytest.raises(ValueError):
        Scenario(CERTAIN, 0)
    assert Scenario(UNCERTAIN, 3).certain is False


def test_l1_forward_rows(l1):
    aut = PrefixAutomaton.build(l1)
    s = (START, "a")
    assert forward_correlations(aut, Scenario(CERTAIN, 2), s) == {
        (START, "a", "b", "c"): Fraction(1, 2),
        (START, "a", "b", "f"): Fraction(1, 2),
    }
    assert forward_correlations(aut, Scenario(UNCERTAIN, 2), s) == {
        (START, "a"): Fraction(1, 3),
        (START, "a", "b"): Fraction(1, 3),
        (START, "a", "b", "c"): Fraction(1, 6),
        (START, "a", "b", "f"): Fraction(1, 6),
    }


def test_l1_backward_rows(l1):
    aut = PrefixAutomaton.build(l1)
    s = (START, "a", "b", "c")
    assert backward_correlations(aut, Scenario(CERTAIN, 2), s) == {(START, "a"): 1}
    row = backward_correlations(aut, Scenario(UNCERTAIN, 2), s)
    assert row[(START, "a")] == Fraction(1, 3)
    assert sum(row.values()) == 1
    # not enough history: the case had not started x releases ago
    assert backward_correlations(aut, Scenario(CERTAIN, 4), (START, "a", "b")) == {ABSENT: 1}


def test_walk_bounds(l1):
    aut = PrefixAutomaton.build(l1)
    wb = walk_bounds(aut, (START, "a"), 2)
    assert wb.forward_depth == 4 and wb.forward_move == 2
    assert walk_bounds(aut, (START, "a"), 9).forward_move == 4


def test_end_state_absorbs(l1):
    aut = PrefixAutomaton.build(l1)
    end = (START, "a", "b", "c", "f", END)
    for kind in (CERTAIN, UNCERTAIN):
        assert forward_correlations(aut, Scenario(kind, 3), end) == {end: 1}


def test_partial_leaf_absorbs(l1):
    aut = PrefixAutomaton.build(l1)
    leaf = (START, "d", "a", "f", "c", "h")
    assert forward_correlations(aut, Scenario(CERTAIN, 2), leaf) == {leaf: 1}


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("window", [1, 2, 3])
def test_forward_matches_case_counting(seed, window):
    log = random_log(seed, n_cases=25, n_acts=3, max_len=6)
    aut = PrefixAutomaton.build(log)
    for s in aut.states[::3]:
        assert forward_correlations(aut, Scenario(CERTAIN, window), s) == truncation_oracle(log, s, window)
        assert forward_correlations(aut, Scenario(UNCERTAIN, window), s) == uncertain_forward_oracle(log, s, window)


@pytest.mark.parametrize("seed", range(5))
def test_uncertain_backward_uniform_on_complete_logs(seed):
    # with every case complete, the Bayes weight of each ancestor on the path is one
    log = random_log(seed, n_cases=20, n_acts=3, max_len=6)
    aut = PrefixAutomaton.build(log)
    for s in aut.states:
        row = backward_correlations(aut, Scenario(UNCERTAIN, 3), s)
        moves = min(3, len(s))
        assert set(row.values()) == {Fraction(1, moves + 1)}
        assert len(row) == moves + 1


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), window=st.integers(1, 5), share=st.floats(0, 1))
def test_rows_are_distributions(seed, window, share):
    log = random_log(seed, n_cases=12, n_acts=3, max_len=5, complete_share=share)
    aut = PrefixAutomaton.build(log)
    for kind in (CERTAIN, UNCERTAIN):
        for direction in (FORWARD, BACKWARD):
            model = correlation_model(aut, Scenario(kind, window), direction)
            for s, row in model.rows.items():
                assert sum(row.values()) == 1
                assert all(p > 0 for p in row.values())
                if kind == UNCERTAIN and direction == FORWARD:
                    # staying put has probability 1/(moves+1)
                    moves = min(window, walk_bounds(aut, s, window).forward_depth)
                    assert row[s] >= Fraction(1, moves + 1)


def test_model_universe_filters(claims):
    aut = PrefixAutomaton.build(claims)
    full = correlation_model(aut, Scenario(CERTAIN, 1), FORWARD)
    assert len(full) == len(aut) and not full.truncated
    capped = correlation_model(aut, Scenario(CERTAIN, 1), FORWARD, max_states=10)
    assert len(capped) == 10 and capped.truncated
    assert capped.states[0] == ()
    frequent = correlation_model(aut, Scenario(CERTAIN, 1), FORWARD, min_support=5)
    assert all(aut.incoming_frequency(s) >= 5 for s in frequent.states)


def test_model_json(l1):
    aut = PrefixAutomaton.build(l1)
    doc = json.loads(correlation_model(aut, Scenario(CERTAIN, 4), BACKWARD).to_json())
    assert doc["direction"] == BACKWARD
    first = doc["rows"][0]
    assert first["state"] == [] and first["distribution"] == [{"state": None, "p": "1/1"}]


def test_empty_automaton_rejected():
    with pytest.raises(TplqError):
        correlation_model(PrefixAutomaton(), Scenario(), FORWARD)
