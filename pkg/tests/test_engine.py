import random

import pytest

from sidl.engine import (
    Command, FixedPolicy, IdlePolicy, apply_command, is_terminal,
    run_headless, step_chronon, visible_view,
)
from sidl.errors import CommandError
from sidl.logic import make_db
from sidl.parser import parse_sidl
from sidl.state import init_game
from sidl.terms import Atom, Int, comp


def s(name, *args):
    return comp(name, *args) if args else Atom(name)


class ForcedRandom:
    """random() returns scripted values; for pinning chance samples."""

    def __init__(self, values):
        self._values = list(values)

    def random(self):
        return self._values.pop(0) if self._values else 0.0


# --- commands ---

def test_apply_command_sets_does(example1):
    state = init_game(example1)
    apply_command(state, example1, Command("alice", 1, "A"))
    assert state.does == {1: "A"}


def test_command_not_owner(example1):
    state = init_game(example1)
    with pytest.raises(CommandError, match="NotOwner"):
        apply_command(state, example1, Command("bob", 1, "A"))


def test_command_unknown_alias(example1):
    state = init_game(example1)
    with pytest.raises(CommandError, match="UnknownAlias"):
        apply_command(state, example1, Command("alice", 1, "Z"))


def test_command_chance_bid(example1):
    state = init_game(example1)
    with pytest.raises(CommandError, match="ChanceBid"):
        apply_command(state, example1, Command("alice", 0, "A"))


def test_command_unknown_bid(example1):
    state = init_game(example1)
    with pytest.raises(CommandError, match="UnknownBid"):
        apply_command(state, example1, Command("alice", 42, "A"))


# --- chronon traces from the imperfect-information game ---

def test_chronon_zero_trace(example1):
    state = init_game(example1)
    result = step_chronon(state, example1, ForcedRandom([0.1]))
    assert [(i, op) for i, op, _ in result.executed] == [(0, s("nat", Int(1)))]
    assert {i for i, _ in result.skipped} == {1, 2}
    assert list(state.facts) == [s("state", Int(1))]
    assert state.accounts == {"alice": 0.0}
    assert not result.terminal


def test_chronon_one_trace(example1):
    state = init_game(example1)
    step_chronon(state, example1, ForcedRandom([0.1]))  # nature picks state 1
    apply_command(state, example1, Command("alice", 1, "A"))
    result = step_chronon(state, example1, ForcedRandom([0.1]))
    executed = [(i, op) for i, op, _ in result.executed]
    assert executed == [(1, s("a", Int(1)))]
    # only one of the two alias-1 branchings can fire: state(1) was removed
    # immediately, so a(2)'s precondition and the second a(1) candidate fail
    assert list(state.facts) == [s("state", Int(10))]
    assert state.accounts == {"alice": 2.0}
    assert result.terminal


def test_branching_exclusivity(example1):
    state = init_game(example1)
    step_chronon(state, example1, ForcedRandom([0.9]))  # state 2
    apply_command(state, example1, Command("alice", 1, "B"))
    result = step_chronon(state, example1, ForcedRandom([0.9]))
    bid1_fires = [i for i, _, _ in result.executed if i in (1, 2)]
    assert len(bid1_fires) == 1
    assert state.accounts == {"alice": 2.0}  # b(2) pays X = 2


def test_rng_consumed_even_on_failed_chance_op(example1):
    # chronon 1: nat fails (state(0) gone) but the chance still draws once
    state = init_game(example1)
    rng = ForcedRandom([0.1, 0.9])
    step_chronon(state, example1, rng)
    step_chronon(state, example1, rng)
    assert rng._values == []


def test_pico_simultaneous_turn(pico):
    state = init_game(pico)
    apply_command(state, pico, Command("alice", 1, "8"))
    apply_command(state, pico, Command("bob", 2, "13"))
    rng = random.Random(0)
    first = step_chronon(state, pico, rng)
    assert {op for _, op, _ in first.executed} == {s("a", Int(8)),
                                                  s("b", Int(13))}
    # thrown facts were only pending, so payoff could not fire yet
    assert {i for i, _ in first.skipped} == {2}
    second = step_chronon(state, pico, rng)
    assert (2, s("payoff")) in [(i, op) for i, op, _ in second.executed]
    assert state.accounts == {"alice": 0.0, "bob": 1.0}


# --- terminal ---

def test_is_terminal(example1):
    state = init_game(example1)
    assert not is_terminal(state, example1)
    state.facts = make_db([s("state", Int(10))])
    assert is_terminal(state, example1)


def test_no_terminal_rule_never_ends():
    spec = parse_sidl(
        "fact(p, 1).\nbranching([w], nil).\noperation(w) :- false.\n"
        "init(account(a, 0.0)).\ninit(p(0)).\n")
    assert not is_terminal(init_game(spec), spec)


# --- visible views ---

def test_view_hides_state_from_alice(example1):
    state = init_game(example1)
    state.facts = make_db([s("state", Int(1))])
    view = visible_view(state, example1, "alice")
    assert view.facts == []
    assert view.accounts == {"alice": 0.0}


def test_view_public_fact_visible(pico):
    state = init_game(pico)
    state.facts = make_db([s("thrown", Atom("alice"), Int(8))])
    view = visible_view(state, pico, "bob")
    assert s("thrown", Atom("alice"), Int(8)) in view.facts


def test_view_third_party_sees_hidden_fact():
    spec = parse_sidl(
        "fact(p, 1).\nhidden(p(X), [alice, bob]) :- p(X).\n"
        "branching([w], nil).\noperation(w) :- false.\nterminal :- false.\n"
        "init(account(alice, 0.0)).\ninit(account(bob, 0.0)).\ninit(p(1)).\n")
    state = init_game(spec)
    assert visible_view(state, spec, "alice").facts == []
    assert visible_view(state, spec, "carol").facts == [s("p", Int(1))]


# --- headless runs ---

def test_run_headless_example1_seed_sweep(example1):
    outcomes = set()
    for seed in range(20):
        res = run_headless(example1, {"alice": FixedPolicy(["Wait", "A"])},
                           seed=seed, max_chronons=10)
        assert res.terminal and res.final_state.chronon == 2
        nature = [op for i, op, _ in res.steps[0].executed if i == 0][0]
        outcomes.add((nature, res.final_state.accounts["alice"]))
    assert outcomes == {(s("nat", Int(1)), 2.0), (s("nat", Int(2)), 1.0)}


def test_run_headless_countdown_terminates_at_30(countdown):
    res = run_headless(countdown, {"alice": IdlePolicy()}, seed=0,
                       max_chronons=100)
    assert res.terminal
    assert res.final_state.chronon == 30


def test_run_headless_zero_chronons(example1):
    res = run_headless(example1, {}, seed=0, max_chronons=0)
    assert res.max_chronons_exceeded
    assert res.final_state.chronon == 0
    assert list(res.final_state.facts) == [s("state", Int(0))]


def test_terminal_init_runs_zero_chronons():
    spec = parse_sidl(
        "fact(p, 1).\nbranching([w], nil).\noperation(w) :- false.\n"
        "terminal :- p(0).\ninit(account(a, 0.0)).\ninit(p(0)).\n")
    res = run_headless(spec, {}, seed=0, max_chronons=10)
    assert res.terminal and res.final_state.chronon == 0
    assert res.steps == []


def test_run_headless_deterministic(example1):
    a = run_headless(example1, {"alice": FixedPolicy(["Wait", "A"])}, seed=9)
    b = run_headless(example1, {"alice": FixedPolicy(["Wait", "A"])}, seed=9)
    assert a.entries == b.entries
