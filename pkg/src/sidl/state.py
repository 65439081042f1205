"""Mutable per-game state and the transitions that touch it.

The fact database has set semantics with insertion order preserved.
Removals and payoffs apply immediately; facts created with ``next`` are
held in ``pending_next`` and only become visible when the chronon
boundary is crossed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

from .ast import GameSpec
from .errors import GameInitError
from .logic import Database, EffectSet, make_db
from .terms import Atom, Compound, Int, Real, Term, functor_arity, to_text


@dataclass
class GameState:
    facts: Database = field(default_factory=dict)
    accounts: Dict[str, float] = field(default_factory=dict)
    does: Dict[int, str] = field(default_factory=dict)
    pending_next: List[Term] = field(default_factory=list)
    chronon: int = 0

    def copy(self) -> "GameState":
        return GameState(dict(self.facts), dict(self.accounts),
                         dict(self.does), list(self.pending_next),
                         self.chronon)


def _alias_text(t: Term) -> str:
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    raise GameInitError("BadDoesInit", f"invalid alias term {to_text(t)}")


def init_game(spec: GameSpec) -> GameState:
    """Build chronon-0 state from the init facts of a validated spec."""
    state = GameState()
    for f in spec.init_facts:
        name, arity = functor_arity(f) if isinstance(f, (Atom, Compound)) else ("", -1)
        if name == "account" and arity == 2:
            agent, balance = f.args
            if not isinstance(agent, Atom) or not isinstance(balance, (Int, Real)):
                raise GameInitError("BadAccountInit", to_text(f))
            state.accounts[agent.name] = float(balance.value)
        elif name == "does" and arity == 2:
            bid, alias = f.args
            if not isinstance(bid, Int):
                raise GameInitError("BadDoesInit", to_text(f))
            switch = spec.switch_by_bid(bid.value)
            if switch is None:
                raise GameInitError("BadDoesInit",
                                    f"no switch with BID {bid.value}")
            alias_name = _alias_text(alias)
            if alias_name not in switch.aliases:
                raise GameInitError(
                    "BadDoesInit",
                    f"alias {alias_name!r} not declared for switch {bid.value}")
            state.does[bid.value] = alias_name
        else:
            state.facts[f] = None  # set semantics: duplicates collapse
    if not state.accounts:
        raise GameInitError("MissingAccount", "no agents declared")
    for switch in spec.switches:
        if switch.bid not in state.does:
            raise GameInitError(
                "MissingDoesInit",
                f"switch {switch.bid} has no init(does({switch.bid}, _))")
    return state


def commit_effects(state: GameState, eff: EffectSet) -> None:
    """Apply one proven operation's effects in place.

    Removals and payoffs are immediate; next-facts stay pending until
    advance_chronon.
    """
    for fact in eff.removals:
        del state.facts[fact]
    state.pending_next.extend(eff.next_facts)
    for agent, amount in eff.payoffs:
        state.accounts[agent] = state.accounts.get(agent, 0.0) + amount


def advance_chronon(state: GameState) -> None:
    """Cross the chronon boundary: merge pending facts, bump the counter."""
    for fact in state.pending_next:  # first-stage order, set union
        if fact not in state.facts:
            state.facts[fact] = None
    state.pending_next.clear()
    state.chronon += 1
