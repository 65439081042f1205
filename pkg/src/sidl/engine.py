"""Chronon execution: commands, branchings, terminal checks, visible views.

One chronon processes every branching in declaration order. A branching
linked to a chance draws one fresh sample from the engine RNG (consumed
even if the chosen operation then fails, so replays stay aligned); a
branching linked to a switch picks the operator at the position of the
switch's current alias; a nil branching has a single unconditional
candidate. The candidate operation is attempted atomically and failures
are absorbed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .ast import GameSpec
from .errors import CommandError, SidlError
from .logic import EffectSet, prove_operation, solve_term
from .state import GameState, advance_chronon, commit_effects, init_game
from .terms import Atom, ListTerm, Term, Var, comp, to_text


@dataclass(frozen=True)
class Command:
    agent: str
    bid: int
    alias: str
    arrival: int = 0


@dataclass
class StepResult:
    executed: List[Tuple[int, Term, EffectSet]] = field(default_factory=list)
    skipped: List[Tuple[int, Term]] = field(default_factory=list)
    terminal: bool = False


def apply_command(state: GameState, spec: GameSpec, cmd: Command) -> None:
    """Reassign a switch's does-fact; the only way a player acts."""
    switch = spec.switch_by_bid(cmd.bid)
    if switch is None:
        if spec.chance_by_bid(cmd.bid) is not None:
            raise CommandError("ChanceBid", f"BID {cmd.bid} is a chance")
        raise CommandError("UnknownBid", f"no switch with BID {cmd.bid}")
    if switch.owner != cmd.agent:
        raise CommandError("NotOwner",
                           f"switch {cmd.bid} belongs to {switch.owner}")
    if cmd.alias not in switch.aliases:
        raise CommandError("UnknownAlias",
                           f"{cmd.alias!r} is not an alias of switch {cmd.bid}")
    state.does[cmd.bid] = cmd.alias


def _sample_index(distribution: Sequence[float], rng: random.Random) -> int:
    r = rng.random()
    cumulative = 0.0
    for i, p in enumerate(distribution):
        cumulative += p
        if r < cumulative:
            return i
    return len(distribution) - 1


def is_terminal(state: GameState, spec: GameSpec) -> bool:
    for _ in solve_term(Atom("terminal"), state.facts, spec.terminal_rules):
        return True
    return False


def step_chronon(state: GameState, spec: GameSpec,
                 rng: random.Random) -> StepResult:
    """Run one full chronon in place and report what executed."""
    result = StepResult()
    for branching in spec.branchings:
        if branching.bid is None:
            candidate = branching.operators[0]
        else:
            chance = spec.chance_by_bid(branching.bid)
            if chance is not None:
                idx = _sample_index(chance.distribution, rng)
            else:
                switch = spec.switch_by_bid(branching.bid)
                idx = switch.aliases.index(state.does[branching.bid])
            candidate = branching.operators[idx]
        effects = prove_operation(candidate, state.facts, spec.operation_rules)
        if effects is None:
            result.skipped.append((branching.decl_index, candidate))
        else:
            commit_effects(state, effects)
            result.executed.append((branching.decl_index, candidate, effects))
    advance_chronon(state)
    result.terminal = is_terminal(state, spec)
    return result


def fact_hidden_for(fact: Term, state: GameState, spec: GameSpec) -> List[str]:
    """Agents barred from viewing a fact, from all hidden-rule solutions."""
    barred: List[str] = []
    goal = comp("hidden", fact, Var("_H"))
    for env in solve_term(goal, state.facts, spec.hidden_rules):
        h = env.get("_H")
        if isinstance(h, ListTerm):
            for item in h.items:
                if isinstance(item, Atom) and item.name not in barred:
                    barred.append(item.name)
    return barred


@dataclass
class VisibleView:
    agent: str
    facts: List[Term]
    accounts: Dict[str, float]
    chronon: int
    terminal: bool


def annotated_facts(state: GameState, spec: GameSpec) -> List[Tuple[Term, List[str]]]:
    return [(f, fact_hidden_for(f, state, spec)) for f in state.facts]


def visible_view(state: GameState, spec: GameSpec, agent: str) -> VisibleView:
    facts = [f for f, barred in annotated_facts(state, spec) if agent not in barred]
    return VisibleView(agent=agent, facts=facts, accounts=dict(state.accounts),
                       chronon=state.chronon,
                       terminal=is_terminal(state, spec))


# --- headless policies ---

class Policy:
    """Chooses switch commands for one agent each chronon."""

    def commands(self, spec: GameSpec, state: GameState, agent: str,
                 chronon: int) -> List[Tuple[int, str]]:
        raise NotImplementedError


class IdlePolicy(Policy):
    def commands(self, spec, state, agent, chronon):
        return []


class RandomPolicy(Policy):
    """Uniform alias choice per owned switch, from a private RNG stream."""

    def __init__(self, seed):
        self._rng = random.Random(seed)

    def commands(self, spec, state, agent, chronon):
        out = []
        for s in spec.switches:
            if s.owner == agent:
                out.append((s.bid, self._rng.choice(s.aliases)))
        return out


class FixedPolicy(Policy):
    """Scripted alias per chronon, applied to every owned switch."""

    def __init__(self, script: Sequence[str]):
        self.script = list(script)

    def commands(self, spec, state, agent, chronon):
        if chronon >= len(self.script):
            return []
        alias = self.script[chronon]
        out = []
        for s in spec.switches:
            if s.owner == agent and alias in s.aliases:
                out.append((s.bid, alias))
        return out


def make_policy(kind: str, seed=None) -> Policy:
    """Build a policy from its CLI form: idle | random | fixed:a,b,c."""
    if kind == "idle":
        return IdlePolicy()
    if kind == "random":
        return RandomPolicy(seed)
    if kind.startswith("fixed:"):
        return FixedPolicy(kind[len("fixed:"):].split(","))
    raise SidlError(f"unknown policy {kind!r}")


@dataclass
class RunResult:
    final_state: GameState
    entries: List[dict]
    steps: List[StepResult]
    terminal: bool
    max_chronons_exceeded: bool


def run_headless(spec: GameSpec, policies: Dict[str, Policy], seed: int,
                 max_chronons: int = 1000) -> RunResult:
    """Drive a full game with in-process policies instead of the network.

    Deterministic for identical (spec, policies, seed): the engine RNG is
    consumed only by chance sampling; random policies draw from their own
    streams.
    """
    from . import recorder  # entry builders; avoids a module cycle

    state = init_game(spec)
    rng = random.Random(seed)
    entries = [recorder.header_entry(spec.source, seed, spec.agents, 0)]
    steps: List[StepResult] = []
    terminal = is_terminal(state, spec)
    while not terminal and state.chronon < max_chronons:
        t = state.chronon
        for agent in spec.agents:
            policy = policies.get(agent, IdlePolicy())
            for bid, alias in policy.commands(spec, state, agent, t):
                cmd = Command(agent, bid, alias, arrival=t)
                try:
                    apply_command(state, spec, cmd)
                    entries.append(recorder.command_entry(t, agent, bid, alias, True))
                except CommandError as e:
                    entries.append(
                        recorder.command_entry(t, agent, bid, alias, False, e.code))
        result = step_chronon(state, spec, rng)
        steps.append(result)
        entries.append(recorder.chronon_entry(t, result, state, spec))
        terminal = result.terminal
    return RunResult(final_state=state, entries=entries, steps=steps,
                     terminal=terminal,
                     max_chronons_exceeded=not terminal)
