"""Rule and declaration structures making up a parsed game description."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .terms import Term, to_text

COMPARISON_OPS = (">", "<", ">=", "<=", "=", "\\=")

# predicate names with fixed meaning; not usable as fact names
RESERVED = {
    "chance", "switch", "fact", "hidden", "init", "account", "does",
    "operation", "ax", "next", "goal", "branching", "command", "terminal",
    "request", "not", "false",
}


@dataclass(frozen=True)
class PositiveGoal:
    term: Term


@dataclass(frozen=True)
class Negation:
    term: Term


@dataclass(frozen=True)
class Comparison:
    op: str  # one of COMPARISON_OPS
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class EffectAx:
    term: Term


@dataclass(frozen=True)
class EffectNext:
    term: Term


@dataclass(frozen=True)
class EffectGoal:
    agent: Term
    payoff: Term


@dataclass(frozen=True)
class FalseLiteral:
    pass


Literal = Union[PositiveGoal, Negation, Comparison, EffectAx, EffectNext,
                EffectGoal, FalseLiteral]


@dataclass(frozen=True)
class Rule:
    head: Term
    body: Tuple[Literal, ...]


@dataclass(frozen=True)
class SwitchDecl:
    bid: int
    owner: str
    aliases: Tuple[str, ...]


@dataclass(frozen=True)
class ChanceDecl:
    bid: int
    distribution: Tuple[float, ...]


@dataclass(frozen=True)
class BranchingDecl:
    operators: Tuple[Term, ...]
    bid: Optional[int]  # None for unconditional single-operation branchings
    decl_index: int


@dataclass
class GameSpec:
    """Validated parse result of one SIDL source file."""

    source: str
    fact_decls: Dict[str, int] = field(default_factory=dict)
    switches: List[SwitchDecl] = field(default_factory=list)
    chances: List[ChanceDecl] = field(default_factory=list)
    branchings: List[BranchingDecl] = field(default_factory=list)
    hidden_rules: List[Rule] = field(default_factory=list)
    operation_rules: List[Rule] = field(default_factory=list)
    terminal_rules: List[Rule] = field(default_factory=list)
    init_facts: List[Term] = field(default_factory=list)

    @property
    def agents(self) -> List[str]:
        """Agent names, from init(account(X, _)), in declaration order."""
        seen = []
        for f in self.init_facts:
            if (hasattr(f, "functor") and f.functor == "account"
                    and len(f.args) == 2 and hasattr(f.args[0], "name")):
                name = f.args[0].name
                if name not in seen:
                    seen.append(name)
        return seen

    def switch_by_bid(self, bid: int) -> Optional[SwitchDecl]:
        for s in self.switches:
            if s.bid == bid:
                return s
        return None

    def chance_by_bid(self, bid: int) -> Optional[ChanceDecl]:
        for c in self.chances:
            if c.bid == bid:
                return c
        return None


def literal_text(lit: Literal) -> str:
    if isinstance(lit, PositiveGoal):
        return to_text(lit.term)
    if isinstance(lit, Negation):
        return f"not({to_text(lit.term)})"
    if isinstance(lit, Comparison):
        return f"{to_text(lit.lhs)} {lit.op} {to_text(lit.rhs)}"
    if isinstance(lit, EffectAx):
        return f"ax({to_text(lit.term)})"
    if isinstance(lit, EffectNext):
        return f"next({to_text(lit.term)})"
    if isinstance(lit, EffectGoal):
        return f"goal({to_text(lit.agent)}, {to_text(lit.payoff)})"
    if isinstance(lit, FalseLiteral):
        return "false"
    raise TypeError(f"not a literal: {lit!r}")
