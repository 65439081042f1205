"""Resolution over the fact database and rule set.

All-solutions search with a pinned, deterministic order: facts in database
insertion order, rules in declaration order, body literals left to right.
Negation is negation-as-failure and requires a ground argument. Operation
bodies additionally stage side effects (immediate removals, next-state
facts, payoffs) which are only applied by the caller on overall success.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .ast import (
    Comparison, EffectAx, EffectGoal, EffectNext, FalseLiteral, Literal,
    Negation, PositiveGoal, Rule,
)
from .errors import DepthExceeded, DivisionByZero, InstantiationError
from .terms import (
    ARITH_OPS, Atom, Compound, Int, ListTerm, Real, Term, Var, comp,
    functor_arity, is_arith, is_ground, to_text,
)

Bindings = Dict[str, Term]

DEFAULT_DEPTH_LIMIT = 10_000

# Database: ground facts in insertion order. dict-as-ordered-set.
Database = Dict[Term, None]


def make_db(facts: Iterable[Term] = ()) -> Database:
    return dict.fromkeys(facts)


@dataclass(frozen=True)
class EffectSet:
    """Staged side effects of one proven operation body."""
    removals: Tuple[Term, ...] = ()
    next_facts: Tuple[Term, ...] = ()
    payoffs: Tuple[Tuple[str, float], ...] = ()


def walk(t: Term, bindings: Bindings) -> Term:
    """Resolve a term through the current bindings (deep substitution)."""
    while isinstance(t, Var) and t.name in bindings:
        t = bindings[t.name]
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(walk(a, bindings) for a in t.args))
    if isinstance(t, ListTerm):
        return ListTerm(tuple(walk(a, bindings) for a in t.items))
    return t


def _occurs(name: str, t: Term, bindings: Bindings) -> bool:
    t = walk(t, bindings) if isinstance(t, Var) else t
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Compound):
        return any(_occurs(name, a, bindings) for a in t.args)
    if isinstance(t, ListTerm):
        return any(_occurs(name, a, bindings) for a in t.items)
    return False


def unify(a: Term, b: Term, bindings: Bindings) -> Optional[Bindings]:
    """Most general unifier extending ``bindings``, or None on clash."""
    stack = [(a, b)]
    out = dict(bindings)
    while stack:
        x, y = stack.pop()
        while isinstance(x, Var) and x.name in out:
            x = out[x.name]
        while isinstance(y, Var) and y.name in out:
            y = out[y.name]
        if isinstance(x, Var):
            if isinstance(y, Var) and y.name == x.name:
                continue
            if _occurs(x.name, y, out):
                return None
            out[x.name] = y
        elif isinstance(y, Var):
            if _occurs(y.name, x, out):
                return None
            out[y.name] = x
        elif isinstance(x, Atom) and isinstance(y, Atom):
            if x.name != y.name:
                return None
        elif isinstance(x, Int) and isinstance(y, Int):
            if x.value != y.value:
                return None
        elif isinstance(x, Real) and isinstance(y, Real):
            if x.value != y.value:
                return None
        elif isinstance(x, Compound) and isinstance(y, Compound):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
        elif isinstance(x, ListTerm) and isinstance(y, ListTerm):
            if len(x.items) != len(y.items):
                return None
            stack.extend(zip(x.items, y.items))
        else:
            return None
    return out


_rename_counter = itertools.count(1)


def _rename(t: Term, mapping: Dict[str, Var]) -> Term:
    if isinstance(t, Var):
        if t.name not in mapping:
            mapping[t.name] = Var(f"{t.name}#{next(_rename_counter)}")
        return mapping[t.name]
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_rename(a, mapping) for a in t.args))
    if isinstance(t, ListTerm):
        return ListTerm(tuple(_rename(a, mapping) for a in t.items))
    return t


def _rename_literal(lit: Literal, mapping: Dict[str, Var]) -> Literal:
    if isinstance(lit, PositiveGoal):
        return PositiveGoal(_rename(lit.term, mapping))
    if isinstance(lit, Negation):
        return Negation(_rename(lit.term, mapping))
    if isinstance(lit, Comparison):
        return Comparison(lit.op, _rename(lit.lhs, mapping),
                          _rename(lit.rhs, mapping))
    if isinstance(lit, EffectAx):
        return EffectAx(_rename(lit.term, mapping))
    if isinstance(lit, EffectNext):
        return EffectNext(_rename(lit.term, mapping))
    if isinstance(lit, EffectGoal):
        return EffectGoal(_rename(lit.agent, mapping),
                          _rename(lit.payoff, mapping))
    return lit


def eval_arith(e: Term, bindings: Bindings):
    """Evaluate a ground arithmetic expression to an int or float.

    Integer arithmetic is exact when both operands are integers and the
    operator is not division; division always yields a float.
    """
    e = walk(e, bindings) if isinstance(e, (Var, Compound)) else e
    if isinstance(e, Int):
        return e.value
    if isinstance(e, Real):
        return e.value
    if isinstance(e, Var):
        raise InstantiationError(f"unbound variable {e.name} in arithmetic")
    if is_arith(e):
        lhs = eval_arith(e.args[0], bindings)
        rhs = eval_arith(e.args[1], bindings)
        op = e.functor
        if op == "+":
            return lhs + rhs
        if op == "-":
            return lhs - rhs
        if op == "*":
            return lhs * rhs
        if rhs == 0:
            raise DivisionByZero(f"{to_text(e)}")
        return lhs / rhs
    raise InstantiationError(f"not an arithmetic expression: {to_text(e)}")


def materialize(t: Term, bindings: Bindings) -> Term:
    """Ground a fact for storage, evaluating embedded arithmetic."""
    t = walk(t, bindings)
    if is_arith(t):
        v = eval_arith(t, bindings)
        return Int(v) if isinstance(v, int) else Real(v)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(materialize(a, bindings) for a in t.args))
    if isinstance(t, ListTerm):
        return ListTerm(tuple(materialize(a, bindings) for a in t.items))
    if isinstance(t, Var):
        raise InstantiationError(f"unbound variable {t.name} in effect")
    return t


def _free_vars(t: Term, out: List[str]) -> None:
    if isinstance(t, Var):
        out.append(t.name)
    elif isinstance(t, Compound):
        for a in t.args:
            _free_vars(a, out)
    elif isinstance(t, ListTerm):
        for a in t.items:
            _free_vars(a, out)


def _check_negation_arg(goal: Term) -> None:
    """Anonymous (underscore) variables are existential under negation;
    any other unbound variable is an instantiation error."""
    names: List[str] = []
    _free_vars(goal, names)
    for name in names:
        if not name.split("#", 1)[0].startswith("_"):
            raise InstantiationError(
                f"negation argument not ground: {to_text(goal)}")


class _Depth:
    __slots__ = ("remaining",)

    def __init__(self, limit: int):
        self.remaining = limit

    def tick(self):
        self.remaining -= 1
        if self.remaining < 0:
            raise DepthExceeded("proof depth limit exceeded")


def _index_rules(rules: Sequence[Rule]) -> Dict[Tuple[str, int], List[Rule]]:
    index: Dict[Tuple[str, int], List[Rule]] = {}
    for r in rules:
        index.setdefault(functor_arity(r.head), []).append(r)
    return index


def _numeric(t: Term, bindings: Bindings):
    return eval_arith(t, bindings)


def _compare(op: str, lhs, rhs) -> bool:
    if op == ">":
        return lhs > rhs
    if op == "<":
        return lhs < rhs
    if op == ">=":
        return lhs >= rhs
    if op == "<=":
        return lhs <= rhs
    if op == "=":
        return lhs == rhs
    if op == "\\=":
        return lhs != rhs
    raise ValueError(f"unknown comparison {op}")


def _solve_literals(literals: Sequence[Literal], i: int, bindings: Bindings,
                    db: Database, index, depth: _Depth) -> Iterator[Bindings]:
    if i == len(literals):
        yield bindings
        return
    depth.tick()
    lit = literals[i]
    if isinstance(lit, FalseLiteral):
        return
    if isinstance(lit, PositiveGoal):
        goal = walk(lit.term, bindings)
        for env in _solve_goal(goal, bindings, db, index, depth):
            yield from _solve_literals(literals, i + 1, env, db, index, depth)
    elif isinstance(lit, Negation):
        goal = walk(lit.term, bindings)
        _check_negation_arg(goal)
        for _ in _solve_goal(goal, bindings, db, index, depth):
            return
        yield from _solve_literals(literals, i + 1, bindings, db, index, depth)
    elif isinstance(lit, Comparison):
        if _compare(lit.op, _numeric(lit.lhs, bindings),
                    _numeric(lit.rhs, bindings)):
            yield from _solve_literals(literals, i + 1, bindings, db, index, depth)
    else:
        raise InstantiationError(
            "effect literal outside an operation body")


def _solve_goal(goal: Term, bindings: Bindings, db: Database, index,
                depth: _Depth) -> Iterator[Bindings]:
    if not isinstance(goal, (Atom, Compound)):
        raise InstantiationError(f"not a callable goal: {to_text(goal)}")
    depth.tick()
    for fact in db:
        env = unify(goal, fact, bindings)
        if env is not None:
            yield env
    for rule in index.get(functor_arity(goal), ()):  # declaration order
        mapping: Dict[str, Var] = {}
        head = _rename(rule.head, mapping)
        body = tuple(_rename_literal(l, mapping) for l in rule.body)
        env = unify(goal, head, bindings)
        if env is not None:
            yield from _solve_literals(body, 0, env, db, index, depth)


def solve(goal: Sequence[Literal], db: Database, rules: Sequence[Rule],
          depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Iterator[Bindings]:
    """All solutions of a goal conjunction, in deterministic order."""
    index = _index_rules(rules)
    depth = _Depth(depth_limit)
    yield from _solve_literals(tuple(goal), 0, {}, db, index, depth)


def solve_term(goal: Term, db: Database, rules: Sequence[Rule],
               depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Iterator[Bindings]:
    yield from solve([PositiveGoal(goal)], db, rules, depth_limit)


# Alg-level request rule: request(X, H) holds when X holds and hidden(X, H).
REQUEST_RULE = Rule(
    head=comp("request", Var("X"), Var("H")),
    body=(PositiveGoal(Var("X")), PositiveGoal(comp("hidden", Var("X"), Var("H")))),
)


@dataclass
class _Staged:
    db: Database
    removals: Tuple[Term, ...] = ()
    next_facts: Tuple[Term, ...] = ()
    payoffs: Tuple[Tuple[str, float], ...] = ()


def _prove_op_body(literals: Sequence[Literal], i: int, bindings: Bindings,
                   staged: _Staged, index, depth: _Depth) -> Iterator[Tuple[Bindings, _Staged]]:
    if i == len(literals):
        yield bindings, staged
        return
    depth.tick()
    lit = literals[i]
    if isinstance(lit, FalseLiteral):
        return
    if isinstance(lit, PositiveGoal):
        goal = walk(lit.term, bindings)
        for env in _solve_goal(goal, bindings, staged.db, index, depth):
            yield from _prove_op_body(literals, i + 1, env, staged, index, depth)
    elif isinstance(lit, Negation):
        goal = walk(lit.term, bindings)
        _check_negation_arg(goal)
        if any(True for _ in _solve_goal(goal, bindings, staged.db, index, depth)):
            return
        yield from _prove_op_body(literals, i + 1, bindings, staged, index, depth)
    elif isinstance(lit, Comparison):
        if _compare(lit.op, _numeric(lit.lhs, bindings),
                    _numeric(lit.rhs, bindings)):
            yield from _prove_op_body(literals, i + 1, bindings, staged, index, depth)
    elif isinstance(lit, EffectAx):
        fact = materialize(lit.term, bindings)
        if fact not in staged.db:
            return  # removing an absent fact fails the operation
        view = dict(staged.db)
        del view[fact]
        nxt = _Staged(view, staged.removals + (fact,),
                      staged.next_facts, staged.payoffs)
        yield from _prove_op_body(literals, i + 1, bindings, nxt, index, depth)
    elif isinstance(lit, EffectNext):
        fact = materialize(lit.term, bindings)
        nxt = _Staged(staged.db, staged.removals,
                      staged.next_facts + (fact,), staged.payoffs)
        yield from _prove_op_body(literals, i + 1, bindings, nxt, index, depth)
    elif isinstance(lit, EffectGoal):
        agent = walk(lit.agent, bindings)
        if not isinstance(agent, Atom):
            raise InstantiationError(
                f"payoff agent not an atom: {to_text(agent)}")
        amount = float(eval_arith(lit.payoff, bindings))
        nxt = _Staged(staged.db, staged.removals, staged.next_facts,
                      staged.payoffs + ((agent.name, amount),))
        yield from _prove_op_body(literals, i + 1, bindings, nxt, index, depth)
    else:
        raise TypeError(f"unknown literal {lit!r}")


def prove_operation(op_head: Term, db: Database, rules: Sequence[Rule],
                    depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Optional[EffectSet]:
    """Attempt one ground operator against the database.

    Commits to the first operation rule and first binding whose body
    succeeds; returns the staged effects, or None if every candidate rule
    fails. The shared database is never mutated (ax removals act on a
    private working view so later literals of the same body cannot re-match
    a removed fact).
    """
    if not is_ground(op_head):
        raise InstantiationError(f"operator not ground: {to_text(op_head)}")
    index = _index_rules([r for r in rules if functor_arity(r.head) != ("operation", 1)])
    depth = _Depth(depth_limit)
    goal = comp("operation", op_head)
    for rule in rules:
        if functor_arity(rule.head) != ("operation", 1):
            continue
        mapping: Dict[str, Var] = {}
        head = _rename(rule.head, mapping)
        body = tuple(_rename_literal(l, mapping) for l in rule.body)
        env = unify(goal, head, {})
        if env is None:
            continue
        staged = _Staged(db)
        for _, final in _prove_op_body(body, 0, env, staged, index, depth):
            return EffectSet(final.removals, final.next_facts, final.payoffs)
    return None
