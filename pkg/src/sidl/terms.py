"""Logic terms: the universal value of SIDL.

Terms are immutable and hashable so ground facts can live in ordered sets
and serve as dictionary keys. The canonical text form produced by
``to_text`` is the single serialization used by the pretty-printer, the
record log, and the wire protocol.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Tuple, Union

ARITH_OPS = ("+", "-", "*", "/")

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Real:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Compound:
    functor: str
    args: Tuple["Term", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("zero-arity compounds must be Atoms")


@dataclass(frozen=True)
class ListTerm:
    items: Tuple["Term", ...]


Term = Union[Atom, Int, Real, Var, Compound, ListTerm]


def atom(name: str) -> Atom:
    return Atom(name)


def comp(functor: str, *args: Term) -> Compound:
    return Compound(functor, tuple(args))


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Compound):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, ListTerm):
        return all(is_ground(a) for a in t.items)
    return True


def functor_arity(t: Term) -> Tuple[str, int]:
    """Predicate name and arity of a callable term (atom or compound)."""
    if isinstance(t, Atom):
        return t.name, 0
    if isinstance(t, Compound):
        return t.functor, len(t.args)
    raise TypeError(f"not a callable term: {t!r}")


def is_arith(t: Term) -> bool:
    return isinstance(t, Compound) and t.functor in ARITH_OPS and len(t.args) == 2


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _arith_text(t: Term, parent_prec: int, right_side: bool) -> str:
    if is_arith(t):
        p = _PREC[t.functor]
        lhs = _arith_text(t.args[0], p, False)
        rhs = _arith_text(t.args[1], p, True)
        s = f"{lhs}{t.functor}{rhs}"
        # right operand of -,/ at equal precedence needs parens to re-parse
        if p < parent_prec or (right_side and p == parent_prec):
            return f"({s})"
        return s
    return to_text(t)


def to_text(t: Term) -> str:
    """Canonical text form; parsing it yields an equal term."""
    if isinstance(t, Atom):
        if _PLAIN_ATOM.match(t.name):
            return t.name
        return "'" + t.name.replace("\\", "\\\\").replace("'", "\\'") + "'"
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Real):
        return repr(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, ListTerm):
        return "[" + ", ".join(to_text(x) for x in t.items) + "]"
    if is_arith(t):
        return _arith_text(t, 0, False)
    if isinstance(t, Compound):
        head = t.functor if _PLAIN_ATOM.match(t.functor) else "'" + t.functor + "'"
        return head + "(" + ", ".join(to_text(a) for a in t.args) + ")"
    raise TypeError(f"not a term: {t!r}")
