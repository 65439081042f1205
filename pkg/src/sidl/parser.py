"""Tokenizer, parser, validator, and canonical printer for game descriptions.

Concrete syntax is prolog-style: clauses end with ``.``, ``:-`` separates a
head from a comma-separated body, ``//`` starts a line comment, lists are
``[a, b]``, atoms may be single-quoted. ``request(F, H) :- Body.`` clauses
are normalized into ``hidden(F, H) :- Body.`` rules at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .ast import (
    COMPARISON_OPS, RESERVED, BranchingDecl, ChanceDecl, Comparison,
    EffectAx, EffectGoal, EffectNext, FalseLiteral, GameSpec, Literal,
    Negation, PositiveGoal, Rule, SwitchDecl, literal_text,
)
from .errors import ParseError
from .terms import (
    Atom, Compound, Int, ListTerm, Real, Term, Var, functor_arity, is_ground,
    to_text,
)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<real>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<qatom>'(?:\\.|[^'\\])*')
  | (?P<atom>[a-z][A-Za-z0-9_]*)
  | (?P<var>[_A-Z][A-Za-z0-9_]*)
  | (?P<sym>:-|>=|<=|\\=|\\_|[()\[\],.><=+\-*/])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # real | int | qatom | atom | var | sym
    text: str
    line: int
    column: int


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if not m:
            raise ParseError(
                f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    return tokens


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.i = 0
        self.anon_counter = 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            raise ParseError(
                "unexpected end of input",
                last.line if last else 1, last.column if last else 1)
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, got {tok.text!r}",
                             tok.line, tok.column)
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    # --- expressions / terms ---

    def parse_expr(self) -> Term:
        left = self.parse_mul()
        while self.at("+") or self.at("-"):
            op = self.next().text
            right = self.parse_mul()
            left = Compound(op, (left, right))
        return left

    def parse_mul(self) -> Term:
        left = self.parse_primary()
        while self.at("*") or self.at("/"):
            op = self.next().text
            right = self.parse_primary()
            left = Compound(op, (left, right))
        return left

    def parse_primary(self) -> Term:
        tok = self.next()
        if tok.kind == "int":
            return Int(int(tok.text))
        if tok.kind == "real":
            return Real(float(tok.text))
        if tok.kind == "qatom":
            return Atom(_unquote(tok.text))
        if tok.kind == "var" or tok.text == "\\_":
            name = "_" if tok.text == "\\_" else tok.text
            if name == "_":
                self.anon_counter += 1
                name = f"_G{self.anon_counter}"
            return Var(name)
        if tok.kind == "atom":
            if self.at("("):
                self.next()
                args = [self.parse_expr()]
                while self.at(","):
                    self.next()
                    args.append(self.parse_expr())
                self.expect(")")
                return Compound(tok.text, tuple(args))
            return Atom(tok.text)
        if tok.text == "[":
            items: List[Term] = []
            if not self.at("]"):
                items.append(self.parse_expr())
                while self.at(","):
                    self.next()
                    items.append(self.parse_expr())
            self.expect("]")
            return ListTerm(tuple(items))
        if tok.text == "(":
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.text == "-":
            operand = self.parse_primary()
            if isinstance(operand, Int):
                return Int(-operand.value)
            if isinstance(operand, Real):
                return Real(-operand.value)
            return Compound("-", (Int(0), operand))
        raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.column)

    # --- literals and clauses ---

    def parse_literal(self) -> Literal:
        tok = self.peek()
        lhs = self.parse_expr()
        nxt = self.peek()
        if nxt is not None and nxt.text in COMPARISON_OPS:
            op = self.next().text
            rhs = self.parse_expr()
            return Comparison(op, lhs, rhs)
        if isinstance(lhs, Atom) and lhs.name == "false":
            return FalseLiteral()
        if isinstance(lhs, Compound):
            if lhs.functor == "not" and len(lhs.args) == 1:
                return Negation(lhs.args[0])
            if lhs.functor == "ax" and len(lhs.args) == 1:
                return EffectAx(lhs.args[0])
            if lhs.functor == "next" and len(lhs.args) == 1:
                return EffectNext(lhs.args[0])
            if lhs.functor == "goal" and len(lhs.args) == 2:
                return EffectGoal(lhs.args[0], lhs.args[1])
        if not isinstance(lhs, (Atom, Compound)):
            raise ParseError(f"not a callable goal: {to_text(lhs)}",
                             tok.line, tok.column)
        return PositiveGoal(lhs)

    def parse_clause(self) -> Tuple[Term, Tuple[Literal, ...], Token]:
        start = self.peek()
        head = self.parse_expr()
        if not isinstance(head, (Atom, Compound)):
            raise ParseError(f"invalid clause head: {to_text(head)}",
                             start.line, start.column)
        body: List[Literal] = []
        if self.at(":-"):
            self.next()
            body.append(self.parse_literal())
            while self.at(","):
                self.next()
                body.append(self.parse_literal())
        self.expect(".")
        return head, tuple(body), start


def parse_sidl(source: str) -> GameSpec:
    """Parse SIDL source text into a GameSpec (unvalidated)."""
    tokens = tokenize(source)
    if not tokens:
        raise ParseError("EmptySpec: nothing to parse")
    parser = _Parser(tokens)
    spec = GameSpec(source=source)
    branching_index = 0
    while parser.peek() is not None:
        head, body, start = parser.parse_clause()
        name, arity = functor_arity(head)

        def bad(msg: str):
            return ParseError(msg, start.line, start.column)

        if name == "fact" and arity == 2 and not body:
            pname, parity = head.args
            if not isinstance(pname, Atom) or not isinstance(parity, Int):
                raise bad("fact/2 expects an atom and an integer")
            spec.fact_decls[pname.name] = parity.value
        elif name == "switch" and arity == 3 and not body:
            bid, owner, aliases = head.args
            if (not isinstance(bid, Int) or not isinstance(owner, Atom)
                    or not isinstance(aliases, ListTerm)):
                raise bad("switch/3 expects (integer, atom, alias list)")
            names = []
            for a in aliases.items:
                if isinstance(a, Atom):
                    names.append(a.name)
                elif isinstance(a, Int):
                    names.append(str(a.value))
                else:
                    raise bad(f"invalid switch alias: {to_text(a)}")
            spec.switches.append(SwitchDecl(bid.value, owner.name, tuple(names)))
        elif name == "chance" and arity == 2 and not body:
            bid, dist = head.args
            if not isinstance(bid, Int) or not isinstance(dist, ListTerm):
                raise bad("chance/2 expects (integer, distribution list)")
            probs = []
            for p in dist.items:
                if isinstance(p, (Int, Real)):
                    probs.append(float(p.value))
                else:
                    raise bad(f"invalid probability: {to_text(p)}")
            spec.chances.append(ChanceDecl(bid.value, tuple(probs)))
        elif name == "branching" and arity == 2 and not body:
            ops, bid = head.args
            if not isinstance(ops, ListTerm):
                raise bad("branching/2 expects an operator list")
            if isinstance(bid, Int):
                bid_val: Optional[int] = bid.value
            elif isinstance(bid, Atom) and bid.name == "nil":
                bid_val = None
            else:
                raise bad(f"invalid branching BID: {to_text(bid)}")
            for op in ops.items:
                if not isinstance(op, (Atom, Compound)):
                    raise bad(f"invalid operator: {to_text(op)}")
            spec.branchings.append(
                BranchingDecl(ops.items, bid_val, branching_index))
            branching_index += 1
        elif name == "init" and arity == 1 and not body:
            spec.init_facts.append(head.args[0])
        elif name == "operation" and arity == 1:
            spec.operation_rules.append(Rule(head, body))
        elif name == "terminal" and arity == 0:
            spec.terminal_rules.append(Rule(head, body))
        elif name in ("hidden", "request") and arity == 2:
            norm_head = Compound("hidden", head.args)
            spec.hidden_rules.append(Rule(norm_head, body))
        elif body:
            raise bad(f"unknown rule head: {name}/{arity}")
        else:
            raise bad(f"unknown declaration: {name}/{arity}")
    return spec


# --- validation ---

@dataclass(frozen=True)
class Issue:
    code: str
    detail: str

    def __str__(self):
        return f"{self.code}: {self.detail}"


@dataclass
class ValidationReport:
    errors: List[Issue] = field(default_factory=list)
    warnings: List[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error_codes(self) -> List[str]:
        return [e.code for e in self.errors]


def _fact_uses(spec: GameSpec):
    """Every (term, context) position where a database fact is referenced."""
    for rule in (spec.hidden_rules + spec.operation_rules + spec.terminal_rules):
        for lit in rule.body:
            if isinstance(lit, (PositiveGoal, Negation)):
                yield lit.term
            elif isinstance(lit, (EffectAx, EffectNext)):
                yield lit.term
        if isinstance(rule.head, Compound) and rule.head.functor == "hidden":
            yield rule.head.args[0]
    for f in spec.init_facts:
        name, _ = functor_arity(f) if isinstance(f, (Atom, Compound)) else ("", 0)
        if name not in ("account", "does"):
            yield f


def validate(spec: GameSpec) -> ValidationReport:
    report = ValidationReport()
    err = lambda code, detail: report.errors.append(Issue(code, detail))
    warn = lambda code, detail: report.warnings.append(Issue(code, detail))

    seen_bids = {}
    for decl in list(spec.switches) + list(spec.chances):
        if decl.bid in seen_bids:
            err("DuplicateBid", f"BID {decl.bid} declared more than once")
        seen_bids[decl.bid] = decl

    for c in spec.chances:
        for p in c.distribution:
            if not (0.0 < p < 1.0):
                err("DistributionRange",
                    f"chance {c.bid}: entry {p} outside (0, 1)")
        total = sum(c.distribution)
        if abs(total - 1.0) > 1e-9:
            err("DistributionSum", f"chance {c.bid}: sum is {total}")

    branch_lengths = {s.bid: len(s.aliases) for s in spec.switches}
    branch_lengths.update({c.bid: len(c.distribution) for c in spec.chances})
    for b in spec.branchings:
        if b.bid is None:
            if len(b.operators) != 1:
                err("NilBranchingArity",
                    f"branching #{b.decl_index}: nil BID requires exactly one "
                    f"operator, got {len(b.operators)}")
        elif b.bid not in branch_lengths:
            err("UnknownBid",
                f"branching #{b.decl_index}: BID {b.bid} is not declared")
        elif len(b.operators) != branch_lengths[b.bid]:
            err("ArityMismatch",
                f"branching #{b.decl_index}: {len(b.operators)} operators vs "
                f"{branch_lengths[b.bid]} positions of BID {b.bid}")

    if not spec.agents:
        err("NoAgents", "no init(account(Agent, Balance)) declarations")

    for pname in spec.fact_decls:
        if pname in RESERVED:
            err("ReservedFactName", f"fact name {pname!r} is reserved")

    for term in _fact_uses(spec):
        if isinstance(term, (Atom, Compound)):
            name, arity = functor_arity(term)
            if name in spec.fact_decls and spec.fact_decls[name] != arity:
                err("FactArity",
                    f"{to_text(term)} used with arity {arity}, declared "
                    f"{spec.fact_decls[name]}")

    for rule in spec.hidden_rules + spec.terminal_rules:
        for lit in rule.body:
            if isinstance(lit, (EffectAx, EffectNext, EffectGoal)):
                err("EffectOutsideOperation",
                    f"effect {literal_text(lit)} in non-operation rule "
                    f"{to_text(rule.head)}")

    for f in spec.init_facts:
        if not is_ground(f):
            err("NonGroundInit", f"init fact {to_text(f)} is not ground")

    if not spec.terminal_rules:
        warn("NoTerminalRule", "game has no terminal rule and never ends")
    for s in spec.switches:
        if len(set(s.aliases)) != len(s.aliases):
            warn("DuplicateAlias", f"switch {s.bid} repeats an alias")
    op_heads = {functor_arity(r.head.args[0]) for r in spec.operation_rules}
    for b in spec.branchings:
        for op in b.operators:
            if functor_arity(op) not in op_heads:
                warn("UnmatchedOperation",
                     f"branching #{b.decl_index}: no operation rule for "
                     f"{to_text(op)}")
    return report


# --- canonical printer ---

def _clause_text(rule: Rule) -> str:
    head = to_text(rule.head)
    if not rule.body:
        return f"{head}."
    body = ", ".join(literal_text(l) for l in rule.body)
    return f"{head} :- {body}."


def pretty(spec: GameSpec) -> str:
    """Canonical one-clause-per-line form; a parse fixed point."""
    lines: List[str] = []
    for pname, arity in spec.fact_decls.items():
        lines.append(f"fact({pname}, {arity}).")
    for rule in spec.hidden_rules:
        lines.append(_clause_text(rule))
    for c in spec.chances:
        dist = ", ".join(repr(p) for p in c.distribution)
        lines.append(f"chance({c.bid}, [{dist}]).")
    for s in spec.switches:
        aliases = ", ".join(to_text(Atom(a)) for a in s.aliases)
        lines.append(f"switch({s.bid}, {s.owner}, [{aliases}]).")
    for b in spec.branchings:
        ops = ", ".join(to_text(op) for op in b.operators)
        bid = "nil" if b.bid is None else str(b.bid)
        lines.append(f"branching([{ops}], {bid}).")
    for rule in spec.operation_rules:
        lines.append(_clause_text(rule))
    for rule in spec.terminal_rules:
        lines.append(_clause_text(rule))
    for f in spec.init_facts:
        lines.append(f"init({to_text(f)}).")
    return "\n".join(lines) + "\n"
