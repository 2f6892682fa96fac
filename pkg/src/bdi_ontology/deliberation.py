"""Production rules over belief atoms and the triples-to-beliefs-to-triples loop.

A rule file holds ``@prefix`` lines and rules of the form::

    @id z2
    @priority 0
    (?b a bdi:Belief) / (?b bdi:refersTo ?w) & not(?b bdi:motivates ?d)
        >> assert_desire(?b) as ?d ; link(motivates, ?b, ?d) .

``ingest`` turns a graph into belief atoms, ``run`` fires one rule instance
per cycle (each firing is recorded as a mental process), ``export`` projects
the atoms back to a graph.  Refractoriness keys are stored as ``t2b:``
triples on the process, so they survive an export/ingest round trip.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .mental import PROCESS_FOR_STATE, MentalGraph, MentalGraphError
from .rdf import (BDI, D0, DUL, RDF, RUN, STANDARD_PREFIXES, T2B, XSD, BlankNode, Graph, Iri, Literal,
                  Term, Triple)
from .schema import SchemaRegistry, extend_closure, load_schema
from .temporal import TemporalError, TimeInstant, valid_at

__all__ = [
    "Action", "AssertState", "BeliefAtom", "DefinePlan", "DeliberationError", "EmitTriple",
    "Justify", "KBState", "LinkStates", "Modify", "Pattern", "Provenance", "Rule",
    "RuleActionError", "RuleSyntaxError", "Suppress", "TraceEvent", "ValidAt", "Var",
    "match_pattern", "solve",
    "DEFAULT_CLOCK_START", "export", "ingest", "parse_rules", "run", "trace_jsonl",
]

DEFAULT_CLOCK_START = TimeInstant.parse("2025-01-01T00:00:00Z")


class DeliberationError(ValueError):
    pass


class RuleSyntaxError(DeliberationError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
        self.line = line
        self.column = column
        self.reason = message


class RuleActionError(DeliberationError):
    """A rule's tail failed; ``kb`` holds the state (and trace) before that firing."""

    def __init__(self, message: str, kb: "KBState", rule: str):
        super().__init__(message)
        self.kb = kb
        self.rule = rule


# -- rule data ---------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


Slot = Union[Var, Term]


@dataclass(frozen=True)
class Pattern:
    s: Slot
    p: Slot
    o: Slot
    negated: bool = False

    def variables(self) -> set[str]:
        return {x.name for x in (self.s, self.p, self.o) if isinstance(x, Var)}


@dataclass(frozen=True)
class ValidAt:
    """Builtin conditional ``valid_at(?x, NOW)``; ``at`` None means the run's start instant."""

    term: Slot
    at: Optional[Slot] = None

    def variables(self) -> set[str]:
        return {x.name for x in (self.term, self.at) if isinstance(x, Var)}


@dataclass(frozen=True)
class AssertState:
    kind: Iri
    args: tuple  # (source,) or (agent, world state)
    bind: Optional[str] = None


@dataclass(frozen=True)
class Suppress:
    target: Slot


@dataclass(frozen=True)
class Modify:
    target: Slot
    refers_to: Optional[Slot] = None
    bind: Optional[str] = None


@dataclass(frozen=True)
class LinkStates:
    rel: Iri
    src: Slot
    dst: Slot


@dataclass(frozen=True)
class Justify:
    targets: tuple
    text: str
    bind: Optional[str] = None


@dataclass(frozen=True)
class EmitTriple:
    s: Slot
    p: Slot
    o: Slot


@dataclass(frozen=True)
class DefinePlan:
    intention: Slot
    goal: Slot
    tasks: tuple
    bind: Optional[str] = None


Action = Union[AssertState, Suppress, Modify, LinkStates, Justify, EmitTriple, DefinePlan]


@dataclass(frozen=True)
class Rule:
    id: str
    head: Pattern
    conditionals: tuple = ()
    tail: tuple = ()
    priority: int = 0
    process: Optional[Iri] = None

    @property
    def positives(self) -> list[Pattern]:
        return [c for c in self.conditionals if isinstance(c, Pattern) and not c.negated]

    @property
    def negatives(self) -> list[Pattern]:
        return [c for c in self.conditionals if isinstance(c, Pattern) and c.negated]

    @property
    def builtins(self) -> list[ValidAt]:
        return [c for c in self.conditionals if isinstance(c, ValidAt)]

    def variables(self) -> set[str]:
        out = self.head.variables()
        for c in self.positives:
            out |= c.variables()
        return out


# -- rule parser --------------------------------------------------------------------

_TEMPLATE_VAR = re.compile(r"\{\?([A-Za-z_][A-Za-z0-9_]*)\}")

_RULE_TOKENS = [
    ("ws", r"[ \t\r\n]+"),
    ("comment", r"#[^\n]*"),
    ("iri", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("string", r'"""(?:[^"\\]|\\.|"(?!""))*"""|"(?:[^"\\\n]|\\.)*"'),
    ("annot", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("dtmark", r"\^\^"),
    ("var", r"\?[A-Za-z_][A-Za-z0-9_]*"),
    ("number", r"[+-]?\d+(?:\.\d+)?"),
    ("pname", r"(?:[A-Za-z][\w\-]*(?:\.[\w\-]+)*)?:(?:[\w](?:[\w\-.]*[\w\-])?)?"),
    ("name", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("arrow", r">>"),
    ("punct", r"[()/&,;.]"),
]
_RULE_RE = re.compile("|".join(f"(?P<{n}>{r})" for n, r in _RULE_TOKENS), re.DOTALL)

_LINK_NAMES = {"motivates": BDI.motivates, "supports": BDI.supports, "fulfils": BDI.fulfils,
               "fulfills": BDI.fulfils}
_ASSERT = {"assert_belief": BDI.Belief, "assert_desire": BDI.Desire,
           "assert_intention": BDI.Intention}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _unescape(body: str) -> str:
    return json.loads('"' + body.replace("\n", "\\n").replace("\t", "\\t") + '"')


class _RuleParser:
    def __init__(self, text: str, prefixes: Optional[dict]):
        self.prefixes = dict(STANDARD_PREFIXES)
        self.prefixes.update(prefixes or {})
        self.toks: list[_Tok] = []
        pos, line, line_start = 0, 1, 0
        while pos < len(text):
            m = _RULE_RE.match(text, pos)
            if m is None:
                raise RuleSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                self.toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
            for i, ch in enumerate(m.group()):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
            pos = m.end()
        self.i = 0
        self.end = (line, pos - line_start + 1)

    def fail(self, message: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        line, col = (tok.line, tok.col) if tok else self.end
        raise RuleSyntaxError(message, line, col)

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            self.fail(f"expected {what}, found end of input")
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind in ("punct", "arrow", "name") and tok.text == text

    def expect(self, text: str) -> _Tok:
        tok = self.next(repr(text))
        if tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    # grammar

    def parse(self) -> list[Rule]:
        rules: list[Rule] = []
        ids: set[str] = set()
        while self.peek() is not None:
            tok = self.peek()
            if tok.kind == "annot" and tok.text == "@prefix":
                self.prefix_decl()
                continue
            rule = self.rule(len(rules) + 1, tok)
            if rule.id in ids:
                self.fail(f"duplicate rule id {rule.id!r}", tok)
            ids.add(rule.id)
            rules.append(rule)
        return rules

    def prefix_decl(self) -> None:
        self.next("@prefix")
        tok = self.next("prefix name")
        if tok.kind != "pname" or not tok.text.endswith(":") or tok.text.count(":") != 1:
            self.fail("expected a prefix name like 'ex:'", tok)
        iri = self.next("IRI")
        if iri.kind != "iri":
            self.fail("expected <IRI> in prefix declaration", iri)
        self.prefixes[tok.text[:-1]] = iri.text[1:-1]
        self.expect(".")

    def rule(self, index: int, first: _Tok) -> Rule:
        rid, priority, process = f"rule{index:03d}", 0, None
        while self.peek() is not None and self.peek().kind == "annot":
            tok = self.next("annotation")
            if tok.text == "@id":
                val = self.next("rule id")
                if val.kind not in ("name", "number"):
                    self.fail("rule id must be a plain name", val)
                rid = val.text
            elif tok.text == "@priority":
                val = self.next("integer")
                if val.kind != "number" or "." in val.text:
                    self.fail("priority must be an integer", val)
                priority = int(val.text)
            elif tok.text == "@process":
                process = self.iri_term(self.next("process class"))
            else:
                self.fail(f"unknown annotation {tok.text}", tok)
        head_tok = self.peek()
        if self.at("not"):
            self.fail("the head of a rule must be a positive pattern", head_tok)
        head = self.pattern()
        conds: list = []
        if self.at("/"):
            self.next("/")
            conds.append(self.condition())
            while self.at("&"):
                self.next("&")
                conds.append(self.condition())
        self.expect(">>")
        tail = [self.action()]
        while self.at(";"):
            self.next(";")
            tail.append(self.action())
        self.expect(".")
        rule = Rule(rid, head, tuple(conds), tuple(tail), priority, process)
        self.check_range(rule, first)
        return rule

    def check_range(self, rule: Rule, tok: _Tok) -> None:
        bound = rule.variables()
        for b in rule.builtins:
            missing = b.variables() - bound
            if missing:
                self.fail(f"rule {rule.id}: valid_at uses unbound ?{sorted(missing)[0]}", tok)
        for action in rule.tail:
            used = _action_vars(action)
            missing = used - bound
            if missing:
                self.fail(f"rule {rule.id}: tail variable ?{sorted(missing)[0]} does not occur "
                          f"in the head or a positive conditional", tok)
            name = getattr(action, "bind", None)
            if name is not None:
                if name in bound:
                    self.fail(f"rule {rule.id}: 'as ?{name}' rebinds a bound variable", tok)
                bound = bound | {name}

    def condition(self):
        if self.at("not"):
            self.next("not")
            self.expect("(")
            if self.at("("):
                pat = self.pattern()
            else:
                pat = self.triple_body(self.peek())
            self.expect(")")
            return Pattern(pat.s, pat.p, pat.o, negated=True)
        if self.at("valid_at"):
            self.next("valid_at")
            self.expect("(")
            term = self.term(self.next("term"))
            self.expect(",")
            tok = self.next("instant")
            at = None if (tok.kind == "name" and tok.text == "NOW") else self.term(tok)
            self.expect(")")
            return ValidAt(term, at)
        return self.pattern()

    def pattern(self) -> Pattern:
        tok = self.expect("(")
        pat = self.triple_body(tok)
        self.expect(")")
        return pat

    def triple_body(self, tok) -> Pattern:
        s = self.term(self.next("subject"))
        ptok = self.next("predicate")
        p = RDF.type if (ptok.kind == "name" and ptok.text == "a") else self.term(ptok)
        o = self.term(self.next("object"))
        if isinstance(p, Literal) or isinstance(s, Literal):
            self.fail("literals may only appear in object position", tok)
        if isinstance(p, Var) and not (isinstance(s, Var) and isinstance(o, Var)):
            self.fail("a variable predicate is only allowed in the full wildcard (?s ?p ?o)", ptok)
        return Pattern(s, p, o)

    def iri_term(self, tok: _Tok) -> Iri:
        try:
            if tok.kind == "iri":
                return Iri(tok.text[1:-1])
            if tok.kind == "pname":
                prefix, local = tok.text.split(":", 1)
                if prefix not in self.prefixes:
                    self.fail(f"undefined prefix {prefix!r}", tok)
                return Iri(self.prefixes[prefix] + local)
        except ValueError as exc:
            if isinstance(exc, RuleSyntaxError):
                raise
            self.fail(str(exc), tok)
        self.fail(f"expected an IRI, found {tok.text!r}", tok)

    def term(self, tok: _Tok) -> Slot:
        if tok.kind == "var":
            return Var(tok.text[1:])
        if tok.kind in ("iri", "pname"):
            return self.iri_term(tok)
        if tok.kind == "string":
            body = tok.text[3:-3] if tok.text.startswith('"""') else tok.text[1:-1]
            lexical = _unescape(body)
            nxt = self.peek()
            if nxt is not None and nxt.kind == "annot" and nxt.line == tok.line and nxt.col == tok.col + len(tok.text):
                self.next("language tag")
                return Literal(lexical, language=nxt.text[1:])
            if nxt is not None and nxt.kind == "dtmark":
                self.next("^^")
                return Literal(lexical, self.iri_term(self.next("datatype")))
            return Literal(lexical)
        if tok.kind == "number":
            return Literal(tok.text, XSD.decimal if "." in tok.text else XSD.integer)
        if tok.kind == "name" and tok.text in ("true", "false"):
            return Literal(tok.text, XSD.boolean)
        if tok.kind == "name" and tok.text.startswith("_"):
            return BlankNode(tok.text)
        self.fail(f"expected a term, found {tok.text!r}", tok)

    def action(self) -> Action:
        tok = self.next("action")
        if tok.kind != "name":
            self.fail(f"expected an action name, found {tok.text!r}", tok)
        name = tok.text
        self.expect("(")
        args: list = []
        if not self.at(")"):
            args.append(self.action_arg())
            while self.at(","):
                self.next(",")
                args.append(self.action_arg())
        self.expect(")")
        bind = None
        if self.at("as"):
            self.next("as")
            v = self.next("variable")
            if v.kind != "var":
                self.fail("'as' must be followed by a variable", v)
            bind = v.text[1:]
        return self.build_action(name, args, bind, tok)

    def action_arg(self):
        tok = self.next("argument")
        if tok.kind == "name" and tok.text in _LINK_NAMES:
            return ("symbol", tok.text)
        return self.term(tok)

    def build_action(self, name: str, args: list, bind: Optional[str], tok: _Tok) -> Action:
        def arity(lo: int, hi: Optional[int] = None) -> None:
            hi = lo if hi is None else hi
            if not (lo <= len(args) <= (hi if hi >= 0 else len(args))):
                want = f"{lo}" if lo == hi else f"{lo}..{hi if hi >= 0 else ''}"
                self.fail(f"{name} takes {want} arguments, got {len(args)}", tok)
            for a in args:
                if isinstance(a, tuple) and name != "link":
                    self.fail(f"unexpected symbol {a[1]!r} in {name}", tok)

        def no_bind() -> None:
            if bind is not None:
                self.fail(f"{name} does not produce a value for 'as'", tok)

        if name in _ASSERT:
            arity(1, 2)
            return AssertState(_ASSERT[name], tuple(args), bind)
        if name == "suppress":
            arity(1)
            no_bind()
            return Suppress(args[0])
        if name == "modify":
            arity(1, 2)
            return Modify(args[0], args[1] if len(args) > 1 else None, bind)
        if name == "link":
            if len(args) != 3:
                self.fail(f"link takes 3 arguments, got {len(args)}", tok)
            no_bind()
            rel = args[0]
            if isinstance(rel, tuple):
                rel = _LINK_NAMES[rel[1]]
            if rel not in (BDI.motivates, BDI.supports, BDI.fulfils, BDI.fulfills):
                self.fail("link relation must be motivates, supports or fulfils", tok)
            return LinkStates(BDI.fulfils if rel == BDI.fulfills else rel, args[1], args[2])
        if name == "justify":
            arity(2, -1)
            text = args[-1]
            if not (isinstance(text, Literal) and text.datatype == XSD.string):
                self.fail("justify needs a plain string as its last argument", tok)
            return Justify(tuple(args[:-1]), text.lexical, bind)
        if name == "emit":
            arity(3)
            no_bind()
            return EmitTriple(*args)
        if name == "define_plan":
            arity(3, -1)
            return DefinePlan(args[0], args[1], tuple(args[2:]), bind)
        self.fail(f"unknown action {name!r}", tok)


def _action_vars(action: Action) -> set[str]:
    slots: list = []
    if isinstance(action, AssertState):
        slots = list(action.args)
    elif isinstance(action, Suppress):
        slots = [action.target]
    elif isinstance(action, Modify):
        slots = [action.target, action.refers_to]
    elif isinstance(action, LinkStates):
        slots = [action.src, action.dst]
    elif isinstance(action, Justify):
        slots = list(action.targets)
        return {s.name for s in slots if isinstance(s, Var)} | set(_TEMPLATE_VAR.findall(action.text))
    elif isinstance(action, EmitTriple):
        slots = [action.s, action.p, action.o]
    elif isinstance(action, DefinePlan):
        slots = [action.intention, action.goal, *action.tasks]
    return {s.name for s in slots if isinstance(s, Var)}


def parse_rules(text: str, prefixes: Optional[dict] = None) -> list[Rule]:
    """Parse a rule file; ``prefixes`` (e.g. a graph's prefix map) are predeclared."""
    return _RuleParser(text, prefixes).parse()


# -- knowledge base -------------------------------------------------------------------


@dataclass(frozen=True)
class Provenance:
    kind: str  # "ingested" | "derived" | "builtin"
    rule: Optional[str] = None

    def __str__(self) -> str:
        return f"derived:{self.rule}" if self.kind == "derived" else self.kind


INGESTED = Provenance("ingested")
BUILTIN = Provenance("builtin")


@dataclass(frozen=True)
class BeliefAtom:
    s: Term
    p: Iri
    o: Term
    provenance: Provenance
    at: int  # logical tick: firings completed when the atom was added
    seq: int  # insertion order

    @property
    def triple(self) -> Triple:
        return Triple(self.s, self.p, self.o)


@dataclass(frozen=True)
class TraceEvent:
    cycle: int
    rule: str
    bindings: dict
    process: Iri
    at: TimeInstant

    def to_json(self) -> str:
        return json.dumps({
            "cycle": self.cycle,
            "rule": self.rule,
            "process": str(self.process),
            "at": self.at.canonical,
            "bindings": {k: _term_key(v) for k, v in sorted(self.bindings.items())},
        }, sort_keys=True, ensure_ascii=False)


@dataclass
class KBState:
    graph: Graph
    atoms: dict = field(default_factory=dict)  # Triple -> BeliefAtom
    fired: set = field(default_factory=set)  # (rule id, binding hash)
    trace: list = field(default_factory=list)
    clock: int = 0
    bound_reached: bool = False

    def atom_set(self) -> frozenset:
        return frozenset(self.atoms)

    def copy(self) -> "KBState":
        return KBState(self.graph.copy(), dict(self.atoms), set(self.fired), list(self.trace),
                       self.clock, self.bound_reached)

    def add(self, t: Triple, provenance: Provenance) -> None:
        if t not in self.atoms:
            self.graph.add(t)
            self.atoms[t] = BeliefAtom(t.subject, t.predicate, t.object, provenance, self.clock,
                                       len(self.atoms))


def ingest(g: Graph) -> KBState:
    """One Ingested atom per triple; fired rule instances are recovered from ``t2b:`` triples."""
    kb = KBState(Graph(prefixes=g.prefixes))
    for t in g:
        kb.add(t, INGESTED)
    for t in g.match(None, T2B.firedRule, None):
        for key in g.objects(t.subject, T2B.bindingKey):
            kb.fired.add((t.object.lexical, key.lexical))
    kb.clock = len(kb.fired)
    return kb


def export(kb: KBState) -> Graph:
    g = Graph((a.triple for a in kb.atoms.values()), prefixes=kb.graph.prefixes)
    iris = [t for t in g.nodes() if isinstance(t, Iri)]
    for prefix, ns in (("run", RUN), ("dul", DUL), ("d0", D0)):
        if any(t in ns for t in iris):
            g.bind(prefix, str(ns))
    if g.match(None, T2B.firedRule, None):
        g.bind("t2b", str(T2B))
    return g


def trace_jsonl(trace: Iterable[TraceEvent]) -> str:
    return "".join(e.to_json() + "\n" for e in trace)


# -- matching -----------------------------------------------------------------------


def _term_key(t: Term) -> str:
    if isinstance(t, Iri):
        return f"<{t.value}>"
    if isinstance(t, BlankNode):
        return f"_:{t.id}"
    out = json.dumps(t.lexical, ensure_ascii=False)
    if t.language:
        return f"{out}@{t.language}"
    if t.datatype != XSD.string:
        return f"{out}^^<{t.datatype.value}>"
    return out


def binding_hash(rule_id: str, binding: dict) -> str:
    text = rule_id + "|" + ";".join(f"{k}={_term_key(v)}" for k, v in sorted(binding.items()))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:24]


def _resolve(slot: Slot, binding: dict) -> Optional[Term]:
    if isinstance(slot, Var):
        return binding.get(slot.name)
    return slot


def _unify(pat: Pattern, t: Triple, binding: dict) -> Optional[dict]:
    out = binding
    for slot, value in zip((pat.s, pat.p, pat.o), t):
        if isinstance(slot, Var):
            have = out.get(slot.name)
            if have is None:
                if out is binding:
                    out = dict(binding)
                out[slot.name] = value
            elif have != value:
                return None
        elif slot != value:
            return None
    return out


def match_pattern(pat: Pattern, g: Graph, binding: dict) -> Iterable[tuple[dict, Triple]]:
    s, p, o = (_resolve(x, binding) for x in (pat.s, pat.p, pat.o))
    for t in g.match(s, p, o):
        b = _unify(pat, t, binding)
        if b is not None:
            yield b, t


def solve(patterns: Iterable[Pattern], g: Graph, binding: Optional[dict] = None) -> list[dict]:
    """All bindings satisfying the positive ``patterns`` (joined left to right)."""
    partial = [dict(binding or {})]
    for pat in patterns:
        partial = [b2 for b in partial for b2, _ in match_pattern(pat, g, b)]
    return partial


def _instances(rule: Rule, g: Graph, now: TimeInstant) -> list[tuple[dict, tuple]]:
    """All (binding, matched triples) of ``rule`` against ``g``."""
    partial = [(b, (t,)) for b, t in match_pattern(rule.head, g, {})]
    for cond in rule.positives:
        partial = [(b2, used + (t,)) for b, used in partial for b2, t in match_pattern(cond, g, b)]
    out = []
    for b, used in partial:
        if any(next(iter(match_pattern(n, g, b)), None) is not None for n in rule.negatives):
            continue
        if not all(_holds(v, g, b, now) for v in rule.builtins):
            continue
        out.append((b, used))
    return out


def _holds(builtin: ValidAt, g: Graph, binding: dict, now: TimeInstant) -> bool:
    entity = _resolve(builtin.term, binding)
    at = now
    if builtin.at is not None:
        lit = _resolve(builtin.at, binding)
        if not isinstance(lit, Literal):
            return False
        try:
            at = TimeInstant.parse(lit.lexical)
        except TemporalError:
            return False
    try:
        return valid_at(entity, at, g)
    except TemporalError:
        return False


def _agenda(rules: list[Rule], kb: KBState, now: TimeInstant) -> list:
    agenda = []
    for rule in rules:
        for binding, used in _instances(rule, kb.graph, now):
            key = binding_hash(rule.id, binding)
            if (rule.id, key) in kb.fired:
                continue
            order = tuple((k, binding[k].sort_key()) for k in sorted(binding))
            agenda.append(((-rule.priority, rule.id, order), rule, binding, used, key))
    agenda.sort(key=lambda item: item[0])
    return agenda


# -- firing -------------------------------------------------------------------------


def _ground(slot, env: dict, what: str) -> Term:
    value = _resolve(slot, env)
    if value is None:
        raise MentalGraphError(f"{what}: ?{slot.name} is unbound")
    return value


def _fill(text: str, env: dict) -> str:
    def sub(m: re.Match) -> str:
        v = env[m.group(1)]
        if isinstance(v, Literal):
            return v.lexical
        if isinstance(v, Iri):
            return v.local_name
        return str(v)

    return _TEMPLATE_VAR.sub(sub, text)


def _assert_args(mg: MentalGraph, action: AssertState, env: dict) -> tuple[Term, Term]:
    if len(action.args) == 2:
        return _ground(action.args[0], env, "agent"), _ground(action.args[1], env, "world state")
    source = _ground(action.args[0], env, "source")
    if mg.state_kind(source) is not None:
        agent, world = mg.agent_of(source), mg.graph.value(source, BDI.refersTo)
    elif mg._is(source, BDI.WorldState):
        perceivers = mg.graph.subjects(BDI.perceives, source)
        agent, world = (perceivers[0] if perceivers else None), source
    else:
        raise MentalGraphError(f"{source} is neither a mental state nor a world state")
    if agent is None or world is None:
        raise MentalGraphError(f"cannot tell which agent and world state {source} concerns")
    return agent, world


def _profile(rule: Rule, mg: MentalGraph, env: dict) -> tuple[Iri, Optional[Term]]:
    """Kind and agent of the process a firing of ``rule`` stands for."""
    kind, agent = rule.process, None
    for action in rule.tail:
        if isinstance(action, AssertState):
            if any(isinstance(a, Var) and a.name not in env for a in action.args):
                continue
            k = PROCESS_FOR_STATE[action.kind]
            a, _ = _assert_args(mg, action, env)
        elif isinstance(action, (Suppress, Modify)):
            if isinstance(action.target, Var) and action.target.name not in env:
                continue
            target = _ground(action.target, env, "target")
            state_kind = mg.state_kind(target)
            if state_kind is None:
                raise MentalGraphError(f"{target} is not a mental state")
            k, a = PROCESS_FOR_STATE[state_kind], mg.agent_of(target)
        elif isinstance(action, DefinePlan):
            if isinstance(action.intention, Var) and action.intention.name not in env:
                continue
            k, a = BDI.Planning, mg.agent_of(_ground(action.intention, env, "intention"))
        else:
            continue
        kind = kind or k
        agent = agent or a
        if kind and agent:
            break
    if agent is None:
        for v in sorted(env.values()):
            if mg.state_kind(v) is not None:
                agent = mg.agent_of(v)
                if agent is not None:
                    break
    return kind or BDI.MentalProcess, agent


def _run_action(action: Action, mg: MentalGraph, env: dict, via: Iri, at: TimeInstant) -> None:
    if isinstance(action, AssertState):
        agent, world = _assert_args(mg, action, env)
        rec = mg.assert_state(agent, action.kind, world, at, via)
        if action.bind:
            env[action.bind] = rec.id
    elif isinstance(action, Suppress):
        mg.suppress_state(_ground(action.target, env, "suppress"), via, at)
    elif isinstance(action, Modify):
        refers = _ground(action.refers_to, env, "modify") if action.refers_to is not None else None
        rec = mg.modify_state(_ground(action.target, env, "modify"), via, at, refers)
        if action.bind:
            env[action.bind] = rec.id
    elif isinstance(action, LinkStates):
        mg.link_states(_ground(action.src, env, "link"), action.rel, _ground(action.dst, env, "link"))
    elif isinstance(action, Justify):
        rec = mg.justify([_ground(t, env, "justify") for t in action.targets], _fill(action.text, env))
        if action.bind:
            env[action.bind] = rec.id
    elif isinstance(action, EmitTriple):
        s, p, o = (_ground(x, env, "emit") for x in (action.s, action.p, action.o))
        if isinstance(s, Literal) or not isinstance(p, Iri):
            raise MentalGraphError(f"emit: ({s} {p} {o}) is not a valid triple")
        mg.emit([Triple(s, p, o)])
    elif isinstance(action, DefinePlan):
        plan = mg.define_plan(via, _ground(action.intention, env, "define_plan"),
                              _ground(action.goal, env, "define_plan"),
                              [_ground(t, env, "define_plan") for t in action.tasks])
        if action.bind:
            env[action.bind] = plan
    else:  # pragma: no cover
        raise TypeError(action)


def run(kb: KBState, rules: list[Rule], max_cycles: int = 1000,
        clock_start: TimeInstant = DEFAULT_CLOCK_START,
        registry: Optional[SchemaRegistry] = None) -> KBState:
    """Fire one rule instance per cycle until the agenda is empty or ``max_cycles`` is hit.

    The input state is not modified.  Firing ``k`` (counted across runs) happens at
    ``clock_start + (k - 1)`` seconds; ``valid_at(?x, NOW)`` tests against ``clock_start``.
    """
    if max_cycles < 1:
        raise ValueError("max_cycles must be at least 1")
    clock_start = TimeInstant.coerce(clock_start)
    kb = kb.copy()
    kb.bound_reached = False
    if not rules:
        return kb
    reg = registry or load_schema()
    mg = MentalGraph(kb.graph, reg)
    cycle = 0
    while True:
        agenda = _agenda(rules, kb, clock_start)
        if not agenda:
            break
        if cycle == max_cycles:
            kb.bound_reached = True
            break
        cycle += 1
        _, rule, binding, used, key = agenda[0]
        _fire(kb, mg, rule, binding, used, key, cycle, clock_start, reg)
    return kb


def _fire(kb: KBState, mg: MentalGraph, rule: Rule, binding: dict, used: tuple, key: str,
          cycle: int, clock_start: TimeInstant, reg: SchemaRegistry) -> None:
    at = clock_start.plus(kb.clock)
    counters = mg.counters()
    mg.journal = []
    env = dict(binding)
    try:
        kind, agent = _profile(rule, mg, env)
        states = sorted({x for t in used for x in (t.subject, t.object) if mg.state_kind(x) is not None})
        if reg.is_known(kind) and kind == BDI.Planning:
            states = [s for s in states if mg.state_kind(s) == BDI.Intention]
        head = used[0]
        trigger = next((x for x in (head.subject, head.object)
                        if mg._is(x, BDI.MentalEntity) or mg._is(x, BDI.WorldState)), None)
        proc = mg.start_process(kind, agent, at, states, trigger)
        mg.emit([Triple(proc.id, T2B.firedRule, Literal(rule.id)),
                 Triple(proc.id, T2B.bindingKey, Literal(key))])
        for action in rule.tail:
            _run_action(action, mg, env, proc.id, at)
    except MentalGraphError as exc:
        for t in mg.journal:
            kb.graph.remove(t)
        mg.restore_counters(counters)
        mg.journal = None
        raise RuleActionError(f"rule {rule.id} failed at cycle {cycle}: {exc}", kb, rule.id) from exc
    delta = mg.journal
    mg.journal = None
    entailed = extend_closure(kb.graph, delta, reg)
    kb.clock += 1
    for t in delta:
        kb.add(t, Provenance("derived", rule.id))
    for t in entailed:
        kb.add(t, BUILTIN)
    kb.fired.add((rule.id, key))
    kb.trace.append(TraceEvent(cycle, rule.id, dict(binding), proc.id, at))
