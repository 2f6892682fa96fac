"""Typed, provenance-preserving operations on mental states and processes.

A :class:`MentalGraph` is a single-writer session over a :class:`Graph`.
Every state it creates is generated by a process, carries an open validity
interval and never disappears: suppression closes the interval, and
modification suppresses the old state and generates a replacement linked by
``bdi:modifies``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .rdf import BDI, RDF, RDFS, RUN, Graph, Iri, Literal, Term, Triple
from .schema import SchemaRegistry, load_schema
from .temporal import (EffectKind, TemporalError, TimeInstant, instant_node, instant_triples,
                       valid_at, validity)

__all__ = [
    "EffectKind", "ExplanationNode", "JustificationRecord", "MentalGraph", "MentalGraphError",
    "MentalStateRecord", "ProcessRecord", "STATE_KINDS", "PROCESS_KINDS",
]

STATE_KINDS = (BDI.Belief, BDI.Desire, BDI.Intention)
PROCESS_KINDS = (BDI.BeliefProcess, BDI.DesireProcess, BDI.IntentionProcess, BDI.Planning)
PROCESS_FOR_STATE = {
    BDI.Belief: BDI.BeliefProcess,
    BDI.Desire: BDI.DesireProcess,
    BDI.Intention: BDI.IntentionProcess,
}
# rel -> (source class, target class, inverse)
LINKS = {
    BDI.motivates: (BDI.Belief, BDI.Desire, BDI.isMotivatedBy),
    BDI.supports: (BDI.Belief, BDI.Intention, BDI.isSupportedBy),
    BDI.fulfils: (BDI.Intention, BDI.Desire, None),
}

_MINTED = re.compile(r"^([A-Za-z]+)_(\d+)$")


class MentalGraphError(ValueError):
    pass


@dataclass(frozen=True)
class MentalStateRecord:
    id: Iri
    agent: Optional[Term]
    kind: Iri
    refers_to: Optional[Term]
    validity: Optional[Term]
    parts: tuple = ()


@dataclass(frozen=True)
class ProcessRecord:
    id: Iri
    agent: Optional[Term]
    kind: Iri
    at: Optional[TimeInstant]
    reasons_upon: tuple = ()
    triggered_by: Optional[Term] = None
    effects: tuple = ()  # (EffectKind, target)


@dataclass(frozen=True)
class JustificationRecord:
    id: Iri
    justifies: tuple
    text: Literal


def _kind(value: Union[str, Iri]) -> Iri:
    return value if isinstance(value, Iri) else BDI[value]


class MentalGraph:
    """Single-writer session creating and evolving mental entities in ``graph``."""

    def __init__(self, graph: Optional[Graph] = None, registry: Optional[SchemaRegistry] = None):
        self.graph = graph if graph is not None else Graph()
        self.registry = registry or load_schema()
        self.graph.bind("run", str(RUN))
        self._counters: dict[str, int] = {}
        self.journal: Optional[list[Triple]] = None
        for node in self.graph.nodes():
            if isinstance(node, Iri) and node in RUN:
                m = _MINTED.match(node.value[len(RUN):])
                if m:
                    kind, n = m.group(1), int(m.group(2))
                    self._counters[kind] = max(self._counters.get(kind, 0), n)

    # -- plumbing

    def mint(self, kind: str) -> Iri:
        n = self._counters.get(kind, 0) + 1
        self._counters[kind] = n
        return RUN[f"{kind}_{n}"]

    def counters(self) -> dict[str, int]:
        return dict(self._counters)

    def restore_counters(self, counters: dict[str, int]) -> None:
        self._counters = dict(counters)

    def emit(self, triples: Iterable[Triple]) -> set[Triple]:
        """Add ``triples``; returns the new ones (also appended to ``journal`` when set)."""
        added = {t for t in triples if self.graph.add(t)}
        if self.journal is not None:
            self.journal.extend(sorted(added))
        return added

    def _is(self, x: Term, cls: Iri) -> bool:
        return self.registry.is_instance(self.graph, x, cls)

    def _instant(self, t: TimeInstant) -> tuple[Iri, list[Triple]]:
        node = instant_node(t)
        return node, instant_triples(t, node)

    def state_kind(self, state: Term) -> Optional[Iri]:
        for k in STATE_KINDS:
            if self._is(state, k):
                return k
        return None

    def process_kind(self, process: Term) -> Optional[Iri]:
        for k in PROCESS_KINDS:
            if self._is(process, k):
                return k
        if self._is(process, BDI.MentalProcess):
            return BDI.MentalProcess
        return None

    def agent_of(self, state: Term) -> Optional[Term]:
        agents = set(self.graph.subjects(BDI.hasMentalState, state))
        for p in self.registry.subproperties(BDI.hasMentalState):
            agents.update(self.graph.subjects(p, state))
        agents.update(self.registry.objects(self.graph, state, BDI.isMentalStateOf))
        return min(agents) if agents else None

    def _check_via(self, via: Iri, state_kind: Iri) -> None:
        want = PROCESS_FOR_STATE[state_kind]
        if not self._is(via, want):
            have = self.process_kind(via)
            raise MentalGraphError(
                f"{via} cannot affect a {state_kind.local_name}: it is a "
                f"{have.local_name if have else 'non-process'}, not a {want.local_name}")

    # -- processes

    def add_agent(self, agent: Iri, label: Optional[str] = None) -> set[Triple]:
        triples = [Triple(agent, RDF.type, BDI.Agent)]
        if label is not None:
            triples.append(Triple(agent, RDFS.label, Literal(label, language="en")))
        return self.emit(triples)

    def start_process(self, kind, agent: Optional[Iri], at: TimeInstant,
                      reasons_upon: Iterable[Term] = (), triggered_by: Optional[Term] = None,
                      iri: Optional[Iri] = None) -> ProcessRecord:
        kind = _kind(kind)
        if not self.registry.is_known(kind) or BDI.MentalProcess not in self.registry.superclasses(kind):
            raise MentalGraphError(f"{kind} is not a kind of mental process")
        reasons = tuple(sorted(set(reasons_upon)))
        for r in reasons:
            if not self._is(r, BDI.MentalState):
                raise MentalGraphError(f"a process can only reason upon mental states, not {r}")
        if triggered_by is not None and not (self._is(triggered_by, BDI.MentalEntity)
                                             or self._is(triggered_by, BDI.WorldState)):
            raise MentalGraphError(f"{triggered_by} is neither a mental entity nor a world state")
        if agent is not None and not self._is(agent, BDI.Agent):
            raise MentalGraphError(f"{agent} is not typed as an Agent")
        pid = iri or self.mint(kind.local_name)
        node, time_triples = self._instant(at)
        triples = [Triple(pid, RDF.type, kind), Triple(pid, BDI.atTime, node), *time_triples]
        if agent is not None:
            triples.append(Triple(pid, BDI.isProcessedBy, agent))
        triples += [Triple(pid, BDI.reasonsUpon, r) for r in reasons]
        if triggered_by is not None:
            triples.append(Triple(pid, BDI.isTriggeredBy, triggered_by))
        self.emit(triples)
        return ProcessRecord(pid, agent, kind, at, reasons, triggered_by, ())

    # -- states

    def assert_state(self, agent: Iri, kind, refers_to: Term, start: TimeInstant, via: Iri,
                     iri: Optional[Iri] = None) -> MentalStateRecord:
        kind = _kind(kind)
        if kind == BDI.Goal:
            raise MentalGraphError("goals are descriptions, not mental states an agent holds")
        if kind not in PROCESS_FOR_STATE:
            raise MentalGraphError(f"{kind} is not Belief, Desire or Intention")
        if not self._is(agent, BDI.Agent):
            raise MentalGraphError(f"{agent} is not typed as an Agent")
        self._check_via(via, kind)
        sid = iri or self.mint(kind.local_name)
        interval = self.mint("Validity")
        node, time_triples = self._instant(start)
        self.emit([
            Triple(sid, RDF.type, kind),
            Triple(agent, BDI.hasMentalState, sid),
            Triple(agent, BDI.cognises, sid),
            Triple(sid, BDI.refersTo, refers_to),
            Triple(sid, BDI.hasValidity, interval),
            Triple(interval, RDF.type, BDI.TimeInterval),
            Triple(interval, BDI.hasStartTime, node),
            *time_triples,
            Triple(sid, BDI.atTime, node),
            Triple(via, BDI.generates, sid),
        ])
        return MentalStateRecord(sid, agent, kind, refers_to, interval, ())

    def suppress_state(self, state: Iri, via: Iri, at: TimeInstant) -> set[Triple]:
        kind = self.state_kind(state)
        if kind is None:
            raise MentalGraphError(f"{state} is not a Belief, Desire or Intention")
        self._check_via(via, kind)
        nodes = self.graph.objects(state, BDI.hasValidity)
        try:
            interval = validity(state, self.graph)
        except TemporalError as exc:
            raise MentalGraphError(str(exc)) from None
        if interval is None:
            raise MentalGraphError(f"{state} has no validity interval")
        if interval.end is not None:
            raise MentalGraphError(f"{state} was already suppressed at {interval.end}")
        if not interval.contains(at):
            raise MentalGraphError(f"{state} is not valid at {at} (starts {interval.start})")
        node, time_triples = self._instant(at)
        return self.emit([Triple(nodes[0], BDI.hasEndTime, node), *time_triples,
                           Triple(via, BDI.suppresses, state)])

    def modify_state(self, state: Iri, via: Iri, at: TimeInstant,
                     refers_to: Optional[Term] = None) -> MentalStateRecord:
        """Suppress ``state`` and generate its replacement, linked by ``modifies``."""
        kind = self.state_kind(state)
        agent = self.agent_of(state)
        if kind is None or agent is None:
            raise MentalGraphError(f"{state} is not a mental state held by an agent")
        if refers_to is None:
            refers_to = self.graph.value(state, BDI.refersTo)
            if refers_to is None:
                raise MentalGraphError(f"{state} refers to nothing; give refers_to")
        self.suppress_state(state, via, at)
        new = self.assert_state(agent, kind, refers_to, at, via)
        self.emit([Triple(via, BDI.modifies, new.id)])
        return new

    def link_states(self, src: Iri, rel, dst: Iri) -> set[Triple]:
        rel = self.registry.canonical(_kind(rel))
        if rel not in LINKS:
            raise MentalGraphError(f"unknown state link {rel}; use motivates, supports or fulfils")
        src_cls, dst_cls, inverse = LINKS[rel]
        if not (self._is(src, src_cls) and self._is(dst, dst_cls)):
            raise MentalGraphError(
                f"{rel.local_name} relates a {src_cls.local_name} to a {dst_cls.local_name}; "
                f"got {src} -> {dst}")
        triples = [Triple(src, rel, dst)]
        if inverse is not None:
            triples.append(Triple(dst, inverse, src))
        return self.emit(triples)

    def add_part(self, whole: Iri, part: Iri) -> set[Triple]:
        kind = self.state_kind(whole)
        if kind is None or not self._is(part, kind):
            raise MentalGraphError(f"parts of {whole} must share its kind")
        return self.emit([Triple(whole, BDI.hasPart, part), Triple(part, BDI.isPartOf, whole)])

    # -- justification and planning

    def justify(self, entities, text: str, iri: Optional[Iri] = None) -> JustificationRecord:
        if isinstance(entities, Term):
            entities = [entities]
        targets = tuple(sorted(set(entities)))
        if not targets:
            raise MentalGraphError("a justification must justify something")
        for e in targets:
            if not self._is(e, BDI.MentalEntity):
                raise MentalGraphError(f"{e} is not a mental entity and cannot be justified")
        jid = iri or self.mint("Justification")
        lit = Literal(text, language="en")
        self.emit([Triple(jid, RDF.type, BDI.Justification), Triple(jid, RDFS.comment, lit),
                    *(Triple(jid, BDI.justifies, e) for e in targets)])
        return JustificationRecord(jid, targets, lit)

    def define_plan(self, via: Iri, intention: Iri, goal: Iri, tasks, iri: Optional[Iri] = None) -> Iri:
        """A Plan defined by Planning process ``via``, specified by ``intention``."""
        tasks = list(tasks)
        if not self._is(via, BDI.Planning):
            raise MentalGraphError(f"{via} is not a Planning process")
        if not self._is(intention, BDI.Intention):
            raise MentalGraphError(f"{intention} is not an Intention")
        if self._is(goal, BDI.MentalState):
            raise MentalGraphError(f"{goal} is a mental state, not a Goal")
        if not tasks:
            raise MentalGraphError("a plan needs at least one task")
        if len(set(tasks)) != len(tasks):
            raise MentalGraphError("a plan's tasks must be distinct")
        plan = iri or self.mint("Plan")
        triples = [
            Triple(plan, RDF.type, BDI.Plan),
            Triple(via, BDI.defines, plan),
            Triple(via, BDI.reasonsUpon, intention),
            Triple(intention, BDI.specifies, plan),
            Triple(plan, BDI.isSpecifiedBy, intention),
            Triple(plan, BDI.addresses, goal),
            Triple(goal, RDF.type, BDI.Goal),
            Triple(plan, BDI.beginsWith, tasks[0]),
            Triple(plan, BDI.endsWith, tasks[-1]),
        ]
        for t in tasks:
            triples += [Triple(plan, BDI.hasComponent, t), Triple(t, RDF.type, BDI.Task)]
        for a, b in zip(tasks, tasks[1:]):
            triples += [Triple(b, BDI.follows, a), Triple(a, BDI.precedes, b)]
        self.emit(triples)
        return plan

    # -- views

    def state(self, sid: Iri) -> MentalStateRecord:
        kind = self.state_kind(sid)
        if kind is None:
            raise MentalGraphError(f"{sid} is not a mental state")
        return MentalStateRecord(
            sid, self.agent_of(sid), kind, self.graph.value(sid, BDI.refersTo),
            self.graph.value(sid, BDI.hasValidity),
            tuple(self.graph.objects(sid, BDI.hasPart)))

    def process(self, pid: Iri) -> ProcessRecord:
        kind = self.process_kind(pid)
        if kind is None:
            raise MentalGraphError(f"{pid} is not a mental process")
        g = self.graph
        at = None
        node = g.value(pid, BDI.atTime)
        if node is not None:
            from .temporal import instant_value
            at = instant_value(node, g)
        effects = tuple((k, s) for k in EffectKind for s in g.objects(pid, k.predicate))
        return ProcessRecord(pid, g.value(pid, BDI.isProcessedBy), kind, at,
                             tuple(g.objects(pid, BDI.reasonsUpon)),
                             g.value(pid, BDI.isTriggeredBy), effects)

    def is_valid(self, state: Iri, t: TimeInstant) -> bool:
        return valid_at(state, t, self.graph)

    # -- explanation

    def explain(self, entity: Term) -> "ExplanationNode":
        """Derivation tree of ``entity``, walking back towards the world states behind it."""
        if not self.graph.match(entity, None, None) and not self.graph.match(None, None, entity):
            raise MentalGraphError(f"unknown entity {entity}")
        expanded: set = set()

        def build(x: Term, path: tuple) -> ExplanationNode:
            node = ExplanationNode(x, self._most_specific(x), self._label(x))
            if x in path:
                node.cycle = True
                return node
            if x in expanded:
                node.repeated = True
                return node
            expanded.add(x)
            for rel, nxt in self._explain_edges(x):
                node.children.append((rel, build(nxt, path + (x,))))
            return node

        return build(entity, ())

    def _explain_edges(self, x: Term) -> list[tuple[str, Term]]:
        g, reg = self.graph, self.registry
        edges: list[tuple[str, Term]] = []

        def add(rel: str, targets) -> None:
            edges.extend((rel, t) for t in sorted(set(targets)))

        add("isMotivatedBy", set(g.objects(x, BDI.isMotivatedBy)) | set(g.subjects(BDI.motivates, x)))
        add("isSupportedBy", set(g.objects(x, BDI.isSupportedBy)) | set(g.subjects(BDI.supports, x)))
        add("fulfils", reg.objects(g, x, BDI.fulfils))
        add("generatedBy", g.subjects(BDI.generates, x))
        add("isTriggeredBy", set(g.objects(x, BDI.isTriggeredBy)) | set(g.subjects(BDI.triggers, x)))
        add("justifiedBy", g.subjects(BDI.justifies, x))
        add("refersTo", g.objects(x, BDI.refersTo))
        return edges

    def _most_specific(self, x: Term) -> Optional[Iri]:
        types = {c for c in self.registry.types_of(self.graph, x) if c in BDI and self.registry.is_known(c)}
        best = [c for c in types
                if not any(o != c and c in self.registry.superclasses(o) for o in types)]
        return min(best) if best else None

    def _label(self, x: Term) -> Optional[str]:
        for p in (RDFS.label, RDFS.comment):
            v = self.graph.value(x, p)
            if isinstance(v, Literal):
                return v.lexical
        return None


@dataclass
class ExplanationNode:
    iri: Term
    cls: Optional[Iri] = None
    label: Optional[str] = None
    children: list = field(default_factory=list)  # (relation, ExplanationNode)
    cycle: bool = False
    repeated: bool = False

    def walk(self):
        yield self
        for _, child in self.children:
            yield from child.walk()

    def edges(self) -> list[tuple[Term, str, Term]]:
        out = []
        for rel, child in self.children:
            out.append((self.iri, rel, child.iri))
            out.extend(child.edges())
        return out

    def to_dict(self) -> dict:
        nodes: dict = {}
        for n in self.walk():
            entry = nodes.setdefault(str(n.iri), {
                "iri": str(n.iri),
                "class": n.cls.local_name if n.cls else None,
                "label": n.label,
            })
            if n.cycle:
                entry["cycle"] = True
        return {
            "root": str(self.iri),
            "nodes": [nodes[k] for k in sorted(nodes)],
            "edges": [{"source": str(s), "relation": r, "target": str(t)} for s, r, t in self.edges()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_dot(self) -> str:
        d = self.to_dict()
        lines = ["digraph explanation {", "  rankdir=RL;", "  node [shape=box];"]
        for n in d["nodes"]:
            text = n["iri"].rsplit("/", 1)[-1].rsplit("#", 1)[-1]
            if n["class"]:
                text += f"\\n({n['class']})"
            style = ", style=dashed" if n.get("cycle") else ""
            lines.append(f'  "{n["iri"]}" [label="{_dot_escape(text)}"{style}];')
        for e in d["edges"]:
            lines.append(f'  "{e["source"]}" -> "{e["target"]}" [label="{e["relation"]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def render(self, show=str) -> str:
        lines: list[str] = []

        def go(node: "ExplanationNode", rel: Optional[str], depth: int) -> None:
            text = show(node.iri)
            if node.cls is not None:
                text += f" [{node.cls.local_name}]"
            if node.cycle:
                text += " (cycle)"
            elif node.repeated:
                text += " (see above)"
            lines.append("  " * depth + (f"{rel}: " if rel else "") + text)
            for r, child in node.children:
                go(child, r, depth + 1)

        go(self, None, 0)
        return "\n".join(lines)


def _dot_escape(s: str) -> str:
    return s.replace('"', '\\"')
