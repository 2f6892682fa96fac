"""The BDI ontology as inspectable schema data, plus closure and validation.

``load_schema`` returns the class and property axioms as a frozen
:class:`SchemaRegistry`.  ``materialize`` computes the RDFS-plus closure
(subclass, subproperty, inverse, transitive, domain/range) and ``validate``
checks a closed graph: universal restrictions, cardinalities and
disjointness are errors, missing existential fillers and unknown predicates
are warnings.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from .rdf import (BDI, D0, DUL, OWL, RDF, RDFS, T2B, TIME, XSD, BlankNode, Graph,
                  Iri, Literal, Term, Triple, serialize_turtle)

__all__ = [
    "ClassDescriptor", "Derivation", "Issue", "PropertyDescriptor", "Restriction",
    "SchemaRegistry", "ValidationReport", "derive", "extend_closure", "load_schema", "materialize",
    "validate",
    "DISJOINT", "CARDINALITY_MIN", "CARDINALITY_MAX", "UNIVERSAL", "EXISTENTIAL",
    "UNKNOWN_PREDICATE",
]

ERROR = "error"
WARNING = "warning"

DISJOINT = "disjoint-classes"
CARDINALITY_MIN = "cardinality-min"
CARDINALITY_MAX = "cardinality-max"
UNIVERSAL = "universal-restriction"
EXISTENTIAL = "existential-missing"
UNKNOWN_PREDICATE = "unknown-predicate"

# vocabularies whose predicates are never reported as unknown
KNOWN_NAMESPACES = (str(RDF), str(RDFS), str(OWL), str(XSD), str(TIME), str(T2B))
EXTERNAL_NAMESPACES = (str(DUL), str(D0))


@dataclass(frozen=True)
class Restriction:
    """One class-level restriction: ``kind`` is some, only, min or max."""

    kind: str
    prop: Iri
    filler: tuple[Iri, ...]
    count: Optional[int] = None

    def describe(self) -> str:
        filler = " or ".join(f.local_name for f in self.filler)
        if self.kind == "some":
            return f"some {self.prop.local_name} {filler}"
        if self.kind == "only":
            return f"only {self.prop.local_name} {filler}"
        op = ">=" if self.kind == "min" else "<="
        return f"{op}{self.count} {self.prop.local_name} {filler}"


@dataclass(frozen=True)
class ClassDescriptor:
    iri: Iri
    superclasses: tuple[Iri, ...] = ()
    disjoint_with: tuple[Iri, ...] = ()
    equivalent: tuple[Iri, ...] = ()
    restrictions: tuple[Restriction, ...] = ()

    def _card(self, kind: str, prop: Iri) -> Optional[tuple[int, Iri]]:
        for r in self.restrictions:
            if r.kind == kind and r.prop == prop:
                return (r.count, r.filler[0])
        return None

    def min_card(self, prop: Iri) -> Optional[tuple[int, Iri]]:
        return self._card("min", prop)

    def max_card(self, prop: Iri) -> Optional[tuple[int, Iri]]:
        return self._card("max", prop)


@dataclass(frozen=True)
class PropertyDescriptor:
    iri: Iri
    superproperties: tuple[Iri, ...] = ()
    inverse: Optional[Iri] = None
    transitive: bool = False
    domain: Optional[Iri] = None
    range: Optional[Iri] = None


@dataclass(eq=False)
class SchemaRegistry:
    """Frozen view over class and property descriptors with precomputed closures."""

    classes: Mapping[Iri, ClassDescriptor]
    properties: Mapping[Iri, PropertyDescriptor]
    aliases: Mapping[Iri, Iri] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.classes = MappingProxyType(dict(self.classes))
        self.properties = MappingProxyType(dict(self.properties))
        self.aliases = MappingProxyType(dict(self.aliases))
        self._direct_supers: dict[Iri, tuple[Iri, ...]] = {}
        for c in self.classes.values():
            self._direct_supers[c.iri] = tuple(dict.fromkeys(c.superclasses + c.equivalent))
            for e in c.equivalent:
                self._direct_supers[e] = tuple(dict.fromkeys(self._direct_supers.get(e, ()) + (c.iri,)))
        self._super_closure = {c: self._close(c, self._direct_supers) for c in self._direct_supers}
        self._sub_closure: dict[Iri, frozenset] = {}
        for c, sups in self._super_closure.items():
            for s in sups:
                self._sub_closure.setdefault(s, set()).add(c)
        self._sub_closure = {k: frozenset(v) for k, v in self._sub_closure.items()}
        self._prop_supers = {p.iri: p.superproperties for p in self.properties.values()}
        self._prop_super_closure = {p: self._close(p, self._prop_supers) for p in self._prop_supers}
        subs: dict[Iri, set] = {}
        for p, sups in self._prop_super_closure.items():
            for s in sups:
                subs.setdefault(s, set()).add(p)
        for alias, canon in self.aliases.items():
            subs.setdefault(canon, {canon}).add(alias)
        self._prop_sub_closure = {k: frozenset(v) for k, v in subs.items()}
        self._disjoint = {}
        for c in self.classes.values():
            for d in c.disjoint_with:
                self._disjoint.setdefault(c.iri, set()).add(d)
                self._disjoint.setdefault(d, set()).add(c.iri)
        self._check()

    @staticmethod
    def _close(start: Iri, edges: Mapping[Iri, tuple[Iri, ...]]) -> frozenset:
        seen = {start}
        todo = [start]
        while todo:
            for nxt in edges.get(todo.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return frozenset(seen)

    def _check(self) -> None:
        plain = {c.iri: c.superclasses for c in self.classes.values()}
        for c in self.classes.values():
            if any(c.iri in self._close(s, plain) for s in c.superclasses):
                raise ValueError(f"cyclic subclass chain through {c.iri}")
        for p in self.properties.values():
            for ref in (p.inverse, p.domain, p.range, *p.superproperties):
                if ref is not None and not self.is_known(ref):
                    raise ValueError(f"{p.iri} references unregistered {ref}")
            if p.inverse is not None:
                inv = self.properties[p.inverse]
                if inv.inverse != p.iri:
                    raise ValueError(f"inverse of {p.iri} is not involutive")
                if inv.transitive != p.transitive:
                    raise ValueError(f"{p.iri} and its inverse disagree on transitivity")

    # lookups

    def is_known(self, iri: Iri) -> bool:
        if iri in self.classes or iri in self.properties or iri in self.aliases:
            return True
        return iri.value.startswith(EXTERNAL_NAMESPACES)

    def lookup(self, iri: Iri):
        if iri in self.classes:
            return self.classes[iri]
        if iri in self.properties:
            return self.properties[iri]
        if iri in self.aliases:
            return self.properties[self.aliases[iri]]
        raise KeyError(iri)

    def canonical(self, prop: Iri) -> Iri:
        return self.aliases.get(prop, prop)

    def direct_superclasses(self, cls: Iri) -> tuple[Iri, ...]:
        return self._direct_supers.get(cls, ())

    def superclasses(self, cls: Iri) -> frozenset:
        """Reflexive-transitive superclasses (external parents included)."""
        return self._super_closure.get(cls, frozenset((cls,)))

    def subclasses(self, cls: Iri) -> frozenset:
        return self._sub_closure.get(cls, frozenset((cls,)))

    def superproperties(self, prop: Iri) -> frozenset:
        return self._prop_super_closure.get(prop, frozenset((prop,)))

    def subproperties(self, prop: Iri) -> frozenset:
        """Reflexive-transitive subproperties, aliases included."""
        return self._prop_sub_closure.get(prop, frozenset((prop,)))

    def inverse(self, prop: Iri) -> Optional[Iri]:
        d = self.properties.get(prop)
        return d.inverse if d else None

    def disjoint_with(self, cls: Iri) -> frozenset:
        return frozenset(self._disjoint.get(cls, ()))

    def disjoint_pairs(self) -> list[tuple[Iri, Iri]]:
        pairs = {tuple(sorted((a, b))) for a, bs in self._disjoint.items() for b in bs}
        return sorted(pairs)

    def transitive_properties(self) -> list[Iri]:
        return sorted(p for p, d in self.properties.items() if d.transitive)

    def bdi_classes(self) -> list[Iri]:
        return sorted(c for c in self.classes if c in BDI)

    def bdi_properties(self) -> list[Iri]:
        return sorted(p for p in self.properties if p in BDI)

    # instance checks against a graph

    def types_of(self, g: Graph, x: Term) -> frozenset:
        out: set = set()
        for t in g.types(x):
            out |= self.superclasses(t)
        return frozenset(out)

    def is_instance(self, g: Graph, x: Term, cls: Iri) -> bool:
        if isinstance(x, Literal):
            return False
        return any(cls in self.superclasses(t) for t in g.types(x))

    def instances(self, g: Graph, cls: Iri) -> list[Term]:
        out: set = set()
        for c in self.subclasses(cls):
            out.update(g.subjects(RDF.type, c))
        return sorted(out)

    def objects(self, g: Graph, s: Term, prop: Iri) -> list[Term]:
        out: set = set()
        for p in self.subproperties(prop):
            out.update(g.objects(s, p))
        return sorted(out)

    # export

    def to_graph(self) -> Graph:
        g = Graph(prefixes={"bdi": str(BDI), "dul": str(DUL), "d0": str(D0)})
        for cls in sorted(self.classes):
            d = self.classes[cls]
            g.add(Triple(cls, RDF.type, OWL.Class))
            for s in d.superclasses:
                g.add(Triple(cls, RDFS.subClassOf, s))
            for e in d.equivalent:
                g.add(Triple(cls, OWL.equivalentClass, e))
            for x in d.disjoint_with:
                g.add(Triple(cls, OWL.disjointWith, x))
            for n, r in enumerate(d.restrictions):
                node = BlankNode(f"{cls.local_name}_r{n}")
                g.add(Triple(cls, RDFS.subClassOf, node))
                g.add(Triple(node, RDF.type, OWL.Restriction))
                g.add(Triple(node, OWL.onProperty, r.prop))
                filler = r.filler[0] if len(r.filler) == 1 else self._union(g, node, r.filler)
                if r.kind == "some":
                    g.add(Triple(node, OWL.someValuesFrom, filler))
                elif r.kind == "only":
                    g.add(Triple(node, OWL.allValuesFrom, filler))
                else:
                    pred = OWL.minQualifiedCardinality if r.kind == "min" else OWL.maxQualifiedCardinality
                    g.add(Triple(node, pred, Literal(str(r.count), XSD.nonNegativeInteger)))
                    g.add(Triple(node, OWL.onClass, filler))
        for prop in sorted(self.properties):
            d = self.properties[prop]
            g.add(Triple(prop, RDF.type, OWL.ObjectProperty))
            if d.transitive:
                g.add(Triple(prop, RDF.type, OWL.TransitiveProperty))
            for s in d.superproperties:
                g.add(Triple(prop, RDFS.subPropertyOf, s))
            if d.inverse is not None:
                g.add(Triple(prop, OWL.inverseOf, d.inverse))
            if d.domain is not None:
                g.add(Triple(prop, RDFS.domain, d.domain))
            if d.range is not None:
                g.add(Triple(prop, RDFS.range, d.range))
        for alias, canon in sorted(self.aliases.items()):
            g.add(Triple(alias, OWL.equivalentProperty, canon))
        return g

    @staticmethod
    def _union(g: Graph, owner: BlankNode, members: tuple[Iri, ...]) -> BlankNode:
        union = BlankNode(f"{owner.id}_u")
        g.add(Triple(union, RDF.type, OWL.Class))
        cells = [BlankNode(f"{union.id}{i}") for i in range(len(members))]
        g.add(Triple(union, OWL.unionOf, cells[0]))
        for i, (cell, m) in enumerate(zip(cells, members)):
            g.add(Triple(cell, RDF.first, m))
            g.add(Triple(cell, RDF.rest, cells[i + 1] if i + 1 < len(cells) else RDF.nil))
        return union

    def to_turtle(self) -> str:
        return serialize_turtle(self.to_graph())


# -- the axioms -------------------------------------------------------------------

def _some(p, c):
    return Restriction("some", BDI[p], (_cls(c),))


def _only(p, *cs):
    return Restriction("only", BDI[p], tuple(_cls(c) for c in cs))


def _cls(name: str) -> Iri:
    if name.startswith("dul:"):
        return DUL[name[4:]]
    if name.startswith("d0:"):
        return D0[name[3:]]
    return BDI[name]


# name -> (superclasses, restrictions)
_CLASSES = {
    "WorldState": (["d0:Eventuality"], [_only("isPerceivedBy", "Agent")]),
    "MentalEntity": (["d0:CognitiveEntity"], [
        _only("hasPart", "MentalEntity"),
        _some("refersTo", "WorldState"),
        _some("atTime", "TemporalEntity"),
        _some("hasValidity", "TemporalEntity"),
    ]),
    "Agent": (["dul:Agent"], [
        _some("perceives", "WorldState"),
        _only("cognises", "MentalEntity"),
        _some("hasMentalState", "MentalState"),
    ]),
    "MentalState": (["MentalEntity"], [_only("hasPart", "MentalState")]),
    "Belief": (["MentalState"], [
        _only("hasPart", "Belief"),
        _some("motivates", "Desire"),
        _some("supports", "Intention"),
    ]),
    "Desire": (["MentalState"], [
        _only("hasPart", "Desire"),
        _some("isMotivatedBy", "Belief"),
    ]),
    "Intention": (["MentalState"], [
        _only("hasPart", "Intention"),
        _some("fulfils", "Desire"),
        _some("isSupportedBy", "Belief"),
        _some("specifies", "Plan"),
    ]),
    "MentalProcess": (["d0:Activity", "MentalEntity"], [
        _only("hasPart", "MentalProcess"),
        _some("isProcessedBy", "Agent"),
        _some("reasonsUpon", "MentalState"),
        # world states trigger processes in the worked examples, so they are admitted
        _only("isTriggeredBy", "MentalEntity", "WorldState"),
        _some("affects", "MentalState"),
    ]),
    "BeliefProcess": (["MentalProcess"], [_only("affects", "Belief")]),
    "DesireProcess": (["MentalProcess"], [_only("affects", "Desire")]),
    "IntentionProcess": (["MentalProcess"], [_only("affects", "Intention")]),
    "Justification": (["dul:Description"], [_some("justifies", "MentalEntity")]),
    "Goal": (["dul:Goal"], []),
    "Plan": (["dul:Plan"], [
        _some("addresses", "Goal"),
        _some("hasComponent", "Task"),
        _some("beginsWith", "Task"),
        _some("endsWith", "Task"),
        _some("hasPart", "Plan"),
    ]),
    "Planning": (["MentalProcess"], [
        _some("defines", "Plan"),
        _only("reasonsUpon", "Intention"),
        _only("hasPart", "Planning"),
        _some("reasonsUpon", "Intention"),
    ]),
    "Task": (["dul:Task"], [_only("follows", "Task")]),
    "PlanExecution": (["dul:PlanExecution"], [
        _some("satisfies", "Plan"),
        _some("addresses", "Goal"),
        _some("hasComponent", "Action"),
        _some("isExecutedBy", "Agent"),
        _some("bringsAbout", "WorldState"),
        _some("atTime", "TemporalEntity"),
    ]),
    "Action": (["dul:Action"], [
        _some("isExecutionOf", "Task"),
        _some("isPerformedBy", "Agent"),
        _some("bringsAbout", "WorldState"),
        _some("atTime", "TemporalEntity"),
    ]),
    "TemporalEntity": (["dul:Region"], []),
    "TimeInstant": (["TemporalEntity"], []),
    "TimeInterval": (["TemporalEntity"], [
        Restriction("min", BDI.hasStartTime, (BDI.TimeInstant,), 1),
        Restriction("max", BDI.hasStartTime, (BDI.TimeInstant,), 1),
        Restriction("max", BDI.hasEndTime, (BDI.TimeInstant,), 1),
    ]),
}

_EQUIVALENT = {"TimeInterval": [DUL.TimeInterval]}

_DISJOINT = [
    ("Belief", "Desire"),
    ("Belief", "Intention"),
    ("Desire", "Intention"),
    ("MentalState", "MentalProcess"),
    ("TimeInstant", "TimeInterval"),
]

# name -> (domain, range, inverse name, superproperties, transitive)
_PROPERTIES = {
    "perceives": ("Agent", "WorldState", "isPerceivedBy", (), False),
    "cognises": ("Agent", "MentalEntity", None, (), False),
    "refersTo": ("MentalEntity", "WorldState", None, (), False),
    "hasPart": (None, None, "isPartOf", (), True),
    "hasMentalState": ("Agent", "MentalState", "isMentalStateOf", (), False),
    "hasBelief": ("Agent", "Belief", "isBeliefOf", ("hasMentalState",), False),
    "hasDesire": ("Agent", "Desire", "isDesireOf", ("hasMentalState",), False),
    "hasIntention": ("Agent", "Intention", "isIntentionOf", ("hasMentalState",), False),
    "motivates": ("Belief", "Desire", "isMotivatedBy", (), False),
    "supports": ("Belief", "Intention", "isSupportedBy", (), False),
    "fulfils": ("Intention", "Desire", None, (), False),
    "isProcessedBy": ("MentalProcess", "Agent", None, (), False),
    "reasonsUpon": ("MentalProcess", "MentalState", None, (), False),
    "isTriggeredBy": ("MentalProcess", None, "triggers", (), False),
    "affects": ("MentalProcess", "MentalState", "isAffectedBy", (), False),
    "generates": (None, None, None, ("affects",), False),
    "modifies": (None, None, None, ("affects",), False),
    "suppresses": (None, None, None, ("affects",), False),
    "justifies": ("Justification", "MentalEntity", None, (), False),
    "specifies": ("Intention", "Plan", "isSpecifiedBy", (), False),
    "addresses": (None, "Goal", None, (), False),
    "defines": ("Planning", "Plan", None, (), False),
    "hasComponent": (None, None, None, (), False),
    "beginsWith": ("Plan", "Task", None, (), False),
    "endsWith": ("Plan", "Task", None, (), False),
    "follows": ("Task", "Task", "precedes", (), True),
    "satisfies": ("PlanExecution", "Plan", None, (), False),
    "isExecutedBy": ("PlanExecution", "Agent", None, (), False),
    "bringsAbout": (None, "WorldState", None, (), False),
    "isExecutionOf": ("Action", "Task", None, (), False),
    "isPerformedBy": ("Action", "Agent", None, (), False),
    "atTime": (None, "TemporalEntity", None, (), False),
    "hasValidity": (None, "TemporalEntity", None, (), False),
    "hasStartTime": ("TimeInterval", "TimeInstant", None, (), False),
    "hasEndTime": ("TimeInterval", "TimeInstant", None, (), False),
}

_ALIASES = {"fulfills": "fulfils"}


@lru_cache(maxsize=None)
def load_schema() -> SchemaRegistry:
    """Build the (cached, immutable) registry of BDI classes and properties."""
    disjoint: dict[str, list[Iri]] = {}
    for a, b in _DISJOINT:
        disjoint.setdefault(a, []).append(BDI[b])
        disjoint.setdefault(b, []).append(BDI[a])
    classes = {}
    for name, (supers, restrictions) in _CLASSES.items():
        iri = BDI[name]
        classes[iri] = ClassDescriptor(
            iri=iri,
            superclasses=tuple(_cls(s) for s in supers),
            disjoint_with=tuple(disjoint.get(name, ())),
            equivalent=tuple(_EQUIVALENT.get(name, ())),
            restrictions=tuple(restrictions),
        )

    props: dict[Iri, PropertyDescriptor] = {}
    inverse_of = {fwd: spec[2] for fwd, spec in _PROPERTIES.items() if spec[2]}
    for name, (dom, rng, inv, supers, trans) in _PROPERTIES.items():
        props[BDI[name]] = PropertyDescriptor(
            iri=BDI[name],
            superproperties=tuple(BDI[s] for s in supers),
            inverse=BDI[inv] if inv else None,
            transitive=trans,
            domain=BDI[dom] if dom else None,
            range=BDI[rng] if rng else None,
        )
        if inv:
            props[BDI[inv]] = PropertyDescriptor(
                iri=BDI[inv],
                superproperties=tuple(BDI[inverse_of[s]] for s in supers if s in inverse_of),
                inverse=BDI[name],
                transitive=trans,
                domain=BDI[rng] if rng else None,
                range=BDI[dom] if dom else None,
            )
    aliases = {BDI[a]: BDI[c] for a, c in _ALIASES.items()}
    return SchemaRegistry(classes=classes, properties=props, aliases=aliases)


# -- materialization -------------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    """One closure step: ``triple`` was added by ``rule`` from ``premises``."""

    triple: Triple
    rule: str
    premises: tuple[Triple, ...]


def derive(g: Graph, reg: Optional[SchemaRegistry] = None) -> tuple[Graph, list[Derivation]]:
    """Closure of ``g`` plus the log of the single rule instance behind each new triple.

    Replaying the log in order over ``g`` reproduces the closure; each step's
    premises are already present when it is applied.
    """
    out = g.copy()
    log: list[Derivation] = []
    _close(out, sorted(g.triples()), reg or load_schema(), log)
    return out, log


def extend_closure(g: Graph, added, reg: Optional[SchemaRegistry] = None) -> list[Triple]:
    """Close ``g`` in place after ``added`` was inserted into an already closed ``g``.

    Returns the entailed triples, in derivation order.
    """
    log: list[Derivation] = []
    _close(g, sorted(added), reg or load_schema(), log)
    return [d.triple for d in log]


def _close(out: Graph, seeds, reg: SchemaRegistry, log: list) -> None:
    queue = deque(seeds)
    type_ = RDF.type

    def emit(t: Triple, rule: str, premises: tuple) -> None:
        if out.add(t):
            log.append(Derivation(t, rule, premises))
            queue.append(t)

    while queue:
        t = queue.popleft()
        s, p, o = t
        if p == type_:
            if isinstance(o, Iri):
                for sup in reg.direct_superclasses(o):
                    emit(Triple(s, type_, sup), "subclass", (t,))
            continue
        canon = reg.aliases.get(p)
        if canon is not None:
            emit(Triple(s, canon, o), "alias", (t,))
            continue
        d = reg.properties.get(p)
        if d is None:
            continue
        for q in d.superproperties:
            emit(Triple(s, q, o), "subproperty", (t,))
        if d.domain is not None:
            emit(Triple(s, type_, d.domain), "domain", (t,))
        if isinstance(o, Literal):
            continue
        if d.inverse is not None:
            emit(Triple(o, d.inverse, s), "inverse", (t,))
        if d.transitive:
            for nxt in out.match(o, p, None):
                emit(Triple(s, p, nxt.object), "transitive", (t, nxt))
            for prev in out.match(None, p, s):
                emit(Triple(prev.subject, p, o), "transitive", (prev, t))
        if d.range is not None:
            emit(Triple(o, type_, d.range), "range", (t,))


def materialize(g: Graph, reg: Optional[SchemaRegistry] = None) -> Graph:
    """Fixpoint closure of ``g`` under the registry (a new graph; ``g`` is untouched)."""
    return derive(g, reg)[0]


# -- validation -------------------------------------------------------------------


@dataclass(frozen=True)
class Issue:
    severity: str
    code: str
    subject: Term
    message: str

    def sort_key(self) -> tuple:
        return (self.subject.sort_key(), self.code, self.message)


@dataclass(frozen=True)
class ValidationReport:
    items: tuple[Issue, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(sorted(set(self.items), key=Issue.sort_key)))

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.items if i.severity == ERROR]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.items if i.severity == WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self, severity: Optional[str] = None) -> list[str]:
        return [i.code for i in self.items if severity is None or i.severity == severity]

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def _show(g: Graph, term: Term) -> str:
    return g.n3(term)


def validate(g: Graph, reg: Optional[SchemaRegistry] = None) -> ValidationReport:
    """Closed-world check of an already materialized graph."""
    reg = reg or load_schema()
    items: list[Issue] = []

    # disjointness
    for a, b in reg.disjoint_pairs():
        both = set(reg.instances(g, a)) & set(reg.instances(g, b))
        for x in sorted(both):
            items.append(Issue(ERROR, DISJOINT, x,
                               f"{_show(g, x)} is both {a.local_name} and {b.local_name}, which are disjoint"))

    for cls in sorted(reg.classes):
        restrictions = reg.classes[cls].restrictions
        if not restrictions:
            continue
        members = reg.instances(g, cls)
        if not members:
            continue
        for r in restrictions:
            for x in members:
                values = reg.objects(g, x, r.prop)
                if r.kind == "only":
                    for y in values:
                        if not any(reg.is_instance(g, y, f) for f in r.filler):
                            items.append(Issue(
                                ERROR, UNIVERSAL, x,
                                f"{_show(g, x)} is a {cls.local_name} ({r.describe()}) but "
                                f"{r.prop.local_name} points to {_show(g, y)}"))
                elif r.kind == "some":
                    if not any(reg.is_instance(g, y, f) for y in values for f in r.filler):
                        filler = " or ".join(f.local_name for f in r.filler)
                        article = "an" if filler[:1] in "AEIOU" else "a"
                        items.append(Issue(
                            WARNING, EXISTENTIAL, x,
                            f"{_show(g, x)} is a {cls.local_name} but has no {r.prop.local_name} "
                            f"link to {article} {filler}"))
                else:
                    n = sum(1 for y in values if any(reg.is_instance(g, y, f) for f in r.filler))
                    if r.kind == "min" and n < r.count:
                        items.append(Issue(
                            ERROR, CARDINALITY_MIN, x,
                            f"{_show(g, x)} is a {cls.local_name} with {n} {r.prop.local_name} "
                            f"values, needs at least {r.count}"))
                    elif r.kind == "max" and n > r.count:
                        items.append(Issue(
                            ERROR, CARDINALITY_MAX, x,
                            f"{_show(g, x)} is a {cls.local_name} with {n} {r.prop.local_name} "
                            f"values, allows at most {r.count}"))

    for p in g.predicates():
        if reg.is_known(p) or p.value.startswith(KNOWN_NAMESPACES):
            continue
        for s in sorted({t.subject for t in g.match(None, p, None)}):
            items.append(Issue(WARNING, UNKNOWN_PREDICATE, s,
                               f"{_show(g, s)} uses {_show(g, p)}, which the schema does not define"))
    return ValidationReport(tuple(items))


def unknown_predicates(g: Graph, reg: Optional[SchemaRegistry] = None) -> list[Iri]:
    reg = reg or load_schema()
    return [p for p in g.predicates()
            if not reg.is_known(p) and not p.value.startswith(KNOWN_NAMESPACES)]

