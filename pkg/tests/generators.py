"""Seeded random graph builders shared by the property and acceptance tests."""

from __future__ import annotations

import random

from bdi_ontology.rdf import BDI, RDF, RDFS, TIME, XSD, Graph, Iri, Literal, Triple
from bdi_ontology.schema import load_schema

EX = "http://example.org/gen/"
TICKS = [f"2025-01-01T00:00:{k:02d}Z" for k in range(10)]


def ex(name: str) -> Iri:
    return Iri(EX + name)


def schema_graph(rng: random.Random, max_triples: int = 50) -> Graph:
    """Up to ``max_triples`` triples over the registry vocabulary and a few individuals."""
    reg = load_schema()
    classes = sorted(reg.classes)
    props = sorted(reg.properties) + sorted(reg.aliases)
    people = [ex(f"n{i}") for i in range(rng.randint(2, 10))]
    g = Graph(prefixes={"ex": EX})
    for _ in range(rng.randint(0, max_triples)):
        s = rng.choice(people)
        roll = rng.random()
        if roll < 0.3:
            g.add(Triple(s, RDF.type, rng.choice(classes)))
        elif roll < 0.35:
            g.add(Triple(s, ex("unrelated"), rng.choice(people)))
        elif roll < 0.4:
            g.add(Triple(s, rng.choice(props), Literal(str(rng.randint(0, 3)))))
        else:
            g.add(Triple(s, rng.choice(props), rng.choice(people)))
    return g


# -- CQ graphs ----------------------------------------------------------------------


_CQ_PREDICATES = [
    BDI.hasMentalState, BDI.isMentalStateOf, BDI.hasBelief, BDI.hasPart, BDI.isPartOf,
    BDI.isProcessedBy, BDI.refersTo, BDI.isMotivatedBy, BDI.motivates, BDI.fulfils, BDI.fulfills,
    BDI.generates, BDI.modifies, BDI.suppresses, BDI.isTriggeredBy, BDI.triggers, BDI.justifies,
    BDI.addresses, BDI.specifies, BDI.isSpecifiedBy, BDI.defines, BDI.follows, BDI.precedes,
    BDI.beginsWith, BDI.endsWith,
]
_CQ_CLASSES = [
    BDI.MentalEntity, BDI.MentalState, BDI.Belief, BDI.Desire, BDI.Intention, BDI.MentalProcess,
    BDI.Planning, BDI.WorldState, BDI.Justification, BDI.Goal, BDI.Plan, BDI.Agent, BDI.Task,
]


def instant_node(g: Graph, rng: random.Random, nodes: list) -> Iri:
    lex = rng.choice(TICKS)
    node = ex("t" + lex[-3:-1])
    g.add(Triple(node, TIME.inXSDDateTimeStamp, Literal(lex, XSD.dateTime)))
    nodes.append(node)
    return node


def cq_graph(rng: random.Random, max_triples: int = 200) -> Graph:
    """A random graph shaped for the competency questions, at most ``max_triples`` triples."""
    pool = [ex(f"x{i}") for i in range(rng.randint(4, 24))]
    g = Graph(prefixes={"ex": EX})
    budget = rng.randint(10, max_triples)
    instants: list = []
    while len(g) < budget - 6:
        s = rng.choice(pool)
        roll = rng.random()
        if roll < 0.25:
            g.add(Triple(s, RDF.type, rng.choice(_CQ_CLASSES)))
        elif roll < 0.32:  # a validity interval
            node = ex(f"v{rng.randint(0, 9)}")
            g.add(Triple(s, BDI.hasValidity, node))
            g.add(Triple(node, BDI.hasStartTime, instant_node(g, rng, instants)))
            if rng.random() < 0.5:
                g.add(Triple(node, BDI.hasEndTime, instant_node(g, rng, instants)))
        elif roll < 0.38:  # an anchor, as a node or a bare literal
            if rng.random() < 0.5:
                g.add(Triple(s, BDI.atTime, instant_node(g, rng, instants)))
            else:
                g.add(Triple(s, BDI.atTime, Literal(rng.choice(TICKS), XSD.dateTime)))
        elif roll < 0.40:
            g.add(Triple(s, RDFS.label, Literal(f"label {rng.randint(0, 5)}", language="en")))
        else:
            g.add(Triple(s, rng.choice(_CQ_PREDICATES), rng.choice(pool)))
    while len(g) > max_triples:
        g.remove(max(g))
    return g


def closed_cq_graph(rng: random.Random, limit: int = 200) -> Graph:
    """A materialized CQ graph of at most ``limit`` triples."""
    from bdi_ontology.schema import materialize

    budget = limit
    while True:
        g = materialize(cq_graph(rng, budget))
        if len(g) <= limit:
            return g
        budget = max(12, int(budget * 0.8))


# -- knowledge bases for the rule engine -----------------------------------------------------


def perception_graph(rng: random.Random) -> Graph:
    """Agents perceiving world states, plus unrelated noise: input for the perception rules."""
    g = Graph(prefixes={"ex": EX, "bdi": str(BDI)})
    agents = [ex(f"agent{i}") for i in range(rng.randint(1, 3))]
    worlds = [ex(f"ws{i}") for i in range(rng.randint(1, 4))]
    for a in agents:
        g.add(Triple(a, RDF.type, BDI.Agent))
    for w in worlds:
        g.add(Triple(w, RDF.type, BDI.WorldState))
        if rng.random() < 0.5:
            g.add(Triple(w, RDFS.comment, Literal(f"state {w.local_name}", language="en")))
    for _ in range(rng.randint(1, 5)):
        g.add(Triple(rng.choice(agents), BDI.perceives, rng.choice(worlds)))
    for i in range(rng.randint(0, 10)):
        g.add(Triple(ex(f"thing{i}"), ex("note"), Literal(str(rng.random()))))
    return g
