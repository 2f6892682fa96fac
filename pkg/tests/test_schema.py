import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdi_ontology.rdf import BDI, D0, DUL, RDF, Graph, Iri, Literal, Triple, parse_turtle
from bdi_ontology.schema import (CARDINALITY_MAX, CARDINALITY_MIN, DISJOINT, ERROR, EXISTENTIAL,
                                 UNIVERSAL, UNKNOWN_PREDICATE, WARNING, derive, extend_closure,
                                 load_schema, materialize, validate)
import generators
import oracles

EX = "http://example.org/s/"


def ex(n):
    return Iri(EX + n)


@pytest.fixture(scope="module")
def reg():
    return load_schema()


# -- registry ----------------------------------------------------------------------------


def test_belief_is_a_mental_state(reg):
    assert BDI.MentalState in reg.lookup(BDI.Belief).superclasses
    for k in (BDI.Belief, BDI.Desire, BDI.Intention):
        assert BDI.MentalState in reg.superclasses(k)
    assert BDI.MentalProcess in reg.superclasses(BDI.Planning)


def test_effect_properties_specialise_affects(reg):
    for p in (BDI.generates, BDI.modifies, BDI.suppresses):
        assert list(reg.lookup(p).superproperties) == [BDI.affects]


def test_time_interval_cardinalities(reg):
    ti = reg.lookup(BDI.TimeInterval)
    assert ti.min_card(BDI.hasStartTime) == (1, BDI.TimeInstant)
    assert ti.max_card(BDI.hasStartTime) == (1, BDI.TimeInstant)
    assert ti.max_card(BDI.hasEndTime) == (1, BDI.TimeInstant)


def test_upper_ontology_parents_are_opaque(reg):
    assert DUL.Agent in reg.lookup(BDI.Agent).superclasses
    assert D0.Eventuality in reg.lookup(BDI.WorldState).superclasses
    assert DUL.TimeInterval in reg.lookup(BDI.TimeInterval).equivalent
    assert DUL.Agent not in reg.classes


def test_no_class_is_its_own_superclass(reg):
    for c in reg.classes:
        for d in reg.lookup(c).superclasses:
            assert c not in reg.superclasses(d)


def test_disjointness_is_symmetric(reg):
    for a, b in reg.disjoint_pairs():
        assert b in reg.disjoint_with(a) and a in reg.disjoint_with(b)
    assert len(reg.disjoint_pairs()) == 5


def test_inverse_is_involutive(reg):
    for p, d in reg.properties.items():
        if d.inverse is not None:
            assert reg.inverse(d.inverse) == p
            assert reg.lookup(d.inverse).transitive == d.transitive


def test_transitive_properties(reg):
    assert set(reg.transitive_properties()) == {BDI.hasPart, BDI.isPartOf, BDI.follows, BDI.precedes}


def test_descriptor_references_are_registered_or_external(reg):
    external = (str(DUL), str(D0))
    refs = set()
    for c in reg.classes.values():
        refs.update(c.superclasses + c.disjoint_with + c.equivalent)
        for r in c.restrictions:
            refs.add(r.prop)
            refs.update(r.filler)
    for p in reg.properties.values():
        refs.update(p.superproperties)
        refs.update(x for x in (p.inverse, p.domain, p.range) if x is not None)
    for x in refs:
        assert reg.is_known(x) or x.value.startswith(external), x


def test_fulfills_is_an_alias(reg):
    assert reg.canonical(BDI.fulfills) == BDI.fulfils
    assert BDI.fulfills in reg.subproperties(BDI.fulfils)


def test_registry_exports_as_turtle(reg):
    g = parse_turtle(reg.to_turtle())
    assert len(g) > 100
    assert (BDI.Belief, Iri("http://www.w3.org/2000/01/rdf-schema#subClassOf"), BDI.MentalState) in g


# -- materialization ------------------------------------------------------------------------


def test_generates_entails_affects_and_inverse():
    g = materialize(Graph([Triple(ex("p"), BDI.generates, ex("b"))]))
    assert Triple(ex("p"), BDI.affects, ex("b")) in g
    assert Triple(ex("b"), BDI.isAffectedBy, ex("p")) in g


def test_subclass_chain():
    g = materialize(Graph([Triple(ex("b"), RDF.type, BDI.Belief)]))
    assert Triple(ex("b"), RDF.type, BDI.MentalState) in g
    assert Triple(ex("b"), RDF.type, BDI.MentalEntity) in g


def test_follows_is_transitive():
    g = materialize(Graph([Triple(ex("t1"), BDI.follows, ex("t2")), Triple(ex("t2"), BDI.follows, ex("t3"))]))
    assert Triple(ex("t1"), BDI.follows, ex("t3")) in g
    assert Triple(ex("t3"), BDI.precedes, ex("t1")) in g


def test_alias_normalised():
    g = materialize(Graph([Triple(ex("i"), BDI.fulfills, ex("d"))]))
    assert Triple(ex("i"), BDI.fulfils, ex("d")) in g
    assert Triple(ex("d"), RDF.type, BDI.Desire) in g


def test_input_is_untouched(hotel):
    before = hotel.triples()
    materialize(hotel)
    assert hotel.triples() == before


def test_derivation_log_replays(hotel, reg):
    closed, log = derive(hotel, reg)
    replay = set(hotel.triples())
    for d in log:
        assert all(p in replay for p in d.premises)
        assert d.triple not in replay
        replay.add(d.triple)
    assert replay == closed.triples()
    assert len({d.triple for d in log}) == len(log)


def test_extend_closure_matches_full_closure(hotel, reg):
    triples = sorted(hotel)
    base = materialize(Graph(triples[:20]), reg)
    added = triples[20:]
    base.update(added)
    extend_closure(base, added, reg)
    assert base == materialize(hotel, reg)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_closure_matches_naive_fixpoint(seed):
    g = generators.schema_graph(random.Random(seed))
    reg = load_schema()
    assert materialize(g, reg).triples() == oracles.closure(g.triples(), reg)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_monotone_and_idempotent(seed):
    rng = random.Random(seed)
    g = generators.schema_graph(rng)
    sub = Graph(t for t in g if rng.random() < 0.5)
    m = materialize(g)
    assert g.triples() <= m.triples()
    assert materialize(sub).triples() <= m.triples()
    assert materialize(m) == m


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_inverse_symmetry(seed):
    reg = load_schema()
    m = materialize(generators.schema_graph(random.Random(seed)), reg)
    for s, p, o in m:
        inv = reg.inverse(p)
        if inv is not None and not isinstance(o, Literal):
            assert Triple(o, inv, s) in m


# -- validation ------------------------------------------------------------------------------


def test_belief_and_desire_is_one_disjointness_error():
    g = materialize(Graph([Triple(ex("x"), RDF.type, BDI.Belief), Triple(ex("x"), RDF.type, BDI.Desire)]))
    report = validate(g)
    assert [(i.code, i.subject) for i in report.errors] == [(DISJOINT, ex("x"))]


def test_two_start_instants_is_a_cardinality_error():
    g = Graph([
        Triple(ex("iv"), RDF.type, BDI.TimeInterval),
        Triple(ex("iv"), BDI.hasStartTime, ex("t1")),
        Triple(ex("iv"), BDI.hasStartTime, ex("t2")),
    ])
    report = validate(materialize(g))
    assert report.codes(ERROR) == [CARDINALITY_MAX]


def test_interval_without_start_is_a_cardinality_error():
    report = validate(materialize(Graph([Triple(ex("iv"), RDF.type, BDI.TimeInterval)])))
    assert report.codes(ERROR) == [CARDINALITY_MIN]


def test_heterogeneous_part_is_a_universal_error():
    g = Graph([Triple(ex("b"), RDF.type, BDI.Belief), Triple(ex("b"), BDI.hasPart, ex("d")),
               Triple(ex("d"), RDF.type, BDI.Desire)])
    report = validate(materialize(g))
    assert UNIVERSAL in report.codes(ERROR)


def test_missing_existentials_are_warnings():
    g = Graph([Triple(ex("p"), RDF.type, BDI.Plan)])
    report = validate(materialize(g))
    assert report.ok
    assert all(i.severity == WARNING and i.code == EXISTENTIAL for i in report)
    assert any("beginsWith" in i.message for i in report)


def test_planning_reasons_upon_both_shapes():
    g = Graph([Triple(ex("p"), RDF.type, BDI.Planning), Triple(ex("p"), BDI.reasonsUpon, ex("b")),
               Triple(ex("b"), RDF.type, BDI.Belief)])
    report = validate(materialize(g))
    assert UNIVERSAL in report.codes(ERROR)
    assert any(i.code == EXISTENTIAL and "reasonsUpon" in i.message for i in report)


# golden warning set of the shipped hotel fixture: (code, subject, property mentioned)
HOTEL_WARNINGS = sorted([
    (EXISTENTIAL, "Agent_A1", "perceives"),
    (EXISTENTIAL, "Belief_B1", "supports"),
    (EXISTENTIAL, "Belief_B1", "atTime"),
    (EXISTENTIAL, "Desire_D1", "atTime"),
    (EXISTENTIAL, "Desire_D1", "refersTo"),
    (EXISTENTIAL, "Intention_I3", "isSupportedBy"),
    (EXISTENTIAL, "Intention_I3", "atTime"),
    (EXISTENTIAL, "Intention_I3", "refersTo"),
    (EXISTENTIAL, "Plan_P1", "beginsWith"),
    (EXISTENTIAL, "Plan_P1", "endsWith"),
    (EXISTENTIAL, "Plan_P1", "hasPart"),
    (UNKNOWN_PREDICATE, "Intention_I3", "isJustifiedBy"),
    (UNKNOWN_PREDICATE, "Task_homeActivity", "occursAt"),
    (UNKNOWN_PREDICATE, "Task_homeActivity", "requiresWorldState"),
    (UNKNOWN_PREDICATE, "WorldState_WS_home", "hasLocation"),
])


def test_hotel_fixture_golden_warnings(hotel_m):
    report = validate(hotel_m)
    assert report.errors == []
    got = []
    for i in report:
        prop = next(w for w in i.message.replace(",", " ").split() if w.startswith("bdi:")
                    or w in {"perceives", "supports", "atTime", "refersTo", "isSupportedBy",
                             "beginsWith", "endsWith", "hasPart"})
        got.append((i.code, i.subject.local_name, prop.removeprefix("bdi:")))
    assert sorted(got) == HOTEL_WARNINGS


def test_zelle_fixture_has_no_errors(zelle_m):
    assert validate(zelle_m).ok


def test_report_order_is_deterministic(hotel_m):
    items = list(validate(hotel_m))
    assert items == sorted(items, key=lambda i: (i.subject.sort_key(), i.code, i.message))
