import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdi_ontology.deliberation import (BUILTIN, DEFAULT_CLOCK_START, INGESTED, Provenance,
                                       RuleActionError, RuleSyntaxError, Var, binding_hash, export,
                                       ingest, parse_rules, run, trace_jsonl)
from bdi_ontology.rdf import BDI, RDF, RUN, T2B, Graph, Iri, Literal, Triple, parse_turtle, serialize_turtle
from bdi_ontology.schema import load_schema, materialize, validate
from conftest import HOTEL_NS, read_fixture
import generators

PREFIXES = {"bdi": str(BDI), "ex": "http://example.org/gen/"}


def kb_from(name):
    return ingest(materialize(parse_turtle(read_fixture(name))))


# -- parsing -----------------------------------------------------------------------------


def test_smoke_rule():
    (rule,) = parse_rules("(?b rdf:type bdi:Belief) / (?b bdi:refersTo ?w) >> assert_desire(?b) .", PREFIXES)
    assert rule.id == "rule001" and rule.priority == 0
    assert rule.variables() == {"b", "w"}
    assert rule.head.p == RDF.type and rule.head.o == BDI.Belief


def test_range_restriction():
    with pytest.raises(RuleSyntaxError, match="tail variable"):
        parse_rules("(?b a bdi:Belief) >> assert_desire(?x) .", PREFIXES)


def test_negated_head():
    with pytest.raises(RuleSyntaxError, match="head"):
        parse_rules("not(?b a bdi:Belief) >> assert_desire(?b) .", PREFIXES)


def test_syntax_error_location():
    with pytest.raises(RuleSyntaxError) as info:
        parse_rules("\n\n(?b a bdi:Belief) >> frobnicate(?b) .", PREFIXES)
    assert info.value.line == 3 and info.value.column > 1


def test_duplicate_ids():
    text = "@id r (?b a bdi:Belief) >> assert_desire(?b) .\n@id r (?b a bdi:Belief) >> assert_desire(?b) ."
    with pytest.raises(RuleSyntaxError, match="duplicate"):
        parse_rules(text, PREFIXES)


def test_undefined_prefix():
    with pytest.raises(RuleSyntaxError):
        parse_rules("(?b a nope:Belief) >> assert_desire(?b) .", PREFIXES)


def test_variable_predicate_needs_full_wildcard():
    with pytest.raises(RuleSyntaxError):
        parse_rules("(?b ?p ex:x) >> emit(?b, rdfs:label, \"x\") .", PREFIXES)
    (rule,) = parse_rules("(?s ?p ?o) >> emit(?s, rdfs:label, \"x\") .", PREFIXES)
    assert isinstance(rule.head.p, Var)


def test_negation_and_builtin_forms():
    (rule,) = parse_rules(
        "@priority 3 (?b a bdi:Belief) / not((?b bdi:motivates ?d)) & not(?b bdi:supports ?i) "
        "& valid_at(?b, NOW) >> assert_desire(?b) as ?d2 ; link(motivates, ?b, ?d2) .", PREFIXES)
    assert rule.priority == 3
    assert len(rule.negatives) == 2 and len(rule.builtins) == 1


@pytest.mark.parametrize("name, count", [("hotel.rules", 3), ("zelle.rules", 3)])
def test_shipped_rule_files(name, count):
    assert len(parse_rules(read_fixture(name))) == count


# -- ingest / export ----------------------------------------------------------------------------


def test_empty_graph_gives_empty_kb():
    kb = ingest(Graph())
    assert kb.atoms == {} and kb.fired == set() and kb.clock == 0
    assert len(export(kb)) == 0


def test_zelle_atom_count(zelle):
    kb = ingest(zelle)
    assert len(kb.atoms) == len(zelle) == 32
    assert all(a.provenance == INGESTED for a in kb.atoms.values())
    assert [a.seq for a in kb.atoms.values()] == list(range(32))


def test_round_trip_atom_sets(zelle_m):
    kb = ingest(zelle_m)
    assert ingest(export(kb)).atom_set() == kb.atom_set()
    assert export(kb) == zelle_m


# -- running -------------------------------------------------------------------------------------


def test_zelle_chain():
    kb = run(kb_from("zelle_input.ttl"), parse_rules(read_fixture("zelle.rules")))
    assert [e.rule for e in kb.trace] == ["z1", "z2", "z3"]
    assert [e.process for e in kb.trace] == [RUN.BeliefProcess_1, RUN.DesireProcess_1, RUN.IntentionProcess_1]
    g = export(kb)
    assert Triple(RUN.BeliefProcess_1, BDI.generates, RUN.Belief_1) in g
    assert Triple(RUN.Belief_1, BDI.motivates, RUN.Desire_1) in g
    assert Triple(RUN.Intention_1, BDI.fulfils, RUN.Desire_1) in g
    assert Triple(RUN.Belief_1, BDI.supports, RUN.Intention_1) in g
    assert validate(g).ok
    assert not kb.bound_reached


def test_clock_and_provenance():
    kb = run(kb_from("zelle_input.ttl"), parse_rules(read_fixture("zelle.rules")))
    assert [e.at for e in kb.trace] == [DEFAULT_CLOCK_START.plus(k) for k in range(3)]
    atom = kb.atoms[Triple(RUN.BeliefProcess_1, BDI.generates, RUN.Belief_1)]
    assert atom.provenance == Provenance("derived", "z1") and atom.at == 1
    entailed = kb.atoms[Triple(RUN.BeliefProcess_1, BDI.affects, RUN.Belief_1)]
    assert entailed.provenance == BUILTIN


def test_process_reasons_and_trigger():
    kb = run(kb_from("zelle_input.ttl"), parse_rules(read_fixture("zelle.rules")))
    g = kb.graph
    assert g.objects(RUN.DesireProcess_1, BDI.reasonsUpon) == [RUN.Belief_1]
    assert g.objects(RUN.DesireProcess_1, BDI.isTriggeredBy) == [RUN.Belief_1]
    assert g.objects(RUN.BeliefProcess_1, BDI.isTriggeredBy) == [Iri("http://example.org/bdi-demo/WorldState_WS_request")]


def test_hotel_scenario():
    kb = run(kb_from("hotel_input.ttl"), parse_rules(read_fixture("hotel.rules")))
    assert [e.rule for e in kb.trace] == ["h1", "h2", "h3"]
    g = export(kb)
    (j,) = [t.subject for t in g.match(None, BDI.justifies, None)]
    (i,) = g.objects(j, BDI.justifies)
    (plan,) = g.objects(i, BDI.specifies)
    assert g.objects(plan, BDI.addresses) == [Iri(HOTEL_NS + "Goal_G2")]
    assert g.objects(plan, BDI.hasComponent) == [Iri(HOTEL_NS + "Task_homeActivity")]
    (text,) = g.objects(j, Iri("http://www.w3.org/2000/01/rdf-schema#comment"))
    assert "Task_checkIn" in text.lexical and "{" not in text.lexical
    assert g.objects(RUN.Planning_1, BDI.reasonsUpon) == [i]


def test_empty_rules_is_a_no_op():
    kb = kb_from("zelle_input.ttl")
    out = run(kb, [])
    assert out.trace == [] and out.atom_set() == kb.atom_set()


def test_max_cycles_bound():
    kb = run(kb_from("zelle_input.ttl"), parse_rules(read_fixture("zelle.rules")), max_cycles=1)
    assert len(kb.trace) == 1 and kb.bound_reached
    with pytest.raises(ValueError):
        run(kb, [], max_cycles=0)


def test_input_kb_untouched():
    kb = kb_from("zelle_input.ttl")
    before = kb.atom_set()
    run(kb, parse_rules(read_fixture("zelle.rules")))
    assert kb.atom_set() == before and kb.trace == []


def test_fixpoint_after_round_trip():
    rules = parse_rules(read_fixture("zelle.rules"))
    first = run(kb_from("zelle_input.ttl"), rules)
    again = run(ingest(export(first)), rules)
    assert again.trace == []
    assert again.clock == 3


def test_resumed_run_continues_clock_and_ids():
    rules = parse_rules(read_fixture("zelle.rules"))
    first = run(kb_from("zelle_input.ttl"), rules, max_cycles=1)
    rest = run(ingest(export(first)), rules)
    assert [e.at for e in rest.trace] == [DEFAULT_CLOCK_START.plus(1), DEFAULT_CLOCK_START.plus(2)]
    assert rest.trace[0].process == RUN.DesireProcess_1


def test_conflict_resolution_order():
    g = materialize(Graph([Triple(Iri("http://example.org/gen/a"), RDF.type, BDI.Agent),
                           Triple(Iri("http://example.org/gen/b"), RDF.type, BDI.Agent)]))
    rules = parse_rules("""
        @id b_rule (?a a bdi:Agent) >> emit(?a, rdfs:label, "b") .
        @id a_rule (?a a bdi:Agent) >> emit(?a, rdfs:label, "a") .
        @id urgent @priority 5 (?a a bdi:Agent) >> emit(?a, rdfs:comment, "u") .
    """, PREFIXES)
    kb = run(ingest(g), rules)
    got = [(e.rule, e.bindings["a"].local_name) for e in kb.trace]
    assert got == [("urgent", "a"), ("urgent", "b"), ("a_rule", "a"), ("a_rule", "b"),
                   ("b_rule", "a"), ("b_rule", "b")]


def test_negation_as_failure_blocks():
    g = materialize(parse_turtle(read_fixture("zelle_input.ttl")))
    rules = parse_rules("""
        @prefix ex: <http://example.org/bdi-demo/> .
        (?w a bdi:WorldState) / not(?w rdfs:comment ?c) >> emit(?w, rdfs:label, "quiet") .
    """)
    assert run(ingest(g), rules).trace == []


def test_valid_at_builtin():
    rules = parse_rules("""
        (?b a bdi:Belief) / valid_at(?b, NOW) >> emit(?b, rdfs:label, "now") .
    """)
    kb = run(kb_from("zelle_input.ttl"), parse_rules(read_fixture("zelle.rules")), max_cycles=1)
    assert len(run(kb, rules).trace) == len(kb.trace) + 1
    early = run(kb, rules, clock_start="2024-01-01T00:00:00Z")
    assert early.trace == kb.trace


def test_action_failure_keeps_partial_trace():
    rules = parse_rules(read_fixture("zelle.rules") + """
        @id bad (?d a bdi:Desire) >> link(motivates, ?d, ?d) .
    """)
    with pytest.raises(RuleActionError) as info:
        run(kb_from("zelle_input.ttl"), rules)
    kb = info.value.kb
    assert info.value.rule == "bad"
    assert [e.rule for e in kb.trace] == ["z1", "z2"]
    # the failed firing left nothing behind
    assert not kb.graph.match(RUN.DesireProcess_2, None, None)


def test_trace_jsonl():
    kb = run(kb_from("zelle_input.ttl"), parse_rules(read_fixture("zelle.rules")))
    lines = trace_jsonl(kb.trace).splitlines()
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert first["rule"] == "z1" and first["cycle"] == 1 and first["at"] == "2025-01-01T00:00:00Z"
    assert first["process"] == str(RUN.BeliefProcess_1)


def test_binding_hash_is_stable():
    b = {"x": Iri("http://a/x"), "y": Literal("1")}
    assert binding_hash("r", b) == binding_hash("r", dict(reversed(list(b.items()))))
    assert binding_hash("r", b) != binding_hash("s", b)
    assert len(binding_hash("r", b)) == 24


def test_provenance_triples_in_export():
    g = export(run(kb_from("zelle_input.ttl"), parse_rules(read_fixture("zelle.rules"))))
    assert len(g.match(None, T2B.firedRule, None)) == 3
    assert "t2b" in g.prefixes


# -- properties ----------------------------------------------------------------------------------

RULES = parse_rules(read_fixture("zelle.rules").replace(
    "@prefix ex: <http://example.org/bdi-demo/> .", "@prefix ex: <http://example.org/gen/> ."))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_run_invariants(seed):
    g = materialize(generators.perception_graph(random.Random(seed)))
    kb = run(ingest(g), RULES)
    assert len(kb.fired) == len(kb.trace)
    assert len({(e.rule, binding_hash(e.rule, e.bindings)) for e in kb.trace}) == len(kb.trace)
    out = export(kb)
    procs = {t.subject for t in out.match(None, T2B.firedRule, None)}
    assert len(procs) == len(kb.trace)
    assert validate(out).ok
    assert ingest(out).atom_set() == kb.atom_set()
    assert run(ingest(out), RULES).trace == []
    assert serialize_turtle(export(run(ingest(g), RULES))) == serialize_turtle(out)
