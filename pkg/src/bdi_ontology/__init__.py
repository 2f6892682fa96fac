"""An executable BDI ontology: RDF-backed mental states plus a production-rule engine.

Submodules:

- ``rdf``: terms, indexed graphs, Turtle reading and writing
- ``schema``: class/property axioms, materialization, closed-world validation
- ``mental``: creating and evolving beliefs, desires, intentions and their processes
- ``temporal``: instants, half-open validity intervals, history queries
- ``deliberation``: rules, the deliberation cycle, graph/belief round trips
- ``cq``: the eighteen competency questions
"""

__version__ = "0.1.0"

from .cq import CqError, ResultSet, answer, list_templates
from .deliberation import (BeliefAtom, KBState, Rule, RuleActionError, RuleSyntaxError, TraceEvent,
                           export, ingest, parse_rules, run)
from .mental import MentalGraph, MentalGraphError
from .rdf import (BDI, BlankNode, Graph, Iri, Literal, Namespace, Triple, TurtleSyntaxError,
                  parse_turtle, serialize_turtle)
from .schema import SchemaRegistry, ValidationReport, load_schema, materialize, validate
from .temporal import EffectKind, TemporalError, TimeInstant, TimeInterval, Timemap, valid_at


def fixture_path(name: str):
    """Path of a shipped fixture file (e.g. ``"zelle.ttl"``)."""
    from importlib.resources import files

    return files(__name__).joinpath("fixtures", name)


__all__ = [
    "BDI", "BeliefAtom", "BlankNode", "CqError", "EffectKind", "Graph", "Iri", "KBState",
    "Literal", "MentalGraph", "MentalGraphError", "Namespace", "ResultSet", "Rule",
    "RuleActionError", "RuleSyntaxError", "SchemaRegistry", "TemporalError", "TimeInstant",
    "TimeInterval", "Timemap", "TraceEvent", "Triple", "TurtleSyntaxError", "ValidationReport",
    "answer", "export", "fixture_path", "ingest", "list_templates", "load_schema", "materialize",
    "parse_rules", "parse_turtle", "run", "serialize_turtle", "valid_at", "validate",
]
