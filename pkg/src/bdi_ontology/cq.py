"""The eighteen competency questions as parameterised queries.

Most questions are small graph patterns (with alternatives, so the answer does
not depend on which direction of an inverse pair the data states).  CQ15
walks a plan's task sequence; CQ16 to CQ18 delegate to :mod:`.temporal`.
Queries expect a materialized graph.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .deliberation import Pattern, Var, solve
from .rdf import BDI, RDF, XSD, Graph, Iri, Literal, Term
from .temporal import TemporalError, TimeInstant, history, states_valid_at, validity

__all__ = ["CqError", "CqTemplate", "ResultSet", "TEMPLATES", "answer", "list_templates", "resolve_param"]


class CqError(ValueError):
    pass


@dataclass(frozen=True)
class CqTemplate:
    id: str
    question: str
    params: tuple  # required parameter names
    projection: tuple
    alternatives: tuple = ()  # tuple of pattern lists, unioned
    optional: tuple = ()
    evaluate: Optional[Callable] = None  # replaces pattern evaluation
    ordered: bool = False  # rows keep evaluation order instead of being sorted
    doc: str = ""

    @property
    def patterns(self) -> list[Pattern]:
        return [p for alt in self.alternatives for p in alt]


@dataclass(frozen=True)
class ResultSet:
    columns: tuple
    rows: tuple

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def values(self) -> set:
        """The set of values of a single-column result."""
        return {r[0] for r in self.rows}

    def _cells(self, show) -> list[list[str]]:
        return [[_cell(v, show) for v in row] for row in self.rows]

    def to_text(self, show=str) -> str:
        cells = self._cells(show)
        widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(self.columns)]
        line = lambda vals: "  ".join(v.ljust(w) for v, w in zip(vals, widths)).rstrip()
        out = [line(self.columns), line(["-" * w for w in widths])]
        out += [line(r) for r in cells]
        out.append(f"({len(self.rows)} row{'s' if len(self.rows) != 1 else ''})")
        return "\n".join(out) + "\n"

    def to_csv(self, show=str) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.columns)
        w.writerows(self._cells(show))
        return buf.getvalue()


def _cell(v, show) -> str:
    if v is None:
        return ""
    if isinstance(v, Literal):
        return v.lexical
    return show(v)


def _v(name: str) -> Var:
    return Var(name)


def _pat(s, p, o) -> Pattern:
    return Pattern(s, p, o)


def _sort_rows(rows) -> tuple:
    def key(row):
        return tuple((0,) if v is None else (1, v.sort_key()) for v in row)

    return tuple(sorted(set(rows), key=key))


# -- special evaluators ----------------------------------------------------------------


def _error_row(message: str) -> tuple:
    return (Literal("error"), Literal(message))


def _next(task: Term, g: Graph) -> set:
    return set(g.subjects(BDI.follows, task)) | set(g.objects(task, BDI.precedes))


def _reach(task: Term, g: Graph) -> set:
    """Tasks after ``task`` (``task`` itself only if it lies on a cycle)."""
    seen, todo = set(), [task]
    while todo:
        for nxt in _next(todo.pop(), g):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def _task_sequence(params: dict, g: Graph) -> list[tuple]:
    plan = params["plan"]
    starts = g.objects(plan, BDI.beginsWith)
    if not starts:
        return []
    if len(starts) > 1:
        return [_error_row(f"plan has {len(starts)} first tasks")]
    reach = {t: _reach(t, g) for t in _reach(starts[0], g) | {starts[0]}}
    looped = sorted(t for t, r in reach.items() if t in r)
    if looped:
        return [_error_row(f"task order is cyclic at {looped[0]}")]
    seq = [starts[0]]
    while True:
        after = reach[seq[-1]]
        # immediate successors: not reachable through another successor
        direct = {b for b in after if not any(b in reach[c] for c in after - {b})}
        if not direct:
            break
        if len(direct) > 1:
            return [_error_row(f"sequence branches after {seq[-1]}")]
        seq.append(direct.pop())
    ends = g.objects(plan, BDI.endsWith)
    if ends and seq[-1] not in ends:
        return [_error_row(f"sequence ends at {seq[-1]} but the plan ends with {ends[0]}")]
    return [(Literal(str(i), XSD.integer), t) for i, t in enumerate(seq, 1)]


def _validity(params: dict, g: Graph) -> list[tuple]:
    try:
        interval = validity(params["state"], g)
    except TemporalError as exc:
        return [_error_row(str(exc))]
    if interval is None:
        return []
    end = interval.end.to_literal() if interval.end is not None else None
    return [(interval.start.to_literal(), end)]


def _valid_at(params: dict, g: Graph) -> list[tuple]:
    return [(s,) for s in states_valid_at(params.get("agent"), params["instant"], g)]


def _history(params: dict, g: Graph) -> list[tuple]:
    return [(e.at.to_literal() if e.at is not None else None, e.process, Literal(e.effect.value))
            for e in history(params["entity"], g)]


# -- the templates ------------------------------------------------------------------------

def _t(id_, question, params, projection, *alternatives, **kw) -> CqTemplate:
    return CqTemplate(id_, question, tuple(params), tuple(projection), tuple(tuple(a) for a in alternatives), **kw)


_TEMPLATES = [
    _t("CQ1", "What are mental entities?", [], ["entity"],
       [_pat(_v("entity"), RDF.type, BDI.MentalEntity)],
       doc="every individual typed MentalEntity"),
    _t("CQ2", "What mental states (i.e. befiefs, desires, and intentions) does an agent hold?",
       ["agent"], ["state"],
       [_pat(_v("agent"), BDI.hasMentalState, _v("state"))],
       [_pat(_v("state"), BDI.isMentalStateOf, _v("agent"))]),
    _t("CQ3", "What are the constituent mental entities that form part of a given mental entity?",
       ["entity"], ["part"],
       [_pat(_v("entity"), BDI.hasPart, _v("part"))],
       [_pat(_v("part"), BDI.isPartOf, _v("entity"))],
       doc="uses the transitive hasPart closure"),
    _t("CQ4", "What mental processes has an agent undergone?", ["agent"], ["process"],
       [_pat(_v("process"), BDI.isProcessedBy, _v("agent"))]),
    _t("CQ5", "What is the world state that a given mental state is about?", ["state"], ["world"],
       [_pat(_v("state"), BDI.refersTo, _v("world")), _pat(_v("world"), RDF.type, BDI.WorldState)]),
    _t("CQ6", "What beliefs motivated the formation of a given desire?", ["desire"], ["belief"],
       [_pat(_v("desire"), BDI.isMotivatedBy, _v("belief")), _pat(_v("belief"), RDF.type, BDI.Belief)],
       [_pat(_v("belief"), BDI.motivates, _v("desire")), _pat(_v("belief"), RDF.type, BDI.Belief)]),
    _t("CQ7", "Which desire does a particular intention fulfil?", ["intention"], ["desire"],
       [_pat(_v("intention"), BDI.fulfils, _v("desire")), _pat(_v("desire"), RDF.type, BDI.Desire)],
       [_pat(_v("intention"), BDI.fulfills, _v("desire")), _pat(_v("desire"), RDF.type, BDI.Desire)]),
    _t("CQ8", "Which mental process generated a given belief, desire, or intention?", ["state"], ["process"],
       [_pat(_v("process"), BDI.generates, _v("state")), _pat(_v("process"), RDF.type, BDI.MentalProcess)]),
    _t("CQ9", "When was a mental entity generated?", ["entity"], ["process", "time"],
       [_pat(_v("process"), BDI.generates, _v("entity")), _pat(_v("process"), BDI.atTime, _v("time"))],
       doc="the atTime of the generating process"),
    _t("CQ10", "What triggered a mental process?", ["process"], ["trigger"],
       [_pat(_v("process"), BDI.isTriggeredBy, _v("trigger"))],
       [_pat(_v("trigger"), BDI.triggers, _v("process"))]),
    _t("CQ11", "What justifications support a specific mental entity?", ["entity"], ["justification"],
       [_pat(_v("justification"), BDI.justifies, _v("entity")),
        _pat(_v("justification"), RDF.type, BDI.Justification)]),
    _t("CQ12", "What goal does a given intention or plan aim to fulfil?", ["subject"], ["goal"],
       [_pat(_v("subject"), BDI.addresses, _v("goal")), _pat(_v("goal"), RDF.type, BDI.Goal)],
       [_pat(_v("subject"), BDI.specifies, _v("plan")), _pat(_v("plan"), BDI.addresses, _v("goal")),
        _pat(_v("goal"), RDF.type, BDI.Goal)],
       doc="a plan's goal directly, an intention's through the plans it specifies"),
    _t("CQ13", "What plan has been specified by a particular intention?", ["intention"], ["plan"],
       [_pat(_v("intention"), BDI.specifies, _v("plan")), _pat(_v("plan"), RDF.type, BDI.Plan)],
       [_pat(_v("plan"), BDI.isSpecifiedBy, _v("intention")), _pat(_v("plan"), RDF.type, BDI.Plan)]),
    _t("CQ14", "What planning process led to the creation of a particular plan?", ["plan"], ["process"],
       [_pat(_v("process"), BDI.defines, _v("plan")), _pat(_v("process"), RDF.type, BDI.Planning)]),
    _t("CQ15", "What is the ordered sequence of tasks that compose a given plan?", ["plan"],
       ["position", "task"], evaluate=_task_sequence, ordered=True,
       doc="beginsWith, then immediate successors, up to endsWith; branches and cycles give an error row"),
    _t("CQ16", "What is the temporal validity (start and end time) of a mental state?", ["state"],
       ["start", "end"], evaluate=_validity),
    _t("CQ17", "What mental states were valid at a specific point in time?", ["instant"], ["state"],
       optional=("agent",), evaluate=_valid_at,
       doc="optionally restricted to one agent"),
    _t("CQ18", "How has a mental entity evolved over time?", ["entity"], ["time", "process", "effect"],
       evaluate=_history, ordered=True),
]

TEMPLATES = {t.id: t for t in _TEMPLATES}


def list_templates() -> list[tuple[str, str, tuple]]:
    """(id, question, parameter names) for all templates, CQ1 first."""
    return [(t.id, t.question, t.params + tuple(f"{p}?" for p in t.optional)) for t in _TEMPLATES]


def resolve_param(value: Union[str, Term], prefixes: dict, name: str = "param") -> Term:
    """A Term from a CLI-style string: ``ex:Foo``, ``<http://...>`` or a bare absolute IRI."""
    if isinstance(value, Term):
        return value
    text = value.strip()
    if text.startswith("<") and text.endswith(">"):
        text = text[1:-1]
    prefix, sep, local = text.partition(":")
    if sep and prefix in prefixes and not local.startswith("//"):
        text = prefixes[prefix] + local
    try:
        return Iri(text)
    except ValueError as exc:
        raise CqError(f"bad value for {name}: {exc}") from None


def answer(cq_id: str, params: Optional[dict] = None, g: Optional[Graph] = None) -> ResultSet:
    """Evaluate competency question ``cq_id`` with ``params`` over ``g``."""
    template = TEMPLATES.get(cq_id.upper() if isinstance(cq_id, str) else cq_id)
    if template is None:
        raise CqError(f"unknown competency question {cq_id!r}; use CQ1 to CQ18")
    g = g if g is not None else Graph()
    params = dict(params or {})
    unknown = set(params) - set(template.params) - set(template.optional)
    if unknown:
        raise CqError(f"{template.id} takes no parameter {sorted(unknown)[0]!r}")
    missing = [p for p in template.params if params.get(p) is None]
    if missing:
        raise CqError(f"{template.id} needs parameter {missing[0]!r}")
    bound: dict = {}
    for name, value in params.items():
        if value is None:
            continue
        if name == "instant":
            try:
                bound[name] = TimeInstant.coerce(value)
            except (TemporalError, TypeError) as exc:
                raise CqError(f"bad instant: {exc}") from None
        else:
            bound[name] = resolve_param(value, g.prefixes, name)
    if template.evaluate is not None:
        rows = template.evaluate(bound, g)
        return ResultSet(template.projection, tuple(rows) if template.ordered else _sort_rows(rows))
    rows = set()
    for alt in template.alternatives:
        for b in solve(alt, g, bound):
            rows.add(tuple(b[c] for c in template.projection))
    return ResultSet(template.projection, _sort_rows(rows))
