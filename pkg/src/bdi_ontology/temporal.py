"""Time instants, half-open validity intervals and point-in-time queries.

Instants are normalised to UTC.  A validity interval ``[start, end)`` holds
at its start and not at its end; an open interval has no end.  In graphs an
instant is a node carrying a ``time:inXSDDateTimeStamp`` literal (a bare
``xsd:dateTime`` literal is accepted wherever a node is expected).
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Mapping, Optional, Union

from .rdf import BDI, RDF, RUN, TIME, XSD, Graph, Iri, Literal, Term, Triple

log = logging.getLogger(__name__)

_DATETIME = re.compile(
    r"^(-?\d{4}-\d{2}-\d{2})T(\d{2}:\d{2}:\d{2})(?:\.(\d+))?(Z|[+-]\d{2}:\d{2})?$")


class TemporalError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class TimeInstant:
    moment: datetime

    @classmethod
    def parse(cls, text: str) -> "TimeInstant":
        m = _DATETIME.match(text.strip())
        if m is None:
            raise TemporalError(f"not an xsd:dateTime: {text!r}")
        date, clock, frac, zone = m.groups()
        frac = (frac or "0")[:6].ljust(6, "0")
        if zone in (None, "Z"):
            zone = "+00:00"
        try:
            moment = datetime.fromisoformat(f"{date}T{clock}.{frac}{zone}")
        except ValueError as exc:
            raise TemporalError(f"not an xsd:dateTime: {text!r} ({exc})") from None
        return cls(moment.astimezone(timezone.utc))

    @classmethod
    def coerce(cls, value: Union["TimeInstant", str, datetime]) -> "TimeInstant":
        if isinstance(value, TimeInstant):
            return value
        if isinstance(value, datetime):
            if value.tzinfo is None:
                value = value.replace(tzinfo=timezone.utc)
            return cls(value.astimezone(timezone.utc))
        return cls.parse(value)

    @property
    def canonical(self) -> str:
        m = self.moment
        text = f"{m.year:04d}-{m.month:02d}-{m.day:02d}T{m.hour:02d}:{m.minute:02d}:{m.second:02d}"
        if m.microsecond:
            text += "." + f"{m.microsecond:06d}".rstrip("0")
        return text + "Z"

    def __str__(self) -> str:
        return self.canonical

    def plus(self, seconds: float) -> "TimeInstant":
        return TimeInstant(self.moment + timedelta(seconds=seconds))

    def to_literal(self) -> Literal:
        return Literal(self.canonical, XSD.dateTime)


@dataclass(frozen=True)
class TimeInterval:
    start: TimeInstant
    end: Optional[TimeInstant] = None

    def __post_init__(self) -> None:
        if self.end is not None and self.end < self.start:
            raise TemporalError(f"interval ends ({self.end}) before it starts ({self.start})")

    @property
    def is_open(self) -> bool:
        return self.end is None

    def contains(self, t: TimeInstant) -> bool:
        return self.start <= t and (self.end is None or t < self.end)


Anchor = Union[TimeInstant, TimeInterval]


def instant_node(t: TimeInstant) -> Iri:
    return RUN["instant_" + re.sub(r"[^0-9A-Za-z]", "", t.canonical)]


def instant_triples(t: TimeInstant, node: Optional[Iri] = None) -> list[Triple]:
    node = node or instant_node(t)
    return [Triple(node, RDF.type, BDI.TimeInstant),
            Triple(node, TIME.inXSDDateTimeStamp, t.to_literal())]


# -- reading temporal data from graphs ----------------------------------------------


def instant_value(node: Term, g: Graph) -> Optional[TimeInstant]:
    if isinstance(node, Literal):
        return TimeInstant.parse(node.lexical)
    for lit in g.objects(node, TIME.inXSDDateTimeStamp):
        if isinstance(lit, Literal):
            return TimeInstant.parse(lit.lexical)
    return None


def interval_value(node: Term, g: Graph) -> Optional[TimeInterval]:
    """The interval described by ``node``, or None when it has no usable start."""
    starts = [instant_value(s, g) for s in g.objects(node, BDI.hasStartTime)]
    starts = [s for s in starts if s is not None]
    if len(set(starts)) != 1:
        if len(set(starts)) > 1:
            raise TemporalError(f"{node} has {len(set(starts))} start instants")
        return None
    ends = {e for e in (instant_value(x, g) for x in g.objects(node, BDI.hasEndTime)) if e is not None}
    if len(ends) > 1:
        raise TemporalError(f"{node} has {len(ends)} end instants")
    return TimeInterval(starts[0], next(iter(ends)) if ends else None)


def validity(entity: Term, g: Graph) -> Optional[TimeInterval]:
    for node in g.objects(entity, BDI.hasValidity):
        interval = interval_value(node, g)
        if interval is not None:
            return interval
    return None


def anchor(entity: Term, g: Graph) -> Optional[Anchor]:
    for node in g.objects(entity, BDI.atTime):
        interval = interval_value(node, g)
        if interval is not None:
            return interval
        instant = instant_value(node, g)
        if instant is not None:
            return instant
    return None


def _anchor_holds(a: Anchor, t: TimeInstant) -> bool:
    if isinstance(a, TimeInterval):
        return a.contains(t)
    return a == t


def valid_at(entity: Term, t: TimeInstant, g: Graph) -> bool:
    """Whether ``entity`` holds at ``t``: validity interval first, ``atTime`` otherwise."""
    t = TimeInstant.coerce(t)
    has_validity = bool(g.objects(entity, BDI.hasValidity))
    has_anchor = bool(g.objects(entity, BDI.atTime))
    if not has_validity and not has_anchor:
        raise TemporalError(f"{entity} has neither hasValidity nor atTime")
    interval = validity(entity, g) if has_validity else None
    if interval is not None:
        try:
            a = anchor(entity, g) if has_anchor else None
        except TemporalError:
            a = None
        if a is not None and not _anchor_holds_within(a, interval):
            log.warning("%s: atTime %s disagrees with validity %s; using validity", entity, a, interval)
        return interval.contains(t)
    a = anchor(entity, g) if has_anchor else None
    if a is not None:
        return _anchor_holds(a, t)
    raise TemporalError(f"temporal data of {entity} does not resolve to concrete instants")


def _anchor_holds_within(a: Anchor, interval: TimeInterval) -> bool:
    if isinstance(a, TimeInstant):
        return interval.contains(a)
    return interval.contains(a.start)


def mental_states_of(agent: Term, g: Graph, reg=None) -> list[Term]:
    from .schema import load_schema

    reg = reg or load_schema()
    states = set(reg.objects(g, agent, BDI.hasMentalState))
    for p in reg.subproperties(BDI.isMentalStateOf):
        states.update(g.subjects(p, agent))
    return sorted(states)


def _resolvable(entity: Term, g: Graph) -> bool:
    try:
        return validity(entity, g) is not None or anchor(entity, g) is not None
    except TemporalError:
        return False


def states_valid_at(agent: Optional[Term], t: TimeInstant, g: Graph, reg=None) -> list[Term]:
    """Mental states of ``agent`` (of anyone, if None) that hold at ``t``, sorted."""
    from .schema import load_schema

    reg = reg or load_schema()
    t = TimeInstant.coerce(t)
    if agent is None:
        candidates = reg.instances(g, BDI.MentalState)
    else:
        candidates = mental_states_of(agent, g, reg)
    return [s for s in candidates if _resolvable(s, g) and valid_at(s, t, g)]


class EffectKind(enum.Enum):
    GENERATES = "generates"
    MODIFIES = "modifies"
    SUPPRESSES = "suppresses"

    @property
    def predicate(self) -> Iri:
        return BDI[self.value]

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class HistoryEntry:
    at: Optional[TimeInstant]
    process: Term
    effect: EffectKind

    def sort_key(self) -> tuple:
        at = self.at.moment if self.at is not None else datetime.min.replace(tzinfo=timezone.utc)
        return (self.at is not None, at, self.process.sort_key(), self.effect.value)


def _process_time(process: Term, g: Graph) -> Optional[TimeInstant]:
    try:
        a = anchor(process, g)
    except TemporalError:
        return None
    if isinstance(a, TimeInterval):
        return a.start
    return a


def history(entity: Term, g: Graph) -> list[HistoryEntry]:
    """Generate/modify/suppress events for ``entity`` and the states that replaced it.

    A modification (suppress old, generate new, ``modifies`` edge to new) is
    reported once, as a single MODIFIES entry.
    """
    chain = [entity]
    seen = {entity}
    i = 0
    while i < len(chain):
        for p in g.subjects(BDI.suppresses, chain[i]):
            for nxt in g.objects(p, BDI.modifies):
                if nxt not in seen:
                    seen.add(nxt)
                    chain.append(nxt)
        i += 1
    modifiers = {p for state in chain for p in g.subjects(BDI.modifies, state)}
    entries = set()
    for state in chain:
        for kind in EffectKind:
            for p in g.subjects(kind.predicate, state):
                effect = EffectKind.MODIFIES if p in modifiers else kind
                entries.add(HistoryEntry(_process_time(p, g), p, effect))
    return sorted(entries, key=HistoryEntry.sort_key)


# -- symbolic time labels ---------------------------------------------------------------


@dataclass(frozen=True)
class Timemap:
    """Symbolic time labels (e.g. ``WE-morning``) mapped to concrete instants/intervals."""

    labels: Mapping[str, Anchor]

    @classmethod
    def from_mapping(cls, data: Mapping) -> "Timemap":
        entries = data.get("labels", data)
        labels: dict[str, Anchor] = {}
        for label, spec in entries.items():
            if not isinstance(spec, Mapping):
                raise TemporalError(f"timemap entry {label!r} must be a table")
            if "at" in spec:
                labels[label] = TimeInstant.parse(str(spec["at"]))
            elif "start" in spec:
                end = spec.get("end")
                labels[label] = TimeInterval(TimeInstant.parse(str(spec["start"])),
                                             TimeInstant.parse(str(end)) if end else None)
            else:
                raise TemporalError(f"timemap entry {label!r} needs 'at' or 'start'")
        return cls(labels)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Timemap":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        with open(path, "rb") as fh:
            return cls.from_mapping(tomllib.load(fh))

    def resolve(self, iri: Iri) -> Optional[Anchor]:
        local = iri.local_name
        for label in sorted(self.labels, key=lambda s: (-len(s), s)):
            key = label.replace("-", "_")
            if local == key or local.endswith("_" + key):
                return self.labels[label]
        return None

    def augment(self, g: Graph) -> Graph:
        """Copy of ``g`` where symbolic time nodes gain concrete instants."""
        out = g.copy()
        nodes = set()
        for p in (BDI.hasValidity, BDI.atTime):
            nodes.update(t.object for t in g.match(None, p, None) if isinstance(t.object, Iri))
        for node in sorted(nodes):
            if g.objects(node, BDI.hasStartTime) or g.objects(node, TIME.inXSDDateTimeStamp):
                continue
            value = self.resolve(node)
            if isinstance(value, TimeInterval):
                out.add(Triple(node, RDF.type, BDI.TimeInterval))
                for pred, t in ((BDI.hasStartTime, value.start), (BDI.hasEndTime, value.end)):
                    if t is not None:
                        out.add(Triple(node, pred, instant_node(t)))
                        out.update(instant_triples(t))
            elif isinstance(value, TimeInstant):
                out.update(instant_triples(value, node))
        out.bind("run", str(RUN))
        out.bind("time", str(TIME))
        return out
