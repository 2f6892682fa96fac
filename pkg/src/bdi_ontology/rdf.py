"""RDF terms, an indexed in-memory graph, and a Turtle subset reader/writer.

The Turtle subset covers what the BDI fixtures and the engine output need:
``@prefix``/``PREFIX`` directives, the ``a`` keyword, predicate lists (``;``),
object lists (``,``), typed and language-tagged literals, long ``\"\"\"``
strings, numeric and boolean shorthands, and labelled blank nodes.
Collections, ``[...]`` property lists and ``@base`` are rejected.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Union

__all__ = [
    "BDI", "D0", "DUL", "OWL", "RDF", "RDFS", "RUN", "T2B", "TIME", "XSD",
    "BlankNode", "Graph", "Iri", "Literal", "Namespace", "Term", "Triple",
    "TurtleSyntaxError", "STANDARD_PREFIXES", "insert", "match",
    "parse_turtle", "serialize_turtle",
]

_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')


class Term:
    """Common base for IRIs, blank nodes and literals (total order across kinds)."""

    __slots__ = ()

    def sort_key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other: "Term") -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "Term") -> bool:
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: "Term") -> bool:
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: "Term") -> bool:
        return self.sort_key() >= other.sort_key()


@dataclass(frozen=True, eq=True, order=False)
class Iri(Term):
    value: str

    def __post_init__(self) -> None:
        v = self.value
        if not isinstance(v, str) or not v:
            raise ValueError("IRI must be a non-empty string")
        if _IRI_FORBIDDEN.search(v):
            raise ValueError(f"malformed IRI {v!r}: forbidden character")
        if ":" not in v or v.index(":") == 0:
            raise ValueError(f"malformed IRI {v!r}: no scheme")

    def sort_key(self) -> tuple:
        return (0, self.value, "", "")

    @property
    def local_name(self) -> str:
        v = self.value
        cut = max(v.rfind("#"), v.rfind("/"))
        if cut < 0:
            cut = v.rfind(":")
        return v[cut + 1:]

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return f"Iri({self.value!r})"


@dataclass(frozen=True, eq=True, order=False)
class BlankNode(Term):
    id: str

    def sort_key(self) -> tuple:
        return (1, self.id, "", "")

    def __str__(self) -> str:
        return f"_:{self.id}"


class Namespace(str):
    """String namespace whose attributes and items are IRIs in it."""

    def term(self, name: str) -> Iri:
        return Iri(str(self) + name)

    def __getattr__(self, name: str) -> Iri:
        if name.startswith("__"):
            raise AttributeError(name)
        return self.term(name)

    def __getitem__(self, name) -> Iri:  # type: ignore[override]
        if isinstance(name, str):
            return self.term(name)
        return str.__getitem__(self, name)

    def __contains__(self, item) -> bool:  # type: ignore[override]
        if isinstance(item, Iri):
            return item.value.startswith(self)
        return str.__contains__(self, item)


RDF = Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = Namespace("http://www.w3.org/2000/01/rdf-schema#")
XSD = Namespace("http://www.w3.org/2001/XMLSchema#")
OWL = Namespace("http://www.w3.org/2002/07/owl#")
TIME = Namespace("http://www.w3.org/2006/time#")
BDI = Namespace("https://w3id.org/fossr/ontology/bdi/")
DUL = Namespace("http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#")
D0 = Namespace("http://www.ontologydesignpatterns.org/ont/d0.owl#")
# individuals minted by the engine, and the engine's own provenance vocabulary
RUN = Namespace("http://example.org/bdi-run/")
T2B = Namespace("http://example.org/bdi-run/vocab#")

STANDARD_PREFIXES = {
    "bdi": str(BDI),
    "owl": str(OWL),
    "rdf": str(RDF),
    "rdfs": str(RDFS),
    "xsd": str(XSD),
}

XSD_STRING = XSD.string
RDF_LANGSTRING = RDF.langString


@dataclass(frozen=True, eq=True, order=False, init=False)
class Literal(Term):
    lexical: str
    datatype: Iri = XSD_STRING
    language: Optional[str] = None

    def __init__(self, lexical: str, datatype: Optional[Iri] = None,
                 language: Optional[str] = None):
        if language is not None:
            if datatype is not None and datatype != RDF_LANGSTRING:
                raise ValueError("language tag requires the rdf:langString datatype")
            datatype = RDF_LANGSTRING
        elif datatype is None:
            datatype = XSD_STRING
        elif datatype == RDF_LANGSTRING:
            raise ValueError("rdf:langString literal needs a language tag")
        object.__setattr__(self, "lexical", str(lexical))
        object.__setattr__(self, "datatype", datatype)
        object.__setattr__(self, "language", language)

    def sort_key(self) -> tuple:
        return (2, self.lexical, self.datatype.value, self.language or "")

    def __str__(self) -> str:
        return self.lexical


Subject = Union[Iri, BlankNode]


class Triple(NamedTuple):
    subject: Subject
    predicate: Iri
    object: Term


# -- graph --------------------------------------------------------------------


class Graph:
    """A set of triples with SPO, POS and OSP hash indexes and a prefix map.

    Mutation is single-writer; concurrent readers are fine once a graph is no
    longer being modified.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[dict] = None):
        self._triples: set[Triple] = set()
        self._spo: dict = {}
        self._pos: dict = {}
        self._osp: dict = {}
        self.prefixes: dict[str, str] = dict(prefixes or {})
        for t in triples:
            self.add(t)

    # set protocol

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t) -> bool:
        return t in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<Graph {len(self)} triples>"

    def triples(self) -> frozenset:
        return frozenset(self._triples)

    def copy(self) -> "Graph":
        g = Graph(prefixes=self.prefixes)
        for t in self._triples:
            g._index(t)
        return g

    def bind(self, prefix: str, namespace: str) -> None:
        self.prefixes[prefix] = str(namespace)

    # mutation

    def add(self, t: Triple) -> bool:
        """Insert ``t``; returns False when it was already present."""
        s, p, o = t
        if not isinstance(p, Iri):
            raise TypeError(f"predicate must be an Iri, got {p!r}")
        if not isinstance(s, (Iri, BlankNode)):
            raise TypeError(f"subject must be an Iri or BlankNode, got {s!r}")
        if not isinstance(o, Term):
            raise TypeError(f"object must be a Term, got {o!r}")
        t = Triple(s, p, o)
        if t in self._triples:
            return False
        self._index(t)
        return True

    def _index(self, t: Triple) -> None:
        s, p, o = t
        self._triples.add(t)
        self._spo.setdefault(s, {}).setdefault(p, set()).add(o)
        self._pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self._osp.setdefault(o, {}).setdefault(s, set()).add(p)

    def update(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.add(t))

    def remove(self, t: Triple) -> bool:
        if t not in self._triples:
            return False
        s, p, o = t
        self._triples.discard(t)
        for index, a, b, c in ((self._spo, s, p, o), (self._pos, p, o, s), (self._osp, o, s, p)):
            inner = index[a]
            inner[b].discard(c)
            if not inner[b]:
                del inner[b]
            if not inner:
                del index[a]
        return True

    # lookup

    def _candidates(self, s, p, o) -> Iterable[Triple]:
        if s is not None:
            by_p = self._spo.get(s)
            if not by_p:
                return ()
            if p is not None:
                objs = by_p.get(p, ())
                if o is not None:
                    return (Triple(s, p, o),) if o in objs else ()
                return (Triple(s, p, x) for x in objs)
            if o is not None:
                preds = self._osp.get(o, {}).get(s, ())
                return (Triple(s, x, o) for x in preds)
            return (Triple(s, x, y) for x, ys in by_p.items() for y in ys)
        if p is not None:
            by_o = self._pos.get(p)
            if not by_o:
                return ()
            if o is not None:
                return (Triple(x, p, o) for x in by_o.get(o, ()))
            return (Triple(x, p, y) for y, xs in by_o.items() for x in xs)
        if o is not None:
            by_s = self._osp.get(o)
            if not by_s:
                return ()
            return (Triple(x, y, o) for x, ys in by_s.items() for y in ys)
        return self._triples

    def match(self, s=None, p=None, o=None) -> list[Triple]:
        """All triples agreeing with the bound positions (None is a wildcard), sorted."""
        return sorted(self._candidates(s, p, o))

    def count(self, s=None, p=None, o=None) -> int:
        return sum(1 for _ in self._candidates(s, p, o))

    def objects(self, s, p) -> list[Term]:
        return sorted(self._spo.get(s, {}).get(p, ()))

    def subjects(self, p, o) -> list[Term]:
        return sorted(self._pos.get(p, {}).get(o, ()))

    def value(self, s, p) -> Optional[Term]:
        objs = self.objects(s, p)
        return objs[0] if objs else None

    def types(self, s) -> set:
        return set(self._spo.get(s, {}).get(RDF.type, ()))

    def predicates(self) -> list[Iri]:
        return sorted(self._pos)

    def nodes(self) -> set:
        out = set(self._spo)
        out.update(o for o in self._osp if not isinstance(o, Literal))
        return out

    def index_contents(self, name: str) -> set[Triple]:
        """Triples reachable through one index ("spo", "pos" or "osp")."""
        if name == "spo":
            return {Triple(s, p, o) for s, d in self._spo.items() for p, os_ in d.items() for o in os_}
        if name == "pos":
            return {Triple(s, p, o) for p, d in self._pos.items() for o, ss in d.items() for s in ss}
        if name == "osp":
            return {Triple(s, p, o) for o, d in self._osp.items() for s, ps in d.items() for p in ps}
        raise ValueError(name)

    # rendering

    def n3(self, term: Term) -> str:
        return _render_term(term, _Compactor(self.prefixes))

    def __or__(self, other: "Graph") -> "Graph":
        g = self.copy()
        g.prefixes.update({k: v for k, v in other.prefixes.items() if k not in g.prefixes})
        g.update(other._triples)
        return g


def insert(graph: Graph, t: Triple) -> Graph:
    """Add ``t`` to ``graph`` in place and return the graph."""
    graph.add(t)
    return graph


def match(graph: Graph, pattern: tuple) -> list[Triple]:
    s, p, o = pattern
    return graph.match(s, p, o)


# -- Turtle reading -------------------------------------------------------------


class TurtleSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        self.reason = message
        super().__init__(f"line {line}, column {column}: {message}")


_PN_CHARS_BASE = "A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD"
_PN_CHARS_U = _PN_CHARS_BASE + "_"
_PN_CHARS = _PN_CHARS_U + "\\-0-9\u00B7\u0300-\u036F\u203F-\u2040"
_PLX = r"%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%]"
_PN_PREFIX = f"[{_PN_CHARS_BASE}](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?"
_PN_LOCAL = (f"(?:[{_PN_CHARS_U}:0-9]|{_PLX})"
             f"(?:(?:[{_PN_CHARS}.:]|{_PLX})*(?:[{_PN_CHARS}:]|{_PLX}))?")

_TOKEN_SPECS = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\r\n]*"),
    ("IRIREF", r"<([^<>\"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>"),
    ("PNAME", f"(?:{_PN_PREFIX})?:(?:{_PN_LOCAL})?"),
    ("BLANK", f"_:[{_PN_CHARS_U}0-9](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?"),
    ("STRING_LONG2", r'"""(?:(?:"|"")?(?:[^"\\]|\\.))*"""'),
    ("STRING_LONG1", r"'''(?:(?:'|'')?(?:[^'\\]|\\.))*'''"),
    ("STRING2", r'"(?:[^"\\\n\r]|\\.)*"'),
    ("STRING1", r"'(?:[^'\\\n\r]|\\.)*'"),
    ("LANGTAG", r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"),
    ("DTYPE", r"\^\^"),
    ("DOUBLE", r"[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.[0-9]+[eE][+-]?[0-9]+|[0-9]+[eE][+-]?[0-9]+)"),
    ("DECIMAL", r"[+-]?[0-9]*\.[0-9]+"),
    ("INTEGER", r"[+-]?[0-9]+"),
    ("WORD", r"[A-Za-z][A-Za-z0-9_]*"),
    ("PUNCT", r"[.;,\[\]()]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{r})" for n, r in _TOKEN_SPECS), re.DOTALL)

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.DOTALL)


class _Token(NamedTuple):
    kind: str
    text: str
    pos: int


class _Locator:
    def __init__(self, text: str):
        self.starts = [0] + [m.end() for m in re.finditer(r"\n", text)]

    def __call__(self, pos: int) -> tuple[int, int]:
        line = bisect.bisect_right(self.starts, pos)
        return line, pos - self.starts[line - 1] + 1


def _unescape_string(body: str, fail) -> str:
    def sub(m: re.Match) -> str:
        esc = m.group(1)
        if esc[0] in "uU" and len(esc) > 1:
            return chr(int(esc[1:], 16))
        if esc in _ESCAPES:
            return _ESCAPES[esc]
        fail(f"invalid escape sequence \\{esc}")
        return ""
    return _ESCAPE_RE.sub(sub, body)


def _tokenize(text: str, locate: _Locator) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            line, col = locate(pos)
            raise TurtleSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    return tokens


class _TurtleParser:
    def __init__(self, text: str):
        self.text = text
        self.locate = _Locator(text)
        self.tokens = _tokenize(text, self.locate)
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.triples: list[Triple] = []

    # helpers

    def fail(self, message: str, token: Optional[_Token] = None):
        if token is None:
            token = self.tokens[self.i] if self.i < len(self.tokens) else None
        pos = token.pos if token is not None else len(self.text)
        line, col = self.locate(pos)
        raise TurtleSyntaxError(message, line, col)

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self, what: str = "token") -> _Token:
        tok = self.peek()
        if tok is None:
            self.fail(f"unexpected end of input, expected {what}")
        self.i += 1
        return tok

    def expect_punct(self, ch: str) -> None:
        tok = self.next(repr(ch))
        if tok.kind != "PUNCT" or tok.text != ch:
            self.fail(f"expected {ch!r}, found {tok.text!r}", tok)

    # grammar

    def parse(self) -> Graph:
        while self.peek() is not None:
            self.statement()
        return Graph(self.triples, prefixes=self.prefixes)

    def statement(self) -> None:
        tok = self.peek()
        if tok.kind == "LANGTAG" and tok.text in ("@prefix", "@base"):
            self.i += 1
            if tok.text == "@base":
                self.fail("@base is not supported", tok)
            self.prefix_decl()
            self.expect_punct(".")
            return
        if tok.kind == "WORD" and tok.text.upper() in ("PREFIX", "BASE"):
            self.i += 1
            if tok.text.upper() == "BASE":
                self.fail("BASE is not supported", tok)
            self.prefix_decl()
            return
        subject = self.subject()
        self.predicate_object_list(subject)
        self.expect_punct(".")

    def prefix_decl(self) -> None:
        tok = self.next("prefix name")
        if tok.kind != "PNAME" or not tok.text.endswith(":") or tok.text.count(":") != 1:
            self.fail(f"expected a prefix name like 'ex:', found {tok.text!r}", tok)
        iri_tok = self.next("IRI")
        if iri_tok.kind != "IRIREF":
            self.fail(f"expected <IRI> after prefix, found {iri_tok.text!r}", iri_tok)
        self.prefixes[tok.text[:-1]] = self.iri_value(iri_tok).value

    def iri_value(self, tok: _Token) -> Iri:
        body = _unescape_string(tok.text[1:-1], lambda m: self.fail(m, tok))
        try:
            return Iri(body)
        except ValueError as exc:
            self.fail(str(exc), tok)

    def pname_value(self, tok: _Token) -> Iri:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            self.fail(f"undefined prefix {prefix!r}", tok)
        local = re.sub(r"\\(.)", r"\1", local)
        try:
            return Iri(self.prefixes[prefix] + local)
        except ValueError as exc:
            self.fail(str(exc), tok)

    def iri(self, tok: _Token) -> Optional[Iri]:
        if tok.kind == "IRIREF":
            return self.iri_value(tok)
        if tok.kind == "PNAME":
            return self.pname_value(tok)
        return None

    def unsupported(self, tok: _Token) -> None:
        if tok.kind == "PUNCT" and tok.text in "[(":
            self.fail("blank node property lists and collections are not supported", tok)

    def subject(self) -> Subject:
        tok = self.next("subject")
        self.unsupported(tok)
        if tok.kind == "BLANK":
            return BlankNode(tok.text[2:])
        iri = self.iri(tok)
        if iri is None:
            self.fail(f"expected subject, found {tok.text!r}", tok)
        return iri

    def verb(self) -> Iri:
        tok = self.next("predicate")
        if tok.kind == "WORD" and tok.text == "a":
            return RDF.type
        iri = self.iri(tok)
        if iri is None:
            self.fail(f"expected predicate, found {tok.text!r}", tok)
        return iri

    def predicate_object_list(self, subject: Subject) -> None:
        while True:
            predicate = self.verb()
            self.object_list(subject, predicate)
            tok = self.peek()
            if tok is None or tok.kind != "PUNCT" or tok.text != ";":
                return
            while tok is not None and tok.kind == "PUNCT" and tok.text == ";":
                self.i += 1
                tok = self.peek()
            if tok is None or (tok.kind == "PUNCT" and tok.text == "."):
                return

    def object_list(self, subject: Subject, predicate: Iri) -> None:
        while True:
            self.triples.append(Triple(subject, predicate, self.object()))
            tok = self.peek()
            if tok is None or tok.kind != "PUNCT" or tok.text != ",":
                return
            self.i += 1

    def object(self) -> Term:
        tok = self.next("object")
        self.unsupported(tok)
        kind = tok.kind
        if kind == "BLANK":
            return BlankNode(tok.text[2:])
        iri = self.iri(tok)
        if iri is not None:
            return iri
        if kind.startswith("STRING"):
            quote = 3 if "LONG" in kind else 1
            lexical = _unescape_string(tok.text[quote:-quote], lambda m: self.fail(m, tok))
            nxt = self.peek()
            if nxt is not None and nxt.kind == "LANGTAG":
                self.i += 1
                return Literal(lexical, language=nxt.text[1:])
            if nxt is not None and nxt.kind == "DTYPE":
                self.i += 1
                dt_tok = self.next("datatype IRI")
                datatype = self.iri(dt_tok)
                if datatype is None:
                    self.fail(f"expected datatype IRI, found {dt_tok.text!r}", dt_tok)
                if datatype == RDF_LANGSTRING:
                    self.fail("rdf:langString literal needs a language tag", dt_tok)
                return Literal(lexical, datatype)
            return Literal(lexical)
        if kind == "INTEGER":
            return Literal(tok.text, XSD.integer)
        if kind == "DECIMAL":
            return Literal(tok.text, XSD.decimal)
        if kind == "DOUBLE":
            return Literal(tok.text, XSD.double)
        if kind == "WORD" and tok.text in ("true", "false"):
            return Literal(tok.text, XSD.boolean)
        self.fail(f"expected object, found {tok.text!r}", tok)


def parse_turtle(text: str) -> Graph:
    """Parse a Turtle document into a new graph.

    Raises TurtleSyntaxError (with ``line``/``column``) on any syntax error,
    undefined prefix or malformed IRI; nothing is returned in that case.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if text.startswith("\ufeff"):
        text = text[1:]
    return _TurtleParser(text).parse()


# -- Turtle writing -------------------------------------------------------------

_SAFE_LOCAL = re.compile(r"^[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?$")
_SAFE_PREFIX = re.compile(f"^(?:{_PN_PREFIX})?$")


class _Compactor:
    def __init__(self, prefixes: dict[str, str]):
        # longest namespace first; ties broken by prefix name
        self.pairs = sorted(prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))

    def compact(self, iri: Iri) -> str:
        v = iri.value
        for prefix, ns in self.pairs:
            if v.startswith(ns):
                local = v[len(ns):]
                if local == "" or _SAFE_LOCAL.match(local):
                    return f"{prefix}:{local}"
        return f"<{v}>"


def _escape_lexical(s: str) -> str:
    out = []
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _render_term(term: Term, compactor: _Compactor) -> str:
    if isinstance(term, Iri):
        return compactor.compact(term)
    if isinstance(term, BlankNode):
        return f"_:{term.id}"
    lexical = f'"{_escape_lexical(term.lexical)}"'
    if term.language is not None:
        return f"{lexical}@{term.language}"
    if term.datatype == XSD_STRING:
        return lexical
    return f"{lexical}^^{compactor.compact(term.datatype)}"


def serialize_turtle(graph: Graph) -> str:
    """Deterministic Turtle: sorted prefixes, sorted subjects, grouped predicates."""
    prefixes = dict(STANDARD_PREFIXES)
    for k, v in graph.prefixes.items():
        if _SAFE_PREFIX.match(k):
            prefixes[k] = v
    compactor = _Compactor(prefixes)
    lines = [f"@prefix {k}: <{v}> ." for k, v in sorted(prefixes.items())]

    by_subject: dict = {}
    for s, p, o in graph.triples():
        by_subject.setdefault(s, {}).setdefault(p, []).append(o)
    for s in sorted(by_subject):
        preds = by_subject[s]
        order = sorted(preds, key=lambda p: (p != RDF.type, p.sort_key()))
        chunks = []
        for p in order:
            verb = "a" if p == RDF.type else compactor.compact(p)
            objs = ", ".join(_render_term(o, compactor) for o in sorted(preds[p]))
            chunks.append(f"{verb} {objs}")
        lines.append("")
        lines.append(f"{_render_term(s, compactor)} " + " ;\n    ".join(chunks) + " .")
    return "\n".join(lines) + "\n"
