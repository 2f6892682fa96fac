"""Command line: ``validate``, ``run``, ``query`` and ``explain``.

Exit codes: 0 ok, 1 validation errors, 2 unreadable or unparsable input,
3 a rule action failed (the partial trace is still written), 4 bad query id,
parameters or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .cq import CqError, answer, list_templates, resolve_param
from .deliberation import (DEFAULT_CLOCK_START, DeliberationError, RuleActionError, export, ingest,
                           parse_rules, run, trace_jsonl)
from .mental import MentalGraph, MentalGraphError
from .rdf import BlankNode, Graph, Iri, Literal, TurtleSyntaxError, parse_turtle, serialize_turtle
from .schema import ERROR, load_schema, materialize, validate
from .temporal import TemporalError, TimeInstant, Timemap

EXIT_OK, EXIT_INVALID, EXIT_INPUT, EXIT_ACTION, EXIT_USAGE = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


@dataclass
class Config:
    inputs: list
    rules: Optional[Path] = None
    timemap: Optional[Path] = None
    max_cycles: int = 1000
    out: Optional[Path] = None
    trace_out: Optional[Path] = None
    format: str = "turtle"
    clock_start: TimeInstant = field(default_factory=lambda: DEFAULT_CLOCK_START)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _color(code: str, text: str, stream) -> str:
    if os.environ.get("BDI_NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _read(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _load_graph(cfg: Config) -> Graph:
    g = Graph()
    for path in cfg.inputs:
        try:
            part = parse_turtle(_read(path))
        except TurtleSyntaxError as exc:
            raise InputError(f"{path}: {exc}") from None
        g = g | part
    if cfg.timemap is not None:
        try:
            g = Timemap.load(cfg.timemap).augment(g)
        except OSError as exc:
            raise InputError(f"cannot read {cfg.timemap}: {exc}") from None
        except (TemporalError, ValueError) as exc:
            raise InputError(f"{cfg.timemap}: {exc}") from None
    return g


def _write(path: Optional[Path], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def _graph_json(g: Graph) -> str:
    def term(t):
        if isinstance(t, Iri):
            return {"type": "iri", "value": t.value}
        if isinstance(t, BlankNode):
            return {"type": "bnode", "value": t.id}
        d = {"type": "literal", "value": t.lexical, "datatype": t.datatype.value}
        if t.language:
            d["language"] = t.language
        return d

    doc = {"prefixes": dict(sorted(g.prefixes.items())),
           "triples": [[term(x) for x in t] for t in g]}
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def _report_text(report, g: Graph, stream) -> str:
    lines = []
    for item in report:
        tag = "ERROR  " if item.severity == ERROR else "WARNING"
        tag = _color("31" if item.severity == ERROR else "33", tag, stream)
        lines.append(f"{tag} {item.code:<22} {g.n3(item.subject)}: {item.message}")
    lines.append(f"{len(report.errors)} error(s), {len(report.warnings)} warning(s)")
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------------------


def cmd_validate(cfg: Config) -> int:
    g = materialize(_load_graph(cfg))
    report = validate(g)
    if cfg.format == "json":
        _write(cfg.out, json.dumps([{"severity": i.severity, "code": i.code, "subject": str(i.subject),
                                     "message": i.message} for i in report], indent=1) + "\n")
    else:
        _write(cfg.out, _report_text(report, g, sys.stdout if cfg.out is None else None))
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_run(cfg: Config) -> int:
    g = materialize(_load_graph(cfg))
    report = validate(g)
    if not report.ok:
        sys.stderr.write(_report_text(report, g, sys.stderr))
        sys.stderr.write("input has validation errors; not running\n")
        return EXIT_INVALID
    rules = []
    if cfg.rules is not None:
        try:
            rules = parse_rules(_read(cfg.rules), g.prefixes)
        except DeliberationError as exc:
            raise InputError(f"{cfg.rules}: {exc}") from None
    code = EXIT_OK
    try:
        kb = run(ingest(g), rules, cfg.max_cycles, cfg.clock_start)
    except RuleActionError as exc:
        sys.stderr.write(f"{exc}\n")
        kb, code = exc.kb, EXIT_ACTION
    if cfg.trace_out is not None:
        _write(cfg.trace_out, trace_jsonl(kb.trace))
    if code == EXIT_OK:
        out = export(kb)
        _write(cfg.out, _graph_json(out) if cfg.format == "json" else serialize_turtle(out))
        stop = "cycle bound reached" if kb.bound_reached else "agenda empty"
        sys.stderr.write(f"{len(kb.trace)} firing(s); {stop}\n")
    return code


def cmd_query(cfg: Config, cq_id: str, raw_params: list) -> int:
    params = {}
    for item in raw_params:
        name, sep, value = item.partition("=")
        if not sep or not name:
            sys.stderr.write(f"bad parameter {item!r}: expected name=value\n")
            return EXIT_USAGE
        params[name.strip()] = value.strip()
    g = materialize(_load_graph(cfg))
    try:
        result = answer(cq_id, params, g)
    except CqError as exc:
        sys.stderr.write(f"{exc}\n{_templates_text()}")
        return EXIT_USAGE
    if cfg.format == "csv":
        _write(cfg.out, result.to_csv(g.n3))
    elif cfg.format == "json":
        rows = [{c: (None if v is None else (v.lexical if isinstance(v, Literal) else str(v)))
                 for c, v in zip(result.columns, row)} for row in result.rows]
        _write(cfg.out, json.dumps({"columns": list(result.columns), "rows": rows}, indent=1) + "\n")
    else:
        _write(cfg.out, result.to_text(g.n3))
    return EXIT_OK


def cmd_explain(cfg: Config, entity: str) -> int:
    g = materialize(_load_graph(cfg))
    mg = MentalGraph(g, load_schema())
    try:
        tree = mg.explain(resolve_param(entity, g.prefixes, "entity"))
    except (CqError, MentalGraphError) as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    if cfg.format == "json":
        _write(cfg.out, tree.to_json() + "\n")
    elif cfg.format == "dot":
        _write(cfg.out, tree.to_dot())
    else:
        _write(cfg.out, tree.render(g.n3) + "\n")
    return EXIT_OK


def _templates_text() -> str:
    return "".join(f"  {i:<5} {', '.join(p) or '-':<22} {q}\n" for i, q, p in list_templates())


# -- argument handling -------------------------------------------------------------------


def _max_cycles(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _instant(text: str) -> TimeInstant:
    try:
        return TimeInstant.parse(text)
    except TemporalError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bdi-ontology", description="BDI mental-state store and rule engine.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats, default):
        p.add_argument("--timemap", type=Path, help="symbolic time labels (TOML)")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", type=Path, help="output file (default: stdout)")

    p = sub.add_parser("validate", help="materialize and check Turtle files")
    p.add_argument("inputs", nargs="+", type=Path)
    common(p, ["text", "json"], "text")

    p = sub.add_parser("run", help="run rules over a graph and export the result")
    p.add_argument("inputs", nargs="+", type=Path)
    p.add_argument("--rules", type=Path)
    p.add_argument("--max-cycles", type=_max_cycles, default=1000)
    p.add_argument("--clock-start", type=_instant, default=DEFAULT_CLOCK_START)
    p.add_argument("--trace-out", type=Path, help="write the firing trace as JSON lines")
    common(p, ["turtle", "json"], "turtle")

    p = sub.add_parser("query", help="answer a competency question (CQ1..CQ18)",
                       epilog="templates:\n" + _templates_text(),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("input", type=Path)
    p.add_argument("cq", help="template id, e.g. CQ7")
    p.add_argument("params", nargs="*", help="name=value, e.g. intention=ex:Intention_B")
    common(p, ["text", "csv", "json"], "text")

    p = sub.add_parser("explain", help="derivation tree of a mental entity")
    p.add_argument("input", type=Path)
    p.add_argument("entity")
    common(p, ["text", "json", "dot"], "text")
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    inputs = getattr(args, "inputs", None) or [args.input]
    cfg = Config(inputs=inputs, rules=getattr(args, "rules", None), timemap=args.timemap,
                 max_cycles=getattr(args, "max_cycles", 1000), out=args.out,
                 trace_out=getattr(args, "trace_out", None), format=args.format,
                 clock_start=getattr(args, "clock_start", DEFAULT_CLOCK_START))
    try:
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "query":
            return cmd_query(cfg, args.cq, args.params)
        return cmd_explain(cfg, args.entity)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    entry()
