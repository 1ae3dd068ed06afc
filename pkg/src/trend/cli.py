"""Command-line front end.

Exit codes: 0 success, 1 violations / counterexample / no witness found,
2 usage, input or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .dlr import format_kb, translate
from .errors import ParseError, TrendError
from .reason import (
    Bounds, Counterexample, ExhaustedBounds, check_implication, check_subsumption, find_witness,
)
from .render import to_dot
from .semantics import Semantics, check_state, load_state, validate_state
from .text import check_text, parse_constraint, parse_schema, serialize_schema
from .verbal import verbalize

LABELS = ("chg-ext", "dev-dex")


class _Fail(Exception):
    """Input problem: message goes to stderr, exit code 2."""


def _use_color(stream) -> bool:
    mode = os.environ.get("TREND_COLOR", "auto").lower()
    if mode == "always":
        return True
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, code: str, on: bool) -> str:
    return f"\033[{code}m{text}\033[0m" if on else text


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise _Fail(f"cannot read {path}: {e.strerror}") from e


def _write(path: str | None, text: str, out) -> None:
    if path is None:
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise _Fail(f"cannot write {path}: {e.strerror}") from e


def _schema(path: str):
    try:
        return parse_schema(_read(path))
    except ParseError as e:
        raise _Fail(f"{path}: invalid schema\n" + "\n".join(f"{path}:{d}" for d in e.diagnostics)) from e


def _semantics(args) -> Semantics:
    return Semantics(args.past_trigger, args.flow)


def _bounds(args) -> Bounds:
    try:
        return Bounds(args.max_objects, args.max_horizon, args.max_values)
    except ValueError as e:
        raise _Fail(str(e)) from e


# commands -------------------------------------------------------------------------

def cmd_check(args, out) -> int:
    schema, diags = check_text(_read(args.file))
    errors = [d for d in diags if d.severity == "error"]
    if args.json:
        out.write(json.dumps([d.to_json() for d in diags], indent=2) + "\n")
    else:
        color = _use_color(out)
        for d in diags:
            tag = _paint(d.severity, "31" if d.severity == "error" else "33", color)
            where = f"{d.span}: " if d.span else ""
            out.write(f"{args.file}:{where}{tag}: {d.message} [{d.code}]\n")
    return 1 if errors else 0


def cmd_state_check(args, out) -> int:
    schema = _schema(args.schema)
    try:
        state = load_state(_read(args.state), schema)
        validate_state(schema, state)
    except (TrendError, ValueError, KeyError, TypeError) as e:
        raise _Fail(f"{args.state}: {e}") from e
    violations = check_state(schema, state, _semantics(args))
    if args.json:
        out.write(json.dumps([v.to_json() for v in violations], indent=2) + "\n")
    else:
        color = _use_color(out)
        for v in violations:
            times = ",".join(map(str, v.times))
            out.write(f"{_paint(v.rule, '31', color)} [{' '.join(v.elements)}] t={times}: {v.message}\n")
    return 1 if violations else 0


def cmd_to_dlr(args, out) -> int:
    kb = translate(_schema(args.file), args.past_trigger)
    _write(args.output, format_kb(kb), out)
    return 0


def cmd_verbalize(args, out) -> int:
    sentences = verbalize(_schema(args.file), args.style)
    if args.json:
        out.write(json.dumps(sentences, indent=2) + "\n")
    else:
        out.write("".join(s + "\n" for s in sentences))
    return 0


def cmd_render(args, out) -> int:
    _write(args.output, to_dot(_schema(args.file), args.labels, args.ascii), out)
    return 0


def _report(result, args, out) -> int:
    if args.json:
        out.write(json.dumps(result.to_json(), indent=2) + "\n")
    else:
        out.write(result.describe() + "\n")
        if isinstance(result, Counterexample):
            for v in result.violations:
                out.write(f"  violates {v.rule} [{' '.join(v.elements)}]: {v.message}\n")
    return 1 if isinstance(result, (ExhaustedBounds, Counterexample)) else 0


def cmd_sat(args, out) -> int:
    schema = _schema(args.file)
    try:
        result = find_witness(schema, args.element, _bounds(args), _semantics(args))
    except TrendError as e:
        raise _Fail(str(e)) from e
    return _report(result, args, out)


def cmd_subsume(args, out) -> int:
    schema = _schema(args.file)
    try:
        result = check_subsumption(schema, args.sub, args.sup, _bounds(args), _semantics(args))
    except TrendError as e:
        raise _Fail(str(e)) from e
    return _report(result, args, out)


def cmd_implies(args, out) -> int:
    schema = _schema(args.file)
    try:
        candidate = parse_constraint(args.constraint, schema)
        result = check_implication(schema, candidate, _bounds(args), _semantics(args))
    except ParseError as e:
        raise _Fail("invalid constraint\n" + "\n".join(str(d) for d in e.diagnostics)) from e
    except TrendError as e:
        raise _Fail(str(e)) from e
    return _report(result, args, out)


def cmd_fmt(args, out) -> int:
    _write(args.output, serialize_schema(_schema(args.file), args.labels), out)
    return 0


# argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trend", description="TREND temporal conceptual modelling toolkit")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    sem = argparse.ArgumentParser(add_help=False)
    sem.add_argument("--past-trigger", choices=("target", "source"), default="target")
    sem.add_argument("--flow", choices=("N", "Z"), default="N")

    bounds = argparse.ArgumentParser(add_help=False)
    bounds.add_argument("--max-objects", type=int, default=2, metavar="K")
    bounds.add_argument("--max-horizon", type=int, default=3, metavar="H")
    bounds.add_argument("--max-values", type=int, default=2, metavar="V")

    p = sub.add_parser("check", parents=[common], help="parse and validate a schema")
    p.add_argument("file")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("state-check", parents=[common, sem], help="check a state against a schema")
    p.add_argument("schema")
    p.add_argument("state")
    p.set_defaults(run=cmd_state_check)

    p = sub.add_parser("to-dlr", parents=[common], help="translate to a DLR_US knowledge base")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--past-trigger", choices=("target", "source"), default="target")
    p.set_defaults(run=cmd_to_dlr)

    p = sub.add_parser("verbalize", parents=[common], help="controlled natural language")
    p.add_argument("file")
    p.add_argument("--style", choices=LABELS, default="chg-ext")
    p.set_defaults(run=cmd_verbalize)

    p = sub.add_parser("render", parents=[common], help="emit a DOT diagram")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--labels", choices=LABELS, default="chg-ext")
    p.add_argument("--ascii", action="store_true", help="ASCII markers only")
    p.set_defaults(run=cmd_render)

    p = sub.add_parser("sat", parents=[common, sem, bounds], help="bounded satisfiability of an element")
    p.add_argument("file")
    p.add_argument("--element", required=True)
    p.set_defaults(run=cmd_sat)

    p = sub.add_parser("subsume", parents=[common, sem, bounds], help="bounded subsumption check")
    p.add_argument("file")
    p.add_argument("--sub", required=True)
    p.add_argument("--sup", required=True)
    p.set_defaults(run=cmd_subsume)

    p = sub.add_parser("implies", parents=[common, sem, bounds], help="bounded implication check")
    p.add_argument("file")
    p.add_argument("--constraint", required=True)
    p.set_defaults(run=cmd_implies)

    p = sub.add_parser("fmt", parents=[common], help="canonical reprint")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--labels", choices=LABELS, default="chg-ext")
    p.set_defaults(run=cmd_fmt)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        return args.run(args, out)
    except _Fail as e:
        err.write(f"trend: {e}\n")
        return 2


def main() -> None:
    sys.exit(run())
