"""DOT diagrams for schemas, plus a small DOT well-formedness checker.

Classes are boxes and relationships diamonds.  Icons become text markers
(Unicode by default, ASCII with ``ascii_only``).  Edges, in order: role
edges, isa, role isa, disjointness, covering, transitions.  Frozen
attributes appear as a marker on the attribute, not as an edge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import Kind, Modality, Schema, Subject, Temporality, Tense, TransitionConstraint

__all__ = ["to_dot", "transition_edge_label", "expected_counts", "check_dot", "DotSummary", "DotError"]

_MARKS = {
    False: {"temporal": "⏰", "snapshot": "◼", "frozen": "📌", "id": "[id]"},
    True: {"temporal": "(T)", "snapshot": "(S)", "frozen": "(pin)", "id": "[id]"},
}
_CORES = {"chg-ext": {Kind.EXTENSION: "EXT", Kind.CHANGE: "CHG"},
          "dev-dex": {Kind.EXTENSION: "DEX", Kind.CHANGE: "DEV"}}


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _attrs(pairs: dict) -> str:
    return "[" + ", ".join(f"{k}={_q(str(v))}" for k, v in pairs.items()) + "]"


def _temporal_mark(temporality: Temporality, marks: dict) -> str:
    if temporality is Temporality.TEMPORARY:
        return " " + marks["temporal"]
    if temporality is Temporality.SNAPSHOT:
        return " " + marks["snapshot"]
    return ""


def transition_edge_label(c: TransitionConstraint, labels: str = "chg-ext") -> str:
    """``P`` prefix for persistent, ``-`` for past, the offset for quantitative."""
    text = ("P" if c.persistent else "") + _CORES[labels][c.kind]
    if c.tense is Tense.PAST:
        text += "-"
    if c.quantitative:
        text += str(c.offset)
    return text


def to_dot(schema: Schema, labels: str = "chg-ext", ascii_only: bool = False) -> str:
    if labels not in _CORES:
        raise ValueError(f"labels must be one of {sorted(_CORES)}, not {labels!r}")
    marks = _MARKS[ascii_only]
    frozen = {c.source for c in schema.transitions if c.kind is Kind.FROZEN}
    lines = ["digraph trend {", "  rankdir=LR;"]

    for c in schema.sorted_classes():
        rows = [c.name + _temporal_mark(c.temporality, marks)]
        for a in sorted(c.attributes, key=lambda a: a.name):
            q = f"{c.name}.{a.name}"
            row = f"{a.name}: {a.domain}" + _temporal_mark(a.temporality, marks)
            if q in frozen:
                row += " " + marks["frozen"]
            if schema.id_map.get(c.name) == a.name:
                row += " " + marks["id"]
            if a.card is not None:
                row += f" {a.card}"
            rows.append(row)
        lines.append(f"  {_q(c.name)} {_attrs({'shape': 'box', 'label': chr(10).join(rows)})};")
    for r in schema.sorted_relationships():
        label = r.name + _temporal_mark(r.temporality, marks)
        lines.append(f"  {_q(r.name)} {_attrs({'shape': 'diamond', 'label': label})};")

    def edge(a, b, **attrs):
        lines.append(f"  {_q(a)} -> {_q(b)} {_attrs(attrs)};")

    for r in schema.sorted_relationships():
        for u in r.roles:
            edge(r.name, u.player, label=u.name + (f" {u.card}" if u.card is not None else ""),
                 arrowhead="none")
    for sub, sup in sorted(schema.isa_c):
        edge(sub, sup, arrowhead="empty")
    for sub, sup in sorted(schema.isa_r):
        edge(sub, sup, arrowhead="empty")
    for (r1, u1), (r2, u2) in sorted(schema.isa_u):
        edge(r1, r2, arrowhead="empty", label=f"{u1} isa {u2}")
    for members, parent in sorted(schema.disj_c, key=lambda d: (d[1], sorted(d[0]))):
        for m in sorted(members):
            edge(m, parent, arrowhead="empty", label="disjoint")
    for members, parent in sorted(schema.disj_r, key=lambda d: (d[1], sorted(d[0]))):
        for m in sorted(members):
            edge(m, parent, arrowhead="empty", label="disjoint")
    for members, parent in sorted(schema.cover, key=lambda d: (d[1], sorted(d[0]))):
        for m in sorted(members):
            edge(m, parent, arrowhead="empty", label="cover")
    for c in schema.sorted_transitions():
        if c.kind is Kind.FROZEN:
            continue
        style = "solid" if c.modality is Modality.MANDATORY else "dashed"
        label = transition_edge_label(c, labels)
        if c.subject is Subject.ATTRIBUTE:
            src, tgt = c.source.split(".", 1), c.target.split(".", 1)
            edge(src[0], tgt[0], label=f"{label} {src[1]}->{tgt[1]}", style=style)
        else:
            edge(c.source, c.target, label=label, style=style)
    lines.append("}")
    return "\n".join(lines) + "\n"


def expected_counts(schema: Schema) -> tuple[int, int]:
    """(nodes, edges) that :func:`to_dot` must produce for ``schema``."""
    nodes = len(schema.classes) + len(schema.relationships)
    edges = (sum(r.arity for r in schema.relationships) + len(schema.isa_c) + len(schema.isa_r)
             + len(schema.isa_u) + sum(len(m) for m, _ in schema.disj_c)
             + sum(len(m) for m, _ in schema.disj_r) + sum(len(m) for m, _ in schema.cover)
             + sum(1 for c in schema.transitions if c.kind is not Kind.FROZEN))
    return nodes, edges


# well-formedness checker ---------------------------------------------------------

class DotError(ValueError):
    pass


@dataclass(frozen=True)
class DotSummary:
    nodes: tuple
    edges: tuple


KNOWN_ATTRIBUTES = frozenset({
    "shape", "label", "style", "arrowhead", "arrowtail", "dir", "rankdir", "color",
    "fontname", "fontsize", "penwidth", "fillcolor",
})

_TOKEN = re.compile(r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<id>[A-Za-z_][A-Za-z0-9_]*)'
                    r'|(?P<op>->|[{}\[\];=,]))', re.S)


def _tokens(text: str) -> list[tuple[str, str]]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DotError(f"unexpected character {text[pos:].lstrip()[:1]!r} at offset {pos}")
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "str":
            value = re.sub(r"\\(.)", r"\1", value[1:-1])
        out.append((kind, value))
        pos = m.end()
    return out


def check_dot(text: str) -> DotSummary:
    """Parse the DOT subset emitted by :func:`to_dot`; raise :class:`DotError`.

    Checks balanced braces and brackets, quoted node identifiers, known
    attribute names, declared endpoints and no duplicate node declarations.
    """
    toks = _tokens(text)
    i = 0

    def peek(k=0):
        return toks[i + k] if i + k < len(toks) else ("eof", "")

    def take(kind=None, value=None):
        nonlocal i
        tok = peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            raise DotError(f"expected {value or kind}, found {tok[1] or tok[0]!r}")
        i += 1
        return tok[1]

    def attr_list():
        take("op", "[")
        seen = {}
        while peek() != ("op", "]"):
            key = take("id")
            if key not in KNOWN_ATTRIBUTES:
                raise DotError(f"unknown attribute {key!r}")
            take("op", "=")
            seen[key] = take("str")
            if peek() == ("op", ","):
                take()
        take("op", "]")
        return seen

    if take("id") != "digraph":
        raise DotError("expected digraph")
    if peek()[0] in ("id", "str"):
        take()
    take("op", "{")
    nodes, edges = [], []
    while peek() != ("op", "}"):
        kind, value = peek()
        if kind == "eof":
            raise DotError("unbalanced braces")
        if kind == "id":
            take()
            take("op", "=")
            if value not in KNOWN_ATTRIBUTES:
                raise DotError(f"unknown graph attribute {value!r}")
            if peek()[0] not in ("id", "str"):
                raise DotError(f"missing value for {value!r}")
            take()
        elif kind == "str":
            take()
            if peek() == ("op", "->"):
                take()
                target = take("str")
                edges.append((value, target, attr_list().get("label", "")))
            else:
                if value in nodes:
                    raise DotError(f"node {value!r} declared twice")
                attr_list()
                nodes.append(value)
        else:
            raise DotError(f"unexpected {value!r}")
        take("op", ";")
    take("op", "}")
    if i != len(toks):
        raise DotError("content after closing brace")
    declared = set(nodes)
    for a, b, _ in edges:
        for end in (a, b):
            if end not in declared:
                raise DotError(f"edge endpoint {end!r} is not a declared node")
    return DotSummary(tuple(nodes), tuple(edges))
