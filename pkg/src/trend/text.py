"""Concrete textual syntax (``.trend`` files).

Grammar::

    schema      := { stmt } ;
    stmt        := classDecl | relDecl | isaDecl | disjDecl | coverDecl | transDecl | unitDecl ;
    classDecl   := "class" NAME [temporality] [ "{" attrDecl* "}" ] ";" ;
    temporality := "temporal" | "snapshot" ;
    attrDecl    := NAME ":" NAME [temporality] ["id"] ["frozen"] [card] ";" ;
    relDecl     := "rel" NAME [temporality] "(" roleDecl { "," roleDecl } ")" ";" ;
    roleDecl    := NAME ":" NAME [card] ;
    card        := "[" NAT "," (NAT | "*") "]" ;
    isaDecl     := "isa" NAME NAME ";" | "isar" NAME NAME ";"
                 | "isau" NAME "." NAME NAME "." NAME ";" ;
    disjDecl    := ("disjoint" | "disjointr") "{" NAME {"," NAME} "}" NAME ";" ;
    coverDecl   := "cover" "{" NAME {"," NAME} "}" NAME ";" ;
    transDecl   := ["P"] KIND ["-"] subject "->" subject ["after" NAT] [modality] ";"
                 | "FRZ" NAME "." NAME ";" ;
    unitDecl    := "chronon" STRING ";" ;

Transition keywords are ``[P][M][Q](EXT|CHG|DEX|DEV)[R|A]``.  ``DEX`` and
``DEV`` are read as ``EXT`` and ``CHG``.  A lowercase core (``ext``,
``mchgR``) or a ``-`` after the keyword marks a past transition.  ``M``
means mandatory, ``Q`` requires ``after n``.  Comments run from ``#`` to
the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, SchemaError
from .model import (
    Attribute,
    Card,
    ChrononUnit,
    ClassDecl,
    Cover,
    Disjoint,
    Identifier,
    Isa,
    Kind,
    Modality,
    RelDecl,
    Role,
    RoleIsa,
    Schema,
    Subject,
    Temporality,
    Tense,
    TransitionConstraint,
    build_schema,
)

__all__ = [
    "SourceSpan", "Diagnostic", "parse_schema", "parse_declarations",
    "parse_constraint", "serialize_schema", "check_text",
]


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: SourceSpan | None = None
    severity: str = "error"
    elements: tuple[str, ...] = ()

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {
            "rule": self.code,
            "elements": list(self.elements),
            "time": [],
            "message": self.message,
            "severity": self.severity,
            "line": self.span.line if self.span else None,
            "column": self.span.column if self.span else None,
        }


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<nat>[0-9]+)
  | (?P<string>"[^"\n]*")
  | (?P<punct>[{}()\[\],;:.*-])
""", re.VERBOSE)

_TRANSITION = re.compile(r"^(P?)(M?)(Q?)(EXT|CHG|DEX|DEV)(R|A)?$", re.IGNORECASE)
_CORE = {"EXT": Kind.EXTENSION, "DEX": Kind.EXTENSION, "CHG": Kind.CHANGE, "DEV": Kind.CHANGE}
_TEMPORALITY = {"temporal": Temporality.TEMPORARY, "snapshot": Temporality.SNAPSHOT}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    span: SourceSpan


class _Syntax(Exception):
    def __init__(self, message, span):
        super().__init__(message)
        self.span = span


def _tokenize(text: str) -> tuple[list[_Tok], list[Diagnostic]]:
    toks, diags = [], []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            span = SourceSpan(pos, pos + 1, line, pos - line_start + 1)
            diags.append(Diagnostic("syntax", f"unexpected character {text[pos]!r}", span))
            pos += 1
            continue
        kind = m.lastgroup
        span = SourceSpan(m.start(), m.end(), line, m.start() - line_start + 1)
        chunk = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, chunk, span))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = m.start() + chunk.rindex("\n") + 1
        pos = m.end()
    end = SourceSpan(len(text), len(text), line, len(text) - line_start + 1)
    toks.append(_Tok("eof", "", end))
    return toks, diags


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "arrow", "name")

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            raise _Syntax(f"expected {text!r}, found {self._show()}", self.tok.span)
        return self.advance()

    def name(self, what="name") -> str:
        if self.tok.kind != "name":
            raise _Syntax(f"expected {what}, found {self._show()}", self.tok.span)
        return self.advance().text

    def nat(self) -> int:
        if self.tok.kind != "nat":
            raise _Syntax(f"expected a number, found {self._show()}", self.tok.span)
        return int(self.advance().text)

    def _show(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def resync(self) -> None:
        depth = 0
        while self.tok.kind != "eof":
            t = self.advance()
            if t.text in "{(" and t.kind == "punct":
                depth += 1
            elif t.text in "})" and t.kind == "punct":
                depth = max(0, depth - 1)
            elif t.text == ";" and depth == 0:
                return

    # statements -----------------------------------------------------------

    def statement(self) -> list:
        start = self.tok
        if start.kind != "name":
            raise _Syntax(f"expected a declaration, found {self._show()}", start.span)
        word = start.text
        handler = {
            "class": self.class_decl, "rel": self.rel_decl, "isa": self.isa_decl,
            "isar": self.isa_decl, "isau": self.isau_decl, "disjoint": self.group_decl,
            "disjointr": self.group_decl, "cover": self.group_decl, "chronon": self.unit_decl,
        }.get(word)
        if handler is not None:
            self.advance()
            return handler(word)
        return self.transition_decl()

    def temporality(self) -> Temporality:
        if self.tok.kind == "name" and self.tok.text in _TEMPORALITY:
            return _TEMPORALITY[self.advance().text]
        return Temporality.MIXED

    def card(self) -> Card | None:
        if not self.at("["):
            return None
        span = self.advance().span
        lo = self.nat()
        self.expect(",")
        if self.at("*"):
            self.advance()
            hi = None
        else:
            hi = self.nat()
        self.expect("]")
        if hi is not None and hi < lo:
            raise _Syntax(f"cardinality [{lo},{hi}] has min > max", span)
        return Card(lo, hi)

    def class_decl(self, _word) -> list:
        name = self.name("a class name")
        temporality = self.temporality()
        attrs, extra = [], []
        if self.at("{"):
            self.advance()
            while not self.at("}"):
                attr, flags = self.attr_decl()
                attrs.append(attr)
                if "id" in flags:
                    extra.append(Identifier(name, attr.name))
                if "frozen" in flags:
                    extra.append(TransitionConstraint(Subject.ATTRIBUTE, Kind.FROZEN, f"{name}.{attr.name}"))
            self.advance()
        self.expect(";")
        return [ClassDecl(name, temporality, tuple(attrs)), *extra]

    def attr_decl(self) -> tuple[Attribute, set]:
        name = self.name("an attribute name")
        self.expect(":")
        domain = self.name("a domain name")
        temporality = self.temporality()
        flags: set[str] = set()
        while self.tok.kind == "name" and self.tok.text in ("id", "frozen"):
            t = self.advance()
            if t.text in flags:
                raise _Syntax(f"repeated flag {t.text!r}", t.span)
            flags.add(t.text)
        card = self.card()
        self.expect(";")
        return Attribute(name, domain, temporality, card), flags

    def rel_decl(self, _word) -> list:
        name = self.name("a relationship name")
        temporality = self.temporality()
        self.expect("(")
        roles = [self.role_decl()]
        while self.at(","):
            self.advance()
            roles.append(self.role_decl())
        self.expect(")")
        self.expect(";")
        return [RelDecl(name, tuple(roles), temporality)]

    def role_decl(self) -> Role:
        role = self.name("a role name")
        self.expect(":")
        cls = self.name("a class name")
        return Role(role, cls, self.card())

    def isa_decl(self, word) -> list:
        sub, sup = self.name(), self.name()
        self.expect(";")
        subject = Subject.CLASS if word == "isa" else Subject.RELATIONSHIP
        return [Isa(sub, sup, subject)]

    def isau_decl(self, _word) -> list:
        a = self.dotted()
        b = self.dotted()
        self.expect(";")
        return [RoleIsa(a, b)]

    def dotted(self) -> tuple[str, str]:
        first = self.name()
        self.expect(".")
        return first, self.name()

    def group_decl(self, word) -> list:
        self.expect("{")
        members = [self.name()]
        while self.at(","):
            self.advance()
            members.append(self.name())
        self.expect("}")
        parent = self.name()
        self.expect(";")
        if word == "cover":
            return [Cover(frozenset(members), parent)]
        subject = Subject.CLASS if word == "disjoint" else Subject.RELATIONSHIP
        return [Disjoint(frozenset(members), parent, subject)]

    def unit_decl(self, _word) -> list:
        if self.tok.kind != "string":
            raise _Syntax(f"expected a quoted unit, found {self._show()}", self.tok.span)
        label = self.advance().text[1:-1]
        self.expect(";")
        return [ChrononUnit(label)]

    def transition_decl(self) -> list:
        head = self.advance()
        word = head.text
        persistent = False
        if word == "P" and self.tok.kind == "name" and _TRANSITION.match(self.tok.text):
            persistent = True
            head = self.advance()
            word = head.text
        if word.upper() == "FRZ":
            if persistent:
                raise _Syntax("FRZ cannot be persistent", head.span)
            qname = "%s.%s" % self.dotted()
            self.expect(";")
            return [TransitionConstraint(Subject.ATTRIBUTE, Kind.FROZEN, qname)]
        m = _TRANSITION.match(word)
        if m is None:
            raise _Syntax(f"unknown declaration {word!r}", head.span)
        p, mand, quant, core, suffix = m.groups()
        if p and persistent:
            raise _Syntax("persistence given twice", head.span)
        persistent = persistent or bool(p)
        past = core.islower()
        if self.at("-"):
            self.advance()
            past = True
        subject = {None: Subject.CLASS, "R": Subject.RELATIONSHIP, "A": Subject.ATTRIBUTE}[
            suffix.upper() if suffix else None]
        source = self.subject(subject)
        self.expect("->")
        target = self.subject(subject)
        offset = None
        if self.at("after"):
            self.advance()
            span = self.tok.span
            offset = self.nat()
            if offset < 1:
                raise _Syntax("offset must be at least 1", span)
        elif quant:
            raise _Syntax(f"{word} needs 'after <n>'", head.span)
        modality = Modality.MANDATORY if mand else Modality.OPTIONAL
        if self.tok.kind == "name" and self.tok.text in ("optional", "mandatory"):
            t = self.advance()
            if mand and t.text == "optional":
                raise _Syntax(f"{word} is mandatory but marked optional", t.span)
            modality = Modality(t.text)
        self.expect(";")
        return [TransitionConstraint(
            subject, _CORE[core.upper()], source, target,
            Tense.PAST if past else Tense.FUTURE, modality, offset, persistent,
        )]

    def subject(self, subject: Subject) -> str:
        if subject is Subject.ATTRIBUTE:
            return "%s.%s" % self.dotted()
        return self.name()


def parse_declarations(text: str) -> tuple[list[tuple[object, SourceSpan]], list[Diagnostic]]:
    """Parse to raw declarations paired with their statement span."""
    toks, diags = _tokenize(text)
    p = _Parser(toks)
    out = []
    while p.tok.kind != "eof":
        start = p.tok.span
        try:
            decls = p.statement()
        except _Syntax as e:
            diags.append(Diagnostic("syntax", str(e), e.span))
            p.resync()
            continue
        prev = p.toks[p.i - 1].span
        span = SourceSpan(start.start, prev.end, start.line, start.column)
        out.extend((d, span) for d in decls)
    return out, diags


def _build(pairs, diags) -> Schema:
    if diags:
        raise ParseError(diags)
    try:
        return build_schema(d for d, _ in pairs)
    except SchemaError as e:
        span = next((s for d, s in pairs if d is e.decl), None)
        name = getattr(e, "name", None)
        raise ParseError([Diagnostic(
            type(e).__name__, str(e), span, elements=(name,) if name else ())]) from e


def parse_schema(text: str) -> Schema:
    """Parse ``.trend`` source; raises :class:`ParseError` with diagnostics."""
    pairs, diags = parse_declarations(text)
    return _build(pairs, diags)


def check_text(text: str) -> tuple[Schema | None, list[Diagnostic]]:
    """Parse and validate, returning diagnostics instead of raising."""
    try:
        schema = parse_schema(text)
    except ParseError as e:
        return None, e.diagnostics
    return schema, lint(schema)


def lint(schema: Schema) -> list[Diagnostic]:
    """Warnings for valid but suspicious schemas (currently: isa cycles)."""
    out = []
    graph: dict[str, set[str]] = {}
    for a, b in schema.isa_c:
        graph.setdefault(a, set()).add(b)
    for start in sorted(graph):
        seen, stack = set(), list(graph[start])
        while stack:
            n = stack.pop()
            if n == start:
                out.append(Diagnostic(
                    "isa-cycle", f"class {start!r} lies on an isa cycle; the cycle's classes are forced equal",
                    severity="warning", elements=(start,)))
                break
            if n not in seen:
                seen.add(n)
                stack.extend(graph.get(n, ()))
    return out


def parse_constraint(text: str, schema: Schema):
    """Parse one candidate constraint against ``schema``'s signature.

    Accepts any isa/isar/isau/disjoint/disjointr/cover or transition
    statement.  ``class C temporal;`` (or ``snapshot``) for an already
    declared class asserts that temporality.  Returns the raw declaration.
    """
    pairs, diags = parse_declarations(text)
    if diags:
        raise ParseError(diags)
    decls = [d for d, _ in pairs]
    if len(decls) != 1 or isinstance(decls[0], (RelDecl, ChrononUnit, Identifier)):
        raise ParseError([Diagnostic("syntax", "expected exactly one constraint statement")])
    decl = decls[0]
    if isinstance(decl, ClassDecl):
        if decl.name not in schema.class_map or decl.attributes:
            raise ParseError([Diagnostic(
                "syntax", "a class candidate must name a declared class without attributes")])
        return decl
    base = [c for c in schema.classes] + [r for r in schema.relationships]
    try:
        build_schema([*base, decl])
    except SchemaError as e:
        raise ParseError([Diagnostic(type(e).__name__, str(e))]) from e
    return decl


# serialization ---------------------------------------------------------------

_LABELS = {
    "chg-ext": {Kind.EXTENSION: "EXT", Kind.CHANGE: "CHG"},
    "dev-dex": {Kind.EXTENSION: "DEX", Kind.CHANGE: "DEV"},
}


def _marking(t: Temporality) -> str:
    return "" if t is Temporality.MIXED else f" {t.value}"


def transition_keyword(c: TransitionConstraint, labels: str = "chg-ext") -> str:
    """Surface keyword of a transition, e.g. ``PCHGR-``."""
    if c.kind is Kind.FROZEN:
        return "FRZ"
    word = _LABELS[labels][c.kind]
    word += {Subject.CLASS: "", Subject.RELATIONSHIP: "R", Subject.ATTRIBUTE: "A"}[c.subject]
    if c.persistent:
        word = "P" + word
    if c.tense is Tense.PAST:
        word += "-"
    return word


def format_transition(c: TransitionConstraint, labels: str = "chg-ext") -> str:
    if c.kind is Kind.FROZEN:
        return f"FRZ {c.source};"
    out = f"{transition_keyword(c, labels)} {c.source} -> {c.target}"
    if c.offset is not None:
        out += f" after {c.offset}"
    if c.mandatory:
        out += " mandatory"
    return out + ";"


def serialize_schema(schema: Schema, labels: str = "chg-ext") -> str:
    """Canonical text; ``parse_schema`` of the result equals ``schema``.

    ``labels`` chooses the transition keyword set (``chg-ext`` or ``dev-dex``).
    """
    if labels not in _LABELS:
        raise ValueError(f"unknown label set {labels!r}")
    lines: list[str] = []
    if schema.chronon_unit is not None:
        lines.append(f'chronon "{schema.chronon_unit}";')
    frozen = {c.source for c in schema.transitions if c.kind is Kind.FROZEN}
    ids = schema.id_map
    for c in schema.sorted_classes():
        head = f"class {c.name}{_marking(c.temporality)}"
        if not c.attributes:
            lines.append(head + ";")
            continue
        lines.append(head + " {")
        for a in c.attributes:
            text = f"  {a.name}: {a.domain}{_marking(a.temporality)}"
            if ids.get(c.name) == a.name:
                text += " id"
            if f"{c.name}.{a.name}" in frozen:
                text += " frozen"
            if a.card is not None:
                text += f" {a.card}"
            lines.append(text + ";")
        lines.append("};")
    for r in schema.sorted_relationships():
        roles = ", ".join(
            f"{u.name}: {u.player}" + (f" {u.card}" if u.card else "") for u in r.roles)
        lines.append(f"rel {r.name}{_marking(r.temporality)} ({roles});")
    lines += [f"isa {a} {b};" for a, b in sorted(schema.isa_c)]
    lines += [f"isar {a} {b};" for a, b in sorted(schema.isa_r)]
    lines += [f"isau {a[0]}.{a[1]} {b[0]}.{b[1]};" for a, b in sorted(schema.isa_u)]
    for word, groups in (("disjoint", schema.disj_c), ("disjointr", schema.disj_r), ("cover", schema.cover)):
        for members, parent in sorted(groups, key=lambda g: (g[1], sorted(g[0]))):
            lines.append(f"{word} {{{', '.join(sorted(members))}}} {parent};")
    for c in schema.sorted_transitions():
        if c.kind is not Kind.FROZEN:
            lines.append(format_transition(c, labels))
    return "\n".join(lines) + "\n" if lines else ""
