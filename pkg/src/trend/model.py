"""Abstract syntax of TREND schemas.

A :class:`Schema` is an immutable value.  It is normally obtained from
:func:`build_schema`, which takes a flat list of declarations (what the
parser produces) and checks uniqueness, references and arities.

Attribute names are scoped to their class; elsewhere they are written
``Class.attr``.  Unmarked classes, relationships and attributes are mixed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Union

from .errors import (
    ArityMismatch,
    DanglingReference,
    DuplicateName,
    InvalidConstraint,
    UnknownRelationship,
    UnknownRole,
)


class Temporality(str, enum.Enum):
    SNAPSHOT = "snapshot"
    MIXED = "mixed"
    TEMPORARY = "temporal"


class Subject(str, enum.Enum):
    CLASS = "class"
    RELATIONSHIP = "relationship"
    ATTRIBUTE = "attribute"


class Kind(str, enum.Enum):
    EXTENSION = "EXT"
    CHANGE = "CHG"
    FROZEN = "FRZ"


class Tense(str, enum.Enum):
    FUTURE = "future"
    PAST = "past"


class Modality(str, enum.Enum):
    OPTIONAL = "optional"
    MANDATORY = "mandatory"


@dataclass(frozen=True)
class Card:
    """Cardinality bounds; ``max=None`` is unbounded."""

    min: int = 0
    max: int | None = None

    def __post_init__(self):
        if self.min < 0 or (self.max is not None and self.max < self.min):
            raise InvalidConstraint(f"bad cardinality [{self.min},{self.max}]")

    def admits(self, n: int) -> bool:
        return self.min <= n and (self.max is None or n <= self.max)

    def __str__(self):
        return f"[{self.min},{'*' if self.max is None else self.max}]"


@dataclass(frozen=True)
class Attribute:
    name: str
    domain: str
    temporality: Temporality = Temporality.MIXED
    card: Card | None = None


@dataclass(frozen=True)
class ClassDecl:
    name: str
    temporality: Temporality = Temporality.MIXED
    attributes: tuple[Attribute, ...] = ()

    def attribute(self, name: str) -> Attribute | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class Role:
    name: str
    player: str
    card: Card | None = None


@dataclass(frozen=True)
class RelDecl:
    name: str
    roles: tuple[Role, ...]
    temporality: Temporality = Temporality.MIXED

    @property
    def arity(self) -> int:
        return len(self.roles)

    def role_index(self, role: str) -> int:
        for i, r in enumerate(self.roles):
            if r.name == role:
                return i
        raise UnknownRole(f"relationship {self.name!r} has no role {role!r}")


@dataclass(frozen=True)
class TransitionConstraint:
    """One element of the transition-constraint set.

    ``offset`` is the quantitative delay in chronons (``None`` for the
    unquantified variants, which behave like an offset of one).  A frozen
    attribute is ``kind=FROZEN`` with no target.
    """

    subject: Subject
    kind: Kind
    source: str
    target: str | None = None
    tense: Tense = Tense.FUTURE
    modality: Modality = Modality.OPTIONAL
    offset: int | None = None
    persistent: bool = False

    @property
    def quantitative(self) -> bool:
        return self.offset is not None

    @property
    def delay(self) -> int:
        return 1 if self.offset is None else self.offset

    @property
    def mandatory(self) -> bool:
        return self.modality == Modality.MANDATORY

    @property
    def label(self) -> str:
        """Catalogue label, e.g. ``MQCHGR`` or ``mext`` (lowercase = past)."""
        if self.kind is Kind.FROZEN:
            return "FRZ"
        text = ("M" if self.mandatory else "") + ("Q" if self.quantitative else "")
        text += self.kind.value
        text += {Subject.CLASS: "", Subject.RELATIONSHIP: "R", Subject.ATTRIBUTE: "A"}[self.subject]
        return text.lower() if self.tense is Tense.PAST else text

    @property
    def endpoints(self) -> tuple[str, ...]:
        return (self.source,) if self.target is None else (self.source, self.target)


@dataclass(frozen=True)
class Isa:
    sub: str
    sup: str
    subject: Subject = Subject.CLASS


@dataclass(frozen=True)
class RoleIsa:
    """``isa_U`` between two ``(relationship, role)`` pairs."""

    sub: tuple[str, str]
    sup: tuple[str, str]


@dataclass(frozen=True)
class Disjoint:
    members: frozenset[str]
    parent: str
    subject: Subject = Subject.CLASS


@dataclass(frozen=True)
class Cover:
    members: frozenset[str]
    parent: str


@dataclass(frozen=True)
class Identifier:
    cls: str
    attribute: str


@dataclass(frozen=True)
class ChrononUnit:
    label: str


Declaration = Union[
    ClassDecl, RelDecl, Isa, RoleIsa, Disjoint, Cover, Identifier,
    TransitionConstraint, ChrononUnit,
]


@dataclass(frozen=True)
class Schema:
    classes: frozenset[ClassDecl] = frozenset()
    relationships: frozenset[RelDecl] = frozenset()
    isa_c: frozenset[tuple[str, str]] = frozenset()
    isa_r: frozenset[tuple[str, str]] = frozenset()
    isa_u: frozenset[tuple[tuple[str, str], tuple[str, str]]] = frozenset()
    disj_c: frozenset[tuple[frozenset[str], str]] = frozenset()
    disj_r: frozenset[tuple[frozenset[str], str]] = frozenset()
    cover: frozenset[tuple[frozenset[str], str]] = frozenset()
    ids: frozenset[tuple[str, str]] = frozenset()
    transitions: frozenset[TransitionConstraint] = frozenset()
    chronon_unit: str | None = field(default=None, compare=True)

    @cached_property
    def class_map(self) -> dict[str, ClassDecl]:
        return {c.name: c for c in self.classes}

    @cached_property
    def rel_map(self) -> dict[str, RelDecl]:
        return {r.name: r for r in self.relationships}

    @cached_property
    def attr_map(self) -> dict[str, tuple[ClassDecl, Attribute]]:
        """Qualified attribute name -> (owner, attribute)."""
        return {f"{c.name}.{a.name}": (c, a) for c in self.classes for a in c.attributes}

    @property
    def attributes(self) -> frozenset[str]:
        return frozenset(self.attr_map)

    @cached_property
    def id_map(self) -> dict[str, str]:
        return dict(self.ids)

    def sorted_classes(self) -> list[ClassDecl]:
        return sorted(self.classes, key=lambda c: c.name)

    def sorted_relationships(self) -> list[RelDecl]:
        return sorted(self.relationships, key=lambda r: r.name)

    def sorted_attributes(self) -> list[str]:
        return sorted(self.attr_map)

    def sorted_transitions(self) -> list[TransitionConstraint]:
        return sorted(self.transitions, key=transition_sort_key)

    def temporality_of(self, name: str) -> Temporality:
        if name in self.class_map:
            return self.class_map[name].temporality
        if name in self.rel_map:
            return self.rel_map[name].temporality
        return self.attr_map[name][1].temporality

    def domain_of(self, qname: str) -> str:
        return self.attr_map[qname][1].domain

    @property
    def domains(self) -> list[str]:
        return sorted({a.domain for c in self.classes for a in c.attributes})

    def is_empty(self) -> bool:
        return self == Schema()


def transition_sort_key(c: TransitionConstraint):
    return (
        list(Subject).index(c.subject), c.source, c.target or "", c.kind.value,
        c.tense.value, c.offset or 0, c.modality.value, c.persistent,
    )


def player(schema: Schema, rel: str, role: str) -> str:
    """Class playing ``role`` in relationship ``rel``."""
    r = schema.rel_map.get(rel)
    if r is None:
        raise UnknownRole(f"unknown relationship {rel!r}")
    return r.roles[r.role_index(role)].player


def roles_of(schema: Schema, rel: str, cls: str) -> frozenset[str]:
    """All roles of ``rel`` played by ``cls``; more than one for ring relationships."""
    r = schema.rel_map.get(rel)
    if r is None:
        raise UnknownRelationship(f"unknown relationship {rel!r}")
    return frozenset(u.name for u in r.roles if u.player == cls)


def build_schema(declarations: Iterable[Declaration]) -> Schema:
    """Fold raw declarations into a validated :class:`Schema`.

    Raises DuplicateName, DanglingReference, ArityMismatch or
    InvalidConstraint; the offending declaration is attached as ``.decl``.
    """
    decls = list(declarations)
    classes: dict[str, ClassDecl] = {}
    rels: dict[str, RelDecl] = {}
    unit = None

    for d in decls:
        if isinstance(d, ClassDecl):
            if d.name in classes or d.name in rels:
                raise DuplicateName(f"duplicate name {d.name!r}", d)
            seen = set()
            for a in d.attributes:
                if a.name in seen:
                    raise DuplicateName(f"duplicate attribute {d.name}.{a.name}", d)
                seen.add(a.name)
            classes[d.name] = d
        elif isinstance(d, RelDecl):
            if d.name in classes or d.name in rels:
                raise DuplicateName(f"duplicate name {d.name!r}", d)
            if len(d.roles) < 2:
                raise ArityMismatch(f"relationship {d.name!r} needs at least two roles", d)
            names = [r.name for r in d.roles]
            if len(set(names)) != len(names):
                raise DuplicateName(f"duplicate role in {d.name!r}", d)
            rels[d.name] = d
        elif isinstance(d, ChrononUnit):
            if unit is not None and unit != d.label:
                raise DuplicateName("chronon unit declared twice", d)
            unit = d.label

    def need_class(name, d):
        if name not in classes:
            raise DanglingReference(name, d)

    def need_rel(name, d):
        if name not in rels:
            raise DanglingReference(name, d)
        return rels[name]

    def need_attr(qname, d):
        cname, _, aname = qname.partition(".")
        if cname not in classes or classes[cname].attribute(aname) is None:
            raise DanglingReference(qname, d)
        return classes[cname].attribute(aname)

    def need_role(ref, d):
        r = need_rel(ref[0], d)
        if ref[1] not in {u.name for u in r.roles}:
            raise DanglingReference(f"{ref[0]}.{ref[1]}", d)
        return r

    for r in rels.values():
        for u in r.roles:
            need_class(u.player, r)

    isa_c, isa_r, isa_u = set(), set(), set()
    disj_c, disj_r, cover = set(), set(), set()
    ids: dict[str, str] = {}
    transitions = set()

    for d in decls:
        if isinstance(d, Isa):
            if d.subject is Subject.CLASS:
                need_class(d.sub, d)
                need_class(d.sup, d)
                isa_c.add((d.sub, d.sup))
            elif d.subject is Subject.RELATIONSHIP:
                a, b = need_rel(d.sub, d), need_rel(d.sup, d)
                if a.arity != b.arity:
                    raise ArityMismatch(f"isar {d.sub} {d.sup}: arities {a.arity} and {b.arity}", d)
                isa_r.add((d.sub, d.sup))
            else:
                raise InvalidConstraint("isa over attributes is not supported", d)
        elif isinstance(d, RoleIsa):
            need_role(d.sub, d)
            need_role(d.sup, d)
            isa_u.add((tuple(d.sub), tuple(d.sup)))
        elif isinstance(d, Disjoint):
            if not d.members:
                raise InvalidConstraint("empty disjointness group", d)
            if d.subject is Subject.CLASS:
                for m in (*d.members, d.parent):
                    need_class(m, d)
                disj_c.add((frozenset(d.members), d.parent))
            else:
                parent = need_rel(d.parent, d)
                for m in d.members:
                    if need_rel(m, d).arity != parent.arity:
                        raise ArityMismatch(f"disjointr member {m!r} has a different arity", d)
                disj_r.add((frozenset(d.members), d.parent))
        elif isinstance(d, Cover):
            if not d.members:
                raise InvalidConstraint("empty cover group", d)
            for m in (*d.members, d.parent):
                need_class(m, d)
            cover.add((frozenset(d.members), d.parent))
        elif isinstance(d, Identifier):
            need_attr(f"{d.cls}.{d.attribute}", d)
            if ids.get(d.cls, d.attribute) != d.attribute:
                raise DuplicateName(f"class {d.cls!r} has two identifiers", d)
            ids[d.cls] = d.attribute
        elif isinstance(d, TransitionConstraint):
            _check_transition(d, need_class, need_rel, need_attr)
            transitions.add(d)

    return Schema(
        classes=frozenset(classes.values()),
        relationships=frozenset(rels.values()),
        isa_c=frozenset(isa_c),
        isa_r=frozenset(isa_r),
        isa_u=frozenset(isa_u),
        disj_c=frozenset(disj_c),
        disj_r=frozenset(disj_r),
        cover=frozenset(cover),
        ids=frozenset(ids.items()),
        transitions=frozenset(transitions),
        chronon_unit=unit,
    )


def _check_transition(d: TransitionConstraint, need_class, need_rel, need_attr) -> None:
    if d.offset is not None and d.offset < 1:
        raise InvalidConstraint(f"offset must be a positive integer, got {d.offset}", d)
    if d.kind is Kind.FROZEN:
        if d.subject is not Subject.ATTRIBUTE or d.target is not None:
            raise InvalidConstraint("FRZ applies to exactly one attribute", d)
        if d.offset is not None or d.persistent or d.mandatory or d.tense is Tense.PAST:
            raise InvalidConstraint("FRZ takes no modifiers", d)
        need_attr(d.source, d)
        return
    if d.target is None:
        raise InvalidConstraint(f"{d.label} needs a source and a target", d)
    if d.source == d.target:
        raise InvalidConstraint(f"{d.label}: source and target must differ", d)
    if d.subject is Subject.CLASS:
        need_class(d.source, d)
        need_class(d.target, d)
    elif d.subject is Subject.RELATIONSHIP:
        a, b = need_rel(d.source, d), need_rel(d.target, d)
        if a.arity != b.arity:
            raise ArityMismatch(
                f"{d.label} {d.source} -> {d.target}: arities {a.arity} and {b.arity}", d)
    else:
        if d.kind is not Kind.CHANGE or d.tense is not Tense.FUTURE:
            raise InvalidConstraint("attribute transitions are future changes (CHGA) only", d)
        a, b = need_attr(d.source, d), need_attr(d.target, d)
        if a.domain != b.domain:
            raise ArityMismatch(
                f"{d.label} {d.source} -> {d.target}: domains {a.domain} and {b.domain}", d)
