"""Finite temporal database states and the legality check.

A state covers the time points ``0..H-1``.  Memberships outside that
window are false (``flow="N"``), except that with ``flow="Z"`` every point
before 0 looks exactly like point 0 (a stationary pre-history).

Transition sets such as ``ext(C1, C2)`` are not stored in a state; their
defining conditions are evaluated directly.  Optional transitions
therefore never produce a violation, mandatory and persistent ones do.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Iterable, Mapping

from .errors import IllFormedState, KindMismatch, NotMandatory
from .model import Kind, Schema, Subject, Temporality, Tense, TransitionConstraint

__all__ = [
    "Semantics", "DEFAULT", "TimeFrame", "TemporalState", "Violation",
    "check_state", "validate_state", "transition_holds", "future_condition",
    "mandatory_obligation_met", "load_state", "state_to_json", "dump_state",
    "subject_instances",
]

Instance = tuple


@dataclass(frozen=True)
class Semantics:
    """Interpretation switches.

    ``past_trigger``: mandatory past transitions fire on membership in the
    target (``"target"``, the default) or in the source (``"source"``).
    ``flow``: ``"N"`` (nothing before 0) or ``"Z"`` (stationary pre-history).
    """

    past_trigger: str = "target"
    flow: str = "N"

    def __post_init__(self):
        if self.past_trigger not in ("target", "source"):
            raise ValueError(f"past_trigger must be 'target' or 'source', not {self.past_trigger!r}")
        if self.flow not in ("N", "Z"):
            raise ValueError(f"flow must be 'N' or 'Z', not {self.flow!r}")


DEFAULT = Semantics()


class TimeFrame:
    """Maps (possibly out-of-window) time points onto stored indices."""

    def __init__(self, horizon: int, flow: str = "N", reach: int = 1):
        self.horizon = horizon
        self.flow = flow
        # how far below 0 past quantifiers look under flow Z
        self.low = -reach if flow == "Z" else 0

    def index(self, t: int) -> int | None:
        if 0 <= t < self.horizon:
            return t
        if t < 0 and self.flow == "Z":
            return 0
        return None

    def window(self) -> range:
        return range(self.horizon)

    def before(self, t: int) -> range:
        """Points strictly before ``t`` that past quantifiers range over."""
        return range(self.low, t)


def max_offset(schema: Schema) -> int:
    return max((c.delay for c in schema.transitions), default=1)


def frame_for(schema: Schema, horizon: int, semantics: Semantics = DEFAULT) -> TimeFrame:
    return TimeFrame(horizon, semantics.flow, max_offset(schema) + 1)


@dataclass
class TemporalState:
    """Extensions per time point.

    ``classes[C][t]`` is a frozenset of objects, ``relationships[R][t]`` a
    frozenset of tuples in the schema's role order, ``attributes["C.A"][t]``
    a frozenset of (object, value) pairs.  Missing names are empty.
    """

    horizon: int
    objects: frozenset
    domains: Mapping[str, frozenset] = field(default_factory=dict)
    classes: Mapping[str, tuple] = field(default_factory=dict)
    relationships: Mapping[str, tuple] = field(default_factory=dict)
    attributes: Mapping[str, tuple] = field(default_factory=dict)

    @classmethod
    def build(cls, horizon, objects, classes=None, relationships=None, attributes=None,
              domains=None, schema: Schema | None = None) -> TemporalState:
        """Convenience constructor taking ``{name: {t: iterable}}`` maps.

        Domains default to the values used by each attribute (needs ``schema``).
        """
        def expand(table, conv):
            out = {}
            for name, per_t in (table or {}).items():
                rows = [frozenset() for _ in range(horizon)]
                for t, items in per_t.items():
                    t = int(t)
                    if not 0 <= t < horizon:
                        raise IllFormedState(f"{name}: time point {t} outside 0..{horizon - 1}")
                    rows[t] = frozenset(conv(x) for x in items)
                out[name] = tuple(rows)
            return out

        cl = expand(classes, lambda o: o)
        rl = expand(relationships, tuple)
        at = expand(attributes, tuple)
        if domains is None:
            doms: dict[str, set] = {}
            if schema is not None:
                for d in schema.domains:
                    doms[d] = set()
                for qname, rows in at.items():
                    if qname in schema.attr_map:
                        doms[schema.domain_of(qname)].update(v for row in rows for _, v in row)
            domains = doms
        return cls(
            horizon, frozenset(objects), {d: frozenset(v) for d, v in domains.items()}, cl, rl, at)

    def cls(self, name: str, t: int) -> frozenset:
        rows = self.classes.get(name)
        return rows[t] if rows is not None else frozenset()

    def rel(self, name: str, t: int) -> frozenset:
        rows = self.relationships.get(name)
        return rows[t] if rows is not None else frozenset()

    def attr(self, name: str, t: int) -> frozenset:
        rows = self.attributes.get(name)
        return rows[t] if rows is not None else frozenset()

    def extension(self, subject: Subject, name: str, t: int) -> frozenset:
        """Extension as a set of instance tuples (objects become 1-tuples)."""
        if subject is Subject.CLASS:
            return frozenset((o,) for o in self.cls(name, t))
        if subject is Subject.RELATIONSHIP:
            return self.rel(name, t)
        return self.attr(name, t)

    @property
    def values(self) -> frozenset:
        return frozenset(v for vs in self.domains.values() for v in vs)


@dataclass(frozen=True, order=True)
class Violation:
    rule: str
    elements: tuple
    instance: tuple
    times: tuple
    message: str = field(default="", compare=False)

    def keys(self) -> set:
        """Flattened ``(rule, elements, instance, t)`` identities."""
        return {(self.rule, self.elements, self.instance, t) for t in self.times}

    def __str__(self):
        at = ",".join(map(str, self.times))
        inst = ",".join(map(str, self.instance))
        return f"{self.rule} [{' '.join(self.elements)}] ({inst}) @t={at}: {self.message}"

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "elements": list(self.elements),
            "time": list(self.times),
            "message": self.message,
            "instance": list(self.instance),
        }


# state well-formedness --------------------------------------------------------

def validate_state(schema: Schema, state: TemporalState) -> None:
    """Raise :class:`IllFormedState` unless the state fits the schema."""
    H = state.horizon
    if not isinstance(H, int) or H < 1:
        raise IllFormedState("horizon must be a positive integer")
    if not state.objects:
        raise IllFormedState("the object domain must be nonempty")
    values = state.values
    if values & state.objects:
        raise IllFormedState(f"objects and values overlap: {sorted(values & state.objects)}")

    def rows_ok(kind, name, rows):
        if len(rows) != H:
            raise IllFormedState(f"{kind} {name!r} has {len(rows)} time points, expected {H}")

    for name, rows in state.classes.items():
        if name not in schema.class_map:
            raise IllFormedState(f"unknown class {name!r}")
        rows_ok("class", name, rows)
        for t, row in enumerate(rows):
            if not row <= state.objects:
                raise IllFormedState(f"class {name!r} at t={t} holds non-objects {sorted(row - state.objects)}")
    for name, rows in state.relationships.items():
        r = schema.rel_map.get(name)
        if r is None:
            raise IllFormedState(f"unknown relationship {name!r}")
        rows_ok("relationship", name, rows)
        for t, row in enumerate(rows):
            for tup in row:
                if len(tup) != r.arity:
                    raise IllFormedState(f"relationship {name!r} at t={t}: tuple {tup} has wrong arity")
                if not set(tup) <= state.objects:
                    raise IllFormedState(f"relationship {name!r} at t={t}: tuple {tup} has non-objects")
    for name, rows in state.attributes.items():
        if name not in schema.attr_map:
            raise IllFormedState(f"unknown attribute {name!r}")
        rows_ok("attribute", name, rows)
        dom = state.domains.get(schema.domain_of(name), frozenset())
        for t, row in enumerate(rows):
            for pair in row:
                if len(pair) != 2 or pair[0] not in state.objects:
                    raise IllFormedState(f"attribute {name!r} at t={t}: bad pair {pair}")
                if pair[1] not in dom:
                    raise IllFormedState(
                        f"attribute {name!r} at t={t}: value {pair[1]!r} not in domain {schema.domain_of(name)}")


# transition conditions ------------------------------------------------------------

def _member(state, frame, c_subject, name, inst, t) -> bool:
    i = frame.index(t)
    if i is None:
        return False
    if c_subject is Subject.CLASS:
        return inst[0] in state.cls(name, i)
    if c_subject is Subject.RELATIONSHIP:
        return inst in state.rel(name, i)
    return inst in state.attr(name, i)


def _future(state, frame, c, inst, t) -> bool:
    m = lambda name, u: _member(state, frame, c.subject, name, inst, u)  # noqa: E731
    n = c.delay
    ok = m(c.source, t) and not m(c.target, t) and m(c.target, t + n)
    if ok and c.kind is Kind.CHANGE:
        ok = not m(c.source, t + n)
    return ok


def _past(state, frame, c, inst, t) -> bool:
    m = lambda name, u: _member(state, frame, c.subject, name, inst, u)  # noqa: E731
    n = c.delay
    if c.kind is Kind.EXTENSION:
        return m(c.source, t) and m(c.target, t) and not m(c.target, t - n)
    return not m(c.source, t) and m(c.target, t) and m(c.source, t - n) and not m(c.target, t - n)


def _frozen(state, frame, c, inst, t) -> bool:
    if not _member(state, frame, Subject.ATTRIBUTE, c.source, inst, t):
        return True
    return all(_member(state, frame, Subject.ATTRIBUTE, c.source, inst, u)
               for u in range(t + 1, frame.horizon))


def _norm_instance(c: TransitionConstraint, schema: Schema, inst) -> tuple:
    if c.subject is Subject.CLASS:
        if isinstance(inst, str):
            return (inst,)
        if isinstance(inst, tuple) and len(inst) == 1:
            return inst
        raise KindMismatch(f"{c.label} is about class members, got {inst!r}")
    if not isinstance(inst, tuple):
        raise KindMismatch(f"{c.label} needs a tuple instance, got {inst!r}")
    if c.subject is Subject.RELATIONSHIP:
        if len(inst) != schema.rel_map[c.source].arity:
            raise KindMismatch(f"{c.label} needs a {schema.rel_map[c.source].arity}-tuple, got {inst!r}")
        return inst
    if len(inst) != 2:
        raise KindMismatch(f"{c.label} needs an (object, value) pair, got {inst!r}")
    return inst


def _state_frame(schema, state, semantics):
    return frame_for(schema, state.horizon, semantics)


def transition_holds(schema: Schema, state: TemporalState, constraint: TransitionConstraint,
                     instance, t: int, semantics: Semantics = DEFAULT) -> bool:
    """Whether the constraint's own transition condition holds at ``t``.

    Future forms look ahead by the offset, past forms look back by it.  For
    FRZ this is the frozen implication at ``t``.
    """
    inst = _norm_instance(constraint, schema, instance)
    frame = _state_frame(schema, state, semantics)
    if constraint.kind is Kind.FROZEN:
        return _frozen(state, frame, constraint, inst, t)
    if constraint.tense is Tense.PAST:
        return _past(state, frame, constraint, inst, t)
    return _future(state, frame, constraint, inst, t)


def future_condition(schema: Schema, state: TemporalState, constraint: TransitionConstraint,
                     instance, t: int, semantics: Semantics = DEFAULT) -> bool:
    """The future-form condition of ``constraint`` regardless of its tense.

    Mandatory past transitions are obligations to have undergone this
    future-form transition earlier.
    """
    inst = _norm_instance(constraint, schema, instance)
    return _future(state, _state_frame(schema, state, semantics), constraint, inst, t)


def _mandatory_ok(state, frame, c, inst, t, semantics) -> bool:
    m = lambda name, u: _member(state, frame, c.subject, name, inst, u)  # noqa: E731
    if c.tense is Tense.FUTURE:
        if not m(c.source, t):
            return True
        return any(_future(state, frame, c, inst, u) for u in range(t + 1, frame.horizon))
    trigger = c.target if semantics.past_trigger == "target" else c.source
    if not m(trigger, t):
        return True
    # the transition must have landed by t
    return any(_future(state, frame, c, inst, u) for u in frame.before(t - c.delay + 1))


def _persistence_ok(state, frame, c, inst, t) -> bool:
    if c.tense is Tense.FUTURE:
        if not _future(state, frame, c, inst, t):
            return True
        start = t + c.delay
    else:
        if not _past(state, frame, c, inst, t):
            return True
        start = t + 1
    return all(_member(state, frame, c.subject, c.target, inst, u) for u in range(start, frame.horizon))


def mandatory_obligation_met(schema: Schema, state: TemporalState, constraint: TransitionConstraint,
                             instance, t: int, semantics: Semantics = DEFAULT) -> bool:
    """Whether the obligations the constraint imposes at ``t`` are met.

    Mandatory future: source membership at ``t`` needs the transition at
    some later point.  Mandatory past: target membership (or source, with
    ``past_trigger="source"``) needs a transition that completed by ``t``.
    Persistent: once the transition holds, the target keeps the instance.
    """
    c = constraint
    if c.kind is Kind.FROZEN or not (c.mandatory or c.persistent):
        raise NotMandatory(f"{c.label} {c.source} -> {c.target} imposes no obligation")
    inst = _norm_instance(c, schema, instance)
    frame = _state_frame(schema, state, semantics)
    ok = True
    if c.mandatory:
        ok = _mandatory_ok(state, frame, c, inst, t, semantics)
    if c.persistent:
        ok = ok and _persistence_ok(state, frame, c, inst, t)
    return ok


def subject_instances(schema: Schema, state: TemporalState, subject: Subject, names: Iterable[str]) -> list:
    """Instances that can matter for the given elements, sorted."""
    names = list(names)
    if subject is Subject.CLASS:
        return [(o,) for o in sorted(state.objects)]
    seen = set()
    for name in names:
        for t in range(state.horizon):
            seen |= state.extension(subject, name, t)
    return sorted(seen)


# legality ------------------------------------------------------------------------------

def show(inst: tuple) -> str:
    """``o1`` for single objects, ``(o1, o2)`` for tuples and pairs."""
    return inst[0] if len(inst) == 1 else "(" + ", ".join(inst) + ")"


class _Collector:
    def __init__(self):
        self.found: dict[tuple, tuple[set, str]] = {}

    def add(self, rule, elements, instance, t, message):
        key = (rule, tuple(elements), tuple(instance))
        entry = self.found.setdefault(key, (set(), message))
        entry[0].add(t)

    def result(self) -> list[Violation]:
        return sorted(
            Violation(rule, elements, instance, tuple(sorted(times)), message)
            for (rule, elements, instance), (times, message) in self.found.items()
        )


def check_state(schema: Schema, state: TemporalState, semantics: Semantics = DEFAULT) -> list[Violation]:
    """All violations of the schema's constraints; empty iff the state is legal."""
    validate_state(schema, state)
    out = _Collector()
    H = state.horizon
    T = range(H)
    objects = sorted(state.objects)
    frame = _state_frame(schema, state, semantics)

    for t in T:
        for sub, sup in sorted(schema.isa_c):
            for o in sorted(state.cls(sub, t) - state.cls(sup, t)):
                out.add("isa_C", (sub, sup), (o,), t, f"{o} is in {sub} but not in {sup}")
        for sub, sup in sorted(schema.isa_r):
            for r in sorted(state.rel(sub, t) - state.rel(sup, t)):
                out.add("isa_R", (sub, sup), r, t, f"{show(r)} is in {sub} but not in {sup}")
        for (r1, u1), (r2, u2) in sorted(schema.isa_u):
            i1, i2 = schema.rel_map[r1].role_index(u1), schema.rel_map[r2].role_index(u2)
            p1 = {tup[i1] for tup in state.rel(r1, t)}
            p2 = {tup[i2] for tup in state.rel(r2, t)}
            for o in sorted(p1 - p2):
                out.add("isa_U", (f"{r1}.{u1}", f"{r2}.{u2}"), (o,), t,
                        f"{o} plays {r1}.{u1} but not {r2}.{u2}")

        for rel in schema.sorted_relationships():
            for tup in sorted(state.rel(rel.name, t)):
                for i, role in enumerate(rel.roles):
                    if tup[i] not in state.cls(role.player, t):
                        out.add("rel", (rel.name, role.player), tup, t,
                                f"{tup[i]} in {show(tup)} plays {rel.name}.{role.name} but is not a {role.player}")
            for i, role in enumerate(rel.roles):
                if role.card is None:
                    continue
                rows = state.rel(rel.name, t)
                for o in sorted(state.cls(role.player, t)):
                    k = sum(1 for tup in rows if tup[i] == o)
                    if not role.card.admits(k):
                        out.add("card_R", (role.player, rel.name, role.name), (o,), t,
                                f"{o} plays {rel.name}.{role.name} {k} times, allowed {role.card}")

        for c in schema.sorted_classes():
            members = state.cls(c.name, t)
            for a in c.attributes:
                qname = f"{c.name}.{a.name}"
                pairs = state.attr(qname, t)
                for o in sorted(members):
                    k = sum(1 for p in pairs if p[0] == o)
                    if k == 0:
                        out.add("att", (c.name, qname), (o,), t, f"{o} has no {qname} value")
                    if a.card is not None and not a.card.admits(k):
                        out.add("card_A", (c.name, qname), (o,), t,
                                f"{o} has {k} {qname} values, allowed {a.card}")

        for members, parent in sorted(schema.disj_c, key=lambda g: (g[1], sorted(g[0]))):
            ms = sorted(members)
            for m in ms:
                for o in sorted(state.cls(m, t) - state.cls(parent, t)):
                    out.add("disj_C", (m, parent), (o,), t, f"{o} is in {m} but not in {parent}")
            for i, a in enumerate(ms):
                for b in ms[i + 1:]:
                    for o in sorted(state.cls(a, t) & state.cls(b, t)):
                        out.add("disj_C", (a, b), (o,), t, f"{o} is in both {a} and {b}")
        for members, parent in sorted(schema.disj_r, key=lambda g: (g[1], sorted(g[0]))):
            ms = sorted(members)
            for m in ms:
                for r in sorted(state.rel(m, t) - state.rel(parent, t)):
                    out.add("disj_R", (m, parent), r, t, f"{show(r)} is in {m} but not in {parent}")
            for i, a in enumerate(ms):
                for b in ms[i + 1:]:
                    for r in sorted(state.rel(a, t) & state.rel(b, t)):
                        out.add("disj_R", (a, b), r, t, f"{show(r)} is in both {a} and {b}")
        for members, parent in sorted(schema.cover, key=lambda g: (g[1], sorted(g[0]))):
            ms = sorted(members)
            union = set()
            for m in ms:
                union |= state.cls(m, t)
                for o in sorted(state.cls(m, t) - state.cls(parent, t)):
                    out.add("cover", (m, parent), (o,), t, f"{o} is in {m} but not in {parent}")
            for o in sorted(state.cls(parent, t) - union):
                out.add("cover", (parent, *ms), (o,), t, f"{o} is in {parent} but in none of {', '.join(ms)}")

    # temporality of classes, relationships and attributes
    def temporal_rules(kind, name, temporality, extension, label):
        if temporality is Temporality.MIXED:
            return
        rows = [extension(name, t) for t in T]
        for t in T:
            for x in sorted(rows[t]):
                inst = x if isinstance(x, tuple) else (x,)
                if temporality is Temporality.SNAPSHOT:
                    if not all(x in rows[u] for u in T):
                        out.add(f"snapshot-{kind}", (label,), inst, t,
                                f"{show(inst)} is in snapshot {label} at t={t} but not at every time")
                elif all(x in rows[u] for u in T if u != t):
                    out.add(f"temporal-{kind}", (label,), inst, t,
                            f"{show(inst)} is never absent from temporal {label}")

    for c in schema.sorted_classes():
        temporal_rules("class", c.name, c.temporality, state.cls, c.name)
    for r in schema.sorted_relationships():
        temporal_rules("rel", r.name, r.temporality, state.rel, r.name)
    for qname in schema.sorted_attributes():
        owner, a = schema.attr_map[qname]
        temporal_rules("attr", qname, a.temporality, state.attr, qname)
        if a.temporality is Temporality.MIXED:
            continue
        rows = [state.attr(qname, t) for t in T]
        for t in T:
            for pair in sorted(rows[t]):
                if pair[0] not in state.cls(owner.name, t):
                    continue
                if a.temporality is Temporality.SNAPSHOT:
                    if not all(pair in rows[u] for u in T):
                        out.add("s-attr", (owner.name, qname), pair, t,
                                f"{show(pair)} of snapshot attribute {qname} does not hold at every time")
                elif all(pair in rows[u] for u in T if u != t):
                    out.add("t-attr", (owner.name, qname), pair, t,
                            f"{show(pair)} of temporal attribute {qname} is never absent")

    # identifiers
    for cname, aname in sorted(schema.ids):
        qname = f"{cname}.{aname}"
        rows = [state.attr(qname, t) for t in T]
        always = set.intersection(*(set(r) for r in rows))
        for t in T:
            members = state.cls(cname, t)
            owners: dict = {}
            for o, d in rows[t]:
                if o in members:
                    owners.setdefault(d, set()).add(o)
            for d in sorted(owners):
                if len(owners[d]) > 1:
                    out.add("id", (cname, qname), (d,), t,
                            f"value {d} identifies {len(owners[d])} {cname} objects")
            for pair in sorted(rows[t]):
                if pair not in always:
                    out.add("id-snapshot", (cname, qname), pair, t,
                            f"identifier pair {show(pair)} does not hold at every time")
            for o in sorted(members):
                k = sum(1 for p in always if p[0] == o)
                if k != 1:
                    out.add("id-single", (cname, qname), (o,), t,
                            f"{o} has {k} permanent {qname} values, expected exactly one")

    # transition constraints
    for c in schema.sorted_transitions():
        if c.kind is Kind.FROZEN:
            for inst in subject_instances(schema, state, Subject.ATTRIBUTE, [c.source]):
                for t in T:
                    if not _frozen(state, frame, c, inst, t):
                        out.add("FRZ", (c.source,), inst, t, f"frozen {c.source} value {show(inst)} changes after t={t}")
            continue
        if not (c.mandatory or c.persistent):
            continue
        instances = subject_instances(schema, state, c.subject, c.endpoints)
        for inst in instances:
            for t in T:
                if c.mandatory and not _mandatory_ok(state, frame, c, inst, t, semantics):
                    out.add(c.label, (c.source, c.target), inst, t, _obligation_message(c, inst, t))
                if c.persistent and not _persistence_ok(state, frame, c, inst, t):
                    out.add("P" + c.label, (c.source, c.target), inst, t,
                            f"{show(inst)} leaves {c.target} after the transition at t={t}")
    return out.result()


def _obligation_message(c: TransitionConstraint, inst, t) -> str:
    kind = "extension" if c.kind is Kind.EXTENSION else "change"
    after = f" after {c.offset}" if c.offset is not None else ""
    if c.tense is Tense.FUTURE:
        return f"{show(inst)} is in {c.source} at t={t} but never undergoes the {kind}{after} into {c.target}"
    return f"{show(inst)} at t={t} did not previously undergo the {kind}{after} from {c.source} into {c.target}"


# JSON interchange ---------------------------------------------------------------------------

def load_state(source, schema: Schema) -> TemporalState:
    """Read a ``.state.json`` document (path, JSON text or parsed dict)."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    elif isinstance(source, str):
        data = json.loads(source)
    else:
        data = source
    try:
        H = data["horizon"]
        objects = data["objects"]
    except (KeyError, TypeError) as e:
        raise IllFormedState(f"state document lacks field {e}") from None
    if not isinstance(H, int) or H < 1:
        raise IllFormedState("horizon must be a positive integer")
    rels = {}
    for name, per_t in data.get("relationships", {}).items():
        r = schema.rel_map.get(name)
        if r is None:
            raise IllFormedState(f"unknown relationship {name!r}")
        order = [u.name for u in r.roles]
        conv = {}
        for t, rows in per_t.items():
            tuples = []
            for row in rows:
                if not isinstance(row, dict) or set(row) != set(order):
                    raise IllFormedState(f"relationship {name!r}: tuple {row} must label roles {order}")
                tuples.append(tuple(row[u] for u in order))
            conv[t] = tuples
        rels[name] = conv
    domains = data.get("domains")
    state = TemporalState.build(
        H, objects, data.get("classes", {}), rels, data.get("attributes", {}),
        domains=None if domains is None else {d: set(v) for d, v in domains.items()}, schema=schema)
    validate_state(schema, state)
    return state


def state_to_json(state: TemporalState, schema: Schema) -> dict:
    def table(rows_map, conv):
        out = {}
        for name in sorted(rows_map):
            per_t = {str(t): sorted((conv(name, x) for x in row), key=json.dumps)
                     for t, row in enumerate(rows_map[name]) if row}
            if per_t:
                out[name] = per_t
        return out

    def rel_row(name, tup):
        return {u.name: o for u, o in zip(schema.rel_map[name].roles, tup)}

    return {
        "horizon": state.horizon,
        "objects": sorted(state.objects),
        "domains": {d: sorted(v) for d, v in sorted(state.domains.items())},
        "classes": table(state.classes, lambda _n, o: o),
        "relationships": table(state.relationships, rel_row),
        "attributes": table(state.attributes, lambda _n, p: list(p)),
    }


def dump_state(state: TemporalState, schema: Schema, **extra) -> str:
    data = state_to_json(state, schema)
    data.update(extra)
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def all_tuples(objects, arity: int) -> list[tuple]:
    return list(product(sorted(objects), repeat=arity))
