"""Controlled natural language rendering of schemas.

Each construct maps to a fixed template with slots.  The only morphology
is lowercasing, hyphenation of multiword class names and a/an selection.
Sentences come out grouped as: classes, isa, temporality, transitions,
relationships, relationship transitions, attributes.  Within a group the
order follows sorted element names, so output is deterministic.
"""

from __future__ import annotations

import re

from .model import Kind, Schema, Subject, Temporality, Tense, TransitionConstraint

__all__ = ["verbalize", "name_to_surface", "normalize", "STYLES"]

STYLES = ("chg-ext", "dev-dex")

_WORD = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")
_ARTICLES = {"a", "an", "the"}


def name_to_surface(identifier: str, sep: str = "-") -> str:
    """``PreviousCustomer`` -> ``previous-customer``; all-caps runs are kept.

    Use ``sep=" "`` for attribute and relationship names.
    """
    words = []
    for chunk in re.split(r"[_\s]+", identifier):
        for w in _WORD.findall(chunk):
            words.append(w if len(w) > 1 and w.isupper() else w.lower())
    return sep.join(words) if words else identifier


def normalize(sentence: str) -> str:
    """Comparison key: lowercase, single spaces, no articles, no final period."""
    words = sentence.lower().strip().rstrip(".").split()
    return " ".join(w for w in words if w not in _ARTICLES)


def _a(phrase: str) -> str:
    return ("an " if phrase[:1].lower() in "aeiou" else "a ") + phrase


def _cap(text: str) -> str:
    return text[:1].upper() + text[1:]


class _Verbalizer:
    def __init__(self, schema: Schema, style: str):
        self.schema = schema
        self.style = style
        self.unit = schema.chronon_unit or "time points"

    def c(self, name: str) -> str:
        return name_to_surface(name)

    def attr(self, qname: str) -> str:
        return name_to_surface(qname.split(".", 1)[1], " ")

    def delay(self, c: TransitionConstraint) -> str:
        if not c.quantitative:
            return ""
        unit = self.unit
        if c.offset == 1 and unit.endswith("s"):
            unit = unit[:-1]
        word = "after" if c.tense is Tense.FUTURE else "earlier by"
        return f" {word} exactly {c.offset} {unit}"

    # relationship phrases: "traveller books a flight" / "traveller books flight"
    def rel_phrase(self, name: str, articles: bool = True) -> str:
        r = self.schema.rel_map[name]
        players = [self.c(u.player) for u in r.roles]
        rest = [_a(p) if articles else p for p in players[1:]]
        return f"{players[0]} {name_to_surface(name, ' ')} {' and '.join(rest)}"

    # groups ---------------------------------------------------------------

    def classes(self):
        for c in self.schema.sorted_classes():
            s = self.c(c.name)
            if c.temporality is Temporality.SNAPSHOT:
                yield f"{_cap(s)} is an entity type whose objects will always be {_a(s)}."
            elif c.temporality is Temporality.MIXED:
                yield f"{_cap(s)} is an entity type."

    def isa(self):
        for sub, sup in sorted(self.schema.isa_c):
            yield f"{_cap(self.c(sub))} is {_a(self.c(sup))}."
        for members, parent in sorted(self.schema.disj_c, key=lambda d: (d[1], sorted(d[0]))):
            names = [self.c(m) for m in sorted(members)]
            if len(names) == 1:
                yield f"Each {names[0]} is {_a(self.c(parent))}."
            else:
                yield (f"Each {' and each '.join(names)} is {_a(self.c(parent))}, "
                       "and no object is more than one of them.")
        for members, parent in sorted(self.schema.cover, key=lambda d: (d[1], sorted(d[0]))):
            options = " or ".join(_a(self.c(m)) for m in sorted(members))
            yield f"Each {self.c(parent)} is {options}."

    def temporality(self):
        for c in self.schema.sorted_classes():
            if c.temporality is Temporality.TEMPORARY:
                s = self.c(c.name)
                yield f"Each {s} is not {_a(s)} for some time."

    def class_transition(self, c: TransitionConstraint) -> str:
        s, t = self.c(c.source), self.c(c.target)
        d = self.delay(c)
        if c.tense is Tense.FUTURE:
            if c.kind is Kind.EXTENSION:
                text = (f"Each {s} must also become {_a(t)}{d}" if c.mandatory
                        else f"{_cap(_a(s))} may also become {_a(t)}{d}")
            else:
                verb = f"Each {s} must evolve" if c.mandatory else f"{_cap(_a(s))} may evolve"
                text = f"{verb} to {_a(t)}{d} ceasing to be {_a(s)}"
            if c.persistent:
                text += f", remaining {_a(t)} ever after"
        else:
            if c.kind is Kind.EXTENSION:
                text = (f"Each {t} was already {_a(s)}{d}" if c.mandatory
                        else f"{_cap(_a(t))} may have been {_a(s)} before{d}")
            else:
                verb = f"Each {t} must have evolved" if c.mandatory else f"{_cap(_a(t))} may have evolved"
                text = f"{verb} from {_a(s)}{d}, ceasing to be {_a(s)}"
            if c.persistent:
                text += f", and has remained {_a(t)} ever since"
        return text + "."

    def transitions(self):
        for c in self._transitions(Subject.CLASS):
            yield self.class_transition(c)

    def _transitions(self, subject: Subject):
        # future before past, then the usual sort order
        chosen = [c for c in self.schema.sorted_transitions() if c.subject is subject]
        return sorted(chosen, key=lambda c: c.tense is Tense.PAST)

    def relationships(self):
        schema = self.schema
        for r in schema.sorted_relationships():
            yield f"{_cap(_a(self.rel_phrase(r.name)))}."
            bare = self.rel_phrase(r.name, False)
            if r.temporality is Temporality.SNAPSHOT:
                yield f"Each {bare} relation holds at all times."
            elif r.temporality is Temporality.TEMPORARY:
                yield f"Each {bare} relation does not hold at some time."
            for u in r.roles:
                if u.card is not None:
                    yield (f"Each {self.c(u.player)} plays role {name_to_surface(u.name, ' ')} "
                           f"in {name_to_surface(r.name, ' ')} {self._card(u.card)}.")
        for sub, sup in sorted(schema.isa_r):
            yield (f"Each {self.rel_phrase(sub, False)} relation is also "
                   f"{_a(self.rel_phrase(sup, False))} relation.")
        for (r1, u1), (r2, u2) in sorted(schema.isa_u):
            yield (f"Each object playing role {name_to_surface(u1, ' ')} in {name_to_surface(r1, ' ')} "
                   f"also plays role {name_to_surface(u2, ' ')} in {name_to_surface(r2, ' ')}.")
        for members, parent in sorted(schema.disj_r, key=lambda d: (d[1], sorted(d[0]))):
            names = [self.rel_phrase(m, False) for m in sorted(members)]
            tail = ", and no tuple is in more than one of them" if len(names) > 1 else ""
            yield (f"Each {' and each '.join(names)} relation is also "
                   f"{_a(self.rel_phrase(parent, False))} relation{tail}.")

    def _card(self, card) -> str:
        if card.max is None:
            return f"at least {card.min} times"
        if card.min == card.max:
            return f"exactly {card.min} times"
        return f"at least {card.min} and at most {card.max} times"

    def rel_transition(self, c: TransitionConstraint) -> str:
        d = self.delay(c)
        if c.tense is Tense.FUTURE:
            r1 = self.rel_phrase(c.source)
            r2 = self.rel_phrase(c.target, False)
            head = f"Each {r1} will" if c.mandatory else f"{_cap(_a(r1))} may"
            text = f"{head} be followed by {r2}{d}"
            if c.kind is Kind.CHANGE:
                text += f", terminating the {r1} relation"
            if c.persistent:
                text += f", and {r2} then holds at all later times"
        else:
            r1 = self.rel_phrase(c.source, False)
            r2 = self.rel_phrase(c.target)
            head = f"Each {r2} must" if c.mandatory else f"{_cap(_a(r2))} may"
            text = f"{head} have been preceded by {r1}{d}"
            if c.kind is Kind.CHANGE:
                text += f", and terminating that {r1} relation"
            if c.persistent:
                text += f", and has held at all times since"
        return text + "."

    def rel_transitions(self):
        for c in self._transitions(Subject.RELATIONSHIP):
            yield self.rel_transition(c)

    def attributes(self):
        schema = self.schema
        frozen = {c.source for c in schema.transitions if c.kind is Kind.FROZEN}
        ids = {f"{c}.{a}" for c, a in schema.ids}
        temporal, snapshot, plain, cards = [], [], [], []
        for q in schema.sorted_attributes():
            owner, a = schema.attr_map[q]
            head = f"Each object in entity type {self.c(owner.name)} having attribute {self.attr(q)}"
            if a.temporality is Temporality.TEMPORARY:
                temporal.append(f"{head} does not have {_a(self.attr(q))} at some time.")
            elif a.temporality is Temporality.SNAPSHOT:
                snapshot.append(f"{head} has {self.attr(q)} at all times.")
            elif q not in frozen and q not in ids:
                plain.append(f"Each object in entity type {self.c(owner.name)} may have attribute {self.attr(q)}.")
            if a.card is not None:
                cards.append(f"Each object in entity type {self.c(owner.name)} has a value for "
                             f"{self.attr(q)} {self._card(a.card)}.")
        yield from temporal
        yield from snapshot
        for q in sorted(frozen):
            yield f"Once the value for {self.attr(q)} is set, it cannot change anymore."
        for q in sorted(ids):
            owner = q.split(".", 1)[0]
            yield f"Each {self.c(owner)} is identified by its {self.attr(q)}."
        yield from plain
        yield from cards
        for c in self._transitions(Subject.ATTRIBUTE):
            if c.kind is not Kind.FROZEN:
                yield self.attr_transition(c)

    def attr_transition(self, c: TransitionConstraint) -> str:
        s, t = f"value for {self.attr(c.source)}", f"value for {self.attr(c.target)}"
        d = self.delay(c)
        if c.tense is Tense.FUTURE:
            head = f"Each {s} will" if c.mandatory else f"A {s} may"
            text = f"{head} be followed by {_a(t)}{d}"
            if c.kind is Kind.CHANGE:
                text += f", terminating the {s}"
            if c.persistent:
                text += f", and the {t} is then kept at all later times"
        else:
            head = f"Each {t} must" if c.mandatory else f"A {t} may"
            text = f"{head} have been preceded by {_a(s)}{d}"
            if c.kind is Kind.CHANGE:
                text += f", and terminating that {s}"
            if c.persistent:
                text += f", and has been kept at all times since"
        return text + "."


def verbalize(schema: Schema, style: str = "chg-ext") -> list[str]:
    """One or more sentences per construct, in the fixed group order.

    The templates never mention transition keywords, so ``style`` only
    selects among accepted label variants and does not change the output.
    """
    if style not in STYLES:
        raise ValueError(f"style must be one of {STYLES}, not {style!r}")
    v = _Verbalizer(schema, style)
    out: list[str] = []
    for group in (v.classes, v.isa, v.temporality, v.transitions,
                  v.relationships, v.rel_transitions, v.attributes):
        out.extend(group())
    return out
