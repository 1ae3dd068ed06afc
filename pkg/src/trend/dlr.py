"""The temporal description logic DLR_US: syntax, schema translation and
evaluation over finite temporal database states.

Expressions have a sort: ``"concept"`` (sets of objects), ``"value"``
(sets of domain values), ``"attribute"`` (sets of (object, value) pairs)
or ``("relation", n)`` (sets of n-tuples of objects).  Evaluation follows
the finite-trace convention: nothing exists after ``H-1`` and, under flow
``N``, nothing before 0.

Transition-set names such as ``CHG[Traveller,PreviousCustomer]`` are
*defined* names: a knowledge base maps them to the right-hand side of
their defining inclusion and the evaluator expands them, so a state needs
no extra extensions for them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Union

from .errors import ArityMismatch, UnknownName
from .model import Kind, Schema, Subject, Temporality, Tense, TransitionConstraint
from .semantics import TemporalState, TimeFrame, max_offset

CONCEPT = "concept"
VALUE = "value"
ATTRIBUTE = "attribute"

Sort = Union[str, tuple]


def relation(n: int) -> tuple:
    return ("relation", n)


# abstract syntax -----------------------------------------------------------

@dataclass(frozen=True)
class Top:
    sort: Sort = CONCEPT


@dataclass(frozen=True)
class Bottom:
    sort: Sort = CONCEPT


@dataclass(frozen=True)
class Atom:
    name: str
    sort: Sort = CONCEPT


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Count:
    """``exists>=k[role]R`` / ``exists<=k[role]R`` with ``op`` in {">=", "<="}.

    ``index`` is the 0-based component; ``role`` is its printed label
    (a role name, or ``From``/``To`` for attributes).  Counting on ``To``
    yields a value concept.
    """

    op: str
    k: int
    index: int
    role: str
    arg: "Expr"


@dataclass(frozen=True)
class Select:
    """``[role/n]C`` on relations, ``From:C``/``To:D`` on attributes."""

    index: int
    role: str
    arg: "Expr"
    sort: Sort


@dataclass(frozen=True)
class Temporal:
    """Unary temporal operator: F, P, G, H, X+, X-, F*, G*."""

    op: str
    arg: "Expr"


@dataclass(frozen=True)
class Until:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Since:
    left: "Expr"
    right: "Expr"


Expr = Union[Top, Bottom, Atom, Not, And, Or, Count, Select, Temporal, Until, Since]
TEMPORAL_OPS = ("F", "P", "G", "H", "X+", "X-", "F*", "G*")


def sort_of(e: Expr) -> Sort:
    if isinstance(e, (Top, Bottom, Atom, Select)):
        return e.sort
    if isinstance(e, Count):
        return VALUE if e.role == "To" else CONCEPT
    if isinstance(e, (Not, Temporal)):
        return sort_of(e.arg)
    if isinstance(e, (And, Or)):
        sorts = {sort_of(a) for a in e.args}
        if len(sorts) != 1:
            raise ArityMismatch(f"mixed sorts in {e}")
        return sorts.pop()
    if isinstance(e, (Until, Since)):
        a, b = sort_of(e.left), sort_of(e.right)
        if a != b:
            raise ArityMismatch(f"mixed sorts in {e}")
        return a
    raise TypeError(f"not an expression: {e!r}")


def conj(*args: Expr) -> Expr:
    flat = []
    for a in args:
        flat.extend(a.args if isinstance(a, And) else (a,))
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*args: Expr) -> Expr:
    flat = []
    for a in args:
        flat.extend(a.args if isinstance(a, Or) else (a,))
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def nxt(e: Expr, n: int = 1) -> Expr:
    for _ in range(n):
        e = Temporal("X+", e)
    return e


def prev(e: Expr, n: int = 1) -> Expr:
    for _ in range(n):
        e = Temporal("X-", e)
    return e


def exists(role: str, index: int, arg: Expr, k: int = 1, op: str = ">=") -> Count:
    return Count(op, k, index, role, arg)


def forall_from(attr: Expr, body: Expr) -> Expr:
    """``forall[From](A -> body)`` written as ``!exists[From](A & !body)``."""
    return Not(Count(">=", 1, 0, "From", conj(attr, Not(body))))


# knowledge bases -------------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    lhs: Expr
    rhs: Expr
    provenance: str = ""
    approximate: bool = False

    def __post_init__(self):
        if sort_of(self.lhs) != sort_of(self.rhs):
            raise ArityMismatch(f"axiom relates {sort_of(self.lhs)} to {sort_of(self.rhs)}")


@dataclass
class DlrKb:
    axioms: list = field(default_factory=list)
    definitions: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.axioms)


# translation ------------------------------------------------------------------------

def _concept(name):
    return Atom(name, CONCEPT)


def _subject_atom(schema: Schema, subject: Subject, name: str) -> Atom:
    if subject is Subject.CLASS:
        return Atom(name, CONCEPT)
    if subject is Subject.RELATIONSHIP:
        return Atom(name, relation(schema.rel_map[name].arity))
    return Atom(name, ATTRIBUTE)


def transition_set_name(c: TransitionConstraint, past_form: bool = False) -> str:
    """Name of the transition set, e.g. ``QCHG^3[A,B]`` or ``ext[A,B]``."""
    word = ("Q" if c.quantitative else "") + c.kind.value
    word += {Subject.CLASS: "", Subject.RELATIONSHIP: "R", Subject.ATTRIBUTE: "A"}[c.subject]
    if past_form:
        word = word.lower()
    if c.quantitative:
        word += f"^{c.offset}"
    return f"{word}[{c.source},{c.target}]"


def future_condition_expr(schema: Schema, c: TransitionConstraint) -> Expr:
    s, g = _subject_atom(schema, c.subject, c.source), _subject_atom(schema, c.subject, c.target)
    n = c.delay
    if c.kind is Kind.EXTENSION:
        return conj(s, Not(g), nxt(g, n))
    return conj(s, Not(g), nxt(conj(Not(s), g), n))


def past_condition_expr(schema: Schema, c: TransitionConstraint) -> Expr:
    s, g = _subject_atom(schema, c.subject, c.source), _subject_atom(schema, c.subject, c.target)
    n = c.delay
    if c.kind is Kind.EXTENSION:
        # "not in the target n steps ago"; out-of-window counts as not in it
        return conj(s, g, Not(prev(g, n)))
    return conj(Not(s), g, prev(conj(s, Not(g)), n))


def translate(schema: Schema, past_trigger: str = "target") -> DlrKb:
    """Knowledge base whose models are exactly the legal states."""
    kb = DlrKb()

    def add(lhs, rhs, prov, approximate=False):
        kb.axioms.append(Axiom(lhs, rhs, prov, approximate))

    top_d = Top(VALUE)
    classes = schema.sorted_classes()
    rels = schema.sorted_relationships()

    for qname in schema.sorted_attributes():
        a = Atom(qname, ATTRIBUTE)
        add(a, conj(Select(0, "From", Top(CONCEPT), ATTRIBUTE), Select(1, "To", top_d, ATTRIBUTE)),
            f"attribute {qname}")
    for sub, sup in sorted(schema.isa_c):
        add(_concept(sub), _concept(sup), f"isa {sub} {sup}")
    for sub, sup in sorted(schema.isa_r):
        n = schema.rel_map[sub].arity
        add(Atom(sub, relation(n)), Atom(sup, relation(n)), f"isar {sub} {sup}")
    for (r1, u1), (r2, u2) in sorted(schema.isa_u):
        R1, R2 = schema.rel_map[r1], schema.rel_map[r2]
        add(exists(u1, R1.role_index(u1), Atom(r1, relation(R1.arity))),
            exists(u2, R2.role_index(u2), Atom(r2, relation(R2.arity))),
            f"isau {r1}.{u1} {r2}.{u2}")
    for r in rels:
        n = r.arity
        add(Atom(r.name, relation(n)),
            conj(*(Select(i, u.name, _concept(u.player), relation(n)) for i, u in enumerate(r.roles))),
            f"rel {r.name}")
    for c in classes:
        if not c.attributes:
            continue
        parts = []
        for a in c.attributes:
            parts.append(exists("From", 0, Atom(f"{c.name}.{a.name}", ATTRIBUTE)))
        for a in c.attributes:
            att = Atom(f"{c.name}.{a.name}", ATTRIBUTE)
            parts.append(forall_from(att, Select(1, "To", Atom(a.domain, VALUE), ATTRIBUTE)))
        add(_concept(c.name), conj(*parts), f"att {c.name}")
    for r in rels:
        for i, u in enumerate(r.roles):
            if u.card is None:
                continue
            ra = Atom(r.name, relation(r.arity))
            rhs = [exists(u.name, i, ra, u.card.min)]
            if u.card.max is not None:
                rhs.append(exists(u.name, i, ra, u.card.max, "<="))
            add(_concept(u.player), conj(*rhs), f"card {u.player} {r.name}.{u.name} {u.card}")
    for c in classes:
        for a in c.attributes:
            if a.card is None:
                continue
            att = Atom(f"{c.name}.{a.name}", ATTRIBUTE)
            rhs = [exists("From", 0, att, a.card.min)]
            if a.card.max is not None:
                rhs.append(exists("From", 0, att, a.card.max, "<="))
            add(_concept(c.name), conj(*rhs), f"card {c.name}.{a.name} {a.card}")

    def groups(table):
        return sorted(table, key=lambda g: (g[1], sorted(g[0])))

    for members, parent in groups(schema.disj_c):
        ms = sorted(members)
        for i, m in enumerate(ms):
            add(_concept(m), conj(_concept(parent), *(Not(_concept(x)) for x in ms[i + 1:])),
                f"disjoint {{{', '.join(ms)}}} {parent}")
    for members, parent in groups(schema.disj_r):
        ms = sorted(members)
        n = schema.rel_map[parent].arity
        for i, m in enumerate(ms):
            add(Atom(m, relation(n)),
                conj(Atom(parent, relation(n)), *(Not(Atom(x, relation(n))) for x in ms[i + 1:])),
                f"disjointr {{{', '.join(ms)}}} {parent}")
    for members, parent in groups(schema.cover):
        ms = sorted(members)
        prov = f"cover {{{', '.join(ms)}}} {parent}"
        for m in ms:
            add(_concept(m), _concept(parent), prov)
        add(_concept(parent), disj(*(_concept(m) for m in ms)), prov)
    for cname, aname in sorted(schema.ids):
        att = Atom(f"{cname}.{aname}", ATTRIBUTE)
        always = Temporal("G*", att)
        prov = f"id {cname}.{aname}"
        add(_concept(cname), conj(exists("From", 0, always, 1), exists("From", 0, always, 1, "<=")), prov)
        add(top_d, Count("<=", 1, 1, "To", conj(att, Select(0, "From", _concept(cname), ATTRIBUTE))),
            prov, approximate=True)
        add(att, always, prov)

    def marked(temporality):
        items = [(_concept(c.name), f"class {c.name}") for c in classes if c.temporality is temporality]
        items += [(Atom(r.name, relation(r.arity)), f"rel {r.name}") for r in rels if r.temporality is temporality]
        items += [(Atom(q, ATTRIBUTE), f"attribute {q}") for q in schema.sorted_attributes()
                  if schema.attr_map[q][1].temporality is temporality]
        return items

    for atom, prov in marked(Temporality.SNAPSHOT):
        add(atom, Temporal("G*", atom), prov + " snapshot")
    for atom, prov in marked(Temporality.TEMPORARY):
        add(atom, Temporal("F*", Not(atom)), prov + " temporal")
    for c in classes:
        for a in c.attributes:
            if a.temporality is Temporality.SNAPSHOT:
                att = Atom(f"{c.name}.{a.name}", ATTRIBUTE)
                add(_concept(c.name), forall_from(att, Temporal("G*", att)), f"s {c.name}.{a.name}")
    for c in classes:
        for a in c.attributes:
            if a.temporality is Temporality.TEMPORARY:
                att = Atom(f"{c.name}.{a.name}", ATTRIBUTE)
                add(_concept(c.name), forall_from(att, Temporal("F*", Not(att))), f"t {c.name}.{a.name}")

    for c in schema.sorted_transitions():
        _translate_transition(schema, c, kb, add, past_trigger)
    return kb


def _translate_transition(schema, c, kb, add, past_trigger):
    from .text import format_transition

    prov = format_transition(c).rstrip(";")
    if c.kind is Kind.FROZEN:
        att = Atom(c.source, ATTRIBUTE)
        add(att, Temporal("G", att), prov)
        return
    sort = sort_of(_subject_atom(schema, c.subject, c.source))
    s, g = _subject_atom(schema, c.subject, c.source), _subject_atom(schema, c.subject, c.target)
    n = c.delay
    fut = Atom(transition_set_name(c), sort)
    if fut.name not in kb.definitions:
        kb.definitions[fut.name] = future_condition_expr(schema, c)
        add(fut, kb.definitions[fut.name], prov)
    if c.tense is Tense.FUTURE:
        if c.mandatory:
            add(s, Temporal("F", fut), prov)
        if c.persistent:
            add(fut, nxt(Temporal("G", g), n - 1), prov)
        return
    pst = Atom(transition_set_name(c, past_form=True), sort)
    kb.definitions[pst.name] = past_condition_expr(schema, c)
    add(pst, kb.definitions[pst.name], prov)
    if c.mandatory:
        trigger = g if past_trigger == "target" else s
        add(trigger, prev(Temporal("P", fut), n - 1), prov)
    if c.persistent:
        add(pst, Temporal("G", g), prov)


# evaluation --------------------------------------------------------------------------------

class Interpretation:
    """A temporal state seen as a DLR_US interpretation.

    ``definitions`` maps defined names to expressions; any other name must
    be a class, relationship, attribute or domain of the state.
    """

    def __init__(self, state: TemporalState, definitions: dict | None = None,
                 flow: str = "N", reach: int = 1, schema: Schema | None = None):
        self.state = state
        self.known = None if schema is None else (
            set(schema.class_map) | set(schema.rel_map) | set(schema.attr_map) | set(schema.domains))
        self.defs = dict(definitions or {})
        self.frame = TimeFrame(state.horizon, flow, reach)
        self.objects = frozenset(state.objects)
        self.values = state.values
        self._memo: dict = {}
        self._rel_top: dict = {}

    def universe(self, sort: Sort) -> frozenset:
        if sort == CONCEPT:
            return self.objects
        if sort == VALUE:
            return self.values
        if sort == ATTRIBUTE:
            return frozenset(product(self.objects, self.values))
        n = sort[1]
        if n not in self._rel_top:
            self._rel_top[n] = frozenset(product(self.objects, repeat=n))
        return self._rel_top[n]

    def _atom(self, e: Atom, t: int) -> frozenset:
        if e.name in self.defs:
            return self.eval(self.defs[e.name], t)
        i = self.frame.index(t)
        st = self.state
        if self.known is not None and e.name not in self.known:
            raise UnknownName(f"unknown name {e.name!r}")
        if e.sort == CONCEPT:
            return st.cls(e.name, i) if i is not None else frozenset()
        if e.sort == VALUE:
            if e.name not in st.domains:
                raise UnknownName(f"unknown domain {e.name!r}")
            return st.domains[e.name]
        if e.sort == ATTRIBUTE:
            return st.attr(e.name, i) if i is not None else frozenset()
        rows = st.relationships.get(e.name)
        if rows is not None and any(len(tup) != e.sort[1] for row in rows for tup in row):
            raise ArityMismatch(f"{e.name!r} is not {e.sort[1]}-ary")
        return st.rel(e.name, i) if i is not None else frozenset()

    def eval(self, e: Expr, t: int) -> frozenset:
        """Extension of ``e`` at time ``t``."""
        key = (e, t)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._eval(e, t)
        return hit

    def _eval(self, e: Expr, t: int) -> frozenset:
        H, low = self.frame.horizon, self.frame.low
        if isinstance(e, Top):
            return self.universe(e.sort)
        if isinstance(e, Bottom):
            return frozenset()
        if isinstance(e, Atom):
            return self._atom(e, t)
        if isinstance(e, Not):
            return self.universe(sort_of(e.arg)) - self.eval(e.arg, t)
        if isinstance(e, And):
            out = self.eval(e.args[0], t)
            for a in e.args[1:]:
                out = out & self.eval(a, t)
            return out
        if isinstance(e, Or):
            out = frozenset()
            for a in e.args:
                out = out | self.eval(a, t)
            return out
        if isinstance(e, Count):
            ext = self.eval(e.arg, t)
            counts: dict = {}
            for tup in ext:
                counts[tup[e.index]] = counts.get(tup[e.index], 0) + 1
            universe = self.values if e.role == "To" else self.objects
            if e.op == ">=":
                return frozenset(x for x in universe if counts.get(x, 0) >= e.k)
            return frozenset(x for x in universe if counts.get(x, 0) <= e.k)
        if isinstance(e, Select):
            keep = self.eval(e.arg, t)
            return frozenset(tup for tup in self.universe(e.sort) if tup[e.index] in keep)
        if isinstance(e, Temporal):
            op, a = e.op, e.arg
            if op == "X+":
                return self.eval(a, t + 1) if t + 1 < H else frozenset()
            if op == "X-":
                if t - 1 >= low:
                    return self.eval(a, t - 1)
                return self.eval(a, low) if self.frame.flow == "Z" else frozenset()
            if op in ("F", "P", "F*"):
                span = {"F": range(t + 1, H), "P": range(low, t), "F*": range(low, H)}[op]
                out = frozenset()
                for v in span:
                    out = out | self.eval(a, v)
                return out
            if op in ("G", "H", "G*"):
                span = {"G": range(t + 1, H), "H": range(low, t), "G*": range(low, H)}[op]
                out = self.universe(sort_of(a))
                for v in span:
                    out = out & self.eval(a, v)
                return out
            raise ValueError(f"unknown temporal operator {op!r}")
        if isinstance(e, Until):
            return self._until(e.left, e.right, range(t + 1, self.frame.horizon), lambda v: range(t + 1, v))
        if isinstance(e, Since):
            return self._until(e.left, e.right, range(low, t), lambda v: range(v + 1, t))
        raise TypeError(f"not an expression: {e!r}")

    def _until(self, left, right, points, between):
        out = frozenset()
        for v in points:
            here = self.eval(right, v)
            for w in between(v):
                if not here:
                    break
                here = here & self.eval(left, w)
            out = out | here
        return out


def eval_expr(expr: Expr, state: TemporalState, t: int, definitions: dict | None = None,
              flow: str = "N", schema: Schema | None = None) -> frozenset:
    reach = (max_offset(schema) if schema is not None else 1) + 1
    return Interpretation(state, definitions, flow, reach, schema).eval(expr, t)


@dataclass
class KbResult:
    ok: bool
    counterexamples: list

    def __bool__(self):
        return self.ok


def kb_satisfied(kb: DlrKb, state: TemporalState, flow: str = "N", schema: Schema | None = None,
                 limit: int | None = None) -> KbResult:
    """Check every axiom at every time point of the window.

    Counterexamples are ``(axiom, t, element)`` triples, at most ``limit``.
    """
    reach = (max_offset(schema) if schema is not None else _kb_reach(kb)) + 1
    interp = Interpretation(state, kb.definitions, flow, reach, schema)
    bad = []
    for ax in kb.axioms:
        for t in range(state.horizon):
            for x in sorted(interp.eval(ax.lhs, t) - interp.eval(ax.rhs, t), key=repr):
                bad.append((ax, t, x))
                if limit is not None and len(bad) >= limit:
                    return KbResult(False, bad)
    return KbResult(not bad, bad)


def _kb_reach(kb: DlrKb) -> int:
    depth = 1

    def walk(e, k):
        nonlocal depth
        if isinstance(e, Temporal) and e.op in ("X+", "X-"):
            k += 1
            depth = max(depth, k)
        for child in _children(e):
            walk(child, k)

    for ax in kb.axioms:
        walk(ax.lhs, 0)
        walk(ax.rhs, 0)
    for e in kb.definitions.values():
        walk(e, 0)
    return depth


def _children(e):
    if isinstance(e, (Not, Count, Select, Temporal)):
        return (e.arg,)
    if isinstance(e, (And, Or)):
        return e.args
    if isinstance(e, (Until, Since)):
        return (e.left, e.right)
    return ()


# ASCII serialization ------------------------------------------------------------------------

def _top_text(sort):
    if sort == CONCEPT:
        return "Top"
    if sort == VALUE:
        return "TopD"
    if sort == ATTRIBUTE:
        return "TopA"
    return f"Top{sort[1]}"


def format_expr(e: Expr) -> str:
    return _fmt(e, top=True)


def _fmt(e: Expr, top: bool = False) -> str:
    if isinstance(e, Top):
        return _top_text(e.sort)
    if isinstance(e, Bottom):
        return "Bot" if e.sort == CONCEPT else "Bot" + _top_text(e.sort)[3:]
    if isinstance(e, Atom):
        return e.name
    if isinstance(e, Not):
        return "!" + _fmt(e.arg)
    if isinstance(e, (And, Or)):
        sep = " & " if isinstance(e, And) else " | "
        text = sep.join(_fmt(a) for a in e.args)
        return text if top else f"({text})"
    if isinstance(e, Count):
        return f"exists{e.op}{e.k}[{e.role}]{_fmt(e.arg)}"
    if isinstance(e, Select):
        if e.sort == ATTRIBUTE:
            return f"{e.role}:{_fmt(e.arg)}"
        return f"[{e.role}/{e.sort[1]}]{_fmt(e.arg)}"
    if isinstance(e, Temporal):
        return f"{e.op} {_fmt(e.arg)}"
    if isinstance(e, (Until, Since)):
        op = "U" if isinstance(e, Until) else "S"
        return f"({_fmt(e.left)} {op} {_fmt(e.right)})"
    raise TypeError(f"not an expression: {e!r}")


def format_axiom(ax: Axiom) -> str:
    text = f"{format_expr(ax.lhs)} [= {format_expr(ax.rhs)}"
    note = ax.provenance + (" (approximate)" if ax.approximate else "")
    return f"{text}  # {note}" if note else text


def format_kb(kb: DlrKb) -> str:
    return "".join(format_axiom(ax) + "\n" for ax in kb.axioms)
