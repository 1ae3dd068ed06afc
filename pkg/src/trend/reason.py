"""Bounded reasoning: satisfiability, subsumption and logical implication.

Each search cell fixes a horizon ``h`` and an object count ``k``.  The
schema's constraints are grounded over the cell into propositional
clauses (one variable per possible class, relationship and attribute
membership) and solved with :mod:`trend.sat`.  Cells are explored with
horizons ``1..H`` outermost, then object counts ``1..K``; the first cell
with a solution wins.  Within a cell, goal anchors (time, instance) are
tried in order and the lexicographically least state is returned, so
results are deterministic.

All answers hold up to the bounds and under the finite-trace convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product

from .errors import KindMismatch, UnknownElement
from .model import (
    ClassDecl, Isa, Kind, RelDecl, Schema, Subject, Temporality, Tense, Attribute, Role,
    build_schema,
)
from .sat import Solver, lex_min_model
from .semantics import (
    DEFAULT, Semantics, TemporalState, TimeFrame, Violation, check_state, max_offset, state_to_json,
)

TRUE = True
FALSE = False


@dataclass(frozen=True)
class Bounds:
    max_objects: int = 2
    max_horizon: int = 3
    max_domain_values: int = 2

    def __post_init__(self):
        if min(self.max_objects, self.max_horizon, self.max_domain_values) < 1:
            raise ValueError("all bounds must be at least 1")

    def cells(self):
        return [(h, k) for h in range(1, self.max_horizon + 1) for k in range(1, self.max_objects + 1)]

    def describe(self) -> str:
        return f"{self.max_objects} objects, {self.max_horizon} time points"


# results ---------------------------------------------------------------------------

@dataclass
class Witness:
    state: TemporalState
    element: str
    instance: tuple
    time: int
    schema: Schema = field(repr=False)
    verdict = "satisfiable"

    def describe(self) -> str:
        return (f"witness: {self.element} contains {', '.join(self.instance)} at t={self.time} "
                f"(horizon {self.state.horizon}, {len(self.state.objects)} objects)")

    def to_json(self) -> dict:
        data = state_to_json(self.state, self.schema)
        data["verdict"] = {"result": self.verdict, "element": self.element,
                           "instance": list(self.instance), "time": self.time}
        return data


@dataclass
class ExhaustedBounds:
    bounds: Bounds
    searched: list
    verdict = "no witness up to bounds"

    def describe(self) -> str:
        return f"no witness up to bounds ({self.bounds.describe()}); finite-trace semantics"

    def to_json(self) -> dict:
        return {"verdict": {"result": self.verdict, "bounds": vars(self.bounds),
                            "searched": [list(c) for c in self.searched]}}


@dataclass
class Counterexample:
    state: TemporalState
    instance: tuple
    time: int
    violations: list
    schema: Schema = field(repr=False)
    verdict = "counterexample"

    def describe(self) -> str:
        return (f"counterexample: ({', '.join(self.instance)}) at t={self.time} "
                f"(horizon {self.state.horizon}, {len(self.state.objects)} objects)")

    def to_json(self) -> dict:
        data = state_to_json(self.state, self.schema)
        data["verdict"] = {"result": self.verdict, "instance": list(self.instance), "time": self.time,
                           "violations": [v.to_json() for v in self.violations]}
        return data


@dataclass
class HoldsUpToBounds:
    bounds: Bounds
    searched: list
    verdict = "holds up to bounds"

    def describe(self) -> str:
        return f"holds up to bounds ({self.bounds.describe()}); finite-trace semantics"

    def to_json(self) -> dict:
        return {"verdict": {"result": self.verdict, "bounds": vars(self.bounds),
                            "searched": [list(c) for c in self.searched]}}


def result_json(result) -> str:
    return json.dumps(result.to_json(), indent=2) + "\n"


# formulas: True/False, int literals, ("and", tuple), ("or", tuple) --------------------------

def f_and(*xs):
    out = []
    for x in xs:
        if x is FALSE:
            return FALSE
        if x is TRUE:
            continue
        if isinstance(x, tuple) and x[0] == "and":
            out.extend(x[1])
        else:
            out.append(x)
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else ("and", tuple(out))


def f_or(*xs):
    out = []
    for x in xs:
        if x is TRUE:
            return TRUE
        if x is FALSE:
            continue
        if isinstance(x, tuple) and x[0] == "or":
            out.extend(x[1])
        else:
            out.append(x)
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else ("or", tuple(out))


def f_not(x):
    if x is TRUE:
        return FALSE
    if x is FALSE:
        return TRUE
    if isinstance(x, int):
        return -x
    op, args = x
    return (f_or if op == "and" else f_and)(*(f_not(a) for a in args))


def f_implies(a, b):
    return f_or(f_not(a), b)


def at_least(k, xs):
    xs = list(xs)
    if k <= 0:
        return TRUE
    if k > len(xs):
        return FALSE
    return f_and(*(f_or(*group) for group in combinations(xs, len(xs) - k + 1)))


def at_most(k, xs):
    xs = list(xs)
    if k >= len(xs):
        return TRUE
    return f_and(*(f_or(*(f_not(x) for x in group)) for group in combinations(xs, k + 1)))


@dataclass(frozen=True)
class Ground:
    """One grounded constraint instance."""

    rule: str
    elements: tuple
    instance: tuple
    time: int
    formula: object


class Grounding:
    """Propositional encoding of states within one search cell."""

    def __init__(self, schema: Schema, horizon: int, n_objects: int, n_values: int,
                 semantics: Semantics = DEFAULT):
        self.schema = schema
        self.H = horizon
        self.objects = [f"o{i}" for i in range(n_objects)]
        id_domains = {schema.domain_of(f"{c}.{a}") for c, a in schema.ids}
        self.domains = {
            d: [f"{d}_{i}" for i in range(max(n_values, n_objects) if d in id_domains else n_values)]
            for d in schema.domains
        }
        self.semantics = semantics
        self.frame = TimeFrame(horizon, semantics.flow, max_offset(schema) + 1)
        self.solver = Solver()
        self.var_key: dict[int, tuple] = {}
        self.key_var: dict[tuple, int] = {}
        self._gates: dict = {}
        self._true = None
        for t in range(horizon):
            for c in schema.sorted_classes():
                for o in self.objects:
                    self._primary(("c", c.name, (o,), t))
            for r in schema.sorted_relationships():
                for tup in product(self.objects, repeat=r.arity):
                    self._primary(("r", r.name, tup, t))
            for q in schema.sorted_attributes():
                for o in self.objects:
                    for v in self.domains[schema.domain_of(q)]:
                        self._primary(("a", q, (o, v), t))
        self.primaries = sorted(self.var_key)

    def _primary(self, key):
        v = self.solver.new_var()
        self.var_key[v] = key
        self.key_var[key] = v

    # atoms

    def member(self, subject: Subject, name: str, inst: tuple, t: int):
        i = self.frame.index(t)
        if i is None:
            return FALSE
        tag = {Subject.CLASS: "c", Subject.RELATIONSHIP: "r", Subject.ATTRIBUTE: "a"}[subject]
        return self.key_var[(tag, name, inst, i)]

    def c(self, name, o, t):
        return self.member(Subject.CLASS, name, (o,), t)

    def r(self, name, tup, t):
        return self.member(Subject.RELATIONSHIP, name, tup, t)

    def a(self, name, pair, t):
        return self.member(Subject.ATTRIBUTE, name, pair, t)

    def universe(self, subject: Subject, name: str) -> list[tuple]:
        if subject is Subject.CLASS:
            return [(o,) for o in self.objects]
        if subject is Subject.RELATIONSHIP:
            return list(product(self.objects, repeat=self.schema.rel_map[name].arity))
        return [(o, v) for o in self.objects for v in self.domains[self.schema.domain_of(name)]]

    # Tseitin encoding

    def literal(self, f) -> int:
        if f is TRUE or f is FALSE:
            if self._true is None:
                self._true = self.solver.new_var()
                self.solver.add_clause([self._true])
            return self._true if f is TRUE else -self._true
        if isinstance(f, int):
            return f
        op, args = f
        lits = tuple(sorted({self.literal(a) for a in args}))
        key = (op, lits)
        g = self._gates.get(key)
        if g is not None:
            return g
        g = self.solver.new_var()
        self._gates[key] = g
        if op == "and":
            for l in lits:
                self.solver.add_clause([-g, l])
            self.solver.add_clause([g, *(-l for l in lits)])
        else:
            self.solver.add_clause([-g, *lits])
            for l in lits:
                self.solver.add_clause([g, -l])
        return g

    def require(self, f) -> None:
        if f is TRUE:
            return
        if f is FALSE:
            self.solver.add_clause([])
        elif isinstance(f, int):
            self.solver.add_clause([f])
        elif f[0] == "and":
            for a in f[1]:
                self.require(a)
        else:
            self.solver.add_clause([self.literal(a) for a in f[1]])

    # decoding

    def decode(self, model: dict) -> TemporalState:
        classes, rels, attrs = {}, {}, {}
        for v in self.primaries:
            if not model[v]:
                continue
            tag, name, inst, t = self.var_key[v]
            table = {"c": classes, "r": rels, "a": attrs}[tag]
            item = inst[0] if tag == "c" else inst
            table.setdefault(name, {}).setdefault(t, []).append(item)
        return TemporalState.build(
            self.H, self.objects, classes, rels, attrs,
            domains={d: set(vs) for d, vs in self.domains.items()})


def ground_constraints(g: Grounding, schema: Schema | None = None) -> list[Ground]:
    """Ground every constraint of ``schema`` (default: the grounding's own)."""
    schema = schema or g.schema
    T = range(g.H)
    objs = g.objects
    out: list[Ground] = []
    emit = lambda rule, el, inst, t, f: out.append(Ground(rule, tuple(el), tuple(inst), t, f))  # noqa: E731

    for t in T:
        for sub, sup in sorted(schema.isa_c):
            for o in objs:
                emit("isa_C", (sub, sup), (o,), t, f_implies(g.c(sub, o, t), g.c(sup, o, t)))
        for sub, sup in sorted(schema.isa_r):
            for tup in g.universe(Subject.RELATIONSHIP, sub):
                emit("isa_R", (sub, sup), tup, t, f_implies(g.r(sub, tup, t), g.r(sup, tup, t)))
        for (r1, u1), (r2, u2) in sorted(schema.isa_u):
            i1, i2 = schema.rel_map[r1].role_index(u1), schema.rel_map[r2].role_index(u2)
            for o in objs:
                p1 = f_or(*(g.r(r1, tup, t) for tup in g.universe(Subject.RELATIONSHIP, r1) if tup[i1] == o))
                p2 = f_or(*(g.r(r2, tup, t) for tup in g.universe(Subject.RELATIONSHIP, r2) if tup[i2] == o))
                emit("isa_U", (f"{r1}.{u1}", f"{r2}.{u2}"), (o,), t, f_implies(p1, p2))
        for rel in schema.sorted_relationships():
            for tup in g.universe(Subject.RELATIONSHIP, rel.name):
                for i, role in enumerate(rel.roles):
                    emit("rel", (rel.name, role.player), tup, t,
                         f_implies(g.r(rel.name, tup, t), g.c(role.player, tup[i], t)))
            for i, role in enumerate(rel.roles):
                if role.card is None:
                    continue
                for o in objs:
                    xs = [g.r(rel.name, tup, t) for tup in g.universe(Subject.RELATIONSHIP, rel.name) if tup[i] == o]
                    bound = f_and(at_least(role.card.min, xs),
                                  TRUE if role.card.max is None else at_most(role.card.max, xs))
                    emit("card_R", (role.player, rel.name, role.name), (o,), t,
                         f_implies(g.c(role.player, o, t), bound))
        for cd in schema.sorted_classes():
            for a in cd.attributes:
                q = f"{cd.name}.{a.name}"
                for o in objs:
                    xs = [g.a(q, (o, v), t) for v in g.domains[a.domain]]
                    emit("att", (cd.name, q), (o,), t, f_implies(g.c(cd.name, o, t), f_or(*xs)))
                    if a.card is not None:
                        bound = f_and(at_least(a.card.min, xs),
                                      TRUE if a.card.max is None else at_most(a.card.max, xs))
                        emit("card_A", (cd.name, q), (o,), t, f_implies(g.c(cd.name, o, t), bound))
        for members, parent in sorted(schema.disj_c, key=lambda x: (x[1], sorted(x[0]))):
            ms = sorted(members)
            for o in objs:
                for m in ms:
                    emit("disj_C", (m, parent), (o,), t, f_implies(g.c(m, o, t), g.c(parent, o, t)))
                for i, x in enumerate(ms):
                    for y in ms[i + 1:]:
                        emit("disj_C", (x, y), (o,), t, f_not(f_and(g.c(x, o, t), g.c(y, o, t))))
        for members, parent in sorted(schema.disj_r, key=lambda x: (x[1], sorted(x[0]))):
            ms = sorted(members)
            for tup in g.universe(Subject.RELATIONSHIP, parent):
                for m in ms:
                    emit("disj_R", (m, parent), tup, t, f_implies(g.r(m, tup, t), g.r(parent, tup, t)))
                for i, x in enumerate(ms):
                    for y in ms[i + 1:]:
                        emit("disj_R", (x, y), tup, t, f_not(f_and(g.r(x, tup, t), g.r(y, tup, t))))
        for members, parent in sorted(schema.cover, key=lambda x: (x[1], sorted(x[0]))):
            ms = sorted(members)
            for o in objs:
                for m in ms:
                    emit("cover", (m, parent), (o,), t, f_implies(g.c(m, o, t), g.c(parent, o, t)))
                emit("cover", (parent, *ms), (o,), t,
                     f_implies(g.c(parent, o, t), f_or(*(g.c(m, o, t) for m in ms))))

    def marking(kind, subject, name, temporality, label):
        if temporality is Temporality.MIXED:
            return
        for x in g.universe(subject, name):
            for t in T:
                here = g.member(subject, name, x, t)
                if temporality is Temporality.SNAPSHOT:
                    body = f_and(*(g.member(subject, name, x, u) for u in T))
                    emit(f"snapshot-{kind}", (label,), x, t, f_implies(here, body))
                else:
                    body = f_or(*(f_not(g.member(subject, name, x, u)) for u in T if u != t))
                    emit(f"temporal-{kind}", (label,), x, t, f_implies(here, body))

    for cd in schema.sorted_classes():
        marking("class", Subject.CLASS, cd.name, cd.temporality, cd.name)
    for rel in schema.sorted_relationships():
        marking("rel", Subject.RELATIONSHIP, rel.name, rel.temporality, rel.name)
    for q in schema.sorted_attributes():
        owner, a = schema.attr_map[q]
        marking("attr", Subject.ATTRIBUTE, q, a.temporality, q)
        if a.temporality is Temporality.MIXED:
            continue
        for p in g.universe(Subject.ATTRIBUTE, q):
            for t in T:
                here = f_and(g.c(owner.name, p[0], t), g.a(q, p, t))
                if a.temporality is Temporality.SNAPSHOT:
                    emit("s-attr", (owner.name, q), p, t, f_implies(here, f_and(*(g.a(q, p, u) for u in T))))
                else:
                    emit("t-attr", (owner.name, q), p, t,
                         f_implies(here, f_or(*(f_not(g.a(q, p, u)) for u in T if u != t))))

    for cname, aname in sorted(schema.ids):
        q = f"{cname}.{aname}"
        values = g.domains[schema.domain_of(q)]
        for t in T:
            for d in values:
                emit("id", (cname, q), (d,), t,
                     at_most(1, [f_and(g.c(cname, o, t), g.a(q, (o, d), t)) for o in objs]))
            for p in g.universe(Subject.ATTRIBUTE, q):
                emit("id-snapshot", (cname, q), p, t,
                     f_implies(g.a(q, p, t), f_and(*(g.a(q, p, u) for u in T))))
            for o in objs:
                permanent = [f_and(*(g.a(q, (o, d), u) for u in T)) for d in values]
                emit("id-single", (cname, q), (o,), t,
                     f_implies(g.c(cname, o, t), f_and(at_least(1, permanent), at_most(1, permanent))))

    sem = g.semantics
    for c in schema.sorted_transitions():
        if c.kind is Kind.FROZEN:
            for p in g.universe(Subject.ATTRIBUTE, c.source):
                for t in T:
                    emit("FRZ", (c.source,), p, t,
                         f_implies(g.a(c.source, p, t), f_and(*(g.a(c.source, p, u) for u in T if u > t))))
            continue
        if not (c.mandatory or c.persistent):
            continue
        n = c.delay
        m = lambda name, x, u, c=c: g.member(c.subject, name, x, u)  # noqa: E731

        def fut(x, u, c=c, m=m, n=n):
            f = f_and(m(c.source, x, u), f_not(m(c.target, x, u)), m(c.target, x, u + n))
            if c.kind is Kind.CHANGE:
                f = f_and(f, f_not(m(c.source, x, u + n)))
            return f

        def past(x, u, c=c, m=m, n=n):
            if c.kind is Kind.EXTENSION:
                return f_and(m(c.source, x, u), m(c.target, x, u), f_not(m(c.target, x, u - n)))
            return f_and(f_not(m(c.source, x, u)), m(c.target, x, u),
                         m(c.source, x, u - n), f_not(m(c.target, x, u - n)))

        for x in g.universe(c.subject, c.source):
            for t in T:
                if c.mandatory:
                    if c.tense is Tense.FUTURE:
                        f = f_implies(m(c.source, x, t), f_or(*(fut(x, u) for u in range(t + 1, g.H))))
                    else:
                        trig = c.target if sem.past_trigger == "target" else c.source
                        f = f_implies(m(trig, x, t), f_or(*(fut(x, u) for u in g.frame.before(t - n + 1))))
                    emit(c.label, (c.source, c.target), x, t, f)
                if c.persistent:
                    if c.tense is Tense.FUTURE:
                        f = f_implies(fut(x, t), f_and(*(m(c.target, x, u) for u in range(t + n, g.H))))
                    else:
                        f = f_implies(past(x, t), f_and(*(m(c.target, x, u) for u in range(t + 1, g.H))))
                    emit("P" + c.label, (c.source, c.target), x, t, f)
    return out


# services ----------------------------------------------------------------------------------

def _kind_of(schema: Schema, name: str) -> Subject:
    if name in schema.class_map:
        return Subject.CLASS
    if name in schema.rel_map:
        return Subject.RELATIONSHIP
    raise UnknownElement(f"unknown class or relationship {name!r}")


def _search(schema, bounds, semantics, anchors_for):
    """Explore cells; return (grounding, anchor, model) of the first solution."""
    searched = []
    for h, k in bounds.cells():
        g = Grounding(schema, h, k, bounds.max_domain_values, semantics)
        for gc in ground_constraints(g):
            g.require(gc.formula)
        searched.append((h, k))
        anchors = anchors_for(g)
        lits = [(a, g.literal(f)) for a, f in anchors if f is not FALSE]
        if not lits:
            continue
        selector = g.solver.new_var()
        g.solver.add_clause([-selector, *(l for _, l in lits)])
        if not g.solver.solve([selector]):
            continue
        for anchor, lit in lits:
            model = lex_min_model(g.solver, g.primaries, [lit])
            if model is not None:
                return g, anchor, model, searched
    return None, None, None, searched


def find_witness(schema: Schema, element: str, bounds: Bounds = Bounds(),
                 semantics: Semantics = DEFAULT):
    """A legal state where ``element`` is nonempty, or :class:`ExhaustedBounds`."""
    subject = _kind_of(schema, element)

    def anchors(g):
        return [((x, t), g.member(subject, element, x, t))
                for t in range(g.H) for x in g.universe(subject, element)]

    g, anchor, model, searched = _search(schema, bounds, semantics, anchors)
    if g is None:
        return ExhaustedBounds(bounds, searched)
    state = g.decode(model)
    problems = check_state(schema, state, semantics)
    assert not problems, f"internal error: witness is not legal: {problems}"
    inst, t = anchor
    assert inst in state.extension(subject, element, t)
    return Witness(state, element, inst, t, schema)


def signature(schema: Schema) -> list:
    """Declarations of the schema's vocabulary with no constraints attached."""
    decls = [ClassDecl(c.name, Temporality.MIXED,
                       tuple(Attribute(a.name, a.domain) for a in c.attributes))
             for c in schema.sorted_classes()]
    decls += [RelDecl(r.name, tuple(Role(u.name, u.player) for u in r.roles))
              for r in schema.sorted_relationships()]
    return decls


def candidate_schema(schema: Schema, candidate) -> Schema:
    """Signature of ``schema`` plus the single candidate constraint."""
    decls = signature(schema)
    if isinstance(candidate, ClassDecl):
        if candidate.name not in schema.class_map:
            raise UnknownElement(f"unknown class {candidate.name!r}")
        decls = [ClassDecl(d.name, candidate.temporality, d.attributes)
                 if isinstance(d, ClassDecl) and d.name == candidate.name else d for d in decls]
        return build_schema(decls)
    return build_schema([*decls, candidate])


_SIGNATURE_RULES = {"att", "rel"}


def check_implication(schema: Schema, candidate, bounds: Bounds = Bounds(),
                      semantics: Semantics = DEFAULT):
    """Search for a legal state of ``schema`` that violates ``candidate``.

    ``candidate`` is a raw declaration (see :func:`trend.text.parse_constraint`).
    """
    target = candidate_schema(schema, candidate)

    def anchors(g):
        goals = [gc for gc in ground_constraints(g, target) if gc.rule not in _SIGNATURE_RULES]
        goals.sort(key=lambda gc: gc.time)
        return [((gc.instance, gc.time), f_not(gc.formula)) for gc in goals]

    g, anchor, model, searched = _search(schema, bounds, semantics, anchors)
    if g is None:
        return HoldsUpToBounds(bounds, searched)
    state = g.decode(model)
    problems = check_state(schema, state, semantics)
    assert not problems, f"internal error: counterexample is not legal: {problems}"
    violations = [v for v in check_state(target, state, semantics) if v.rule not in _SIGNATURE_RULES]
    assert violations, "internal error: counterexample satisfies the candidate"
    inst, t = anchor
    return Counterexample(state, inst, t, violations, schema)


def check_subsumption(schema: Schema, sub: str, sup: str, bounds: Bounds = Bounds(),
                      semantics: Semantics = DEFAULT):
    """Whether every legal state puts ``sub`` inside ``sup``, up to bounds."""
    k1, k2 = _kind_of(schema, sub), _kind_of(schema, sup)
    if k1 is not k2:
        raise KindMismatch(f"{sub!r} and {sup!r} are not both classes or both relationships")
    if k1 is Subject.RELATIONSHIP and schema.rel_map[sub].arity != schema.rel_map[sup].arity:
        raise KindMismatch(f"{sub!r} and {sup!r} have different arities")
    if sub == sup:
        return HoldsUpToBounds(bounds, [])
    return check_implication(schema, Isa(sub, sup, k1), bounds, semantics)


def violated_by(violations: list[Violation]) -> set[str]:
    return {v.rule for v in violations}
