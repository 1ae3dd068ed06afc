"""A deliberately naive legality checker used as a test oracle.

Every constraint is expanded by exhaustive quantification over the object
domain, all tuples of objects, all (object, value) pairs and all time
points, with no shared code from :mod:`trend.semantics` beyond the state
accessors.  It returns flattened violation keys ``(rule, elements,
instance, t)``, the same identities that ``Violation.keys()`` yields.
"""

from __future__ import annotations

from itertools import product

from .model import Kind, Schema, Subject, Temporality, Tense


def naive_violations(schema: Schema, state, past_trigger: str = "target", flow: str = "N") -> set:
    H = state.horizon
    times = list(range(H))
    objs = sorted(state.objects)
    vals = sorted(state.values)
    pairs = [(o, v) for o in objs for v in vals]
    reach = max([c.delay for c in schema.transitions] + [1]) + 1
    low = -reach if flow == "Z" else 0
    keys = set()

    def at(t):
        if 0 <= t < H:
            return t
        if t < 0 and flow == "Z":
            return 0
        return None

    def in_c(C, o, t):
        i = at(t)
        return i is not None and o in state.classes.get(C, [frozenset()] * H)[i]

    def in_r(R, tup, t):
        i = at(t)
        return i is not None and tup in state.relationships.get(R, [frozenset()] * H)[i]

    def in_a(A, pair, t):
        i = at(t)
        return i is not None and pair in state.attributes.get(A, [frozenset()] * H)[i]

    def member(subject, name, inst, t):
        if subject is Subject.CLASS:
            return in_c(name, inst[0], t)
        if subject is Subject.RELATIONSHIP:
            return in_r(name, inst, t)
        return in_a(name, inst, t)

    def tuples(R):
        return list(product(objs, repeat=schema.rel_map[R].arity))

    def add(rule, elements, inst, t):
        keys.add((rule, tuple(elements), tuple(inst), t))

    # inclusions
    for t in times:
        for sub, sup in schema.isa_c:
            for o in objs:
                if in_c(sub, o, t) and not in_c(sup, o, t):
                    add("isa_C", (sub, sup), (o,), t)
        for sub, sup in schema.isa_r:
            for r in tuples(sub):
                if in_r(sub, r, t) and not in_r(sup, r, t):
                    add("isa_R", (sub, sup), r, t)
        for (r1, u1), (r2, u2) in schema.isa_u:
            i1 = [u.name for u in schema.rel_map[r1].roles].index(u1)
            i2 = [u.name for u in schema.rel_map[r2].roles].index(u2)
            for o in objs:
                plays1 = any(in_r(r1, r, t) and r[i1] == o for r in tuples(r1))
                plays2 = any(in_r(r2, r, t) and r[i2] == o for r in tuples(r2))
                if plays1 and not plays2:
                    add("isa_U", (f"{r1}.{u1}", f"{r2}.{u2}"), (o,), t)

    # role typing and cardinalities
    for R in schema.rel_map.values():
        for t in times:
            for r in tuples(R.name):
                if not in_r(R.name, r, t):
                    continue
                for i, u in enumerate(R.roles):
                    if not in_c(u.player, r[i], t):
                        add("rel", (R.name, u.player), r, t)
            for i, u in enumerate(R.roles):
                if u.card is None:
                    continue
                for o in objs:
                    if not in_c(u.player, o, t):
                        continue
                    n = len([r for r in tuples(R.name) if in_r(R.name, r, t) and r[i] == o])
                    if n < u.card.min or (u.card.max is not None and n > u.card.max):
                        add("card_R", (u.player, R.name, u.name), (o,), t)

    # attribute existence and cardinality
    for C in schema.class_map.values():
        for a in C.attributes:
            A = f"{C.name}.{a.name}"
            for t in times:
                for o in objs:
                    if not in_c(C.name, o, t):
                        continue
                    n = len([v for v in vals if in_a(A, (o, v), t)])
                    if n == 0:
                        add("att", (C.name, A), (o,), t)
                    if a.card is not None and (n < a.card.min or (a.card.max is not None and n > a.card.max)):
                        add("card_A", (C.name, A), (o,), t)

    # disjointness and covering
    for t in times:
        for members, parent in schema.disj_c:
            ms = sorted(members)
            for o in objs:
                for m in ms:
                    if in_c(m, o, t) and not in_c(parent, o, t):
                        add("disj_C", (m, parent), (o,), t)
                for i in range(len(ms)):
                    for j in range(i + 1, len(ms)):
                        if in_c(ms[i], o, t) and in_c(ms[j], o, t):
                            add("disj_C", (ms[i], ms[j]), (o,), t)
        for members, parent in schema.disj_r:
            ms = sorted(members)
            for r in tuples(parent):
                for m in ms:
                    if in_r(m, r, t) and not in_r(parent, r, t):
                        add("disj_R", (m, parent), r, t)
                for i in range(len(ms)):
                    for j in range(i + 1, len(ms)):
                        if in_r(ms[i], r, t) and in_r(ms[j], r, t):
                            add("disj_R", (ms[i], ms[j]), r, t)
        for members, parent in schema.cover:
            ms = sorted(members)
            for o in objs:
                for m in ms:
                    if in_c(m, o, t) and not in_c(parent, o, t):
                        add("cover", (m, parent), (o,), t)
                if in_c(parent, o, t) and not any(in_c(m, o, t) for m in ms):
                    add("cover", (parent, *ms), (o,), t)

    # snapshot / temporal markings
    def marking(kind, name, temporality, universe, holds):
        for t in times:
            for x in universe:
                if not holds(x, t):
                    continue
                if temporality is Temporality.SNAPSHOT:
                    if any(not holds(x, u) for u in times):
                        add(f"snapshot-{kind}", (name,), x, t)
                elif temporality is Temporality.TEMPORARY:
                    if not any(u != t and not holds(x, u) for u in times):
                        add(f"temporal-{kind}", (name,), x, t)

    for C in schema.class_map.values():
        marking("class", C.name, C.temporality, [(o,) for o in objs], lambda x, t, C=C: in_c(C.name, x[0], t))
    for R in schema.rel_map.values():
        marking("rel", R.name, R.temporality, tuples(R.name), lambda x, t, R=R: in_r(R.name, x, t))
    for A, (C, a) in schema.attr_map.items():
        marking("attr", A, a.temporality, pairs, lambda x, t, A=A: in_a(A, x, t))
        for t in times:
            for p in pairs:
                if not (in_c(C.name, p[0], t) and in_a(A, p, t)):
                    continue
                if a.temporality is Temporality.SNAPSHOT and any(not in_a(A, p, u) for u in times):
                    add("s-attr", (C.name, A), p, t)
                if a.temporality is Temporality.TEMPORARY and not any(
                        u != t and not in_a(A, p, u) for u in times):
                    add("t-attr", (C.name, A), p, t)

    # identifiers
    for C, aname in schema.ids:
        A = f"{C}.{aname}"
        for t in times:
            for d in vals:
                if len([o for o in objs if in_c(C, o, t) and in_a(A, (o, d), t)]) > 1:
                    add("id", (C, A), (d,), t)
            for p in pairs:
                if in_a(A, p, t) and any(not in_a(A, p, u) for u in times):
                    add("id-snapshot", (C, A), p, t)
            for o in objs:
                if in_c(C, o, t):
                    permanent = [d for d in vals if all(in_a(A, (o, d), u) for u in times)]
                    if len(permanent) != 1:
                        add("id-single", (C, A), (o,), t)

    # transitions
    for c in schema.transitions:
        if c.subject is Subject.CLASS:
            universe = [(o,) for o in objs]
        elif c.subject is Subject.RELATIONSHIP:
            universe = tuples(c.source)
        else:
            universe = pairs
        n = c.offset if c.offset is not None else 1

        if c.kind is Kind.FROZEN:
            for x in universe:
                for t in times:
                    if in_a(c.source, x, t) and not all(in_a(c.source, x, u) for u in times if u > t):
                        add("FRZ", (c.source,), x, t)
            continue

        def fut(x, t, c=c, n=n):
            s, g = c.source, c.target
            cond = member(c.subject, s, x, t) and not member(c.subject, g, x, t) and member(c.subject, g, x, t + n)
            if c.kind is Kind.CHANGE:
                cond = cond and not member(c.subject, s, x, t + n)
            return cond

        def past(x, t, c=c, n=n):
            s, g = c.source, c.target
            if c.kind is Kind.EXTENSION:
                return member(c.subject, s, x, t) and member(c.subject, g, x, t) and not member(c.subject, g, x, t - n)
            return (not member(c.subject, s, x, t) and member(c.subject, g, x, t)
                    and member(c.subject, s, x, t - n) and not member(c.subject, g, x, t - n))

        for x in universe:
            for t in times:
                if c.mandatory:
                    if c.tense is Tense.FUTURE:
                        if member(c.subject, c.source, x, t) and not any(fut(x, u) for u in times if u > t):
                            add(c.label, (c.source, c.target), x, t)
                    else:
                        trig = c.target if past_trigger == "target" else c.source
                        if member(c.subject, trig, x, t) and not any(
                                fut(x, u) for u in range(low, t) if u + n <= t):
                            add(c.label, (c.source, c.target), x, t)
                if c.persistent:
                    if c.tense is Tense.FUTURE:
                        bad = fut(x, t) and any(not member(c.subject, c.target, x, u) for u in times if u >= t + n)
                    else:
                        bad = past(x, t) and any(not member(c.subject, c.target, x, u) for u in times if u > t)
                    if bad:
                        add("P" + c.label, (c.source, c.target), x, t)
    return keys
