import pytest
from hypothesis import given, settings, strategies as st

from gen import random_schema, random_state
from trend.dlr import (
    Atom, Axiom, Bottom, DlrKb, Not, Temporal, Top, Until, eval_expr, format_axiom, format_kb,
    kb_satisfied, relation, translate,
)
from trend.errors import ArityMismatch, UnknownName
from trend.model import Schema
from trend.semantics import Semantics, TemporalState, check_state
from trend.text import parse_schema

C, C1, C2 = Atom("C"), Atom("C1"), Atom("C2")


def test_isa_axiom():
    kb = translate(parse_schema("class C1; class C2; isa C1 C2;"))
    assert any(ax.lhs == C1 and ax.rhs == C2 for ax in kb.axioms)


def test_temporary_class_axiom(staff):
    kb = translate(staff)
    ax = [a for a in kb.axioms if a.lhs == Atom("Academic") and a.provenance.endswith("temporal")]
    assert format_axiom(ax[0]) == "Academic [= F* !Academic  # class Academic temporal"


def test_empty_schema_gives_empty_kb():
    assert len(translate(Schema())) == 0


def test_top_is_every_object():
    state = TemporalState.build(2, ["a", "b"])
    assert eval_expr(Top(), state, 1) == {"a", "b"}


def test_eventually():
    state = TemporalState.build(3, ["o", "p"], {"C": {2: ["o"]}})
    assert eval_expr(Temporal("F", C), state, 0) == {"o"}
    assert eval_expr(Temporal("F", C), state, 2) == frozenset()


def test_until_expansion():
    state = TemporalState.build(3, ["o"], {"C1": {1: ["o"]}, "C2": {2: ["o"]}})
    assert eval_expr(Until(C1, C2), state, 0) == {"o"}
    gap = TemporalState.build(3, ["o"], {"C2": {2: ["o"]}})
    assert eval_expr(Until(C1, C2), gap, 0) == frozenset()


def test_empty_kb_always_holds():
    assert kb_satisfied(DlrKb(), TemporalState.build(1, ["o"])).ok


def test_counterexample_is_reported():
    kb = DlrKb([Axiom(C1, C2, "isa C1 C2")])
    state = TemporalState.build(2, ["o"], {"C1": {1: ["o"]}})
    result = kb_satisfied(kb, state)
    assert not result
    assert result.counterexamples == [(kb.axioms[0], 1, "o")]


def test_staff_legal_state(staff):
    state = TemporalState.build(
        3, ["o"], {"Employee": {0: ["o"], 1: ["o"], 2: ["o"]}, "Academic": {1: ["o"]}, "EmeritusProf": {2: ["o"]}},
        attributes={"Employee.UID": {0: [("o", 1)], 1: [("o", 2)], 2: [("o", 1)]},
                    "Academic.Bonus": {1: [("o", "m")]}, "Academic.Subvention": {1: [("o", "m")]}},
        domains={"Integer": {1, 2}, "Money": {"m"}})
    assert check_state(staff, state) == []
    assert kb_satisfied(translate(staff), state, schema=staff).ok


def test_sort_mismatch_rejected():
    with pytest.raises(ArityMismatch):
        Axiom(C, Atom("R", relation(2)))


def test_unknown_name(staff):
    state = TemporalState.build(1, ["o"])
    with pytest.raises(UnknownName):
        eval_expr(Atom("Nope"), state, 0, schema=staff)


def test_identifier_axioms_are_approximate():
    kb = translate(parse_schema("class C { k: K id; };"))
    flagged = [a for a in kb.axioms if a.approximate]
    assert flagged and all("(approximate)" in format_axiom(a) for a in flagged)


def test_tourism_kb_text_is_stable(tourism):
    text = format_kb(translate(tourism))
    assert text == format_kb(translate(tourism))
    assert "Traveller [= Client  # isa Traveller Client" in text
    assert "[= G* Flight.ArrivalTime" not in text  # frozen uses G, not G*


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_derived_operator_identities(rng):
    schema = parse_schema("class C; class D;")
    state = random_state(rng, schema)
    for t in range(state.horizon):
        assert eval_expr(Temporal("F", C), state, t) == eval_expr(Until(Top(), C), state, t)
        assert eval_expr(Temporal("X+", C), state, t) == eval_expr(Until(Bottom(), C), state, t)
        assert eval_expr(Temporal("G", C), state, t) == eval_expr(Not(Temporal("F", Not(C))), state, t)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_translation_size_is_linear(rng):
    schema = random_schema(rng)
    size = (len(schema.classes) + len(schema.relationships) + len(schema.attributes)
            + len(schema.isa_c) + len(schema.isa_r) + len(schema.isa_u) + len(schema.disj_c)
            + len(schema.disj_r) + len(schema.cover) + len(schema.ids) + len(schema.transitions))
    kb = translate(schema)
    assert len(kb) <= 4 * size + sum(r.arity for r in schema.relationships)
    assert format_kb(kb) == format_kb(translate(schema))


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from(["target", "source"]), st.sampled_from(["N", "Z"]))
def test_legal_iff_kb_satisfied(rng, trigger, flow):
    schema = random_schema(rng)
    state = random_state(rng, schema)
    legal = not check_state(schema, state, Semantics(trigger, flow))
    assert legal == kb_satisfied(translate(schema, trigger), state, flow, schema, limit=1).ok
