import dataclasses
import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, fixture_schema
from gen import random_schema, random_state
from trend.errors import IllFormedState, NotMandatory
from trend.model import Kind, Modality, Subject, Temporality, Tense, TransitionConstraint, build_schema
from trend.naive import naive_violations
from trend.semantics import (
    Semantics, TemporalState, check_state, dump_state, load_state, mandatory_obligation_met,
    transition_holds,
)
from trend.text import parse_schema

SEMANTICS = [Semantics(p, f) for p in ("target", "source") for f in ("N", "Z")]


def rules(violations):
    return [v.rule for v in violations]



def test_snapshot_class_constant_is_legal():
    schema = parse_schema("class C snapshot;")
    state = TemporalState.build(3, ["o"], {"C": {0: ["o"], 1: ["o"], 2: ["o"]}})
    assert check_state(schema, state) == []


def test_temporary_class_never_absent():
    schema = fixture_schema("temporary")
    state = load_state(FIXTURES / "temporary-violation.state.json", schema)
    (v,) = check_state(schema, state)
    assert v.rule == "temporal-class" and v.instance == ("o1",) and v.times == (0, 1, 2)
    assert "o1 is never absent" in v.message


def test_mandatory_change_never_taken():
    schema = parse_schema("class Tadpole; class Frog; MCHG Tadpole -> Frog;")
    state = TemporalState.build(3, ["o"], {"Tadpole": {0: ["o"], 1: ["o"], 2: ["o"]}})
    assert set(rules(check_state(schema, state))) == {"MCHG"}


def test_disjoint_overlap():
    schema = parse_schema("class C; class C1; class C2; disjoint {C1, C2} C;")
    state = TemporalState.build(2, ["o"], {"C": {1: ["o"]}, "C1": {1: ["o"]}, "C2": {1: ["o"]}})
    (v,) = check_state(schema, state)
    assert v.rule == "disj_C" and v.times == (1,)


def test_optional_extension_holds(tourism):
    ext = TransitionConstraint(Subject.CLASS, Kind.EXTENSION, "Client", "Traveller")
    state = TemporalState.build(2, ["o"], {"Client": {0: ["o"], 1: ["o"]}, "Traveller": {1: ["o"]}})
    assert transition_holds(tourism, state, ext, "o", 0)
    assert not transition_holds(tourism, state, ext, "o", 1)  # t+1 is outside the window


def test_quantitative_attribute_change_holds(staff):
    (c,) = [c for c in staff.transitions if c.subject is Subject.ATTRIBUTE]
    bonus, sub = "Academic.Bonus", "Academic.Subvention"
    state = TemporalState.build(4, ["o"], attributes={bonus: {0: [("o", "v")]}, sub: {3: [("o", "v")]}},
                                schema=staff)
    assert transition_holds(staff, state, c, ("o", "v"), 0)
    assert not transition_holds(staff, state, c, ("o", "v"), 1)


def test_mandatory_past_change_met(staff):
    (c,) = [c for c in staff.transitions if c.tense is Tense.PAST]
    state = TemporalState.build(3, ["o"], {"Academic": {1: ["o"]}, "EmeritusProf": {2: ["o"]}})
    assert mandatory_obligation_met(staff, state, c, "o", 2)


def test_mandatory_past_extension_missing(tourism):
    (c,) = [c for c in tourism.transitions if c.tense is Tense.PAST and c.source == "Traveller"]
    state = TemporalState.build(2, ["o"], {"VIPCustomer": {1: ["o"]}, "Client": {0: ["o"], 1: ["o"]}})
    assert not mandatory_obligation_met(tourism, state, c, "o", 1)


def test_mandatory_with_empty_source_is_vacuous():
    schema = parse_schema("class A; class B; MCHG A -> B;")
    (c,) = schema.transitions
    state = TemporalState.build(3, ["o"])
    assert all(mandatory_obligation_met(schema, state, c, "o", t) for t in range(3))


def test_optional_has_no_obligation(tourism):
    ext = TransitionConstraint(Subject.CLASS, Kind.EXTENSION, "Client", "Traveller")
    with pytest.raises(NotMandatory):
        mandatory_obligation_met(tourism, TemporalState.build(1, ["o"]), ext, "o", 0)


def test_flow_z_pre_history():
    schema = parse_schema("class A; class B; EXT- A -> B mandatory;")
    state = TemporalState.build(2, ["o"], {"A": {0: ["o"], 1: ["o"]}, "B": {0: ["o"], 1: ["o"]}})
    assert rules(check_state(schema, state)) == ["mext"]
    # a stationary past has o in A and in B forever, so no extension ever took place
    assert rules(check_state(schema, state, Semantics(flow="Z"))) == ["mext"]
    moved = TemporalState.build(2, ["o"], {"A": {0: ["o"], 1: ["o"]}, "B": {1: ["o"]}})
    assert check_state(schema, moved) == []


def test_past_trigger_switch():
    schema = parse_schema("class A; class B; EXT- A -> B mandatory;")
    state = TemporalState.build(2, ["o"], {"A": {0: ["o"]}})
    assert check_state(schema, state) == []
    assert rules(check_state(schema, state, Semantics(past_trigger="source"))) == ["mext"]


def test_ill_formed_states(tourism):
    with pytest.raises(IllFormedState):
        TemporalState.build(2, ["o"], {"Client": {5: ["o"]}})
    with pytest.raises(IllFormedState):
        load_state({"horizon": 0, "objects": ["o"]}, tourism)
    with pytest.raises(IllFormedState):
        load_state({"horizon": 1, "objects": ["o"], "relationships": {"Books": {"0": [["o", "o"]]}}}, tourism)


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_state_json_round_trip(rng):
    schema = random_schema(rng)
    state = random_state(rng, schema)
    again = load_state(json.loads(dump_state(state, schema)), schema)
    assert again.horizon == state.horizon and again.objects == state.objects
    for t in range(state.horizon):
        for c in schema.classes:
            assert again.cls(c.name, t) == state.cls(c.name, t)
        for r in schema.relationships:
            assert again.rel(r.name, t) == state.rel(r.name, t)
        for q in schema.attributes:
            assert again.attr(q, t) == state.attr(q, t)


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from(SEMANTICS))
def test_agrees_with_naive_expansion(rng, sem):
    schema = random_schema(rng)
    state = random_state(rng, schema)
    keys = set().union(*(v.keys() for v in check_state(schema, state, sem)))
    assert keys == naive_violations(schema, state, sem.past_trigger, sem.flow)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_adding_constraints_never_removes_violations(rng):
    big = random_schema(rng, max_transitions=6)
    state = random_state(rng, big)
    smaller = dataclasses.replace(big, transitions=frozenset(list(big.transitions)[: len(big.transitions) // 2]),
                                  cover=frozenset())
    small_keys = set().union(*(v.keys() for v in check_state(smaller, state)))
    big_keys = set().union(*(v.keys() for v in check_state(big, state)))
    assert small_keys <= big_keys


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_snapshot_flatness(rng):
    schema = random_schema(rng)
    state = random_state(rng, schema)
    flagged = {v.elements[0] for v in check_state(schema, state) if v.rule == "snapshot-class"}
    for c in schema.classes:
        if c.temporality is Temporality.SNAPSHOT and c.name not in flagged:
            assert len({state.cls(c.name, t) for t in range(state.horizon)}) == 1


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_frozen_values_only_grow(rng):
    schema = random_schema(rng)
    state = random_state(rng, schema)
    flagged = {v.elements[0] for v in check_state(schema, state) if v.rule == "FRZ"}
    for c in schema.transitions:
        if c.kind is Kind.FROZEN and c.source not in flagged:
            for t in range(state.horizon - 1):
                assert state.attr(c.source, t) <= state.attr(c.source, t + 1)


def _with_offset(schema, offset):
    ts = frozenset(dataclasses.replace(c, offset=offset) if c.kind is not Kind.FROZEN else c
                   for c in schema.transitions)
    return dataclasses.replace(schema, transitions=ts)


def _unlabelled(violations):
    return {(k[0].replace("Q", "").replace("q", ""), *k[1:]) for v in violations for k in v.keys()}


@settings(max_examples=80, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from(SEMANTICS))
def test_offset_one_equals_unquantified(rng, sem):
    schema = random_schema(rng)
    plain, q1 = _with_offset(schema, None), _with_offset(schema, 1)
    state = random_state(rng, schema)
    assert _unlabelled(check_state(plain, state, sem)) == _unlabelled(check_state(q1, state, sem))
    for a, b in zip(plain.sorted_transitions(), q1.sorted_transitions()):
        for inst in _instances(plain, state, a):
            for t in range(state.horizon):
                assert transition_holds(plain, state, a, inst, t, sem) == transition_holds(q1, state, b, inst, t, sem)


def _instances(schema, state, c):
    if c.subject is Subject.CLASS:
        return sorted(state.objects)
    if c.subject is Subject.RELATIONSHIP:
        return sorted({x for name in c.endpoints for t in range(state.horizon) for x in state.rel(name, t)})
    return sorted({x for name in c.endpoints for t in range(state.horizon) for x in state.attr(name, t)})
