import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_schema
from trend.errors import DanglingReference, DuplicateName, InvalidConstraint, UnknownRole
from trend.model import (
    Card, ClassDecl, Isa, Kind, Modality, RelDecl, Role, Schema, Subject, Temporality, Tense,
    TransitionConstraint, build_schema, player, roles_of,
)

S, T = Temporality.SNAPSHOT, Temporality.TEMPORARY


def test_build_schema_temporality_sets():
    schema = build_schema([ClassDecl("Employee", S), ClassDecl("Academic", T), Isa("Academic", "Employee")])
    assert schema.temporality_of("Employee") is S
    assert schema.temporality_of("Academic") is T
    assert schema.isa_c == {("Academic", "Employee")}


def test_empty_declarations_give_empty_schema():
    assert build_schema([]) == Schema()
    assert build_schema([]).is_empty()


def test_dangling_isa_target():
    with pytest.raises(DanglingReference) as e:
        build_schema([ClassDecl("A"), Isa("A", "B")])
    assert e.value.name == "B"


def test_duplicate_class():
    with pytest.raises(DuplicateName):
        build_schema([ClassDecl("A"), ClassDecl("A", S)])


def test_card_bounds():
    assert Card(1, 2).admits(2) and not Card(1, 2).admits(3)
    assert Card(0).admits(99)
    assert str(Card(1)) == "[1,*]"
    with pytest.raises(InvalidConstraint):
        Card(3, 1)


def test_transition_labels():
    c = TransitionConstraint(Subject.RELATIONSHIP, Kind.CHANGE, "A", "B", Tense.FUTURE,
                             Modality.MANDATORY, offset=3)
    assert c.label == "MQCHGR"
    past = TransitionConstraint(Subject.CLASS, Kind.EXTENSION, "A", "B", Tense.PAST, Modality.MANDATORY)
    assert past.label == "mext"
    assert past.delay == 1 and not past.quantitative


def test_player_lookup(tourism):
    works = build_schema([
        ClassDecl("Employee"), ClassDecl("Dept"),
        RelDecl("WorksFor", (Role("emp", "Employee"), Role("dept", "Dept"))),
    ])
    assert player(works, "WorksFor", "emp") == "Employee"
    assert player(tourism, "Books", "traveller") == "Traveller"
    with pytest.raises(UnknownRole):
        player(works, "WorksFor", "boss")


def test_roles_of(tourism):
    marriage = build_schema([
        ClassDecl("Person"), RelDecl("Marriage", (Role("husband", "Person"), Role("wife", "Person"))),
    ])
    assert roles_of(marriage, "Marriage", "Person") == {"husband", "wife"}
    assert roles_of(tourism, "Books", "Flight") == {"flight"}
    assert roles_of(tourism, "Books", "Hotel") == frozenset()


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_every_role_is_found_from_its_player(rng):
    schema = random_schema(rng)
    for r in schema.relationships:
        for u in r.roles:
            assert u.name in roles_of(schema, r.name, player(schema, r.name, u.name))


def test_schema_equality_ignores_declaration_order():
    decls = [ClassDecl("A"), ClassDecl("B", T), Isa("A", "B")]
    shuffled = decls[:]
    random.Random(3).shuffle(shuffled)
    assert build_schema(decls) == build_schema(shuffled)
