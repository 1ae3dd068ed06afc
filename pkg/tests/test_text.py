import pytest
from hypothesis import given, settings, strategies as st

from conftest import fixture_text
from gen import random_schema
from trend.errors import ParseError
from trend.model import Kind, Modality, Schema, Subject, Temporality, Tense
from trend.text import (
    check_text, format_transition, parse_constraint, parse_schema, serialize_schema,
)


def only_transition(schema):
    (c,) = schema.transitions
    return c


def test_parse_small_tourism_fragment():
    schema = parse_schema("class Flight; class Client;\nclass Traveller temporal; isa Traveller Client;\n"
                          "EXT Client -> Traveller optional;")
    assert schema.temporality_of("Traveller") is Temporality.TEMPORARY
    assert schema.temporality_of("Client") is Temporality.MIXED
    c = only_transition(schema)
    assert (c.kind, c.tense, c.modality, c.source, c.target) == (
        Kind.EXTENSION, Tense.FUTURE, Modality.OPTIONAL, "Client", "Traveller")


def test_empty_text():
    assert parse_schema("") == Schema()
    assert parse_schema("  # nothing here\n") == Schema()
    assert serialize_schema(Schema()) == ""


def test_quantitative_attribute_change():
    schema = parse_schema("class Academic { Bonus: Money; Subvention: Money; };\n"
                          "QCHGA Academic.Bonus -> Academic.Subvention after 3;")
    c = only_transition(schema)
    assert c.subject is Subject.ATTRIBUTE and c.kind is Kind.CHANGE and c.offset == 3


@pytest.mark.parametrize("keyword, tense", [("EXT-", Tense.PAST), ("ext", Tense.PAST),
                                            ("EXT", Tense.FUTURE), ("DEX", Tense.FUTURE),
                                            ("dex", Tense.PAST)])
def test_tense_spellings(keyword, tense):
    c = only_transition(parse_schema(f"class A; class B; {keyword} A -> B;"))
    assert c.tense is tense and c.kind is Kind.EXTENSION


def test_persistence_and_mandatory_prefixes():
    a = only_transition(parse_schema("class A; class B; PMCHG A -> B;"))
    b = only_transition(parse_schema("class A; class B; P CHG A -> B mandatory;"))
    assert a == b and a.persistent and a.mandatory


def test_dev_alias_equals_chg(staff):
    text = fixture_text("staff.trend").replace("CHG", "DEV").replace("EXT", "DEX")
    assert parse_schema(text) == staff


@pytest.mark.parametrize("name", ["tourism", "staff", "unsat", "temporary"])
def test_fixture_round_trip(name):
    schema = parse_schema(fixture_text(f"{name}.trend"))
    assert parse_schema(serialize_schema(schema)) == schema


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from(["chg-ext", "dev-dex"]))
def test_round_trip_random(rng, labels):
    schema = random_schema(rng)
    text = serialize_schema(schema, labels)
    assert parse_schema(text) == schema
    assert serialize_schema(parse_schema(text), labels) == text


def test_parsing_is_deterministic():
    bad = "class A; isa A B; class ;"
    first = check_text(bad)[1]
    assert first == check_text(bad)[1]


def test_syntax_error_is_located():
    with pytest.raises(ParseError) as e:
        parse_schema("class A;\nclass B temporal\nisa A B;")
    d = e.value.diagnostics[0]
    assert d.span.line >= 2
    assert d.severity == "error"


def test_recovery_reports_several_errors():
    _, diags = check_text("class ;\nclass B;\nisa B ;\n")
    assert len(diags) == 2


def test_dangling_reference_maps_to_its_statement():
    with pytest.raises(ParseError) as e:
        parse_schema("class A;\n\nisa A Missing;\n")
    d = e.value.diagnostics[0]
    assert d.code == "DanglingReference" and d.span.line == 3 and "Missing" in d.elements


def test_mandatory_conflicts_with_optional():
    with pytest.raises(ParseError):
        parse_schema("class A; class B; MCHG A -> B optional;")


def test_quantitative_keyword_needs_offset():
    with pytest.raises(ParseError):
        parse_schema("class A; class B; QCHG A -> B;")


def test_two_temporality_markings_rejected():
    with pytest.raises(ParseError):
        parse_schema("class A snapshot temporal;")


def test_isa_cycle_warning():
    schema, diags = check_text("class A; class B; isa A B; isa B A;")
    assert schema is not None
    assert [d.code for d in diags] == ["isa-cycle", "isa-cycle"]
    assert all(d.severity == "warning" for d in diags)


CATALOGUE = """
chronon "days";
class P snapshot { k: K id; v: V temporal [0,2]; w: V snapshot; f: V frozen; };
class A temporal; class B; class C;
rel R temporal (x: A, y: B [1,*]);
rel S snapshot (x: A, y: B);
isa A P; isa B P;
isar R S;
isau R.x S.x;
disjoint {A, B} P;
disjointr {R} S;
cover {A, B} P;
EXT A -> B; CHG A -> B mandatory; EXT- A -> B mandatory; CHG- A -> B;
PEXT A -> C; QEXT A -> C after 2; MQCHG B -> C after 3;
EXTR R -> S; CHGR- R -> S mandatory; QEXTR S -> R after 2;
CHGA P.v -> P.w; QCHGA P.w -> P.v after 2 mandatory;
"""


def test_catalogue_parses_and_round_trips():
    schema = parse_schema(CATALOGUE)
    labels = {c.label for c in schema.transitions}
    assert {"EXT", "MCHG", "mext", "chg", "QEXT", "MQCHG", "EXTR", "mchgr", "QEXTR",
            "CHGA", "MQCHGA", "FRZ"} <= labels
    assert any(c.persistent for c in schema.transitions)
    assert schema.ids == {("P", "k")}
    assert parse_schema(serialize_schema(schema)) == schema


def test_format_transition_is_parseable(staff):
    declarations = "\n".join(l for l in serialize_schema(staff).splitlines() if "->" not in l)
    for c in staff.transitions:
        assert only_transition(parse_schema(declarations + "\n" + format_transition(c))) == c


def test_parse_constraint(staff):
    isa = parse_constraint("isa EmeritusProf Academic;", staff)
    assert (isa.sub, isa.sup) == ("EmeritusProf", "Academic")
    cls = parse_constraint("class Employee temporal;", staff)
    assert cls.temporality is Temporality.TEMPORARY
    with pytest.raises(ParseError):
        parse_constraint("isa Employee Nowhere;", staff)
    with pytest.raises(ParseError):
        parse_constraint("isa A B; isa B A;", staff)
