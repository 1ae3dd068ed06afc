from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES
from gen import random_schema
from test_text import CATALOGUE
from trend.model import Schema
from trend.text import parse_schema
from trend.verbal import name_to_surface, normalize, verbalize


def tourism_statements():
    """The corpus file wraps two long statements; a line ending without a period continues
    only when the next line starts in lowercase."""
    lines = (FIXTURES / "tourism.statements.txt").read_text(encoding="utf-8").splitlines()
    out = []
    for line in lines:
        if out and line[:1].islower():
            out[-1] += " " + line
        else:
            out.append(line)
    return out


def test_corpus_has_23_statements():
    assert len(tourism_statements()) == 23


def test_tourism_statements_reproduced(tourism):
    produced = Counter(normalize(s) for s in verbalize(tourism))
    expected = Counter(normalize(s) for s in tourism_statements())
    assert produced == expected


def test_tourism_group_order(tourism):
    sentences = verbalize(tourism)
    assert sentences[0].endswith("will always be a client.")
    assert sentences[-1] == "Once the value for arrival time is set, it cannot change anymore."
    first = {key: next(i for i, s in enumerate(sentences) if key in s)
             for key in (" is a client", "for some time", "may also become", "books a flight.",
                         "will be followed", "entity type client having")}
    assert list(first.values()) == sorted(first.values())


def test_mandatory_change_sentence(tourism):
    assert "Each traveller must evolve to a previous-customer ceasing to be a traveller." in verbalize(tourism)


def test_frozen_sentence(tourism):
    assert "Once the value for arrival time is set, it cannot change anymore." in verbalize(tourism)


def test_empty_schema():
    assert verbalize(Schema()) == []


def test_unknown_style(tourism):
    with pytest.raises(ValueError):
        verbalize(tourism, "dex-only")


def test_styles_agree_on_tourism(tourism):
    assert verbalize(tourism, "dev-dex") == verbalize(tourism, "chg-ext")


@pytest.mark.parametrize("name, surface", [("PreviousCustomer", "previous-customer"), ("Flight", "flight"),
                                           ("VIPCustomer", "VIP-customer"), ("emeritus_prof", "emeritus-prof")])
def test_surface_names(name, surface):
    assert name_to_surface(name) == surface


def test_attribute_surface_uses_spaces():
    assert name_to_surface("ArrivalTime", " ") == "arrival time"


@given(st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,12}", fullmatch=True))
def test_surface_naming_is_idempotent(name):
    once = name_to_surface(name)
    assert name_to_surface(once) == once


def test_normalize():
    assert normalize("  A Traveller  books the flight. ") == "traveller books flight"


def test_extrapolated_templates():
    schema = parse_schema("chronon \"days\"; class A; class B; EXT- A -> B; QEXT A -> B after 2;"
                          "PMCHG B -> A;")
    sentences = verbalize(schema)
    assert "A b may have been an a before." in sentences
    assert "An a may also become a b after exactly 2 days." in sentences
    assert "Each b must evolve to an a ceasing to be a b, remaining an a ever after." in sentences


def test_catalogue_constructs_all_verbalized():
    schema = parse_schema(CATALOGUE)
    sentences = verbalize(schema)
    non_frozen = [c for c in schema.transitions if c.label != "FRZ"]
    assert len(sentences) >= (len(schema.classes) + len(schema.relationships) + len(schema.isa_c)
                              + len(schema.isa_r) + len(schema.isa_u) + len(schema.disj_c)
                              + len(schema.disj_r) + len(schema.cover) + len(non_frozen))
    assert any("identified by its k" in s for s in sentences)
    assert any("relation does not hold at some time" in s for s in sentences)


@settings(max_examples=80, deadline=None)
@given(st.randoms(use_true_random=False))
def test_every_construct_yields_a_sentence(rng):
    schema = random_schema(rng)
    text = " ".join(verbalize(schema)).lower()
    for c in schema.classes:
        assert name_to_surface(c.name).lower() in text
    for r in schema.relationships:
        assert name_to_surface(r.name, " ").lower() in text
    for q in schema.attributes:
        assert name_to_surface(q.split(".")[1], " ").lower() in text
    plain = verbalize(schema)
    assert plain == verbalize(schema) == verbalize(schema, "dev-dex")
    assert all(s.endswith(".") for s in plain)
