import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, fixture_schema
from gen import random_schema
from test_text import CATALOGUE
from trend.render import DotError, check_dot, expected_counts, to_dot
from trend.text import parse_schema

FIXTURE_NAMES = sorted(p.stem for p in FIXTURES.glob("*.trend"))


def test_temporal_marker_ascii(tourism):
    assert '"Traveller" [shape="box", label="Traveller (T)"]' in to_dot(tourism, ascii_only=True)
    assert "Traveller ⏰" in to_dot(tourism)


def test_optional_extension_is_dashed(tourism):
    assert '"Client" -> "Traveller" [label="EXT", style="dashed"]' in to_dot(tourism)


def test_past_change_keeps_direction(staff):
    assert '"Academic" -> "EmeritusProf" [label="CHG-", style="solid"]' in to_dot(staff)


def test_dev_dex_labels(staff):
    text = to_dot(staff, "dev-dex")
    assert 'label="DEV-"' in text and 'label="DEX"' in text and "CHG" not in text


def test_quantitative_and_persistent_labels():
    text = to_dot(parse_schema("class A; class B; PMQCHG A -> B after 2;"))
    assert 'label="PCHG2", style="solid"' in text


def test_attribute_markers(tourism):
    text = to_dot(tourism, ascii_only=True)
    assert "ArrivalTime: Time (pin)" in text and "Company: String (T)" in text
    assert "[id]" in to_dot(parse_schema("class C { k: K id; };"))


def test_role_edges_carry_cardinalities():
    text = to_dot(parse_schema("class A; class B; rel R (x: A [1,2], y: B);"))
    assert '"R" -> "A" [label="x [1,2]", arrowhead="none"]' in text


@pytest.mark.parametrize("name", FIXTURE_NAMES)
@pytest.mark.parametrize("ascii_only", [False, True])
def test_fixtures_are_valid_dot(name, ascii_only):
    schema = fixture_schema(name)
    summary = check_dot(to_dot(schema, ascii_only=ascii_only))
    assert (len(summary.nodes), len(summary.edges)) == expected_counts(schema)


def test_catalogue_counts():
    schema = parse_schema(CATALOGUE)
    summary = check_dot(to_dot(schema))
    assert (len(summary.nodes), len(summary.edges)) == expected_counts(schema)


@settings(max_examples=80, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from(["chg-ext", "dev-dex"]), st.booleans())
def test_random_schemas_render(rng, labels, ascii_only):
    schema = random_schema(rng)
    text = to_dot(schema, labels, ascii_only)
    summary = check_dot(text)
    assert (len(summary.nodes), len(summary.edges)) == expected_counts(schema)
    assert text == to_dot(schema, labels, ascii_only)


@pytest.mark.parametrize("bad", [
    'digraph g { "a" [label="x"]; ',
    'digraph g { "a" [colour="red"]; }',
    'digraph g { a [label="x"]; }',
    'digraph g { "a" -> "b" [label="x"]; }',
    'digraph g { "a" [label="x]; }',
    'digraph g { "a" [label="x"]; "a" [label="y"]; }',
    'graph g { }',
])
def test_checker_rejects(bad):
    with pytest.raises(DotError):
        check_dot(bad)


def test_checker_handles_escapes():
    summary = check_dot('digraph g { "a \\"q\\"" [label="x\\ny"]; }')
    assert summary.nodes == ('a "q"',)
