from pathlib import Path

import pytest

from trend.text import parse_schema

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def fixture_schema(name: str):
    return parse_schema(fixture_text(f"{name}.trend"))


@pytest.fixture(scope="session")
def tourism():
    return fixture_schema("tourism")


@pytest.fixture(scope="session")
def staff():
    return fixture_schema("staff")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
