import re
import sys
from pathlib import Path

import pytest

from bdi_ontology import fixture_path, materialize, parse_turtle

sys.path.insert(0, str(Path(__file__).parent))

ZELLE_NS = "http://example.org/bdi-demo/"
HOTEL_NS = "https://example.org/bdi-case#"


def read_fixture(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


@pytest.fixture
def zelle():
    return parse_turtle(read_fixture("zelle.ttl"))


@pytest.fixture
def hotel():
    return parse_turtle(read_fixture("hotel.ttl"))


@pytest.fixture
def zelle_m(zelle):
    return materialize(zelle)


@pytest.fixture
def hotel_m(hotel):
    return materialize(hotel)


@pytest.fixture
def fixtures_dir() -> Path:
    return Path(str(fixture_path("zelle.ttl"))).parent


# -- acceptance summary -------------------------------------------------------------

_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if m is None:
        return
    key = (int(m.group(1)), m.group(2))
    failed = report.failed
    if report.when == "call" or failed:
        _CRITERIA[key] = _CRITERIA.get(key, True) and not failed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (n, name), ok in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {n} {name.replace('_', ' ')}: {'PASS' if ok else 'FAIL'}")
