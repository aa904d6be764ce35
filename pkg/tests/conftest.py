"""Session fixtures plus a terminal summary line per acceptance check.

Each test in test_acceptance.py carries a one-line docstring naming its
criterion; the summary section prints PASS/FAIL per criterion so the gate
can be read without scrolling the full log.
"""

import pytest

from leveltext.assets import default_freq, default_model, seed_corpus
from leveltext.corpus import permute_pairs

_labels: dict[str, str] = {}
_results: dict[str, str] = {}


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def freq():
    return default_freq()


@pytest.fixture(scope="session")
def seed_articles():
    return seed_corpus()


@pytest.fixture(scope="session")
def seed_pairs(seed_articles):
    return permute_pairs(seed_articles)


def pytest_collection_modifyitems(items):
    for item in items:
        if "test_acceptance.py" not in item.nodeid:
            continue
        doc = (getattr(item, "function", None) and item.function.__doc__) or ""
        _labels[item.nodeid] = doc.strip().splitlines()[0] if doc.strip() else item.name


def pytest_runtest_logreport(report):
    if report.nodeid not in _labels:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in sorted(_results.items(), key=lambda kv: _labels[kv[0]]):
        word = {"passed": "PASS"}.get(outcome, "FAIL")
        terminalreporter.write_line(f"{word}  {_labels[nodeid]}")
