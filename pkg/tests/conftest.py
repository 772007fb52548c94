import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
sys.path.insert(0, str(TESTS))

FIXTURES = TESTS / "fixtures"


@pytest.fixture
def fixture_bytes():
    def load(name):
        return (FIXTURES / name).read_bytes()

    return load


CRITERIA = {
    1: "installation shares: Akeeba 59.6%, with-extension share 40.9%",
    2: "core share of reachable hosts 2.0%",
    3: "bundled vector catalog: >= 200 vectors, no malformed records",
    4: "headline XSS payload round trip, confirmed by Pillow",
    5: "1,000 randomized plans never exceed a field limit; oversize pairings skipped",
    6: ">= 50 byte-exact round trips and 100k fuzzed inputs per format",
    7: "fingerprint fixtures: root, /site/, soft-404, static",
    8: "network policy: attempts, per-host spacing, user agent",
    9: "static-scan JEvents form/query fixtures, wrapped variants, dedup",
    10: "population-scale results stated as not reproducible",
}
_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion exercised by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.failed or (report.when == "call" and report.skipped):
        _outcomes[crit] = False
    elif report.when == "call":
        _outcomes.setdefault(crit, True)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        status = {True: "PASS", False: "FAIL", None: "NOT RUN"}[_outcomes.get(n)]
        terminalreporter.write_line("AC%-2d %-7s %s" % (n, status, text))
