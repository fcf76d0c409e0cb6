import os

import pytest

from mepcircuit.genome import Function, Terminal, arithmetic_set, gate_set

A, B, C, D = (Terminal(j) for j in range(4))


@pytest.fixture
def abcd():
    """{+, -, *} over terminals a, b, c, d."""
    return arithmetic_set(4, "abcd")


@pytest.fixture
def worked_example():
    # 1: a  2: b  3: + 1, 2  4: c  5: d  6: + 4, 5  7: * 3, 6
    return (A, B, Function("+", 1, 2), C, D, Function("+", 4, 5), Function("*", 3, 6))


@pytest.fixture
def three_gate():
    """(x0 & x3) | (x1 & x2): subset-sum circuit for base {1..4}, target 5."""
    return (Terminal(0), Terminal(3), Function(0, 1, 2), Terminal(1), Terminal(2),
            Function(0, 4, 5), Function(6, 3, 6))


@pytest.fixture
def gates4():
    return gate_set(4)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("MEP_SLOW"):
        return
    skip = pytest.mark.skip(reason="long statistical run; set MEP_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


_criteria = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.skipped):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    _criteria.append((report.nodeid.split("::", 1)[1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criteria:
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{status:7} {name}")
