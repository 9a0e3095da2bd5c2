from __future__ import annotations

import pytest

from timedmon import fixtures
from timedmon.monitor import MonitorSpec

CRITERIA: dict = {}


def record(number: int, title: str, passed: bool, detail: str = "") -> None:
    CRITERIA[number] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        title, passed, detail = CRITERIA[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))


@pytest.fixture(scope="session")
def a10_nob20():
    return fixtures.load("a10_nob20")


@pytest.fixture(scope="session")
def a10_nob20_spec(a10_nob20):
    return MonitorSpec.from_dtma(a10_nob20)


@pytest.fixture(scope="session")
def a10_nob20_pair():
    return MonitorSpec.from_pair(*fixtures.load_pair("a10_nob20"))
