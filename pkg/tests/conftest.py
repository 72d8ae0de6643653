from __future__ import annotations

import pytest

from artifact.constructions import monk_ra, rainbow_finite, split_ra


@pytest.fixture(scope="session")
def rainbow3():
    return rainbow_finite(3)


@pytest.fixture(scope="session")
def monk31():
    return monk_ra(3, 1)


@pytest.fixture(scope="session")
def monk21():
    return monk_ra(2, 1)


@pytest.fixture(scope="session")
def split22():
    return split_ra(2, 2)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture()
def criterion(request):
    """Record one pass/fail line for an acceptance criterion."""

    def record(n: int, ok: bool, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[n] = line
        with request.config.pluginmanager.get_plugin("capturemanager").global_and_fixture_disabled():
            print("\n" + line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
