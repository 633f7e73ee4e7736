from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from stackings import fixtures

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def f1():
    return fixtures.complex("f1")


@pytest.fixture(scope="session")
def f1_stacking():
    return fixtures.stacking("f1")


@pytest.fixture(scope="session")
def f2():
    return fixtures.complex("f2")


@pytest.fixture(scope="session")
def torus():
    return fixtures.complex("torus")


@pytest.fixture(scope="session")
def torus_stacking():
    return fixtures.stacking("torus")


@pytest.fixture(scope="session")
def torus_ball():
    return fixtures.cover("torus", 4)


@pytest.fixture(scope="session")
def f1_ball():
    return fixtures.cover("f1", 3)


@pytest.fixture(scope="session")
def abba_ball():
    return fixtures.cover("ab-ba", 2)
