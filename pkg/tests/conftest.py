import numpy as np
import pytest

from tscale.fixtures import all_fixtures, load_fixture


@pytest.fixture(scope="session")
def scales():
    return all_fixtures()


@pytest.fixture(scope="session")
def Z():
    return load_fixture("int")


@pytest.fixture(scope="session")
def R():
    return load_fixture("real")


@pytest.fixture(scope="session")
def mixed():
    return load_fixture("mixed")


@pytest.fixture
def rng():
    return np.random.default_rng(7)


# acceptance criteria report one line each; the lines are repeated in the
# terminal summary so they survive output capture
ACCEPTANCE: dict[int, str] = {}


def record(number: int, passed: bool, detail: str) -> None:
    line = f"CRITERION {number:>2} {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
