import numpy as np
import pytest

from helpers import FIXTURES
from webdir import io

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def sample():
    return io.load_schema(FIXTURES / "sample.json")[0]


@pytest.fixture
def detour():
    return io.load_schema(FIXTURES / "detour.json")


@pytest.fixture
def loop():
    return io.load_schema(FIXTURES / "loop.json")


@pytest.fixture
def dir30():
    return io.load_schema(FIXTURES / "dir30.json")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
