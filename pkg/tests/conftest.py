import numpy as np
import pytest

from bandmass.fixtures import load_fixture

FIXTURES = ["lattice:2", "lattice:3", "graphene", "stanene", "kagome"]


@pytest.fixture(params=FIXTURES)
def any_graph(request):
    return load_fixture(request.param)


@pytest.fixture
def graphene():
    return load_fixture("graphene")


@pytest.fixture
def stanene():
    return load_fixture("stanene")


@pytest.fixture
def kagome():
    return load_fixture("kagome")


@pytest.fixture
def rng():
    return np.random.default_rng(20161016)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.VERDICTS:
            terminalreporter.write_line(line)
