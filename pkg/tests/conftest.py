import numpy as np
import pytest

from caqwbh import walk
from caqwbh.hashing import HashParams


@pytest.fixture(params=sorted(walk.available_backends()))
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    monkeypatch.setattr(walk, "_kernels", walk.available_backends()[request.param])
    return request.param


@pytest.fixture(scope="session")
def params256():
    return HashParams.instance("caqwbh-256")


@pytest.fixture(scope="session")
def params512():
    return HashParams.instance("caqwbh-512")


@pytest.fixture
def rng():
    return np.random.default_rng(20211018)


def random_state(rng, q):
    z = rng.standard_normal(2 << q) + 1j * rng.standard_normal(2 << q)
    return walk.WalkState(q, z / np.linalg.norm(z))


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
