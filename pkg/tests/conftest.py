import json
from importlib import resources

import pytest

from csvqe.config import resolve_fcidump
from csvqe.hamiltonian import HamiltonianContext
from csvqe.integrals import read_fcidump
from csvqe.simulator import SectorSimulator


def _manifest():
    with resources.files("csvqe").joinpath("data/manifest.json").open() as fh:
        return json.load(fh)["fixtures"]


MANIFEST = _manifest()


@pytest.fixture(scope="session")
def manifest():
    return MANIFEST


_TABLES = {}
_SIMS = {}


def load_table(name):
    if name not in _TABLES:
        _TABLES[name] = read_fcidump(resolve_fcidump(f"builtin:{name}"))
    return _TABLES[name]


def load_sim(name):
    if name not in _SIMS:
        _SIMS[name] = SectorSimulator(load_table(name))
    return _SIMS[name]


@pytest.fixture(scope="session")
def h2():
    return load_table("h2_sto3g")


@pytest.fixture(scope="session")
def h2_631g():
    return load_table("h2_631g")


@pytest.fixture(scope="session")
def lih():
    return load_table("lih_sto3g")


@pytest.fixture(scope="session")
def h2_ctx(h2):
    return HamiltonianContext(h2)


@pytest.fixture(scope="session")
def h2_sim():
    return load_sim("h2_sto3g")


@pytest.fixture(scope="session")
def h2_631g_sim():
    return load_sim("h2_631g")


@pytest.fixture(scope="session")
def lih_sim():
    return load_sim("lih_sto3g")


# Acceptance criteria register one line each here; the lines are echoed in the
# terminal summary so they appear in plain `pytest -v` output.
ACCEPTANCE_LINES = []


def _criterion_key(line):
    label = line.split()[1].rstrip(":")
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits), label


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_key):
            terminalreporter.write_line(line)
