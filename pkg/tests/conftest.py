import numpy as np
import pytest

from rpbcs.fock import build_basis
from rpbcs.lattice import build_lattice
from rpbcs.verify import Lab

ACCEPTANCE = []


def record(criterion, ok, detail):
    """Store one acceptance line; printed in the terminal summary."""
    ACCEPTANCE.append((criterion, "PASS" if ok else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {criterion:>2}: {status}  {detail}")


@pytest.fixture(scope="session")
def basis_1_1():
    return build_basis(build_lattice(1, 1))


@pytest.fixture(scope="session")
def basis_1_2():
    return build_basis(build_lattice(1, 2))


@pytest.fixture(scope="session")
def basis_2_1():
    return build_basis(build_lattice(2, 1))


@pytest.fixture(scope="session")
def lab_1_2():
    return Lab(1, 2)


@pytest.fixture(scope="session")
def lab_2_1():
    return Lab(2, 1)


@pytest.fixture(scope="session")
def lab_1_3():
    return Lab(1, 3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
