import math

import numpy as np
import pytest

from sturmq.coefficients import preset_airy, preset_dirichlet_laplacian
from sturmq.eigensolver import compute_basis
from sturmq.grid import Grid

# lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    line = f"criterion {criterion:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def laplacian():
    return preset_dirichlet_laplacian()


@pytest.fixture(scope="session")
def airy():
    return preset_airy()


@pytest.fixture(scope="session")
def lap_grid():
    return Grid(0.0, math.pi, 2048)


@pytest.fixture(scope="session")
def airy_grid():
    return Grid(0.0, 1.0, 2048)


@pytest.fixture(scope="session")
def lap_basis(laplacian, lap_grid):
    return compute_basis(laplacian, 24, lap_grid)


@pytest.fixture(scope="session")
def airy_basis(airy, airy_grid):
    return compute_basis(airy, 24, airy_grid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
