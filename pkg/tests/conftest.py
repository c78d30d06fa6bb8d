import numpy as np
import pytest

from combfol.grid import FieldHistory
from combfol.solver import ModelParams, RunConfig, run

# lines printed after the run by the acceptance module
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_record():
    return run(RunConfig())


@pytest.fixture(scope="session")
def free_record():
    params = ModelParams(N=((0.0, 0.0), (0.0, 0.0)), cubic=False)
    return run(RunConfig(params=params))


def analytic_history(u, ut, t_range=(1.5, 4.5), x_range=(-12.0, 12.0), h=0.01):
    """Lattice samples of an analytic field and its time derivative."""
    t = np.arange(t_range[0], t_range[1] + h / 2, h)
    x = np.arange(x_range[0], x_range[1] + h / 2, h)
    tt, xx = np.meshgrid(t, x, indexing="ij")
    return FieldHistory(float(t[0]), h, x, u(tt, xx), ut(tt, xx))
