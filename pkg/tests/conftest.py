import numpy as np
import pytest
from scipy.special import gamma

from levyhk.model import BUILTINS, builtin_model, stable_model

ACCEPTANCE_LINES = []


def stable_constant(d, alpha):
    """``c`` with ``int (1 - cos <z, x>) |x|^(-d-alpha) dx = c |z|^alpha``."""
    norm = alpha * 2.0 ** (alpha - 1) * gamma((d + alpha) / 2) / (np.pi ** (d / 2) * gamma(1 - alpha / 2))
    return 1.0 / norm


def cauchy_density(t, x, d=1):
    """Density of the isotropic model ``nu0 = r^(-d-1)``."""
    s = t * stable_constant(d, 1.0)
    r2 = np.sum(np.atleast_2d(x) ** 2, axis=-1) if d > 1 else np.asarray(x) ** 2
    return gamma((d + 1) / 2) / np.pi ** ((d + 1) / 2) * s / (s ** 2 + r2) ** ((d + 1) / 2)


@pytest.fixture(scope="session")
def cauchy():
    return builtin_model("cauchy")


@pytest.fixture(scope="session", params=sorted(BUILTINS))
def builtin(request):
    return builtin_model(request.param)


@pytest.fixture(scope="session")
def stable15():
    return stable_model(1.5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
