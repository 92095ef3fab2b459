import numpy as np
import pytest
from scipy import integrate as si

from levyhk.quadrature import gauss_legendre, gk15, integrate, panel_nodes, wynn_epsilon


def test_gk15_polynomial_exact():
    # the Kronrod rule integrates degree 22 exactly
    val, _ = gk15(lambda x: x ** 22, -1.0, 1.0)
    assert float(val[0]) == pytest.approx(2.0 / 23.0, rel=1e-13)


@pytest.mark.parametrize("f, a, b", [
    (np.exp, 0.0, 3.0),
    (lambda x: 1.0 / (1.0 + x ** 2), -np.inf, np.inf),
    (lambda x: np.exp(-x) * np.sin(x) ** 2, 0.0, np.inf),
    (lambda x: np.sqrt(np.abs(x - 0.3)), 0.0, 1.0),
])
def test_integrate_against_scipy(f, a, b):
    ref = si.quad(f, a, b, epsabs=0, epsrel=1e-13, limit=500, points=None if np.isinf(a) or np.isinf(b)
                  else [0.3] if a < 0.3 < b else None)[0]
    res = integrate(f, a, b, breakpoints=[0.3] if 0 <= 0.3 <= 1 and b == 1.0 else (), rtol=1e-12)
    assert res.value == pytest.approx(ref, rel=1e-10)
    assert res.error >= 0


def test_integrate_error_estimate_is_honest():
    res = integrate(lambda x: np.cos(30 * x), 0.0, 2.0, rtol=1e-10)
    assert abs(res.value - np.sin(60.0) / 30.0) <= max(res.error, 1e-14) * 10


def test_gauss_legendre_and_panels():
    x, w = gauss_legendre(16)
    assert w.sum() == pytest.approx(2.0, rel=1e-15)
    nodes, weights = panel_nodes(np.array([0.0, 1.0, 3.0]))
    assert nodes.shape == (2, 16)
    assert float((weights * nodes ** 3).sum()) == pytest.approx(81.0 / 4.0, rel=1e-13)


def test_wynn_accelerates_alternating_series():
    k = np.arange(12)
    s = np.cumsum((-1.0) ** k / (2 * k + 1))
    lim, err = wynn_epsilon(s)
    assert lim == pytest.approx(np.pi / 4, abs=1e-8)
    assert abs(s[-1] - np.pi / 4) > 1e-2
