import numpy as np
import pytest

from levyhk.bound import (BoundFunctionContext, ModePreconditionError, cancellation_check, drift_center,
                          eval_phi, eval_rho, integral_bounds, integrate_rho, r0_bracket,
                          small_jump_mean, small_shift_constant, solve_r0)
from levyhk.model import Anisotropy, LevyModel, builtin_model
from levyhk.profiles import make_profile

TS = (0.01, 0.1, 1.0, 10.0)


def test_cauchy_rho_closed_form(cauchy):
    # h0^-1(1/t) = 4t, K0(r) = 2/r: rho_t(x) = min(1/(4t), 2t/x^2)
    for t in (0.25, 1.0, 4.0):
        ctx = BoundFunctionContext(cauchy, t)
        x = np.linspace(-20, 20, 41)
        np.testing.assert_allclose(eval_rho(ctx, x), np.minimum(1 / (4 * t), 2 * t / np.maximum(x ** 2, 1e-300)),
                                   rtol=1e-12)


def test_cauchy_r0_and_integral(cauchy):
    ctx = BoundFunctionContext(cauchy, 0.25)
    assert solve_r0(ctx) == pytest.approx(np.sqrt(0.5), abs=1e-12)
    for t in TS:
        assert integrate_rho(BoundFunctionContext(cauchy, t)) == pytest.approx(2 * np.sqrt(2), rel=1e-12)


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("name", ["cauchy", "mixture", "tempered", "truncated", "log-heavy"])
def test_integral_bounds_and_bracket(name, d):
    m = builtin_model(name, d)
    lo, hi = integral_bounds(d)
    for t in TS:
        ctx = BoundFunctionContext(m, t)
        v = integrate_rho(ctx)
        assert lo * (1 - 1e-10) <= v <= hi * (1 + 1e-10)
        a, b = r0_bracket(ctx)
        assert a * (1 - 1e-12) <= solve_r0(ctx) <= b * (1 + 1e-12)


@pytest.mark.parametrize("name", ["cauchy", "mixture", "tempered"])
def test_fubini_and_direct_routes_agree(name):
    ctx = BoundFunctionContext(builtin_model(name), 1.0)
    assert integrate_rho(ctx, method="direct") == pytest.approx(integrate_rho(ctx), rel=1e-10)


def test_phi_dominates_rho(builtin):
    for t in (0.1, 1.0):
        ctx = BoundFunctionContext(builtin, t)
        x = ctx.h_inv_1t * np.geomspace(1e-3, 1e3, 61)
        rho, phi = eval_rho(ctx, x), eval_phi(ctx, x)
        assert np.all(phi >= rho * (1 - 1e-12))


def test_small_shift_constant_cauchy(cauchy):
    c = small_shift_constant(BoundFunctionContext(cauchy, 1.0))
    assert 1.0 <= c <= 2.0 ** 3 + 1e-9


def test_centering_modes():
    p, q = 1.5, 0.5
    m = LevyModel(make_profile("stable", 1, alpha=0.5), drift=[0.2],
                  anisotropy=Anisotropy("two-sided", {"plus": p, "minus": q}), comp_lower=q, comp_upper=p)
    t = 2.0
    ctx = BoundFunctionContext(m, t, "drift-plus-small-jumps")
    # int_{|z|<1} z n = (p - q) int_0^1 z^-0.5 dz = 2 (p - q)
    assert small_jump_mean(m)[0] == pytest.approx(2 * (p - q), rel=1e-9)
    assert drift_center(ctx)[0] == pytest.approx(t * (0.2 + 2 * (p - q)), rel=1e-9)
    # alpha > 1 has no small-jump mean
    m2 = m.with_(profile=make_profile("stable", 1, alpha=1.5))
    with pytest.raises(ModePreconditionError):
        drift_center(BoundFunctionContext(m2, t, "drift-plus-small-jumps"))


def test_plain_drift_equals_h_inverse_on_symmetric(cauchy):
    m = cauchy.with_(drift=[0.4])
    for t in (0.3, 3.0):
        a = drift_center(BoundFunctionContext(m, t, "plain-drift"))
        b = drift_center(BoundFunctionContext(m, t, "h-inverse"))
        np.testing.assert_allclose(a, b, rtol=1e-14)


def test_cancellation_check_rejects_unbounded_shift():
    m = LevyModel(make_profile("stable", 1, alpha=1.5),
                  anisotropy=Anisotropy("two-sided", {"plus": 1.5, "minus": 0.5}), comp_lower=0.5, comp_upper=1.5)
    assert not cancellation_check(m).passes
    with pytest.raises(ModePreconditionError):
        drift_center(BoundFunctionContext(m, 1.0, "plain-drift"))


def test_invalid_context():
    with pytest.raises(ValueError):
        BoundFunctionContext(builtin_model("cauchy"), 0.0)
    with pytest.raises(ValueError):
        BoundFunctionContext(builtin_model("cauchy"), 1.0, "nope")
