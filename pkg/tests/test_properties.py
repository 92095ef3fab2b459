import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from levyhk.bound import BoundFunctionContext, eval_rho
from levyhk.characteristics import characteristics
from levyhk.density import density_at
from levyhk.model import builtin_model
from levyhk.sampler import SamplerSettings, sample_increments

NAMES = ["cauchy", "mixture", "tempered", "truncated", "log-heavy"]
MODELS = {(n, d): builtin_model(n, d) for n in NAMES for d in (1, 2)}
FAST = settings(max_examples=30, deadline=None)

name = st.sampled_from(NAMES)
dim = st.sampled_from([1, 2])
log_r = st.floats(-6.0, 6.0)
log_t = st.floats(-2.0, 1.0)


def _ch(n, d):
    return characteristics(MODELS[(n, d)])


@FAST
@given(name, dim, log_r, st.floats(0.01, 3.0))
def test_h_decreasing_and_K_below_h(n, d, a, step):
    ch = _ch(n, d)
    r = np.array([np.exp(a), np.exp(a + step)])
    h = ch.h(r)
    assert h[1] < h[0]
    assert np.all(ch.K(r) <= h * (1 + 1e-12))
    # r^2 h(r) is non-decreasing
    assert r[1] ** 2 * h[1] >= r[0] ** 2 * h[0] * (1 - 1e-10)


@FAST
@given(name, dim, st.floats(-1.0, 3.0))
def test_h_inverse_round_trip(n, d, lu):
    ch = _ch(n, d)
    u = np.array([10.0 ** lu])
    assert abs(ch.h(ch.h_inv(u))[0] / u[0] - 1) < 1e-10


@FAST
@given(name, dim, log_t, st.floats(-3.0, 3.0), st.floats(0, 2 * np.pi))
def test_rho_below_on_diagonal_and_radial(n, d, lt, lx, phi):
    ctx = BoundFunctionContext(MODELS[(n, d)], 10.0 ** lt)
    r = 10.0 ** lx
    if d == 1:
        x = np.array([[r], [-r]])
    else:
        x = np.array([[r, 0.0], [r * np.cos(phi), r * np.sin(phi)]])
    v = eval_rho(ctx, x)
    assert np.all(v <= ctx.on_diagonal * (1 + 1e-12))
    assert abs(v[0] - v[1]) <= 1e-12 * v[0]


@FAST
@given(name, dim, log_r, st.floats(0.01, 2.0))
def test_psi_star_monotone_and_sandwiched(n, d, a, step):
    ch = _ch(n, d)
    z = np.array([np.exp(a), np.exp(a + step)])
    p = ch.psi_star(z)
    assert p[1] >= p[0] * (1 - 1e-9)
    q = p / ch.h(1.0 / z)
    assert np.all(q >= 1.0 / (8 * (1 + 2 * d)) * (1 - 1e-8)) and np.all(q <= 2.0 * (1 + 1e-8))


@settings(max_examples=8, deadline=None)
@given(st.sampled_from(["cauchy", "mixture", "tempered"]), log_t,
       st.lists(st.floats(-20.0, 20.0), min_size=2, max_size=8))
def test_density_non_negative(n, lt, xs):
    p = np.atleast_1d(density_at(MODELS[(n, 1)], 10.0 ** lt, np.array(xs)))
    assert np.all(p >= -1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(NAMES))
def test_sampler_seed_determinism(seed, n):
    s = SamplerSettings(n_samples=500, seed=seed)
    a = sample_increments(MODELS[(n, 1)], 0.5, s)
    b = sample_increments(MODELS[(n, 1)], 0.5, s)
    np.testing.assert_array_equal(a, b)
