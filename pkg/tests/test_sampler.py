import numpy as np
import pytest
from scipy import stats

from levyhk.errors import JumpBudgetError
from levyhk.model import LevyModel, builtin_model
from levyhk.profiles import make_profile
from levyhk.sampler import SamplerSettings, choose_cutoff, empirical_density, sample_increments


def test_seed_determinism_and_thread_invariance(cauchy):
    s = SamplerSettings(n_samples=10_000, seed=7, threads=1)
    a = sample_increments(cauchy, 1.0, s)
    b = sample_increments(cauchy, 1.0, SamplerSettings(n_samples=10_000, seed=7, threads=4))
    np.testing.assert_array_equal(a, b)
    c = sample_increments(cauchy, 1.0, SamplerSettings(n_samples=10_000, seed=8))
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("mode", ["gaussian-substitute", "drop-with-compensation"])
def test_cauchy_ks(cauchy, mode):
    t = 0.5
    x = sample_increments(cauchy, t, SamplerSettings(n_samples=20_000, seed=1, small_jump_mode=mode))
    assert stats.kstest(x[:, 0], stats.cauchy(scale=np.pi * t).cdf).pvalue > 1e-3


def test_gaussian_part_ks():
    m = LevyModel(make_profile("zero", 1), A=[[0.5]])
    x = sample_increments(m, 2.0, SamplerSettings(n_samples=20_000, seed=3))
    assert stats.kstest(x[:, 0], stats.norm(scale=np.sqrt(2.0)).cdf).pvalue > 1e-3


def test_truncated_variance_per_mode():
    # truncated alpha = 1, R = 1: int x^2 n = 2 per unit time
    m = LevyModel(make_profile("truncated", 1, alpha=1.0, R=1.0))
    t, eps, n = 1.5, 0.05, 100_000
    sub = sample_increments(m, t, SamplerSettings(n_samples=n, seed=4, jump_cutoff=eps))
    drop = sample_increments(m, t, SamplerSettings(n_samples=n, seed=4, jump_cutoff=eps,
                                                   small_jump_mode="drop-with-compensation"))
    se = 2 * t * np.sqrt(2.0 / n) * 2  # loose: fourth moment is finite
    assert sub[:, 0].var() == pytest.approx(2 * t, abs=4 * se)
    assert drop[:, 0].var() == pytest.approx(2 * t * (1 - eps), abs=4 * se)
    assert abs(sub[:, 0].mean()) < 4 * np.sqrt(2 * t / n)


def test_jump_budget(cauchy):
    with pytest.raises(JumpBudgetError):
        sample_increments(cauchy, 1.0, SamplerSettings(n_samples=1000, jump_cutoff=1e-6, jump_budget=1e6))


def test_choose_cutoff_rate(cauchy):
    # N(|x| > eps) = 2 / eps for Cauchy
    eps = choose_cutoff(cauchy, 2.0, 200.0)
    assert 2.0 * 2 / eps == pytest.approx(200.0, rel=1e-6)


def test_heavy_tail_sampling_is_finite():
    x = sample_increments(builtin_model("log-heavy"), 1.0, SamplerSettings(n_samples=5000, seed=2))
    assert np.all(np.isfinite(x))


def test_empirical_density_errors_and_mass(cauchy):
    x = sample_increments(cauchy, 1.0, SamplerSettings(n_samples=5000, seed=0))
    e = empirical_density(x, np.linspace(-10, 10, 41))
    assert e.n_total == 5000
    assert e.bin_mass.sum() == pytest.approx(e.n_used / 5000)
    np.testing.assert_allclose(e.standard_error, np.sqrt(e.bin_mass * (1 - e.bin_mass) / 5000))
    with pytest.raises(ValueError):
        empirical_density(x, np.array([1.0]))
    with pytest.raises(ValueError):
        empirical_density(np.zeros((0, 1)), np.linspace(0, 1, 3))
    with pytest.raises(ValueError):
        empirical_density(x, (np.linspace(0, 1, 3), np.linspace(0, 1, 3)))


def test_settings_validation():
    with pytest.raises(ValueError):
        SamplerSettings(jump_cutoff=0.0)
    with pytest.raises(ValueError):
        SamplerSettings(small_jump_mode="exact")
    with pytest.raises(ValueError):
        SamplerSettings(n_samples=0)
    with pytest.raises(ValueError):
        sample_increments(builtin_model("cauchy"), 0.0)


def test_two_dimensional_histogram():
    m = builtin_model("cauchy", 2)
    x = sample_increments(m, 1.0, SamplerSettings(n_samples=4000, seed=5))
    e = empirical_density(x, (np.linspace(-5, 5, 11), np.linspace(-5, 5, 11)))
    assert e.density.shape == (10, 10)
    # rotational symmetry: quadrant masses agree within noise
    q = [e.bin_mass[:5, :5].sum(), e.bin_mass[5:, 5:].sum(), e.bin_mass[:5, 5:].sum(), e.bin_mass[5:, :5].sum()]
    assert max(q) - min(q) < 0.05
