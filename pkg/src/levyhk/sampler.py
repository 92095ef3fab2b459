"""Monte Carlo sampling of increments ``Y_t``.

An increment is ``t b_eps + G + J + S`` where ``b_eps`` is the drift
truncated at the cutoff ``eps``, ``G`` is Gaussian with covariance
``2 t A`` (the exponent is ``e^{-t <z, A z>}``), ``J`` is the sum of the
jumps larger than ``eps`` (a compound Poisson variable) and ``S`` replaces
the compensated small jumps: either a Gaussian with covariance
``t int_{|z|<eps} z z^T n(z) dz`` or nothing.

Jump radii are drawn by inverting the tabulated tail mass of the profile in
log-log coordinates; directions are uniform and the anisotropy is applied by
thinning against the envelope ``comp_upper * nu0(|x|)``. Random numbers come
from Philox streams keyed by ``(seed, block index)`` over fixed blocks of
samples, so results do not depend on how blocks are scheduled.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .characteristics import characteristics
from .errors import JumpBudgetError
from .model import sphere_area

SMALL_JUMP_MODES = ("gaussian-substitute", "drop-with-compensation")
BLOCK = 4096
R_CAP = 700.0  # log of the largest radius drawn


@dataclass(frozen=True)
class SamplerSettings:
    """Sampling parameters.

    Attributes
    ----------
    jump_cutoff : float or None
        ``eps``; ``None`` picks the radius where the expected number of large
        jumps per sample is ``jumps_per_sample``.
    small_jump_mode : str
        ``gaussian-substitute`` or ``drop-with-compensation``.
    n_samples : int
    seed : int
    histogram_bins : int
    jump_budget : float
        Maximum expected total number of large jumps.
    jumps_per_sample : float
        Target used when ``jump_cutoff`` is ``None``.
    threads : int or None
        Worker threads; ``None`` reads ``LEVYHK_THREADS`` (default 1).
    """

    jump_cutoff: float | None = None
    small_jump_mode: str = "gaussian-substitute"
    n_samples: int = 100_000
    seed: int = 0
    histogram_bins: int = 200
    jump_budget: float = 5e7
    jumps_per_sample: float = 200.0
    threads: int | None = None

    def __post_init__(self):
        if self.jump_cutoff is not None and not self.jump_cutoff > 0:
            raise ValueError("jump_cutoff must be positive")
        if self.small_jump_mode not in SMALL_JUMP_MODES:
            raise ValueError(f"small_jump_mode must be one of {SMALL_JUMP_MODES}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.histogram_bins < 1:
            raise ValueError("histogram_bins must be at least 1")


@dataclass
class EmpiricalDensity:
    """Histogram of samples.

    Attributes
    ----------
    bin_edges : ndarray or tuple of ndarray
    bin_mass : ndarray
        Fraction of all samples per bin.
    n_used : int
        Samples that fell inside the grid.
    standard_error : ndarray
        Binomial standard error of each ``bin_mass``.
    n_total : int
    """

    bin_edges: object
    bin_mass: np.ndarray
    n_used: int
    standard_error: np.ndarray
    n_total: int

    @property
    def bin_volume(self):
        edges = self.bin_edges if isinstance(self.bin_edges, tuple) else (self.bin_edges,)
        vol = np.ones(())
        for e in edges:
            vol = np.multiply.outer(vol, np.diff(e))
        return vol

    @property
    def density(self):
        return self.bin_mass / self.bin_volume

    @property
    def density_error(self):
        return self.standard_error / self.bin_volume

    @property
    def centers(self):
        edges = self.bin_edges if isinstance(self.bin_edges, tuple) else (self.bin_edges,)
        c = [0.5 * (e[1:] + e[:-1]) for e in edges]
        return c[0] if len(c) == 1 else c


# ------------------------------------------------------------- radii
class _RadiusSampler:
    """Inverse of the envelope tail ``G(r) = c_up int_{|x|>=r} nu0(|x|) dx`` for ``r >= eps``."""

    def __init__(self, model, eps, per_decade=64):
        base = characteristics(model.isotropic_part())
        self.eps = eps
        up = model.comp_upper if model.anisotropy is not None else 1.0
        hi = np.exp(min(340.0, np.log(eps) + 690.0))
        r = np.exp(np.linspace(np.log(eps), np.log(hi), int(np.log10(hi / eps) * per_decade) + 1))
        g = up * base.tail_mass(r)
        keep = g > g[0] * 1e-300
        self.lr = np.log(r[keep])
        self.lg = np.log(g[keep])
        self.rate = float(g[0])
        # extrapolation slope of log G beyond the table
        self.slope = float((self.lg[-1] - self.lg[-2]) / (self.lr[-1] - self.lr[-2])) if keep.sum() > 1 else -np.inf
        self.bounded = not keep.all()

    def __call__(self, u):
        """Radii with ``G(r) = u G(eps)`` for ``u`` in ``(0, 1]``."""
        lt = np.log(u) + self.lg[0]
        # lg is decreasing: interpolate on the reversed arrays
        out = np.interp(-lt, -self.lg, self.lr)
        beyond = lt < self.lg[-1]
        if beyond.any() and not self.bounded and np.isfinite(self.slope) and self.slope < 0:
            out[beyond] = self.lr[-1] + (lt[beyond] - self.lg[-1]) / self.slope
        # radii past e^700 (log-type tails) are capped to keep sums finite
        return np.exp(np.minimum(out, R_CAP))


def choose_cutoff(model, t, jumps_per_sample=200.0):
    """Radius ``eps`` with ``t * N(|x| > eps)`` equal to ``jumps_per_sample``."""
    base = characteristics(model.isotropic_part())
    up = model.comp_upper if model.anisotropy is not None else 1.0
    target = jumps_per_sample / (t * up)
    lo, hi = -300.0, 300.0
    if base.tail_mass(np.array([np.exp(lo)]))[0] <= target:
        return float(np.exp(lo))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if base.tail_mass(np.array([np.exp(mid)]))[0] > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-10:
            break
    return float(np.exp(hi))


def small_jump_covariance(model, eps):
    """``int_{|z|<eps} z z^T n(z) dz``."""
    d = model.dim
    if d == 1:
        return np.array([[float(characteristics(model).second_moment(np.array([eps]))[0])]])
    base = characteristics(model.isotropic_part())
    radial = float(base.second_moment(np.array([eps]))[0]) / sphere_area(d)
    return model.angular_second() * radial


def _gauss_factor(S):
    w, v = np.linalg.eigh(0.5 * (S + S.T))
    return v * np.sqrt(np.clip(w, 0.0, None))


# ------------------------------------------------------------ sampling
def _block(model, t, k, n, settings, eps, radii, shift, L, up):
    d = model.dim
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([settings.seed, k])))
    out = np.broadcast_to(shift, (n, d)).copy()
    if L is not None:
        out += rng.standard_normal((n, d)) @ L.T
    counts = rng.poisson(t * radii.rate, size=n)
    m = int(counts.sum())
    if m:
        r = radii(1.0 - rng.random(m))
        if d == 1:
            dirs = np.where(rng.random(m) < 0.5, -1.0, 1.0)[:, None]
        else:
            g = rng.standard_normal((m, d))
            dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
        jumps = r[:, None] * dirs
        if model.anisotropy is not None:
            keep = rng.random(m) * up < model.anisotropy(jumps)
            jumps = jumps * keep[:, None]
        owner = np.repeat(np.arange(n), counts)
        for j in range(d):
            out[:, j] += np.bincount(owner, weights=jumps[:, j], minlength=n)
    return out


def sample_increments(model, t, settings=SamplerSettings()):
    """Independent samples of ``Y_t``, shape ``(n_samples, d)``.

    Raises
    ------
    JumpBudgetError
        If ``n_samples * t * N(|x| > eps)`` exceeds ``jump_budget``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    d = model.dim
    eps = settings.jump_cutoff
    if eps is None:
        eps = choose_cutoff(model, t, settings.jumps_per_sample)
    radii = _RadiusSampler(model, eps)
    expected = settings.n_samples * t * radii.rate
    if expected > settings.jump_budget:
        raise JumpBudgetError(
            f"expected {expected:.3g} large jumps exceed the budget {settings.jump_budget:.3g}; "
            "increase jump_cutoff")
    up = model.comp_upper if model.anisotropy is not None else 1.0
    ch = characteristics(model)
    shift = t * ch.drift_br(np.array([eps]))[0]
    cov = 2.0 * t * np.asarray(model.A)
    if settings.small_jump_mode == "gaussian-substitute":
        cov = cov + t * small_jump_covariance(model, eps)
    L = _gauss_factor(cov) if np.any(cov != 0) else None
    n = settings.n_samples
    blocks = [(k, min(BLOCK, n - k * BLOCK)) for k in range((n + BLOCK - 1) // BLOCK)]
    threads = settings.threads or int(os.environ.get("LEVYHK_THREADS", "1") or 1)

    def run(b):
        return _block(model, t, b[0], b[1], settings, eps, radii, shift, L, up)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    return np.concatenate(parts, axis=0)


def empirical_density(samples, grid):
    """Histogram with binomial standard errors.

    Parameters
    ----------
    samples : array, shape (n,) or (n, d)
    grid : array of edges (``d = 1``) or tuple of edge arrays

    Raises
    ------
    ValueError
        On an empty grid or no samples.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if len(x) == 0:
        raise ValueError("no samples")
    edges = grid if isinstance(grid, tuple) else (np.asarray(grid, dtype=float),)
    if any(len(e) < 2 for e in edges):
        raise ValueError("empty grid: need at least two edges per axis")
    if len(edges) != x.shape[1]:
        raise ValueError("grid dimension does not match the samples")
    counts, _ = np.histogramdd(x, bins=[np.asarray(e, dtype=float) for e in edges])
    n = len(x)
    p = counts / n
    se = np.sqrt(p * (1.0 - p) / n)
    be = edges[0] if len(edges) == 1 else tuple(edges)
    return EmpiricalDensity(be, p, int(counts.sum()), se, n)
