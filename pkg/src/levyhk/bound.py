"""The bound function ``rho_t`` and its relatives.

For the radial profile ``nu0`` of a model write ``h0`` and ``K0`` for the
characteristic functions of the isotropic measure ``nu0(|x|) dx``. Then

    rho_t(x) = min([h0^-1(1/t)]^-d, t K0(|x|) |x|^-d),

and the simplified majorant ``phi_t`` equals the plateau value for
``|x| <= h0^-1(1/t)`` and ``t K0(|x|) |x|^-d`` beyond. The two branches of
``rho_t`` cross at a unique radius ``r0``, which is bracketed by
``[h0^-1(3/t), h0^-1(1/t)]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .characteristics import characteristics
from .errors import LevyHKError, NotInvertibleError
from .model import LevyModel, sphere_area
from .quadrature import integrate

CENTERING_MODES = ("h-inverse", "plain-drift", "drift-plus-small-jumps")


class BracketError(LevyHKError):
    """The crossover radius is not inside its theoretical bracket."""


class ModePreconditionError(LevyHKError):
    """A centering mode was requested for a model that does not support it."""


@dataclass(frozen=True, eq=False)
class BoundFunctionContext:
    """Model, time and centering rule for bound evaluations.

    Attributes
    ----------
    model : LevyModel
    t : float
    centering_mode : str
        ``h-inverse`` (``t b_{h0^-1(1/t)}``), ``plain-drift`` (``t b``) or
        ``drift-plus-small-jumps`` (``t (b + int_{|z|<1} z n(z) dz)``).
    h_inv_1t : float
        Cached ``h0^-1(1/t)``.
    """

    model: LevyModel
    t: float
    centering_mode: str = "h-inverse"
    h_inv_1t: float = field(init=False)

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")
        if self.centering_mode not in CENTERING_MODES:
            raise ValueError(f"centering_mode must be one of {CENTERING_MODES}")
        object.__setattr__(self, "h_inv_1t", float(self.base.h_inv(1.0 / self.t)))

    @property
    def base(self):
        """Characteristics of the isotropic profile measure ``nu0(|x|) dx``."""
        prof_model = self.model.__dict__.get("_profile_model")
        if prof_model is None:
            prof_model = self.model.isotropic_part()
            object.__setattr__(self.model, "_profile_model", prof_model)
        return characteristics(prof_model)

    @property
    def dim(self):
        return self.model.dim

    @property
    def on_diagonal(self):
        """``[h0^-1(1/t)]^-d`` (may underflow for very heavy tails)."""
        return float(np.exp(self.log_on_diagonal))

    @property
    def log_on_diagonal(self):
        return -self.dim * float(np.log(self.h_inv_1t))


def _norms(ctx, x):
    x = np.asarray(x, dtype=float)
    if ctx.dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        return np.abs(x)
    return np.linalg.norm(x, axis=-1)


def log_tail_branch(ctx, r):
    """``log(t K0(r) r^-d)`` for radii ``r > 0``."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(ctx.t * ctx.base.K(r)) - ctx.dim * np.log(r)


def tail_branch(ctx, r):
    """``t K0(r) r^-d`` for radii ``r > 0``."""
    return np.exp(log_tail_branch(ctx, r))


def eval_rho(ctx, x):
    """``rho_t(x)``; points have shape ``(..., d)`` (plain scalars allowed when ``d = 1``)."""
    r = _norms(ctx, x)
    out = np.full(r.shape, ctx.on_diagonal)
    nz = r > 0
    if np.any(nz):
        out[nz] = np.minimum(ctx.on_diagonal, tail_branch(ctx, r[nz]))
    return out if out.ndim else float(out)


def eval_phi(ctx, x):
    """``phi_t(x)``: plateau inside ``h0^-1(1/t)``, tail branch outside."""
    r = _norms(ctx, x)
    out = np.full(r.shape, ctx.on_diagonal)
    far = r > ctx.h_inv_1t
    if np.any(far):
        out[far] = tail_branch(ctx, r[far])
    return out if out.ndim else float(out)


def r0_bracket(ctx):
    """``(h0^-1(3/t), h0^-1(1/t))``."""
    return float(ctx.base.h_inv(3.0 / ctx.t)), ctx.h_inv_1t


def solve_r0(ctx, rtol=1e-13, steps=200):
    """Crossover radius of the two branches of ``rho_t``.

    Bisection in ``log r`` on the strictly decreasing map ``r -> t K0(r) r^-d``
    started from the bracket ``[h0^-1(3/t), h0^-1(1/t)]``.

    Raises
    ------
    BracketError
        If the branch values at the bracket ends do not straddle the plateau.
    """
    lo, hi = r0_bracket(ctx)
    target = ctx.log_on_diagonal

    def g(r):
        return float(log_tail_branch(ctx, np.array([r]))[0]) - target

    glo, ghi = g(lo), g(hi)
    if glo < -1e-12 or ghi > 1e-12:
        raise BracketError(f"r0 bracket [{lo:.6g}, {hi:.6g}] does not straddle the crossing "
                           f"(g={glo:.3e}, {ghi:.3e})")
    a, b = np.log(lo), np.log(hi)
    for _ in range(steps):
        mid = 0.5 * (a + b)
        if g(np.exp(mid)) >= 0:
            a = mid
        else:
            b = mid
        if b - a <= rtol:
            break
    return float(np.exp(0.5 * (a + b)))


def integrate_rho(ctx, method="fubini", rtol=1e-12):
    """``int rho_t(x) dx`` split exactly at ``r0``.

    The disc ``|x| < r0`` contributes ``|S^{d-1}| r0^d / d`` times the plateau
    and the tail is ``t |S^{d-1}| int_{r0}^inf K0(r) r^-1 dr``.

    Parameters
    ----------
    method : {"fubini", "direct"}
        ``fubini`` swaps the order of integration in the tail, which gives
        ``int_{r0}^inf K0(r) r^-1 dr = h0(r0) / 2``; ``direct`` integrates
        ``K0`` in log radius (slow for log-type tails).
    """
    d = ctx.dim
    w = sphere_area(d)
    r0 = solve_r0(ctx)
    disc = w / d * np.exp(d * np.log(r0) + ctx.log_on_diagonal)
    base = ctx.base
    if method == "fubini":
        tail = 0.5 * float(base.h(np.array([r0]))[0])
    elif method == "direct":
        def f(u):
            with np.errstate(over="ignore"):
                return base.K(np.exp(u))
        tail = integrate(f, np.log(r0), np.inf, rtol=rtol, max_intervals=20000).value
    else:
        raise ValueError("method must be 'fubini' or 'direct'")
    return float(disc + ctx.t * w * tail)


def integral_bounds(d):
    """Two-sided bounds ``[|S^{d-1}|/2, |S^{d-1}|/2 (1 + 2/d)]`` on ``int rho_t``."""
    w = sphere_area(d)
    return 0.5 * w, 0.5 * w * (1.0 + 2.0 / d)


# ------------------------------------------------------------ centering
def small_jump_mean(model):
    """``int_{|z|<1} z n(z) dz``; raises if the first moment diverges at 0."""
    u = np.array([-60.0, -50.0])
    slope = float(np.diff(model.radial_log_weight(u) + 2.0 * u)[0] / 10.0)
    if slope <= 1e-3:
        raise ModePreconditionError(
            "drift-plus-small-jumps needs int_{|z|<1} |z| n(z) dz < inf (upper scaling index < 1)")
    if model.symmetric:
        return np.zeros(model.dim)
    ch = characteristics(model)
    # b_r - b -> -int_{r<|z|<1} z n as r -> 0
    return -(ch.drift_br(np.array([np.exp(-U_SMALL)]))[0] - model.drift) + _residual_first(model)


U_SMALL = 300.0


def _residual_first(model):
    # int_{|z| < e^-U_SMALL} z n(z) dz, integrated directly
    ch = characteristics(model)
    f = ch._first_integrand
    out = np.zeros(model.dim)
    for k in range(model.dim):
        out[k] = integrate(lambda u: f(u)[:, k], -np.inf, -U_SMALL, rtol=1e-10).value
    return out


@dataclass
class CancellationCheck:
    """Grid check of bounded drift cancellation and ``inf r h(r) > 0``."""

    sup_shift: float
    inf_rh: float
    ratio: float
    passes: bool
    radii: list

    def to_dict(self):
        return {"sup_shift": self.sup_shift, "inf_rh": self.inf_rh, "ratio": self.ratio,
                "passes": self.passes, "radii": self.radii}


def cancellation_check(model, theta=1.0, n=32, decades=6, growth_tol=0.05):
    """Check ``sup_{r<theta} |b_r - b| < inf`` and ``inf_{r<theta} r h(r) > 0`` on a grid.

    ``n`` log-spaced radii cover ``[theta 10^-decades, theta)``. The check
    passes when the shift stays bounded (its sup over the lowest decade
    exceeds the sup over the rest by less than ``growth_tol``) and ``r h(r)``
    stays away from zero in the same sense.
    """
    ch = characteristics(model)
    r = theta * np.logspace(-decades, 0, n, endpoint=False)
    shift = np.linalg.norm(ch.drift_br(r) - model.drift, axis=-1)
    rh = r * ch.h(r)
    low = r < theta * 10.0 ** (-decades + 1)
    sup_all = float(shift.max())
    sup_rest = float(shift[~low].max())
    inf_all = float(rh.min())
    inf_rest = float(rh[~low].min())
    bounded = sup_all <= (1.0 + growth_tol) * sup_rest + 1e-12
    positive = inf_all >= (1.0 - growth_tol) * inf_rest and inf_all > 0
    ratio = sup_all / inf_all if inf_all > 0 else np.inf
    return CancellationCheck(sup_all, inf_all, ratio, bool(bounded and positive), r.tolist())


def drift_center(ctx):
    """Centering vector for the requested mode.

    Raises
    ------
    ModePreconditionError
        ``plain-drift`` on a non-symmetric model that fails the cancellation
        check; ``drift-plus-small-jumps`` when the small-jump first moment
        diverges.
    """
    m = ctx.model
    t = ctx.t
    if ctx.centering_mode == "h-inverse":
        return t * characteristics(m).drift_br(np.array([ctx.h_inv_1t]))[0]
    if ctx.centering_mode == "plain-drift":
        if not m.symmetric:
            chk = cancellation_check(m)
            if not chk.passes:
                raise ModePreconditionError(
                    f"plain-drift centering: cancellation check failed (sup|b_r-b|={chk.sup_shift:.3g}, "
                    f"inf r h(r)={chk.inf_rh:.3g})")
        return t * m.drift.copy()
    return t * (m.drift + small_jump_mean(m))


def small_shift_constant(ctx, n_x=41, n_z=17):
    """Measured ``sup rho_t(x+z) / rho_t(x)`` over ``|z| <= max(h0^-1(3/t), |x|/2)``.

    Returns the measured constant; the reference shape is ``2^(d+2)``.
    """
    d = ctx.dim
    H3 = float(ctx.base.h_inv(3.0 / ctx.t))
    xs = np.concatenate([[0.0], ctx.h_inv_1t * np.logspace(-2, 2, n_x - 1)])
    worst = 0.0
    e = np.zeros(d)
    e[0] = 1.0
    dirs = [e, -e]
    if d > 1:
        f = np.zeros(d)
        f[1] = 1.0
        dirs += [f, (e + f) / np.sqrt(2.0)]
    for xr in xs:
        x = xr * e
        rad = max(H3, xr / 2.0)
        base = eval_rho(ctx, x[None, :])[0]
        zs = np.linspace(0.0, rad, n_z)
        pts = np.concatenate([x + zs[:, None] * v for v in dirs])
        worst = max(worst, float(np.max(eval_rho(ctx, pts) / base)))
    return worst


def ensure_unbounded_profile(ctx):
    """Raise if ``h0(0+)`` is finite (the crossover radius may not exist)."""
    try:
        ctx.base.h_inv(1e12)
    except NotInvertibleError as exc:
        raise BracketError("profile mass is finite; h0 is bounded at 0") from exc
