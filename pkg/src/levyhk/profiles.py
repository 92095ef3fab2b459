"""Radial profiles of isotropic unimodal jump measures.

A profile is a non-increasing function ``nu0 : (0, inf) -> [0, inf)`` used
as the density ``nu0(|x|)`` of a jump measure on ``R^d``. Every profile is
evaluated in log coordinates, ``log nu0(exp(u))``, which keeps the steep
power laws near the origin representable for radii far below ``1e-300``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParameterError, NonMonotoneTableError

KINDS = ("zero", "stable", "stable-mixture", "tempered", "truncated", "log-heavy", "log-slow",
         "table", "custom")


def _log_log1pexp(x):
    # log(log(1 + e^x)) without overflow or cancellation
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < -30.0
    big = x > 30.0
    mid = ~(small | big)
    out[small] = x[small]
    out[big] = np.log(x[big] + np.exp(-x[big]))
    out[mid] = np.log(np.log1p(np.exp(x[mid])))
    return out


@dataclass(frozen=True, eq=False)
class SmoothPart:
    """Signed piece ``sign * nu(r) * 1{r >= start}`` of a profile.

    Each piece is smooth on ``[start, inf)``, which is what oscillatory
    transforms need; a profile with jumps is written as a signed sum of
    such pieces.
    """

    sign: float
    log_nu: Callable
    start: float = 0.0


@dataclass(frozen=True, eq=False)
class UnimodalProfile:
    """Non-increasing radial profile ``nu0``.

    Attributes
    ----------
    kind : str
        One of :data:`KINDS`.
    dim : int
        Ambient dimension ``d``; power-law kinds use ``r**(-d-alpha)``.
    params : dict
        Kind-specific parameters.
    """

    kind: str
    dim: int
    params: dict = field(default_factory=dict)
    _log_nu: Callable = field(default=None, repr=False)
    breakpoints: tuple = ()
    parts: tuple = ()

    def log_nu(self, u):
        """``log nu0(exp(u))`` for an array of log radii (``-inf`` where zero)."""
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return self._log_nu(np.asarray(u, dtype=float))

    def __call__(self, r):
        """``nu0(r)``, vectorized."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(self.log_nu(np.log(r)))

    def to_dict(self):
        out = {"kind": self.kind}
        for k, v in self.params.items():
            if callable(v):
                continue
            out[k] = v
        return out

    @property
    def label(self):
        args = ",".join(f"{k}={v}" for k, v in self.to_dict().items() if k != "kind"
                        and not isinstance(v, (list, tuple)))
        return f"{self.kind}({args})"


def _check_alpha(alpha, name="alpha"):
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise InvalidParameterError(f"{name} must lie in (0, 2), got {alpha}")
    return alpha


def make_profile(kind, dim=1, **params):
    """Build a radial profile.

    Parameters
    ----------
    kind : str
        ``zero`` (no jumps), ``stable`` (``alpha``), ``stable-mixture`` (``alpha``, ``beta``),
        ``tempered`` (``alpha``, ``lam``), ``truncated`` (``alpha``, ``R``),
        ``log-heavy`` (``alpha``), ``log-slow`` (no parameters), ``table`` (``pairs``) or ``custom``
        (``func``, optional ``breakpoints`` and ``check_monotone``).
    dim : int
        Dimension of the ambient space.

    Returns
    -------
    UnimodalProfile

    Raises
    ------
    InvalidParameterError
        On out-of-range parameters.
    NonMonotoneTableError
        If tabulated values increase.
    """
    dim = int(dim)
    if dim < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {dim}")
    d = float(dim)

    if kind == "zero":
        def f(u):
            return np.full(np.shape(u), -np.inf)
        return UnimodalProfile(kind, dim, {}, f, (), ())

    if kind == "stable":
        a = _check_alpha(params.get("alpha"))

        def f(u):
            return -(d + a) * u
        return UnimodalProfile(kind, dim, {"alpha": a}, f, (), (SmoothPart(1.0, f),))

    if kind == "stable-mixture":
        a = _check_alpha(params.get("alpha"))
        b = _check_alpha(params.get("beta"), "beta")

        def f(u):
            return np.logaddexp(-(d + a) * u, -(d + b) * u)
        return UnimodalProfile(kind, dim, {"alpha": a, "beta": b}, f, (), (SmoothPart(1.0, f),))

    if kind == "tempered":
        a = _check_alpha(params.get("alpha"))
        lam = float(params.get("lam", params.get("lambda", 1.0)))
        if not lam > 0:
            raise InvalidParameterError(f"tempering rate must be positive, got {lam}")

        def f(u):
            return -(d + a) * u - lam * np.exp(u)
        return UnimodalProfile(kind, dim, {"alpha": a, "lam": lam}, f, (), (SmoothPart(1.0, f),))

    if kind == "truncated":
        a = _check_alpha(params.get("alpha"))
        R = float(params.get("R", 1.0))
        if not R > 0:
            raise InvalidParameterError(f"truncation radius must be positive, got {R}")
        logR = np.log(R)

        def stable(u):
            return -(d + a) * u

        def f(u):
            return np.where(u < logR, -(d + a) * u, -np.inf)
        parts = (SmoothPart(1.0, stable), SmoothPart(-1.0, stable, R))
        return UnimodalProfile(kind, dim, {"alpha": a, "R": R}, f, (R,), parts)

    if kind == "log-heavy":
        a = _check_alpha(params.get("alpha"))

        def f(u):
            return -d * u - 2.0 * _log_log1pexp(0.5 * a * u)
        return UnimodalProfile(kind, dim, {"alpha": a}, f, (), (SmoothPart(1.0, f),))

    if kind == "log-slow":
        # r^-d / ((1 + log(1 + 1/r)) (1 + r)): h(0+) is infinite only through a
        # log-log divergence, so no power scaling survives at the origin
        def f(u):
            return -d * u - np.log1p(np.logaddexp(0.0, -u)) - np.logaddexp(0.0, u)
        return UnimodalProfile(kind, dim, {}, f, (), (SmoothPart(1.0, f),))

    if kind == "table":
        pairs = np.asarray(params.get("pairs"), dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2 or len(pairs) < 2:
            raise InvalidParameterError("table profile needs at least two (r, nu) pairs")
        pairs = pairs[np.argsort(pairs[:, 0])]
        r, v = pairs[:, 0], pairs[:, 1]
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise InvalidParameterError("table radii must be positive and distinct")
        if np.any(v <= 0):
            raise InvalidParameterError("table values must be positive")
        if np.any(np.diff(v) > 0):
            i = int(np.argmax(np.diff(v) > 0))
            raise NonMonotoneTableError(
                f"table increases between r={r[i]:g} and r={r[i + 1]:g}")
        lr, lv = np.log(r), np.log(v)
        lo_slope = _edge_slope(lr, lv, low=True)
        hi_slope = _edge_slope(lr, lv, low=False)

        def f(u):
            out = np.interp(u, lr, lv)
            out = np.where(u < lr[0], lv[0] + lo_slope * (u - lr[0]), out)
            return np.where(u > lr[-1], lv[-1] + hi_slope * (u - lr[-1]), out)
        if lo_slope > -d or lo_slope <= -d - 2:
            raise InvalidParameterError(
                f"extrapolated small-radius exponent {-lo_slope:.3f} must lie in ({d:g}, {d + 2:g})")
        if hi_slope >= -d:
            raise InvalidParameterError(
                f"extrapolated tail exponent {-hi_slope:.3f} must exceed {d:g}")
        return UnimodalProfile(kind, dim, {"pairs": pairs.tolist()}, f, tuple(r[1:-1]),
                               (SmoothPart(1.0, f),))

    if kind == "custom":
        func = params.get("func")
        if not callable(func):
            raise InvalidParameterError("custom profile needs a callable 'func'")
        bps = tuple(sorted(float(b) for b in params.get("breakpoints", ())))

        def f(u):
            return np.log(np.asarray(func(np.exp(u)), dtype=float))
        prof = UnimodalProfile(kind, dim, {"func": func, "breakpoints": list(bps)}, f, bps,
                               (SmoothPart(1.0, f),))
        if params.get("check_monotone", True):
            check_monotone(prof)
        return prof

    raise InvalidParameterError(f"unknown profile kind {kind!r}; expected one of {KINDS}")


def _edge_slope(lr, lv, low):
    # least-squares slope over the first or last decade of the table
    span = np.log(10.0)
    if low:
        sel = lr <= lr[0] + span
    else:
        sel = lr >= lr[-1] - span
    if sel.sum() < 2:
        sel = np.zeros_like(sel)
        if low:
            sel[:2] = True
        else:
            sel[-2:] = True
    return float(np.polyfit(lr[sel], lv[sel], 1)[0])


def check_monotone(profile, r_min=1e-6, r_max=1e6, n=100):
    """Raise if ``profile`` increases anywhere on ``n`` log-spaced radii."""
    u = np.linspace(np.log(r_min), np.log(r_max), n)
    lv = profile.log_nu(u)
    if np.any(np.isnan(lv)):
        raise InvalidParameterError("profile evaluates to NaN")
    inc = np.diff(lv) > 1e-12 * np.maximum(1.0, np.abs(lv[:-1]))
    if np.any(inc):
        i = int(np.argmax(inc))
        raise NonMonotoneTableError(
            f"profile increases between r={np.exp(u[i]):.4g} and r={np.exp(u[i + 1]):.4g}")


def profile_from_dict(spec, dim):
    """Build a profile from its JSON form, e.g. ``{"kind": "stable", "alpha": 1.0}``."""
    spec = dict(spec)
    kind = spec.pop("kind")
    if "lambda" in spec:
        spec["lam"] = spec.pop("lambda")
    return make_profile(kind, dim, **spec)
