"""Lévy triplets with unimodal-comparable jump measures.

A model is a triplet ``(A, n, b)`` on ``R^d`` whose jump density is
``n(x) = a(x) nu0(|x|)`` with a bounded anisotropy ``comp_lower <= a <=
comp_upper`` and a non-increasing radial profile ``nu0``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.special import gamma

from .errors import (CompoundPoissonWarning, DivergentLevyIntegralError,
                     InvalidParameterError)
from .profiles import UnimodalProfile, make_profile, profile_from_dict
from .quadrature import integrate


def sphere_area(d):
    """Surface area ``2 pi^(d/2) / Gamma(d/2)`` of the unit sphere in ``R^d``."""
    return 2.0 * np.pi ** (d / 2.0) / gamma(d / 2.0)


def sphere_directions(d, n=None):
    """Antipodally symmetric direction set with equal weights summing to ``|S^{d-1}|``.

    ``d = 1`` gives ``{+1, -1}``; ``d = 2`` gives ``n`` (default 32) equally
    spaced angles; ``d = 3`` gives ``n`` (default 128) points built from a
    Fibonacci lattice on a hemisphere and its reflection.
    """
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        n = 32 if n is None else n
        ang = (np.arange(n) + 0.5) * 2.0 * np.pi / n
        th = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    elif d == 3:
        n = 128 if n is None else n
        m = n // 2
        k = np.arange(m) + 0.5
        z = k / m
        phi = np.pi * (1.0 + np.sqrt(5.0)) * k
        s = np.sqrt(1.0 - z * z)
        half = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
        th = np.concatenate([half, -half])
    else:
        raise InvalidParameterError("direction sets are available for d <= 3 only")
    return th, np.full(len(th), sphere_area(d) / len(th))


@dataclass(frozen=True, eq=False)
class Anisotropy:
    """Bounded angular factor ``a(x)``.

    Attributes
    ----------
    kind : str
        ``constant`` (``value``), ``two-sided`` (``plus``, ``minus``; ``d = 1``),
        ``cosine`` (``eps``, ``direction``: ``1 + eps <x/|x|, e>``) or ``custom``
        (``func`` taking an ``(..., d)`` array).
    params : dict
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "constant":
            return np.full(x.shape[:-1], float(p.get("value", 1.0)))
        if self.kind == "two-sided":
            return np.where(x[..., 0] >= 0, float(p["plus"]), float(p["minus"]))
        if self.kind == "cosine":
            e = np.asarray(p["direction"], dtype=float)
            e = e / np.linalg.norm(e)
            nrm = np.linalg.norm(x, axis=-1)
            return 1.0 + float(p["eps"]) * (x @ e) / np.where(nrm == 0, 1.0, nrm)
        if self.kind == "custom":
            return np.asarray(p["func"](x), dtype=float)
        raise InvalidParameterError(f"unknown anisotropy kind {self.kind!r}")

    @property
    def symmetric(self):
        if self.kind == "constant":
            return True
        if self.kind == "two-sided":
            return float(self.params["plus"]) == float(self.params["minus"])
        if self.kind == "cosine":
            return float(self.params["eps"]) == 0.0
        return bool(self.params.get("symmetric", False))

    @property
    def radial(self):
        """Whether ``a`` may depend on ``|x|`` and not only on ``x/|x|``."""
        return self.kind == "custom" and bool(self.params.get("radial", False))

    def to_dict(self):
        return {"kind": self.kind, **{k: v for k, v in self.params.items() if not callable(v)}}


@dataclass(frozen=True, eq=False)
class LevyModel:
    """Lévy triplet with jump density ``a(x) nu0(|x|)``.

    Attributes
    ----------
    profile : UnimodalProfile
        Radial profile ``nu0``; its ``dim`` is the dimension of the model.
    A : ndarray
        Symmetric non-negative definite Gaussian matrix, shape ``(d, d)``.
    drift : ndarray
        Drift vector ``b``, shape ``(d,)``.
    comp_lower, comp_upper : float
        Bounds on the anisotropy, ``0 <= comp_lower <= comp_upper``.
    anisotropy : Anisotropy or None
        ``None`` means ``a = 1``.
    name : str
        Free-form label.
    """

    profile: UnimodalProfile
    A: np.ndarray = None
    drift: np.ndarray = None
    comp_lower: float = 1.0
    comp_upper: float = 1.0
    anisotropy: Anisotropy | None = None
    name: str = ""

    def __post_init__(self):
        d = self.profile.dim
        A = np.zeros((d, d)) if self.A is None else np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.zeros(d) if self.drift is None else np.atleast_1d(np.asarray(self.drift, dtype=float))
        if A.shape != (d, d):
            raise InvalidParameterError(f"A must have shape ({d}, {d}), got {A.shape}")
        if b.shape != (d,):
            raise InvalidParameterError(f"drift must have shape ({d},), got {b.shape}")
        if not np.allclose(A, A.T):
            raise InvalidParameterError("A must be symmetric")
        if np.linalg.eigvalsh(A).min() < -1e-12:
            raise InvalidParameterError("A must be non-negative definite")
        if not 0.0 <= self.comp_lower <= self.comp_upper:
            raise InvalidParameterError("need 0 <= comp_lower <= comp_upper")
        if self.anisotropy is not None and d > 3:
            raise InvalidParameterError("anisotropic jump measures are supported for d <= 3")
        if self.anisotropy is not None and d > 1 and self.anisotropy.radial:
            raise InvalidParameterError("radius-dependent anisotropy is supported for d = 1 only")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "drift", b)
        if self.anisotropy is not None:
            self._check_bounds()

    def _check_bounds(self):
        th, _ = sphere_directions(self.dim) if self.dim <= 3 else (None, None)
        radii = np.geomspace(1e-3, 1e3, 7)
        pts = (radii[:, None, None] * th[None, :, :]).reshape(-1, self.dim)
        a = self.anisotropy(pts)
        tol = 1e-12 * max(1.0, self.comp_upper)
        if a.min() < self.comp_lower - tol or a.max() > self.comp_upper + tol:
            raise InvalidParameterError(
                f"anisotropy range [{a.min():.4g}, {a.max():.4g}] violates "
                f"[{self.comp_lower}, {self.comp_upper}]")

    # ----------------------------------------------------------------- basics
    @property
    def dim(self):
        return self.profile.dim

    @property
    def isotropic(self):
        return self.anisotropy is None or self.anisotropy.kind == "constant"

    @property
    def symmetric(self):
        """Whether ``n(x) = n(-x)``."""
        return self.anisotropy is None or self.anisotropy.symmetric

    @property
    def A_norm(self):
        """Operator norm of the Gaussian matrix."""
        return float(np.linalg.eigvalsh(self.A).max()) if self.dim else 0.0

    def n(self, x):
        """Jump density ``n(x)`` for points ``x`` of shape ``(..., d)``."""
        x = np.asarray(x, dtype=float)
        nu = self.profile(np.linalg.norm(x, axis=-1))
        if self.anisotropy is None:
            return nu
        return self.anisotropy(x) * nu

    @cached_property
    def directions(self):
        """Direction set and weights used for angular integrals."""
        return sphere_directions(self.dim) if self.dim <= 3 else (None, None)

    def _a_dirs(self):
        th, w = self.directions
        return th, w, (np.ones(len(w)) if self.anisotropy is None else self.anisotropy(th))

    def angular_mass(self, r):
        """``int_{S} a(r theta) d theta`` as a function of the radius ``r``."""
        r = np.asarray(r, dtype=float)
        if self.anisotropy is None:
            return np.full(r.shape, sphere_area(self.dim))
        if self.dim == 1:
            return self.anisotropy(r[..., None]) + self.anisotropy(-r[..., None])
        th, w, a = self._a_dirs()
        if self.anisotropy.kind == "constant":
            return np.full(r.shape, sphere_area(self.dim) * float(self.anisotropy.params.get("value", 1.0)))
        return np.full(r.shape, float(w @ a))

    def angular_first(self, r):
        """``int_{S} theta a(r theta) d theta``, shape ``r.shape + (d,)``."""
        r = np.asarray(r, dtype=float)
        if self.symmetric:
            return np.zeros(r.shape + (self.dim,))
        if self.dim == 1:
            return (self.anisotropy(r[..., None]) - self.anisotropy(-r[..., None]))[..., None]
        th, w, a = self._a_dirs()
        return np.broadcast_to((w * a) @ th, r.shape + (self.dim,)).copy()

    def angular_second(self):
        """``int_{S} theta theta^T a(theta) d theta`` (angular part only)."""
        if self.anisotropy is None or self.anisotropy.kind == "constant":
            c = 1.0 if self.anisotropy is None else float(self.anisotropy.params.get("value", 1.0))
            return c * sphere_area(self.dim) / self.dim * np.eye(self.dim)
        th, w, a = self._a_dirs()
        return (th * (w * a)[:, None]).T @ th

    def radial_log_weight(self, u):
        """``log(nu0(r) r^(d-1))`` at ``r = exp(u)``."""
        return self.profile.log_nu(u) + (self.dim - 1) * np.asarray(u, dtype=float)

    def isotropic_part(self):
        """Model with the same profile, ``a = 1``, no Gaussian part and no drift."""
        return LevyModel(self.profile, name=f"{self.name or self.profile.label}/profile")

    def minorant(self):
        """The symmetric minorant ``min(n(x), n(-x))`` as a :class:`SymmetricMinorant`."""
        return SymmetricMinorant(self)

    def with_(self, **changes):
        """Copy with some fields replaced."""
        kw = dict(profile=self.profile, A=self.A, drift=self.drift, comp_lower=self.comp_lower,
                  comp_upper=self.comp_upper, anisotropy=self.anisotropy, name=self.name)
        kw.update(changes)
        return LevyModel(**kw)

    # ------------------------------------------------------------------- JSON
    def to_dict(self):
        out = {
            "dim": self.dim,
            "A": self.A.tolist(),
            "drift": self.drift.tolist(),
            "profile": self.profile.to_dict(),
            "comp_lower": self.comp_lower,
            "comp_upper": self.comp_upper,
            "symmetric": self.symmetric,
        }
        if self.anisotropy is not None:
            out["anisotropy"] = self.anisotropy.to_dict()
        if self.name:
            out["name"] = self.name
        return out

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, spec):
        """Build a model from its JSON form.

        ``symmetric`` is informational; a mismatch with the anisotropy raises.
        """
        d = int(spec.get("dim", 1))
        prof = profile_from_dict(spec["profile"], d)
        an = spec.get("anisotropy")
        an = Anisotropy(an["kind"], {k: v for k, v in an.items() if k != "kind"}) if an else None
        model = cls(prof, A=spec.get("A"), drift=spec.get("drift"),
                    comp_lower=float(spec.get("comp_lower", 1.0)),
                    comp_upper=float(spec.get("comp_upper", 1.0)),
                    anisotropy=an, name=spec.get("name", ""))
        if "symmetric" in spec and bool(spec["symmetric"]) != model.symmetric:
            raise InvalidParameterError("'symmetric' flag contradicts the anisotropy")
        return model

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class SymmetricMinorant:
    """Symmetric part ``min(n(x), n(-x))`` of a jump density.

    Used by jump lower bounds, which only see jumps available in both
    directions.
    """

    model: LevyModel

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.minimum(self.model.n(x), self.model.n(-x))

    def as_model(self):
        """The minorant as a symmetric model with the same profile."""
        m = self.model
        if m.anisotropy is None:
            return m.with_(A=np.zeros_like(m.A), drift=np.zeros(m.dim))
        an = m.anisotropy
        sym = Anisotropy("custom", {"func": lambda x: np.minimum(an(x), an(-x)),
                                    "symmetric": True, "radial": an.radial})
        lo = m.comp_lower
        return m.with_(A=np.zeros_like(m.A), drift=np.zeros(m.dim), anisotropy=sym,
                       comp_lower=lo)


# --------------------------------------------------------------- validation
@dataclass
class ValidationReport:
    """Outcome of :func:`validate_levy_measure`."""

    levy_integral: float
    total_mass: float
    compound_poisson: bool
    dim: int

    def to_dict(self):
        return {"levy_integral": self.levy_integral, "total_mass": self.total_mass,
                "compound_poisson": self.compound_poisson, "dim": self.dim}


def _log_space_integral(model, log_extra, lo=-np.inf, hi=np.inf, rtol=1e-10):
    # int m(r) nu0(r) r^(d-1) g(r) dr with log g = log_extra(u), in u = log r
    bps = [np.log(b) for b in model.profile.breakpoints]

    def f(u):
        lw = model.radial_log_weight(u) + log_extra(u) + u
        with np.errstate(over="ignore", invalid="ignore"):
            val = model.angular_mass(np.exp(np.clip(u, -700, 700))) * np.exp(lw)
        return np.where(np.isfinite(val), val, np.where(lw > 0, np.inf, 0.0))

    return integrate(f, lo, hi, breakpoints=sorted(set(bps + [0.0])), rtol=rtol,
                     max_intervals=20000)


def validate_levy_measure(model):
    """Check ``int (1 ∧ |x|^2) n(dx) < inf``.

    Returns
    -------
    ValidationReport

    Raises
    ------
    DivergentLevyIntegralError
        When the integral is infinite.

    Warns
    -----
    CompoundPoissonWarning
        When the jump measure is finite.
    """
    def small(u):
        return 2.0 * u

    def zero(u):
        return np.zeros_like(u)

    # Asymptotic probes: the integrands in log radius must vanish fast enough.
    big = 1e8
    for u0, extra in ((-big, small), (big, zero)):
        u = np.array([u0])
        lw = model.radial_log_weight(u) + extra(u) + u
        if not np.all(lw + np.log(big) < np.log(1e-6)):
            raise DivergentLevyIntegralError(
                f"jump measure is not a Lévy measure: integrand does not decay as r -> "
                f"{'0' if u0 < 0 else 'inf'}")
    try:
        near = _log_space_integral(model, small, -np.inf, 0.0).value
        far = _log_space_integral(model, zero, 0.0, np.inf).value
    except Exception as exc:  # quadrature blew up
        raise DivergentLevyIntegralError(str(exc)) from exc
    total = near + far
    if not np.isfinite(total):
        raise DivergentLevyIntegralError("integral of 1 ∧ |x|^2 is infinite")

    u = np.array([-big])
    lm = model.radial_log_weight(u) + u + np.log(big)
    finite_mass = bool(np.all(lm < np.log(1e-6)))
    mass = np.inf
    if finite_mass:
        mass = _log_space_integral(model, zero).value
        warnings.warn(f"jump measure has finite mass {mass:.6g}: compound Poisson process",
                      CompoundPoissonWarning, stacklevel=2)
    return ValidationReport(float(total), float(mass), finite_mass, model.dim)


# ---------------------------------------------------------------- builtins
BUILTINS = {
    "cauchy": ("stable", {"alpha": 1.0}),
    "mixture": ("stable-mixture", {"alpha": 1.5, "beta": 0.5}),
    "tempered": ("tempered", {"alpha": 1.5, "lam": 1.0}),
    "truncated": ("truncated", {"alpha": 1.0, "R": 1.0}),
    "log-heavy": ("log-heavy", {"alpha": 1.0}),
}


def builtin_model(name, dim=1):
    """One of the five reference models with ``a = 1``, ``A = 0``, ``b = 0``.

    ``cauchy`` (stable, alpha 1), ``mixture`` (alpha 1.5, beta 0.5),
    ``tempered`` (alpha 1.5, rate 1), ``truncated`` (alpha 1, radius 1) and
    ``log-heavy`` (alpha 1).
    """
    kind, params = BUILTINS[name]
    return LevyModel(make_profile(kind, dim, **params), name=name)


def stable_model(alpha, dim=1, **kw):
    """Isotropic model with ``nu0(r) = r^(-d-alpha)``."""
    return LevyModel(make_profile("stable", dim, alpha=alpha), name=f"stable-{alpha:g}", **kw)


def load_model(path_or_text):
    """Read a model from a JSON file path, JSON text or a builtin name."""
    if isinstance(path_or_text, dict):
        return LevyModel.from_dict(path_or_text)
    s = str(path_or_text).strip()
    if s in BUILTINS:
        return builtin_model(s)
    if s.startswith("{"):
        return LevyModel.from_json(s)
    with open(s) as fh:
        return LevyModel.from_json(fh.read())
