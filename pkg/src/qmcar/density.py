"""Unnormalized target densities on [0, 1].

A :class:`Density` bundles a vectorized ``psi``, its upper bound ``L``, the
normalizing constant ``C = int_0^1 psi`` and access to the cumulative integral
``G(t) = int_0^t psi``.  Closed-form antiderivatives are used when available;
otherwise ``G`` falls back to adaptive Simpson quadrature that never crosses a
declared breakpoint.

Two declarative families cover the built-in examples and let JSON configs
describe variants without code changes:

* :class:`PiecewisePolynomial` with exact rational breakpoints, and
* :class:`SinePoly`, ``scale * (amplitude * sin(frequency * x) + sum c x**p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import quadrature
from .errors import DomainError

AUDIT_GRID = 100_001
BOUND_MARGIN = 1e-6
CDF_TOL = 1e-12
CURVATURE_STEP = 1e-5

BUILTIN_NAMES = ("example1", "example2", "uniform")


def _as_number(v):
    """Parse JSON numbers and rational strings such as ``"107/108"``."""
    if isinstance(v, bool):
        raise DomainError(f"not a number: {v!r}")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse number {v!r}") from exc
    raise DomainError(f"not a number: {v!r}")


def _float_below(q: Fraction) -> float:
    """Largest double strictly below the rational ``q``."""
    f = float(q)
    if Fraction(f) >= q:
        f = math.nextafter(f, -math.inf)
    return f


def _scalar_or_array(x, fn):
    arr = np.asarray(x, dtype=float)
    out = fn(arr)
    if arr.ndim == 0:
        return float(out)
    return out


class PiecewisePolynomial:
    """Polynomial pieces on a partition of [0, 1].

    ``pieces`` is a sequence of ``(lo, hi, coeffs)`` with ascending-power
    coefficients.  Pieces are half-open ``[lo, hi)`` except the last, which is
    closed.  Rational endpoints are kept exact: membership ``x >= b`` for a
    breakpoint ``b`` is decided against the largest double below ``b``.
    """

    def __init__(self, pieces):
        if not pieces:
            raise DomainError("piecewise polynomial needs at least one piece")
        los = [Fraction(_as_number(p[0])) for p in pieces]
        his = [Fraction(_as_number(p[1])) for p in pieces]
        if los[0] != 0 or his[-1] != 1:
            raise DomainError("pieces must cover [0, 1]")
        for (lo, hi), nxt in zip(zip(los, his), los[1:] + [None]):
            if not lo < hi:
                raise DomainError(f"empty piece [{lo}, {hi}]")
            if nxt is not None and nxt != hi:
                raise DomainError(f"pieces are not contiguous at {hi}")
        self.los = los
        self.his = his
        self.exact_coeffs = [[_as_number(c) for c in p[2]] for p in pieces]
        self.coeffs = [np.array([float(c) for c in cs]) for cs in self.exact_coeffs]
        self.breakpoints = tuple(his[:-1])
        self._cuts = np.array([_float_below(b) for b in self.breakpoints])

        self._prims = [npoly.polyint(c) for c in self.coeffs]
        # offsets accumulated exactly when every coefficient is rational
        offsets = [Fraction(0)]
        for lo, hi, cs in zip(los, his, self.exact_coeffs):
            if all(isinstance(c, Fraction) for c in cs):
                inc = sum(c * (hi ** (i + 1) - lo ** (i + 1)) / (i + 1) for i, c in enumerate(cs))
            else:
                prim = npoly.polyint(np.array([float(c) for c in cs]))
                inc = float(npoly.polyval(float(hi), prim) - npoly.polyval(float(lo), prim))
            offsets.append(offsets[-1] + inc)
        self._offsets = np.array([float(o) for o in offsets[:-1]])
        self.total = float(offsets[-1])

    def piece_index(self, x):
        return np.searchsorted(self._cuts, x, side="left")

    def __call__(self, x):
        def ev(arr):
            idx = self.piece_index(arr)
            out = np.empty_like(arr)
            for i, c in enumerate(self.coeffs):
                sel = idx == i
                out[sel] = npoly.polyval(arr[sel], c)
            return out

        return _scalar_or_array(x, ev)

    def antiderivative(self, t):
        def ev(arr):
            idx = self.piece_index(arr)
            out = np.empty_like(arr)
            for i, prim in enumerate(self._prims):
                sel = idx == i
                lo = float(self.los[i])
                out[sel] = self._offsets[i] + (npoly.polyval(arr[sel], prim) - npoly.polyval(lo, prim))
            return out

        return _scalar_or_array(t, ev)


class SinePoly:
    """``scale * (amplitude * sin(frequency * x) + sum(c * x**p))``."""

    def __init__(self, scale, amplitude, frequency, terms):
        self.scale = float(scale)
        self.amplitude = float(amplitude)
        self.frequency = float(frequency)
        self.terms = [(float(c), float(p)) for c, p in terms]
        if any(p < 0 for _, p in self.terms):
            raise DomainError("sine-poly powers must be nonnegative")
        if self.frequency == 0.0 and self.amplitude != 0.0:
            raise DomainError("sine-poly frequency must be nonzero")
        self.breakpoints = ()

    def __call__(self, x):
        def ev(arr):
            acc = self.amplitude * np.sin(self.frequency * arr)
            for c, p in self.terms:
                acc = acc + c * arr**p
            return self.scale * acc

        return _scalar_or_array(x, ev)

    def antiderivative(self, t):
        def ev(arr):
            # 1 - cos(w t) written as 2 sin^2(w t / 2) to avoid cancellation near 0
            acc = np.zeros_like(arr)
            if self.amplitude != 0.0:
                acc = self.amplitude * 2.0 * np.sin(0.5 * self.frequency * arr) ** 2 / self.frequency
            for c, p in self.terms:
                acc = acc + c * arr ** (p + 1.0) / (p + 1.0)
            return self.scale * acc

        return _scalar_or_array(t, ev)


def default_bound(func, grid: int = AUDIT_GRID) -> float:
    """``(1 + 1e-6)`` times the maximum of ``func`` on a uniform audit grid."""
    values = np.asarray(func(np.linspace(0.0, 1.0, grid)), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("density is not finite on the audit grid")
    top = float(values.max())
    if top <= 0.0:
        raise DomainError("density is not positive anywhere on the audit grid")
    return top * (1.0 + BOUND_MARGIN)


@dataclass(frozen=True)
class Density:
    """Unnormalized density ``psi`` on [0, 1] with bound ``L`` and norm ``C``.

    ``func`` must be vectorized.  ``antiderivative``, when given, must return
    ``int_0^t psi`` exactly.  ``bound`` defaults to :func:`default_bound`;
    ``norm`` is computed at construction and never mutated afterwards.
    """

    name: str
    func: Callable = field(repr=False)
    bound: Optional[float] = None
    antiderivative: Optional[Callable] = field(default=None, repr=False)
    breakpoints: tuple = ()
    norm: float = field(init=False)

    def __post_init__(self):
        grid = np.linspace(0.0, 1.0, AUDIT_GRID)
        values = np.asarray(self.func(grid), dtype=float)
        if not np.all(np.isfinite(values)):
            raise DomainError(f"density {self.name!r} is not finite on [0, 1]")
        if values.min() < 0.0:
            raise DomainError(f"density {self.name!r} is negative somewhere on [0, 1]")
        if self.bound is None:
            object.__setattr__(self, "bound", default_bound(self.func))
        elif not self.bound >= values.max():
            raise DomainError(f"L = {self.bound!r} is below max psi = {values.max()!r} on the audit grid")
        object.__setattr__(self, "breakpoints", tuple(self.breakpoints))
        if self.antiderivative is not None:
            norm = float(self.antiderivative(1.0))
        else:
            norm = quadrature.integrate(self.func, 0.0, 1.0, CDF_TOL, self.breakpoints)
        if not norm > 0.0:
            raise DomainError(f"density {self.name!r} has zero mass")
        object.__setattr__(self, "norm", norm)

    def __call__(self, x):
        return self.func(x)

    @property
    def acceptance_rate(self) -> float:
        """Area of the acceptance region, ``C / L``."""
        return self.norm / self.bound

    def cdf(self, t):
        """``G(t) = int_0^t psi`` via the antiderivative when available."""
        return cdf(self, t)

    def cdf_quadrature(self, t):
        """``G(t)`` by adaptive Simpson regardless of any closed form."""
        arr = _check_unit(t)
        out = quadrature.cumulative_integral(self.func, arr, CDF_TOL, self.breakpoints)
        return float(out) if arr.ndim == 0 else out

    def with_bound(self, bound: float) -> "Density":
        return replace(self, bound=float(bound))

    def scaled(self, c: float) -> "Density":
        """``c * psi`` with ``c * L``; the normalized distribution is unchanged."""
        if not c > 0:
            raise DomainError("scale factor must be positive")
        f, F = self.func, self.antiderivative
        return Density(
            name=f"{self.name}*{c:g}",
            func=lambda x: c * f(x),
            bound=c * self.bound,
            antiderivative=None if F is None else (lambda t: c * F(t)),
            breakpoints=self.breakpoints,
        )


def _check_unit(t):
    arr = np.asarray(t, dtype=float)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise DomainError("cdf argument must lie in [0, 1]")
    return arr


def cdf(d: Density, t):
    """Cumulative integral ``int_0^t psi`` for scalar or array ``t`` in [0, 1]."""
    arr = _check_unit(t)
    if d.antiderivative is None:
        return d.cdf_quadrature(arr)
    out = np.asarray(d.antiderivative(arr), dtype=float)
    return float(out) if arr.ndim == 0 else out


def from_piecewise(name, pieces, bound=None) -> Density:
    pp = PiecewisePolynomial(pieces)
    return Density(name, pp, bound, pp.antiderivative, pp.breakpoints)


def from_sine_poly(name, scale, amplitude, frequency, terms, bound=None) -> Density:
    sp = SinePoly(scale, amplitude, frequency, terms)
    return Density(name, sp, bound, sp.antiderivative)


def make_builtin(name: str, bound: Optional[float] = None) -> Density:
    """Return one of the registered densities by name."""
    if name == "uniform":
        # sup psi is exactly 1; no audit margin so every x2 < 1 is accepted
        return from_piecewise("uniform", [(0, 1, [1])], 1.0 if bound is None else bound)
    if name == "example1":
        return from_sine_poly("example1", 3 / 16, 4.0, math.pi / 2, [(-1.0, 2.5), (-1.0, 2.0)], bound)
    if name == "example2":
        pieces = [
            (0, Fraction(1, 3), [Fraction(107, 108), 0, Fraction(-1, 6), 0, Fraction(-1, 2)]),
            (Fraction(1, 3), 1, [1, Fraction(-2, 27), 0, 0, Fraction(-3, 4)]),
        ]
        return from_piecewise("example2", pieces, bound)
    raise DomainError(f"unknown density {name!r}; valid names: {', '.join(BUILTIN_NAMES)}")


def from_config(cfg) -> Density:
    """Build a density from a name or a JSON-style mapping.

    Accepted forms::

        "example1"
        {"kind": "builtin", "name": "example2", "L": 1.0}
        {"kind": "piecewise-polynomial", "name": "...",
         "pieces": [{"interval": [0, "1/3"], "coefficients": ["107/108", 0, "-1/6"]}, ...]}
        {"kind": "sine-poly", "name": "...", "scale": 0.1875, "amplitude": 4,
         "frequency_pi": 0.5, "terms": [[-1, 2.5], [-1, 2]]}
    """
    if isinstance(cfg, str):
        return make_builtin(cfg)
    if not isinstance(cfg, dict):
        raise DomainError(f"density config must be a name or an object, got {type(cfg).__name__}")
    kind = cfg.get("kind", "builtin")
    bound = cfg.get("L")
    bound = None if bound is None else float(_as_number(bound))
    name = cfg.get("name", kind)
    try:
        if kind == "builtin":
            return make_builtin(cfg["name"], bound)
        if kind == "piecewise-polynomial":
            pieces = [(p["interval"][0], p["interval"][1], p["coefficients"]) for p in cfg["pieces"]]
            return from_piecewise(name, pieces, bound)
        if kind == "sine-poly":
            if ("frequency" in cfg) == ("frequency_pi" in cfg):
                raise DomainError("sine-poly needs exactly one of 'frequency' or 'frequency_pi'")
            if "frequency" in cfg:
                freq = float(_as_number(cfg["frequency"]))
            else:
                freq = float(_as_number(cfg["frequency_pi"])) * math.pi
            terms = [(float(_as_number(c)), float(_as_number(p))) for c, p in cfg.get("terms", [])]
            return from_sine_poly(
                name,
                float(_as_number(cfg.get("scale", 1))),
                float(_as_number(cfg.get("amplitude", 0))),
                freq,
                terms,
                bound,
            )
    except (KeyError, IndexError, TypeError) as exc:
        raise DomainError(f"malformed {kind} density config: {exc}") from exc
    raise DomainError(f"unknown density kind {kind!r}")


@dataclass(frozen=True)
class CurvatureReport:
    classification: str  # "strictly-concave" | "strictly-convex" | "mixed/vanishing"
    min_abs_curvature: float
    grid: int
    min_second_derivative: float
    max_second_derivative: float


def check_curvature(d: Density, grid: int = 10_000, tol: float = 1e-3) -> CurvatureReport:
    """Classify ``psi`` as strictly concave, strictly convex, or neither.

    ``psi''`` is estimated by central differences with step 1e-5 at interior
    grid points; points within one step of the ends or of a breakpoint are
    skipped.  ``tol`` must sit above the ~1e-5 rounding noise of the stencil.
    """
    if grid < 100:
        raise DomainError("curvature grid must have at least 100 points")
    if not tol > 0:
        raise DomainError("curvature tolerance must be positive")
    h = CURVATURE_STEP
    x = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    x = x[(x > h) & (x < 1.0 - h)]
    for b in d.breakpoints:
        x = x[np.abs(x - float(b)) > h]
    fm, f0, fp = d.func(x - h), d.func(x), d.func(x + h)
    second = (fp - 2.0 * f0 + fm) / (h * h)
    first = (fp - fm) / (2.0 * h)
    kappa = second / (1.0 + first**2) ** 1.5
    if np.all(second < -tol):
        cls = "strictly-concave"
    elif np.all(second > tol):
        cls = "strictly-convex"
    else:
        cls = "mixed/vanishing"
    return CurvatureReport(
        cls, float(np.abs(kappa).min()), int(x.size), float(second.min()), float(second.max())
    )
