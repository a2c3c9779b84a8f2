"""Integration-error experiments for acceptance-rejection samples.

The quasi-Monte Carlo estimate ``(1/N) sum f(y_j)`` of ``(1/C) int f psi`` is
bounded in error by ``V(f) * D*_{N,psi}``, where ``V(f) = int_0^1 |f'|`` is
the variation of ``f`` in the sense of Hardy and Krause.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from . import quadrature
from .density import Density
from .errors import DomainError
from .sampler import SampleSet

VARIATION_SCAN = 1000


@dataclass(frozen=True)
class Integrand:
    name: str
    func: Callable
    derivative: Optional[Callable] = None

    def __call__(self, x):
        return self.func(x)


def _a(x):
    return np.asarray(x, dtype=float)


BUILTIN_INTEGRANDS = {
    "one": Integrand("one", lambda x: np.ones_like(_a(x)), lambda x: np.zeros_like(_a(x))),
    "x": Integrand("x", _a, lambda x: np.ones_like(_a(x))),
    "x2": Integrand("x2", lambda x: _a(x) ** 2, lambda x: 2.0 * _a(x)),
    "centered2": Integrand("centered2", lambda x: (_a(x) - 0.5) ** 2, lambda x: 2.0 * _a(x) - 1.0),
    "sinpi": Integrand("sinpi", lambda x: np.sin(math.pi * _a(x)), lambda x: math.pi * np.cos(math.pi * _a(x))),
}
_ALIASES = {"1": "one", "x^2": "x2", "(x-0.5)^2": "centered2", "sin(pi*x)": "sinpi"}


def get_integrand(name: str) -> Integrand:
    key = _ALIASES.get(name, name)
    try:
        return BUILTIN_INTEGRANDS[key]
    except KeyError:
        raise DomainError(f"unknown integrand {name!r}; valid names: {', '.join(BUILTIN_INTEGRANDS)}") from None


@dataclass(frozen=True)
class IntegrationReport:
    estimate: float
    reference: float
    abs_error: float
    variation: float
    N: int
    dstar: Optional[float] = None
    bound: Optional[float] = None

    def satisfies_bound(self, slack: float = 1e-9) -> bool:
        """Koksma-Hlawka check ``abs_error <= V * D* + slack``."""
        if self.bound is None:
            raise DomainError("no discrepancy supplied; bound unavailable")
        return self.abs_error <= self.bound + slack

    def to_dict(self):
        return asdict(self)


def qmc_estimate(f: Integrand, s) -> float:
    y = s.samples if isinstance(s, SampleSet) else np.asarray(s, dtype=float)
    if y.size == 0:
        raise DomainError("empty sample set")
    return math.fsum(np.asarray(f(y), dtype=float)) / y.size


def reference_integral(f: Integrand, d: Density, tol: float = 1e-12) -> float:
    """``(1/C) int_0^1 f psi`` by adaptive Simpson, split at the density's breakpoints."""
    num = quadrature.integrate(lambda x: f(x) * d(x), 0.0, 1.0, tol, d.breakpoints)
    return num / d.norm


def hk_variation(f: Integrand, tol: float = 1e-12) -> float:
    """``int_0^1 |f'|`` with the range split at the sign changes of ``f'``."""
    if f.derivative is None:
        raise DomainError(f"integrand {f.name!r} has no derivative")
    df = f.derivative
    xs = np.linspace(0.0, 1.0, VARIATION_SCAN + 1)
    vals = np.asarray(df(xs), dtype=float)
    cuts = list(xs[1:-1][vals[1:-1] == 0.0])
    flips = np.flatnonzero(vals[:-1] * vals[1:] < 0)
    cuts += [brentq(lambda x: float(df(x)), xs[i], xs[i + 1], xtol=1e-15) for i in flips]
    return quadrature.integrate(lambda x: np.abs(df(x)), 0.0, 1.0, tol, cuts)


def integration_report(f: Integrand, d: Density, s, dstar: Optional[float] = None) -> IntegrationReport:
    est = qmc_estimate(f, s)
    ref = reference_integral(f, d)
    var = hk_variation(f)
    n = len(s.samples) if isinstance(s, SampleSet) else int(np.asarray(s).size)
    bound = None if dstar is None else var * dstar
    return IntegrationReport(est, ref, abs(est - ref), var, n, dstar, bound)
