"""Driver point sets in the unit square.

Four families are provided:

* ``fibonacci`` -- the lattice ``(j / F_k, {j F_{k-1} / F_k})``, j = 1..F_k,
  built in exact integer arithmetic;
* ``kronecker`` -- ``({j alpha}, {j beta})`` with ``alpha = xi``,
  ``beta = xi**2`` and ``xi`` the real root of ``x**3 + 2x + 2``;
* ``grid`` -- ``(j / n, m / n)`` for ``j, m = 1..n``, ``n = floor(sqrt(M))``;
* ``random`` -- i.i.d. uniform pairs from numpy's PCG64 generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError

FAMILIES = ("fibonacci", "kronecker", "grid", "random")
FIB_K_MIN = 3
FIB_K_MAX = 87
RANDOM_GENERATOR = "numpy.PCG64"


class Point2(NamedTuple):
    x1: float
    x2: float


@dataclass(frozen=True, eq=False)
class DriverSet:
    """Ordered driver points, shape ``(M, 2)``, with their provenance."""

    points: np.ndarray
    family: str
    parameter: int
    seed: Optional[int] = None

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DomainError("driver points must have shape (M, 2)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        for x1, x2 in self.points:
            yield Point2(float(x1), float(x2))

    @property
    def x1(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def x2(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def size(self) -> int:
        return len(self)


def fibonacci_number(k: int) -> int:
    """``F_k`` with ``F_1 = F_2 = 1``."""
    if k < 0:
        raise DomainError("Fibonacci index must be nonnegative")
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def fibonacci_lattice(k: int) -> DriverSet:
    """The ``F_k``-point Fibonacci lattice, including the point ``(1, 0)``."""
    if not FIB_K_MIN <= k <= FIB_K_MAX:
        raise DomainError(f"Fibonacci index k must lie in [{FIB_K_MIN}, {FIB_K_MAX}], got {k}")
    n, g = fibonacci_number(k), fibonacci_number(k - 1)
    if n * n < 2**63:
        j = np.arange(1, n + 1, dtype=np.int64)
        num = (j * g) % n
    else:
        j = np.arange(1, n + 1, dtype=object)
        num = (j * g) % n
    pts = np.column_stack([j.astype(float) / float(n), num.astype(float) / float(n)])
    return DriverSet(pts, "fibonacci", k)


def root_of_cubic() -> float:
    """Real root of ``x**3 + 2x + 2`` by Newton iteration from -0.75."""
    x = -0.75
    eps = np.finfo(float).eps
    for _ in range(100):
        step = (x**3 + 2.0 * x + 2.0) / (3.0 * x * x + 2.0)
        x -= step
        if abs(step) <= 4.0 * eps:
            return x
    raise RuntimeError("Newton iteration for x^3 + 2x + 2 did not converge")


@dataclass(frozen=True)
class CubicBasis:
    """``alpha = xi`` and ``beta = xi**2`` for the real root ``xi`` of x^3 + 2x + 2."""

    xi: float
    alpha: float
    beta: float

    @classmethod
    def default(cls) -> "CubicBasis":
        xi = root_of_cubic()
        return cls(xi, xi, xi * xi)


def _root_longdouble():
    x = np.longdouble(root_of_cubic())
    for _ in range(3):
        x -= (x**3 + 2 * x + 2) / (3 * x * x + 2)
    return x


def kronecker(M: int, basis: Optional[CubicBasis] = None) -> DriverSet:
    """``({j alpha}, {j beta})`` for j = 1..M.

    Products ``j * alpha`` are formed in ``numpy.longdouble`` (80-bit extended
    on x86) before taking fractional parts.  With the default basis the
    generators themselves are also refined in extended precision.
    """
    if M < 1:
        raise DomainError("Kronecker size M must be at least 1")
    if basis is None:
        xi = _root_longdouble()
        alpha, beta = xi, xi * xi
    else:
        alpha, beta = np.longdouble(basis.alpha), np.longdouble(basis.beta)
    j = np.arange(1, M + 1).astype(np.longdouble)
    raw = np.column_stack([j * alpha, j * beta])
    frac = (raw - np.floor(raw)).astype(float)
    # rounding to double can push 1 - tiny up to exactly 1.0
    frac[frac >= 1.0] = 0.0
    return DriverSet(frac, "kronecker", M)


def regular_grid(M: int) -> DriverSet:
    """All ``(j / n, m / n)`` for ``j, m = 1..n`` with ``n = floor(sqrt(M))``.

    Points with a coordinate equal to 1 are kept as they are.
    """
    if M < 1:
        raise DomainError("grid size M must be at least 1")
    n = math.isqrt(M)
    ticks = np.arange(1, n + 1) / n
    a, b = np.meshgrid(ticks, ticks, indexing="ij")
    return DriverSet(np.column_stack([a.ravel(), b.ravel()]), "grid", M)


def random_driver(M: int, seed: int) -> DriverSet:
    """``M`` uniform pairs from ``numpy.random.Generator(PCG64(seed))``."""
    if M < 1:
        raise DomainError("random driver size M must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return DriverSet(rng.random((M, 2)), "random", M, seed)


def make_driver(family: str, parameter: int, seed: Optional[int] = None) -> DriverSet:
    """Dispatch on family name; ``parameter`` is ``k`` for fibonacci, else ``M``."""
    if family == "fibonacci":
        return fibonacci_lattice(parameter)
    if family == "kronecker":
        return kronecker(parameter)
    if family == "grid":
        return regular_grid(parameter)
    if family == "random":
        if seed is None:
            raise DomainError("random driver requires a seed")
        return random_driver(parameter, seed)
    raise DomainError(f"unknown driver family {family!r}; valid families: {', '.join(FAMILIES)}")
