"""Driver quality criterion ``Q_R``.

    Q_R(T) = 1/R + sum_{0 < |n| < R} w(n) |(1/M) sum_j exp(2 pi i n.x_j)|,
    w(n) = |n|**-1.5 + 1 / ((1 + |n1|)(1 + |n2|)),

with ``|n| = max(|n1|, |n2|)``.  For a Fibonacci lattice the exponential sum
is exactly 1 when ``F_k`` divides ``n1 + n2 F_{k-1}`` and 0 otherwise, which
turns the double sum into an ``O(R)`` enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .driver import DriverSet, fibonacci_number
from .errors import CostCapError, DomainError

DEFAULT_COST_CAP = 10**10
_CHUNK = 8192


class FrequencyVector(NamedTuple):
    n1: int
    n2: int

    @property
    def sup_norm(self) -> int:
        return max(abs(self.n1), abs(self.n2))


@dataclass(frozen=True)
class CriterionResult:
    value: float
    R_used: int
    M: int
    method: str  # "general" | "fibonacci-fast"

    def to_dict(self):
        return {"value": self.value, "R": self.R_used, "M": self.M, "method": self.method}


def weight(n) -> float:
    n1, n2 = int(n[0]), int(n[1])
    if n1 == 0 and n2 == 0:
        raise DomainError("weight is undefined at n = (0, 0)")
    sup = max(abs(n1), abs(n2))
    return sup**-1.5 + 1.0 / ((1 + abs(n1)) * (1 + abs(n2)))


def _weights(n1, n2):
    a1, a2 = np.abs(n1), np.abs(n2)
    sup = np.maximum(a1, a2).astype(float)
    with np.errstate(divide="ignore"):
        w = sup**-1.5 + 1.0 / ((1.0 + a1) * (1.0 + a2))
    return np.where(sup > 0, w, 0.0)


def _points(t):
    return t.points if isinstance(t, DriverSet) else np.asarray(t, dtype=float).reshape(-1, 2)


def exp_sum(t, n) -> float:
    """``|(1/M) sum_j exp(2 pi i (n1 x1_j + n2 x2_j))|``."""
    pts = _points(t)
    phase = n[0] * pts[:, 0] + n[1] * pts[:, 1]
    phase = 2.0 * math.pi * (phase - np.round(phase))
    re = math.fsum(np.cos(phase))
    im = math.fsum(np.sin(phase))
    return math.hypot(re, im) / pts.shape[0]


def _exp_sum_table(pts, R):
    """Moduli of the mean exponential sums for all ``n`` in ``(-R, R)^2``.

    Uses ``sum_j e(n1 x1_j) e(n2 x2_j) = (E1^T E2)[n1, n2]`` with
    ``E_a[j, n] = exp(2 pi i n x_a,j)``, processed in row chunks.
    """
    freqs = np.arange(-R + 1, R)
    acc = np.zeros((freqs.size, freqs.size), dtype=complex)
    for lo in range(0, pts.shape[0], _CHUNK):
        block = pts[lo : lo + _CHUNK]
        e = []
        for col in (0, 1):
            ph = np.outer(block[:, col], freqs)
            ph -= np.round(ph)
            e.append(np.exp(2j * math.pi * ph))
        acc += e[0].T @ e[1]
    return freqs, np.abs(acc) / pts.shape[0]


def qr_general(t, R: int, cost_cap: float = DEFAULT_COST_CAP) -> CriterionResult:
    """``Q_R`` by direct evaluation of every exponential sum with ``|n| < R``.

    Terms are summed in row-major order of ``(n1, n2)`` with ``math.fsum``,
    so the result does not depend on the summation path.
    """
    if R < 2:
        raise DomainError("R must be at least 2")
    pts = _points(t)
    M = pts.shape[0]
    if M == 0:
        raise DomainError("empty point set")
    cost = (2 * R) ** 2 * M
    if cost > cost_cap:
        raise CostCapError(
            f"Q_R general path needs ~{cost:.3g} operations (cap {cost_cap:.3g}); "
            "use the Fibonacci fast path or a smaller R"
        )
    freqs, table = _exp_sum_table(pts, R)
    n1, n2 = np.meshgrid(freqs, freqs, indexing="ij")
    terms = _weights(n1, n2) * table
    value = 1.0 / R + math.fsum(terms.ravel())
    return CriterionResult(value, R, M, "general")


def fibonacci_survivors(k: int, R: int):
    """All ``n`` with ``0 < |n| < R`` and ``F_k | n1 + n2 F_{k-1}``, row-major in ``n2``."""
    F, g = fibonacci_number(k), fibonacci_number(k - 1)
    out = []
    for n2 in range(-R + 1, R):
        r = (-n2 * g) % F
        # n1 = r + l F; walk every l with |n1| < R
        n1 = r - ((r + R - 1) // F) * F
        while n1 < R:
            if n1 > -R and (n1, n2) != (0, 0):
                out.append(FrequencyVector(n1, n2))
            n1 += F
    return out


def qr_fibonacci(k: int, R: int) -> CriterionResult:
    """``Q_R`` of the Fibonacci lattice ``F_k`` from the divisibility rule."""
    F = fibonacci_number(k)
    if k < 3:
        raise DomainError("Fibonacci index k must be at least 3")
    if R < 2:
        raise DomainError("R must be at least 2")
    if R > F:
        raise DomainError(f"fast path needs R <= F_k = {F}, got R = {R}")
    value = 1.0 / R + math.fsum(weight(n) for n in fibonacci_survivors(k, R))
    return CriterionResult(value, R, F, "fibonacci-fast")


def default_R_for_fibonacci(k: int) -> int:
    """``F_{ceil(2k/3)}``."""
    if k < 3:
        raise DomainError("Fibonacci index k must be at least 3")
    return fibonacci_number(-(-2 * k // 3))
