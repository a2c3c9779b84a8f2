"""Star-discrepancy computations.

``D*_{N,psi}`` of a 1-D sample set is measured against the normalized
cumulative integral ``Gbar(t) = G(t) / C`` over anchored half-open intervals
``[0, t)``, ``t`` in [0, 1].  The uniform 2-D star-discrepancy of a driver set
uses anchored boxes ``[0, t1) x [0, t2)``.

The exact routines evaluate the local discrepancy at its candidate extremal
points only; the grid oracles evaluate it by direct counting on a dense grid
and serve as independent cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .density import Density
from .driver import DriverSet
from .errors import CostCapError, DomainError
from .sampler import SampleSet

EXACT_2D_MAX_POINTS = 10_000


@dataclass(frozen=True)
class DiscrepancyResult:
    value: float
    argmax_t: Union[float, tuple]
    method: str  # "exact-1d" | "exact-2d" | "grid-oracle"
    N: int
    side: str = "left"  # "left": count over [0, t); "right": limit from above

    def to_dict(self):
        t = list(self.argmax_t) if isinstance(self.argmax_t, tuple) else self.argmax_t
        return {"value": self.value, "argmax_t": t, "method": self.method, "N": self.N, "side": self.side}


def _samples_of(s) -> np.ndarray:
    arr = s.samples if isinstance(s, SampleSet) else np.asarray(s, dtype=float)
    return np.asarray(arr, dtype=float).ravel()


def _normalized_cdf(d: Density, t):
    return np.asarray(d.cdf(t), dtype=float) / d.norm


def local_discrepancy(d: Density, s, t: float, side: str = "left") -> float:
    """Signed local discrepancy at ``t``.

    ``side="left"`` counts samples in ``[0, t)``; ``side="right"`` counts
    ``[0, t]``, the limit of ``[0, t + h)`` as ``h`` shrinks to zero.
    """
    y = _samples_of(s)
    if y.size == 0:
        raise DomainError("empty sample set")
    count = np.count_nonzero(y < t) if side == "left" else np.count_nonzero(y <= t)
    return count / y.size - float(_normalized_cdf(d, t))


def star_discrepancy_1d(d: Density, s) -> DiscrepancyResult:
    """Exact ``D*_{N,psi}`` from the order statistics.

    With ``y_(1) <= ... <= y_(N)`` and continuous ``Gbar`` the supremum over
    ``t`` is ``max_j max(j/N - Gbar(y_(j)), Gbar(y_(j)) - (j-1)/N)``.
    """
    y = np.sort(_samples_of(s))
    n = y.size
    if n == 0:
        raise DomainError("empty sample set")
    g = _normalized_cdf(d, y)
    j = np.arange(1, n + 1)
    over = j / n - g
    under = g - (j - 1) / n
    io, iu = int(np.argmax(over)), int(np.argmax(under))
    if over[io] >= under[iu]:
        value, t, side = over[io], y[io], "right"
    else:
        value, t, side = under[iu], y[iu], "left"
    return DiscrepancyResult(float(min(max(value, 0.0), 1.0)), float(t), "exact-1d", n, side)


def grid_oracle_1d(d: Density, s, grid: int = 100_000, include_samples: bool = True) -> DiscrepancyResult:
    """Brute-force ``D*_{N,psi}`` over ``t = i / grid`` by direct counting.

    With ``include_samples`` both one-sided limits at every sample are added,
    which makes the oracle exact; without them it is a lower bound within
    ``(L / C + 1) / grid`` of the exact value.
    """
    if grid < 1000:
        raise DomainError("oracle grid must be at least 1000")
    y = np.sort(_samples_of(s))
    n = y.size
    if n == 0:
        raise DomainError("empty sample set")
    ts = np.arange(grid + 1) / grid
    g = _normalized_cdf(d, ts)
    lt = np.searchsorted(y, ts, side="left")
    local = np.abs(lt / n - g)
    best = int(np.argmax(local))
    value, t, side = local[best], ts[best], "left"
    if include_samples:
        gy = _normalized_cdf(d, y)
        left = np.abs(np.searchsorted(y, y, side="left") / n - gy)
        right = np.abs(np.searchsorted(y, y, side="right") / n - gy)
        il, ir = int(np.argmax(left)), int(np.argmax(right))
        if left[il] > value:
            value, t, side = left[il], y[il], "left"
        if right[ir] > value:
            value, t, side = right[ir], y[ir], "right"
    return DiscrepancyResult(float(value), float(t), "grid-oracle", n, side)


def _inside_points(points: np.ndarray) -> np.ndarray:
    # points with a coordinate >= 1 never fall in [0, t) for t <= 1
    keep = (points[:, 0] < 1.0) & (points[:, 1] < 1.0)
    return points[keep]


def star_discrepancy_2d_uniform(drivers, max_points: int = EXACT_2D_MAX_POINTS) -> DiscrepancyResult:
    """Exact uniform star-discrepancy of a 2-D point set.

    Candidate box corners are the distinct point coordinates and 1 on each
    axis.  Sweeping the first coordinate upward, the counts of points in the
    closed box ``[0, u1] x [0, u2]`` and the open box ``[0, u1) x [0, u2)`` are
    read off a running histogram over the second-axis candidates; the
    supremum is the larger of ``closed/M - u1 u2`` and ``u1 u2 - open/M``.
    Cost is ``O(M^2)`` time and ``O(M)`` memory.
    """
    pts = drivers.points if isinstance(drivers, DriverSet) else np.asarray(drivers, dtype=float)
    M = pts.shape[0]
    if M == 0:
        raise DomainError("empty point set")
    if M > max_points:
        raise CostCapError(
            f"exact 2-D discrepancy is capped at {max_points} points (got {M}); use grid_oracle_2d instead"
        )
    q = _inside_points(pts)
    u1 = np.unique(np.concatenate([q[:, 0], [1.0]]))
    u2 = np.unique(np.concatenate([q[:, 1], [1.0]]))
    r1 = np.searchsorted(u1, q[:, 0])
    r2 = np.searchsorted(u2, q[:, 1])
    order = np.argsort(r1, kind="stable")
    r1, r2 = r1[order], r2[order]
    row_start = np.searchsorted(r1, np.arange(u1.size + 1))

    hist = np.zeros(u2.size, dtype=np.int64)
    best, best_t, best_side = -1.0, (0.0, 0.0), "left"
    for i, a in enumerate(u1):
        open_counts = np.concatenate([[0], np.cumsum(hist)[:-1]])
        under = a * u2 - open_counts / M
        b = int(np.argmax(under))
        if under[b] > best:
            best, best_t, best_side = float(under[b]), (float(a), float(u2[b])), "left"
        np.add.at(hist, r2[row_start[i] : row_start[i + 1]], 1)
        over = np.cumsum(hist) / M - a * u2
        b = int(np.argmax(over))
        if over[b] > best:
            best, best_t, best_side = float(over[b]), (float(a), float(u2[b])), "right"
    return DiscrepancyResult(min(max(best, 0.0), 1.0), best_t, "exact-2d", M, best_side)


def grid_oracle_2d(drivers, grid: int = 2000, include_points: bool = True) -> DiscrepancyResult:
    """Uniform 2-D star-discrepancy by counting on a ``grid x grid`` lattice.

    Corners range over ``{i / grid}`` on each axis, extended by the point
    coordinates when ``include_points`` is set.  Counts for both closure
    conventions come from a 2-D cumulative histogram.
    """
    pts = drivers.points if isinstance(drivers, DriverSet) else np.asarray(drivers, dtype=float)
    M = pts.shape[0]
    if M == 0:
        raise DomainError("empty point set")
    q = _inside_points(pts)
    base = np.arange(grid + 1) / grid
    t1 = np.unique(np.concatenate([base, q[:, 0]])) if include_points else base
    t2 = np.unique(np.concatenate([base, q[:, 1]])) if include_points else base

    def table(side):
        # number of corners strictly below (side="left") or at most (side="right") each coordinate
        a = np.searchsorted(t1, q[:, 0], side="left" if side == "right" else "right")
        b = np.searchsorted(t2, q[:, 1], side="left" if side == "right" else "right")
        h = np.zeros((t1.size + 1, t2.size + 1), dtype=np.int64)
        np.add.at(h, (a, b), 1)
        return h.cumsum(axis=0).cumsum(axis=1)[: t1.size, : t2.size]

    vol = np.outer(t1, t2)
    closed = table("right") / M - vol
    opened = vol - table("left") / M
    ic = np.unravel_index(int(np.argmax(closed)), closed.shape)
    io = np.unravel_index(int(np.argmax(opened)), opened.shape)
    if closed[ic] >= opened[io]:
        value, t, side = closed[ic], (float(t1[ic[0]]), float(t2[ic[1]])), "right"
    else:
        value, t, side = opened[io], (float(t1[io[0]]), float(t2[io[1]])), "left"
    return DiscrepancyResult(float(min(max(value, 0.0), 1.0)), t, "grid-oracle", M, side)
