"""Acceptance-rejection with a uniform proposal.

A driver point ``(x1, x2)`` is accepted iff ``psi(x1) >= L * x2``; accepted
points are projected onto their first coordinate.  The randomized sampler is
the same map applied to a pseudo-random driver: drawing ``X`` and ``u``
uniformly and testing ``u <= psi(X) / L`` is exactly that membership test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import Density
from .driver import DriverSet, random_driver
from .errors import DomainError


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Accepted samples in driver order, plus the bookkeeping that produced them."""

    samples: np.ndarray
    M_proposed: int
    L_used: float
    density_name: str
    accepted_index: np.ndarray = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1:
            raise DomainError("samples must be one-dimensional")
        if s.size > self.M_proposed:
            raise DomainError("more samples than proposals")
        object.__setattr__(self, "samples", s)

    @property
    def N_accepted(self) -> int:
        return int(self.samples.size)

    @property
    def rate(self) -> float:
        return self.N_accepted / self.M_proposed if self.M_proposed else 0.0

    def __len__(self):
        return self.N_accepted


def accept_mask(d: Density, drivers: DriverSet, bound: float = None) -> np.ndarray:
    """Boolean mask of driver points in ``{psi(x1) >= L x2}``; ties accept."""
    L = d.bound if bound is None else bound
    return np.asarray(d(drivers.x1), dtype=float) >= L * drivers.x2


def ar_deterministic(d: Density, drivers: DriverSet) -> SampleSet:
    """Deterministic acceptance-rejection driven by ``drivers``."""
    mask = accept_mask(d, drivers)
    idx = np.flatnonzero(mask)
    return SampleSet(drivers.x1[idx].copy(), len(drivers), float(d.bound), d.name, idx)


def ar_randomized(d: Density, M: int, seed: int) -> SampleSet:
    """Classical acceptance-rejection from ``M`` pseudo-random proposals."""
    return ar_deterministic(d, random_driver(M, seed))
