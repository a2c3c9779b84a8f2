"""Convergence sweeps: driver -> sampler -> discrepancy/criterion/integration.

A sweep runs one driver family over a list of parameters (``k`` for
Fibonacci lattices, ``M`` otherwise), records one row per parameter and fits
the log-log slope of the star-discrepancy against the accepted count ``N``.
Random drivers are averaged over seeds before fitting.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.stats import linregress

from . import io as qio
from .criterion import default_R_for_fibonacci, qr_fibonacci, qr_general
from .density import Density, from_config
from .discrepancy import star_discrepancy_1d
from .driver import FAMILIES, kronecker, make_driver
from .errors import DomainError
from .integration import get_integrand, qmc_estimate, reference_integral
from .sampler import ar_deterministic

log = logging.getLogger(__name__)

MEASURES = ("dstar", "qr", "accept_rate", "integration_error")
MIN_N_FIT = 100
DEFAULT_SEEDS = tuple(range(1, 11))
FIGURE_COLUMNS = ("family", "param", "M", "N", "dstar")
REPORT_COLUMNS = ("family", "param", "M", "N", "accept_rate", "dstar", "qr", "integ_err")


class ExperimentError(RuntimeError):
    """A sweep failed at one parameter value."""

    def __init__(self, message, family, parameter):
        super().__init__(message)
        self.family = family
        self.parameter = parameter


@dataclass
class ExperimentConfig:
    density: Union[str, dict] = "example1"
    family: str = "fibonacci"
    params: list = field(default_factory=lambda: list(range(10, 26)))
    L: Optional[float] = None
    seeds: list = field(default_factory=lambda: list(DEFAULT_SEEDS))
    measures: tuple = ("dstar", "accept_rate")
    R: Union[str, int, None] = "auto"
    integrand: str = "x"
    min_N_fit: int = MIN_N_FIT

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown driver family {self.family!r}; valid families: {', '.join(FAMILIES)}")
        self.params = [int(p) for p in self.params]
        if not self.params:
            raise DomainError("parameter range is empty")
        self.measures = tuple(self.measures)
        bad = [m for m in self.measures if m not in MEASURES]
        if bad:
            raise DomainError(f"unknown measures {bad}; valid: {', '.join(MEASURES)}")
        if self.family == "random":
            self.seeds = [int(s) for s in self.seeds]
            if not self.seeds:
                raise DomainError("random family needs at least one seed")
        if "qr" in self.measures and self.R == "auto" and self.family != "fibonacci":
            raise DomainError("R = 'auto' is only defined for the fibonacci family")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        """Parse the JSON config form.

        The parameter list is given by exactly one of ``params``,
        ``k_range: [lo, hi]`` (inclusive), ``m_list`` or
        ``m_pow2_range: [lo, hi]`` (M = 2**e, inclusive).
        """
        raw = dict(raw)
        keys = [k for k in ("params", "k_range", "m_list", "m_pow2_range") if k in raw]
        if len(keys) != 1:
            raise DomainError("config needs exactly one of params, k_range, m_list, m_pow2_range")
        key = keys[0]
        spec = raw.pop(key)
        if key == "k_range":
            params = list(range(int(spec[0]), int(spec[1]) + 1))
        elif key == "m_pow2_range":
            params = [2**e for e in range(int(spec[0]), int(spec[1]) + 1)]
        else:
            params = list(spec)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return cls(params=params, **raw)

    def make_density(self) -> Density:
        d = from_config(self.density)
        return d if self.L is None else d.with_bound(self.L)


@dataclass
class Row:
    family: str
    param: int
    M: int
    N: float
    accept_rate: float
    dstar: Optional[float] = None
    qr: Optional[float] = None
    integ_err: Optional[float] = None
    wall_seconds: float = 0.0


@dataclass
class ConvergenceReport:
    rows: list
    slope: Optional[float]
    stderr: Optional[float]
    fit_range: tuple
    density: str = ""
    L: float = 0.0
    C: float = 0.0
    fits: dict = field(default_factory=dict)

    def to_csv(self, columns=REPORT_COLUMNS) -> str:
        return qio.write_csv(([getattr(r, c) for c in columns] for r in self.rows), list(columns))

    def summary(self) -> dict:
        return {
            "density": self.density,
            "L": self.L,
            "C": self.C,
            "slope": self.slope,
            "stderr": self.stderr,
            "fit_range": list(self.fit_range),
            "fits": self.fits,
            "rows": len(self.rows),
        }


def fit_slope(points):
    """Least-squares slope and its standard error of ``ln value`` on ``ln N``."""
    pts = list(points)
    if len(pts) < 3:
        raise DomainError("slope fit needs at least 3 points")
    n = np.array([p[0] for p in pts], dtype=float)
    v = np.array([p[1] for p in pts], dtype=float)
    if np.any(n <= 0) or np.any(v <= 0):
        raise DomainError("slope fit needs positive N and values")
    if np.all(v == v[0]):
        return 0.0, 0.0
    res = linregress(np.log(n), np.log(v))
    return float(res.slope), float(res.stderr)


def _measure(cfg, d, drivers, ref):
    samples = ar_deterministic(d, drivers)
    M, N = len(drivers), samples.N_accepted
    out = {"M": M, "N": N, "accept_rate": N / M}
    if "dstar" in cfg.measures:
        out["dstar"] = star_discrepancy_1d(d, samples).value if N else None
    if "integration_error" in cfg.measures:
        out["integ_err"] = abs(qmc_estimate(get_integrand(cfg.integrand), samples) - ref) if N else None
    if "qr" in cfg.measures:
        if drivers.family == "fibonacci":
            R = default_R_for_fibonacci(drivers.parameter) if cfg.R == "auto" else int(cfg.R)
            out["qr"] = qr_fibonacci(drivers.parameter, R).value
        else:
            out["qr"] = qr_general(drivers, int(cfg.R)).value
    return out


def _mean(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def _run_param(cfg, d, ref, param):
    t0 = time.perf_counter()
    try:
        if cfg.family == "random":
            per_seed = [_measure(cfg, d, make_driver("random", param, s), ref) for s in cfg.seeds]
            merged = {k: _mean(m.get(k) for m in per_seed) for k in ("N", "accept_rate", "dstar", "qr", "integ_err")}
            merged["M"] = param
        else:
            merged = _measure(cfg, d, make_driver(cfg.family, param), ref)
    except Exception as exc:
        raise ExperimentError(f"{cfg.family} parameter {param}: {exc}", cfg.family, param) from exc
    return Row(
        family=cfg.family,
        param=param,
        M=merged["M"],
        N=merged["N"],
        accept_rate=merged["accept_rate"],
        dstar=merged.get("dstar"),
        qr=merged.get("qr"),
        integ_err=merged.get("integ_err"),
        wall_seconds=time.perf_counter() - t0,
    )


def worker_count() -> int:
    """Worker cap from ``QMCAR_THREADS`` (default: CPU count)."""
    raw = os.environ.get("QMCAR_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring non-integer QMCAR_THREADS=%r", raw)
    return os.cpu_count() or 1


def _fit_rows(rows, attr, min_n, x="N"):
    pts = [(getattr(r, x), getattr(r, attr)) for r in rows if r.N >= min_n and getattr(r, attr)]
    if len(pts) < 3:
        return None
    slope, err = fit_slope(pts)
    return {"slope": slope, "stderr": err, "points": len(pts), "x": x}


def run_convergence(cfg: ExperimentConfig, workers: Optional[int] = None) -> ConvergenceReport:
    d = cfg.make_density()
    ref = None
    if "integration_error" in cfg.measures:
        ref = reference_integral(get_integrand(cfg.integrand), d)
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(cfg.params) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda p: _run_param(cfg, d, ref, p), cfg.params))
    else:
        rows = [_run_param(cfg, d, ref, p) for p in cfg.params]
    rows.sort(key=lambda r: (r.family, r.N, r.param))

    fits = {}
    for attr in ("dstar", "integ_err"):
        f = _fit_rows(rows, attr, cfg.min_N_fit)
        if f:
            fits[attr] = f
    f = _fit_rows(rows, "qr", 0, x="M")
    if f:
        fits["qr"] = f
    used = [r.N for r in rows if r.N >= cfg.min_N_fit]
    dfit = fits.get("dstar", {})
    return ConvergenceReport(
        rows=rows,
        slope=dfit.get("slope"),
        stderr=dfit.get("stderr"),
        fit_range=(min(used), max(used)) if used else (None, None),
        density=d.name,
        L=d.bound,
        C=d.norm,
        fits=fits,
    )


def figure_sweeps(density="example1", seeds=DEFAULT_SEEDS, k_range=(10, 25), pow2_range=(8, 20)):
    """The four sweep configurations behind one convergence figure."""
    ks = list(range(k_range[0], k_range[1] + 1))
    ms = [2**e for e in range(pow2_range[0], pow2_range[1] + 1)]
    common = dict(density=density, measures=("dstar", "accept_rate"))
    return {
        "fibonacci": ExperimentConfig(family="fibonacci", params=ks, **common),
        "kronecker": ExperimentConfig(family="kronecker", params=ms, **common),
        "grid": ExperimentConfig(family="grid", params=ms, **common),
        "random": ExperimentConfig(family="random", params=ms, seeds=list(seeds), **common),
    }


def fibonacci_vs_kronecker(density, k_range=(10, 25)):
    """Compare ``D*`` of the Fibonacci lattice and the Kronecker set at the same ``M = F_k``."""
    d = from_config(density)
    out = []
    for k in range(k_range[0], k_range[1] + 1):
        fib = make_driver("fibonacci", k)
        kron = kronecker(len(fib))
        sf, sk = ar_deterministic(d, fib), ar_deterministic(d, kron)
        out.append(
            {
                "k": k,
                "M": len(fib),
                "N_fibonacci": sf.N_accepted,
                "N_kronecker": sk.N_accepted,
                "dstar_fibonacci": star_discrepancy_1d(d, sf).value,
                "dstar_kronecker": star_discrepancy_1d(d, sk).value,
            }
        )
    return out


def reproduce_figures(out_dir, densities=("example1", "example2"), workers=None, **sweep_kwargs) -> dict:
    """Write ``figure1.csv``, ``figure2.csv`` and ``summary.json`` to ``out_dir``.

    Each figure holds the fibonacci, kronecker, grid and random series for one
    density.  The summary records every fitted slope and the fraction of
    sizes ``M = F_k`` at which the Fibonacci lattice beats the Kronecker set.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for idx, dens in enumerate(densities, start=1):
        rows, fig = [], {"density": dens, "series": {}}
        for family, cfg in figure_sweeps(dens, **sweep_kwargs).items():
            rep = run_convergence(cfg, workers)
            rows.extend(rep.rows)
            fig["series"][family] = {
                "slope": rep.slope,
                "stderr": rep.stderr,
                "fit_range": list(rep.fit_range),
                "mean_accept_rate": float(np.mean([r.accept_rate for r in rep.rows])),
            }
            fig["L"], fig["C"], fig["C_over_L"] = rep.L, rep.C, rep.C / rep.L
        k_range = sweep_kwargs.get("k_range", (10, 25))
        cmp_rows = fibonacci_vs_kronecker(dens, k_range)
        wins = sum(r["dstar_fibonacci"] <= r["dstar_kronecker"] for r in cmp_rows)
        fig["fibonacci_vs_kronecker"] = cmp_rows
        fig["fibonacci_le_kronecker_fraction"] = wins / len(cmp_rows)
        fig["ordering_claim_holds"] = wins / len(cmp_rows) >= 0.8
        if not fig["ordering_claim_holds"]:
            log.warning("figure %d: fibonacci <= kronecker at only %d/%d sizes", idx, wins, len(cmp_rows))
        rows.sort(key=lambda r: (r.family, r.N, r.param))
        text = qio.write_csv(([getattr(r, c) for c in FIGURE_COLUMNS] for r in rows), list(FIGURE_COLUMNS))
        (out / f"figure{idx}.csv").write_text(text, encoding="utf-8")
        summary[f"figure{idx}"] = fig
    (out / "summary.json").write_text(qio.dumps_json(summary), encoding="utf-8")
    return summary


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return ExperimentConfig.from_dict(raw)


def report_to_dict(rep: ConvergenceReport) -> dict:
    out = rep.summary()
    out["rows"] = [asdict(r) for r in rep.rows]
    return out
