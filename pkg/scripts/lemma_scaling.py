"""Scaling of Q_R on Fibonacci lattices and its ratio to the sample discrepancy.

Prints one line per k with F_k, R = F_{ceil(2k/3)}, Q_R and D*/Q_R for
Example 1, then the fitted log-log slope of Q_R against F_k (theory: -2/3).

Usage: python3 scripts/lemma_scaling.py [k_min] [k_max]
"""

import sys

from qmcar import ar_deterministic, make_builtin
from qmcar.criterion import default_R_for_fibonacci, qr_fibonacci
from qmcar.discrepancy import star_discrepancy_1d
from qmcar.driver import fibonacci_lattice, fibonacci_number
from qmcar.experiments import fit_slope


def main(argv):
    lo = int(argv[1]) if len(argv) > 1 else 9
    hi = int(argv[2]) if len(argv) > 2 else 24
    d = make_builtin("example1")
    pts = []
    print(f"{'k':>3} {'F_k':>8} {'R':>6} {'Q_R':>12} {'D*/Q_R':>8}")
    for k in range(lo, hi + 1):
        R = default_R_for_fibonacci(k)
        q = qr_fibonacci(k, R).value
        dstar = star_discrepancy_1d(d, ar_deterministic(d, fibonacci_lattice(k))).value
        pts.append((fibonacci_number(k), q))
        print(f"{k:3d} {fibonacci_number(k):8d} {R:6d} {q:12.6g} {dstar / q:8.4f}")
    slope, err = fit_slope(pts)
    print(f"slope of log Q_R vs log F_k: {slope:.3f} +- {err:.3f}")


if __name__ == "__main__":
    main(sys.argv)
