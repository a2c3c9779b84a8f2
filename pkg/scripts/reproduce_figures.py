"""Regenerate the two convergence figures as CSV plus a slope summary.

Usage: python3 scripts/reproduce_figures.py [out_dir]
"""

import sys
import time

from qmcar.experiments import reproduce_figures


def main(argv):
    out = argv[1] if len(argv) > 1 else "figures"
    start = time.perf_counter()
    summary = reproduce_figures(out)
    for key, fig in summary.items():
        print(f"{key} ({fig['density']}, C/L = {fig['C_over_L']:.4f})")
        for family, series in fig["series"].items():
            print(f"  {family:10s} slope {series['slope']:+.3f} +- {series['stderr']:.3f}")
        print(f"  fibonacci <= kronecker at {fig['fibonacci_le_kronecker_fraction']:.0%} of sizes M = F_k")
    print(f"wrote {out}/figure1.csv, figure2.csv, summary.json in {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main(sys.argv)
