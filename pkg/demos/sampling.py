"""Uniform random maps and empirical pattern statistics.

Samples maps with n edges, counts simple 4-gon faces and compares the
sample mean and variance with the exact values from the series.  Set
PLANARPATTERNS_THREADS to use several processes.

Run:  python3 demos/sampling.py [n] [trials]
"""
import sys
import time

from planarpatterns.enumeration import MarkingTerm, factorial_moment_exact, solve_marked_dde
from planarpatterns.maps import polygon_pattern
from planarpatterns.sampler import build_sampler_tables, empirical_stats


def main(n=150, trials=2000):
    fam = solve_marked_dde([MarkingTerm(0, 1, 0, 4)], n, 2)
    mean = float(factorial_moment_exact(fam, n, 1))
    var = float(factorial_moment_exact(fam, n, 2)) + mean - mean ** 2

    t0 = time.time()
    tables = build_sampler_tables(n)
    rep = empirical_stats(polygon_pattern(4), n, trials, seed=2026, tables=tables)
    print(f"{trials} maps with {n} edges in {time.time() - t0:.1f}s")
    print(f"mean      {rep.mean:.4f} +- {rep.mean_radius:.4f}   exact {mean:.4f}")
    print(f"variance  {rep.variance:.4f} +- {rep.variance_radius:.4f}   exact {var:.4f}")
    print(f"skewness  {rep.skewness:.3f}, normality p = {rep.normality_pvalue:.3g}")


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:3]]
    main(*args)
