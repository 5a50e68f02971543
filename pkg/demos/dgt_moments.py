"""Exact moments of double glued triangles against their linear forms.

The marked series gives E[X_n] and E[X_n (X_n - 1)] exactly; the singular
expansion predicts f' n + g' and f'^2 n^2 + (f'' + 2 f' g') n.  The gap
shrinks like 1/n.

Run:  python3 demos/dgt_moments.py [N]
"""
import sys

from planarpatterns.asymptotics import build_bmj_system, solve_and_differentiate
from planarpatterns.enumeration import factorial_moment_exact, solve_marked_dde
from planarpatterns.verify import DGT_TERM, dgt_mean_expansion


def main(N=200):
    rep = solve_and_differentiate(build_bmj_system([DGT_TERM]))
    with rep.workprec():
        print("f'  =", rep.rational(rep.f1[0]))
        print("f'' =", rep.rational(rep.f2[0][0]))
    fam = solve_marked_dde([DGT_TERM], N, 2)
    fit = tuple(N - 10 * i for i in range(4, -1, -1))
    _, _, coeffs = dgt_mean_expansion(N, fit, family=fam, report=rep)
    with rep.workprec():
        f1, f2, g = rep.f1[0], rep.f2[0][0], coeffs[0]
        print(f"g'  ~ {float(g):.12f} (fitted)")
        print(f"{'n':>5} {'E[X_n]':>14} {'mean gap':>12} {'2nd gap / n':>12}")
        n = 25
        while n <= N:
            e1 = factorial_moment_exact(fam, n, 1)
            e2 = factorial_moment_exact(fam, n, 2)
            gap1 = float(e1) - float(f1 * n + g)
            gap2 = (float(e2) - float(f1 ** 2 * n * n + (f2 + 2 * f1 * g) * n)) / n
            print(f"{n:5d} {float(e1):14.8f} {gap1:12.3e} {gap2:12.3e}")
            n *= 2


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
