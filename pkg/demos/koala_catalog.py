"""Intersection types of the koala and the constants they lead to.

Run:  python3 demos/koala_catalog.py
"""
from planarpatterns import constants_for_catalog, enumerate_intersection_types
from planarpatterns.maps import builtin_pattern
from planarpatterns.verify import koala_rows


def main():
    cat = enumerate_intersection_types(builtin_pattern("koala"))
    print(f"koala: l0={cat.l0} d0={cat.d0} r0={cat.r0}, {len(cat.types)} intersection types, "
          f"{len(cat.face_classes)} face classes")
    print(" i  shape            r  c  d  class")
    for ty, (shape, r, c, d) in zip(cat.types, koala_rows(cat)):
        print(f"{ty.index:2d}  {str(shape):15s} {r:2d} {c:2d} {d:2d}  {cat.t[ty.index]}")

    print("\nmarking terms (c, e, h, s):")
    for t in cat.marking_terms():
        print("  x%d: %d z^%d P_%d S%s" % (t.var + 1, t.c, t.e + 1, t.h - 1, t.s))

    print("\nsolving the 13-variable system (about half a minute) ...")
    rep = constants_for_catalog(cat)
    with rep.workprec():
        print(f"E[X_n]  ~ {float(rep.mu):.10g} n")
        print(f"Var X_n ~ {float(rep.sigma2):.10g} n")


if __name__ == "__main__":
    main()
