from fractions import Fraction
from math import comb

import pytest

from planarpatterns.enumeration import (CountTable, EnumerationError, MarkingTerm,
                                        brute_force_mark_table, factorial_moment_exact,
                                        simple_polygon_count, solve_map_dde, solve_marked_dde,
                                        tutte_count)
from planarpatterns.generate import brute_force_maps
from planarpatterns.intersections import enumerate_intersection_types
from planarpatterns.maps import builtin_pattern, count_occurrences, is_simple_face, polygon_pattern
from planarpatterns.series import TruncatedSeries


def test_tutte_count_examples():
    assert [tutte_count(n) for n in range(8)] == [1, 2, 9, 54, 378, 2916, 24057, 208494]


def test_map_series_low_orders():
    fam = solve_map_dde(4)
    M = fam.M
    assert M.coeff(0, 0) == 1
    assert [M.coeff(1, j) for j in range(3)] == [0, 1, 1]
    assert fam.count(2) == 9
    assert all(v >= 0 for _, v in M.items())


def test_map_series_satisfies_equation():
    N = 6
    M = solve_map_dde(N).M
    z = TruncatedSeries.from_poly({(1, 0): 1}, N)
    u = TruncatedSeries.from_poly({(0, 1): 1}, N)
    one = TruncatedSeries.one(N)
    # (uM - M(1)) / (u - 1) is the divided difference of uM
    rhs = one + z * u * u * M * M + z * u * (u * M).divided_difference_u()
    assert rhs == M


def test_valency_rows_sum_to_tutte():
    fam = solve_map_dde(40)
    for n in range(41):
        row = fam.valency_counts(n)
        assert sum(row) == tutte_count(n)
        assert len(row) <= 2 * n + 1 and min(row) >= 0


def test_brute_force_small_counts():
    assert len(list(brute_force_maps(1))) == 2
    assert len(list(brute_force_maps(2))) == 9
    fam = solve_map_dde(6)
    for n in range(7):
        val = [0] * (2 * n + 1)
        for m in brute_force_maps(n):
            val[m.root_valency()] += 1
        assert val == fam.valency_counts(n)


def test_brute_force_limit():
    with pytest.raises(ValueError):
        list(brute_force_maps(11))


def test_simple_boundary_series_match_brute_force():
    fam = solve_map_dde(6, S_count=4)
    for l in range(1, 5):
        S = fam.S_series(l)
        for n in range(7):
            brute = sum(1 for m in brute_force_maps(n)
                        if m.root is not None and m.root_valency() == l
                        and is_simple_face(m, m.alpha[m.root]))
            assert S.coeff(n, 0) == brute


def test_simple_boundary_identities():
    fam = solve_map_dde(12, S_count=2)
    z = TruncatedSeries.from_poly({(1, 0): 1}, 12)
    m1, m2 = fam.m_series(1), fam.m_series(2)
    assert fam.S_series(1) == m1
    assert fam.S_series(2) == m2 - m1 * m1 - z


def test_partial_boundary_identities():
    N = 10
    fam = solve_map_dde(N, P_count=1)
    z = TruncatedSeries.from_poly({(1, 0): 1}, N)
    u = TruncatedSeries.from_poly({(0, 1): 1}, N)
    M = fam.M
    assert fam.P_series(0) == M
    assert fam.P_series(1) == M - TruncatedSeries.one(N) - z * u * M.at_u1() * M


def test_marked_x1_slice_equals_unmarked():
    plain = solve_map_dde(10)
    for terms in ([], [MarkingTerm(0, 1, 2, 2)], enumerate_intersection_types(builtin_pattern("koala")).marking_terms()):
        fam = solve_marked_dde(terms, 10, 2)
        for n in range(11):
            assert fam.valency_counts(n) == plain.valency_counts(n)


def test_invalid_term():
    with pytest.raises(EnumerationError):
        solve_marked_dde([MarkingTerm(0, 1, 0, 0)], 3, 1)


def _binomial_moments(table: dict, r: int, K: int) -> dict:
    """sum over maps of prod C(k_i, j_i) for every |j| <= K."""
    out = {}
    for ks, cnt in table.items():
        def rec(i, js, deg):
            if i == r:
                w = cnt
                for k, j in zip(ks, js):
                    w *= comb(k, j)
                out[js] = out.get(js, 0) + w
                return
            for j in range(0, K - deg + 1):
                rec(i + 1, js + (j,), deg + j)
        rec(0, (), 0)
    return out


@pytest.mark.parametrize("pattern", ["koala", "double-triangle", "double-glued-triangles"])
def test_marked_counts_match_brute_force(pattern):
    cat = enumerate_intersection_types(builtin_pattern(pattern))
    classes = {fc.key: fc.index - 1 for fc in cat.face_classes}
    r = len(classes)
    K = 2
    fam = solve_marked_dde(cat.marking_terms(), 6, K)
    for n in range(7):
        bm = _binomial_moments(brute_force_mark_table(n, classes), r, K)
        for js, v in bm.items():
            assert fam.count(n, js) == v, (n, js)


def test_pattern_equation_counts_occurrences():
    # the pattern's own equation: [z^n y] M(z,1) is the total number of occurrences
    fam = solve_marked_dde([MarkingTerm(0, 1, 2, 2)], 6, 1)
    pat = builtin_pattern("double-glued-triangles")
    for n in range(7):
        assert fam.count(n, 1) == sum(count_occurrences(m, pat) for m in brute_force_maps(n))


def test_factorial_moment_exact_examples():
    fam = solve_marked_dde([MarkingTerm(0, 1, 0, 2)], 6, 3)
    assert factorial_moment_exact(fam, 4, 0) == 1
    total = sum(simple_polygon_count(m, 2) for m in brute_force_maps(2))
    assert factorial_moment_exact(fam, 2, 1) == Fraction(total, 9)
    # one edge: no map has two marked 2-gons
    assert factorial_moment_exact(fam, 1, 2) == 0
    pat = polygon_pattern(2)
    for n in range(6):
        xs = [count_occurrences(m, pat) for m in brute_force_maps(n)]
        assert factorial_moment_exact(fam, n, 2) == Fraction(sum(x * (x - 1) for x in xs), len(xs))
    with pytest.raises(EnumerationError):
        factorial_moment_exact(fam, 7, 1)


def test_count_table_csv():
    fam = solve_marked_dde([MarkingTerm(0, 1, 0, 2)], 2, 1)
    text = CountTable.from_family(fam).to_csv().splitlines()
    assert text[0] == "n,j,count"
    assert "2,3,3" in text
    assert "n,k1,count" in text
