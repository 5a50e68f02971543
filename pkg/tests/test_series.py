import random
from fractions import Fraction

import pytest

from planarpatterns.enumeration import solve_map_dde
from planarpatterns.series import (SeriesError, TruncatedSeries, coeff, divided_difference_u,
                                   series_add, series_mul)


def poly(terms, N=3, r=0, K=0):
    return TruncatedSeries.from_poly(terms, N, r, K)


def random_series(rng, N=3, r=1, K=2):
    c = {}
    for _ in range(rng.randint(1, 8)):
        n = rng.randint(0, N)
        j = rng.randint(0, 2 * n)
        k = tuple(rng.randint(0, K) for _ in range(r))
        c[(n, j, k)] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return TruncatedSeries(c, N, r, K)


def test_add_identity_and_inverse():
    F = poly({(1, 2): 1, (1, 1): 1, (2, 3): 3})
    assert series_add(TruncatedSeries.zero(3), F) == F
    assert len(series_add(F, -F)) == 0


def test_add_coefficientwise():
    s = series_add(poly({(1, 2): 1, (1, 1): 1}), poly({(1, 1): 1}))
    assert s == poly({(1, 2): 1, (1, 1): 2})


def test_mul_examples():
    F = poly({(1, 2): 1, (1, 1): 1})
    assert series_mul(TruncatedSeries.one(3), F) == F
    sq = series_mul(poly({(0, 2): 1, (0, 1): 1}), poly({(0, 2): 1, (0, 1): 1}))
    assert sq == poly({(0, 4): 1, (0, 3): 2, (0, 2): 1})
    M = poly({(0, 0): 1, (1, 2): 1, (1, 1): 1})
    MM = series_mul(M, M)
    assert MM.coeff(1, 2) == 2 and MM.coeff(1, 1) == 2


def test_mul_truncates():
    F = poly({(2, 0): 1}, N=3)
    assert len(series_mul(F, F)) == 0


def test_divided_difference_examples():
    assert len(divided_difference_u(poly({(0, 0): 1}))) == 0
    assert divided_difference_u(poly({(0, 2): 1})) == poly({(0, 1): 1, (0, 0): 1})
    assert divided_difference_u(poly({(1, 2): 1, (1, 1): 1})) == poly({(1, 1): 1, (1, 0): 2})


def test_coeff_of_map_series():
    M = solve_map_dde(3).M
    assert coeff(M, 0, 0, ()) == 1
    assert coeff(M, 1, 2, ()) == 1
    assert coeff(M, 2, 3, ()) == 3
    assert [M.coeff(2, j) for j in range(5)] == [0, 2, 2, 3, 2]
    assert coeff(M, 3, 100, ()) == 0
    with pytest.raises(SeriesError):
        coeff(M, 4, 0, ())


def test_arity_mismatch():
    with pytest.raises(SeriesError):
        series_add(TruncatedSeries.zero(2, 1, 1), TruncatedSeries.zero(2, 2, 1))
    with pytest.raises(SeriesError):
        series_mul(TruncatedSeries.zero(2, 1, 1), TruncatedSeries.zero(2, 0, 0))


def test_ring_laws_random():
    rng = random.Random(5)
    for _ in range(40):
        a, b, c = (random_series(rng) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


def test_divided_difference_identity_random():
    rng = random.Random(9)
    u_minus_1 = TruncatedSeries.from_poly({(0, 1): 1, (0, 0): -1}, 3, 1, 2)
    for _ in range(40):
        F = random_series(rng)
        assert divided_difference_u(F) * u_minus_1 + F.at_u1() == F


def test_dump_roundtrip():
    rng = random.Random(2)
    for _ in range(10):
        F = random_series(rng, r=2)
        G = TruncatedSeries.loads(F.dumps())
        assert G == F and G.z_order == F.z_order and G.x_degree == F.x_degree


def test_dump_line_format():
    text = poly({(1, 2): Fraction(3, 2)}).dumps().splitlines()
    assert text[1] == "1 2 - 3/2"
