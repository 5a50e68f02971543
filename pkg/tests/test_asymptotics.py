import json
import math
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from planarpatterns.asymptotics import (BASE_POINT, AsymptoticsError, build_bmj_system,
                                        constants_for_catalog, gw_condition_check,
                                        lemm_factorial_check, pattern_constants,
                                        pattern_factorial_moment, ratio_asymptotic_check,
                                        singularity_at, solve_and_differentiate, to_rational)
from planarpatterns.enumeration import MarkingTerm, factorial_moment_exact, solve_marked_dde
from planarpatterns.generate import brute_force_maps
from planarpatterns.intersections import enumerate_intersection_types
from planarpatterns.maps import builtin_pattern, count_occurrences
from planarpatterns.verify import DGT_TERM, TGP_NO_U_TERM, TGP_TERM


@pytest.fixture(scope="module")
def dgt():
    sys = build_bmj_system([DGT_TERM])
    return sys, solve_and_differentiate(sys)


@pytest.fixture(scope="module")
def koala():
    cat = enumerate_intersection_types(builtin_pattern("koala"))
    return cat, constants_for_catalog(cat)


def test_to_rational():
    with mp.workprec(256):
        assert to_rational(mpf(1) / 12) == Fraction(1, 12)
        assert to_rational(-mpf(7) / 186624) == Fraction(-7, 186624)
        assert to_rational(mp.pi) is None


def test_unmarked_point_solves_system(dgt):
    sys, _ = dgt
    with mp.workprec(256):
        w = [[mpf(x.numerator) / x.denominator] for x in BASE_POINT]
        assert max(abs(g[0]) for g in sys.residual(w)) < mpf(2) ** -240
    assert sys.unknowns == ("u", "M", "Y", "z")


def test_dgt_constants(dgt):
    _, rep = dgt
    with rep.workprec():
        assert rep.rational(rep.rho) == Fraction(1, 12)
        assert rep.rational(rep.rho1[0]) == Fraction(-7, 186624)
        assert rep.rational(rep.rho2[0][0]) == Fraction(11, 120932352)
        assert rep.rational(rep.f1[0]) == Fraction(7, 15552)
        assert rep.rational(rep.f1[0] + rep.f2[0][0]) == Fraction(108649, 241864704)
    assert rep.residual < mpf(2) ** -200


def test_tgp_constants():
    no_u = solve_and_differentiate(build_bmj_system([TGP_NO_U_TERM]))
    own = solve_and_differentiate(build_bmj_system([TGP_TERM]))
    with no_u.workprec():
        assert no_u.rational(no_u.f1[0]) == Fraction(737, 34992000)
        assert no_u.rational(no_u.f2[0][0]) == Fraction(-15601553, 30611001600000000)
        assert no_u.rational(no_u.sigma2) == Fraction(644711998447, 30611001600000000)
        assert own.rational(own.mu) == Fraction(419, 30233088)
        assert own.rational(own.sigma2) == Fraction(4222370131, 304679870005248)


def test_polygon_constants_positive():
    rep = solve_and_differentiate(build_bmj_system([MarkingTerm(0, 1, 0, 4)]))
    assert rep.mu > 0 and rep.sigma2 > 0
    assert rep.rational(rep.f1[0]) == Fraction(419, 34992)


def test_derivatives_match_finite_differences(dgt):
    sys, rep = dgt
    with mp.workprec(256):
        h = mpf(2) ** -40
        rp, r0, rm = (singularity_at(sys, [v]) for v in (h, 0, -h))
        assert abs(r0 - rep.rho) < mpf(2) ** -200
        assert abs((rp - rm) / (2 * h) / rep.rho1[0] - 1) < mpf(10) ** -20
        assert abs((rp - 2 * r0 + rm) / h ** 2 / rep.rho2[0][0] - 1) < mpf(10) ** -20


def test_mixed_derivative_matches_finite_differences():
    terms = [MarkingTerm(0, 1, 0, 2), MarkingTerm(1, 1, 0, 3)]
    sys = build_bmj_system(terms)
    rep = solve_and_differentiate(sys)
    with mp.workprec(256):
        h = mpf(2) ** -40
        vals = {(a, b): singularity_at(sys, [a * h, b * h]) for a in (-1, 1) for b in (-1, 1)}
        mixed = (vals[1, 1] - vals[1, -1] - vals[-1, 1] + vals[-1, -1]) / (4 * h * h)
        assert abs(mixed / rep.rho2[0][1] - 1) < mpf(10) ** -20
        f01 = -rep.rho2[0][1] / rep.rho + rep.rho1[0] * rep.rho1[1] / rep.rho ** 2
        assert abs(rep.f2[0][1] - f01) < mpf(2) ** -200


def test_face_class_route_matches_direct(dgt):
    _, direct = dgt
    cat = enumerate_intersection_types(builtin_pattern("double-glued-triangles"))
    rep = solve_and_differentiate(build_bmj_system(cat.marking_terms()))
    with rep.workprec():
        mu, var = pattern_constants(cat, rep)
        assert abs(mu - direct.mu) < mpf(2) ** -200
        assert abs(var - direct.sigma2) < mpf(2) ** -200


def test_koala_constants(koala):
    cat, rep = koala
    assert rep.arity == 13
    assert all(f > 0 for f in rep.f1)
    assert rep.mu > 0 and rep.sigma2 > 0
    with pytest.raises(AsymptoticsError):
        pattern_constants(cat, solve_and_differentiate(build_bmj_system([MarkingTerm(0, 1, 0, 4)])))


def test_koala_moments_from_face_classes_match_brute_force(koala):
    cat, _ = koala
    fam = solve_marked_dde(cat.marking_terms(), 7, 2)
    pat = builtin_pattern("koala")
    for n in range(8):
        xs = [count_occurrences(m, pat) for m in brute_force_maps(n)]
        assert pattern_factorial_moment(cat, fam, n, 1) == Fraction(sum(xs), len(xs))
        assert pattern_factorial_moment(cat, fam, n, 2) == Fraction(sum(x * (x - 1) for x in xs), len(xs))


def test_report_json(dgt):
    _, rep = dgt
    d = json.loads(rep.to_json())
    assert d["rho"]["rational"] == "1/12" and d["rho"]["verified"]
    assert d["f1"][0]["rational"] == "7/15552"
    assert d["precision_bits"] == 256


def test_ratio_check_examples():
    assert ratio_asymptotic_check(10, 0) == 0
    assert ratio_asymptotic_check(10 ** 4, 1) <= Fraction(1, 10 ** 6)
    for k in (1, 3, 7):
        q = ratio_asymptotic_check(2000, k) / ratio_asymptotic_check(1000, k)
        assert 0.2 < q < 0.3
    with pytest.raises(AsymptoticsError):
        ratio_asymptotic_check(3, 3)


def test_factorial_check_zero_order(dgt):
    _, rep = dgt
    fam = solve_marked_dde([DGT_TERM], 20, 2)
    assert lemm_factorial_check(fam, 20, 0, rep) == 0


def test_factorial_check_mixed():
    terms = [MarkingTerm(0, 1, 0, 2), MarkingTerm(1, 1, 0, 3)]
    rep = solve_and_differentiate(build_bmj_system(terms))
    fam = solve_marked_dde(terms, 120, 2)
    errs = [abs(lemm_factorial_check(fam, n, (1, 1), rep)) for n in (60, 120)]
    scale = 2 * 2 ** 1.5
    assert all(e < 5 * scale / n for e, n in zip(errs, (60, 120)))
    assert errs[1] < errs[0]


def test_gw_condition_trivial():
    mu, sigma = 50.0, 6.0
    target = {k: math.exp(k * math.log(mu) + k * k * (sigma ** 2 - mu) / (2 * mu * mu)) for k in range(1, 6)}
    prof = gw_condition_check(mu, sigma, target)
    assert prof.max_residual < 1e-12
    ns = [100, 1000, 10000]
    prof = gw_condition_check([float(n) for n in ns], [math.sqrt(n) for n in ns], target)
    assert all(prof.side_conditions.values())
    with pytest.raises(AsymptoticsError):
        gw_condition_check(mu, sigma, target, k_range=[])


def test_gw_residuals_decay_for_face_counts():
    term = MarkingTerm(0, 1, 0, 4)
    rep = solve_and_differentiate(build_bmj_system([term]))
    fam = solve_marked_dde([term], 200, 3)
    worst = []
    for n in (100, 200):
        with rep.workprec():
            mu = float(rep.f1[0] * n)
            sigma = math.sqrt(float(rep.sigma2 * n))
        moments = {k: factorial_moment_exact(fam, n, k) for k in (1, 2, 3)}
        worst.append(gw_condition_check(mu, sigma, moments).max_residual)
    assert worst[1] < worst[0]
