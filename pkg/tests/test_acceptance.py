"""One test per acceptance criterion; each also records a PASS/FAIL line that
is printed in the terminal summary."""

from planarpatterns import verify


def _report(acceptance, number, result, extra=""):
    acceptance(number, result.ok, f"{result.detail}{extra} [{result.seconds:.0f}s]")
    print(f"criterion {number}: {'PASS' if result.ok else 'FAIL'} {result.detail}")


def test_criterion_01_tutte(acceptance):
    r = verify.check_tutte(300)
    _report(acceptance, 1, r)
    assert r.ok, r.detail
    assert r.seconds <= 120


def test_criterion_02_bruteforce(acceptance):
    r = verify.check_bruteforce(7)
    _report(acceptance, 2, r)
    assert r.ok, r.detail
    assert r.data[7]["distinct"] == 208494
    assert r.seconds <= 600


def test_criterion_03_double_glued_triangles(acceptance):
    r = verify.check_dgt(256)
    _report(acceptance, 3, r)
    assert r.ok, r.detail


def test_criterion_04_triple_glued_pentagons(acceptance):
    r = verify.check_tgp(256)
    _report(acceptance, 4, r)
    assert r.data["no-u"]["mu"] == "737/34992000"
    assert r.data["no-u"]["sigma2"] == "644711998447/30611001600000000"
    assert r.ok, r.detail


def test_criterion_05_koala_table(acceptance):
    r = verify.check_koala_catalog()
    _report(acceptance, 5, r)
    rows = r.data["rows"]
    assert len(rows) == 16
    assert sorted(x[1] for x in rows) == sorted(verify.KOALA_R_COLUMN)
    assert sorted(x[3] for x in rows) == sorted(verify.KOALA_D_VECTOR)
    # literal comparison with every reference row, shapes included
    assert r.ok, r.detail


def test_criterion_06_overcount_identity(acceptance):
    r = verify.check_overcount_identity(9, "double-triangle")
    _report(acceptance, 6, r)
    assert r.ok, r.detail


def test_criterion_07_moment_forms(acceptance):
    r = verify.check_moments((50, 100, 200), 300)
    _report(acceptance, 7, r)
    assert r.ok, r.detail


def test_criterion_08_factorial_moments(acceptance):
    r = verify.check_factorial_forms((150, 300), 4, 4)
    _report(acceptance, 8, r)
    assert r.ok, r.detail


def test_criterion_09_coefficient_ratios(acceptance):
    r = verify.check_ratio_asymptotics((1000, 10000), 10)
    _report(acceptance, 9, r)
    assert r.ok, r.detail


def test_criterion_10_empirical_clt(acceptance):
    r = verify.check_clt(2000, 10000)
    _report(acceptance, 10, r)
    assert r.seconds <= 1800
    assert r.data["parts"]["mean"], r.detail
    assert r.data["parts"]["skewness"], r.detail
    assert r.data["parts"]["normality"], r.detail
