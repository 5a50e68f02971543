from collections import Counter

import numpy as np
import pytest
from scipy import stats

from planarpatterns.enumeration import MarkingTerm, factorial_moment_exact, solve_marked_dde, tutte_count
from planarpatterns.generate import brute_force_maps
from planarpatterns.maps import builtin_pattern, polygon_pattern
from planarpatterns.sampler import (THREADS_ENV, SamplerError, build_sampler_tables,
                                    empirical_stats, make_rng, sample_uniform_map,
                                    summarize_counts, worker_count)


def test_tables_tiny():
    t0 = build_sampler_tables(0)
    assert t0.m == [[1]] and t0.check_row_sums()
    t1 = build_sampler_tables(1)
    assert t1.m[1] == [0, 1, 1] and t1.bridge[1] == [0, 0, 1]
    with pytest.raises(SamplerError):
        build_sampler_tables(-1)


def test_exact_row_sums():
    t = build_sampler_tables(60, exact=True)
    assert t.check_row_sums()
    assert all(t.total(n) == tutte_count(n) for n in range(61))
    assert all(0 <= b <= m for n in range(61) for b, m in zip(t.bridge[n], t.m[n]))


def test_float_tables_track_exact():
    ex = build_sampler_tables(80, exact=True)
    fl = build_sampler_tables(80, exact=False)
    assert fl.check_row_sums()
    for n in (10, 40, 80):
        for j in range(0, 2 * n + 1, 7):
            want = ex.m[n][j] / 12.0 ** n
            if want > 1e-12 * fl.total(n):
                assert fl.m[n][j] == pytest.approx(want, rel=1e-9)


def test_float_row_sums_large():
    assert build_sampler_tables(600, exact=False).check_row_sums()


def test_sampled_maps_are_valid():
    t = build_sampler_tables(30)
    rng = make_rng(3)
    for n in (0, 1, 5, 30):
        m = sample_uniform_map(n, tables=t, rng=rng)
        assert m.edge_count == n
        V, E, F = m.counts
        assert V - E + F == 2
    with pytest.raises(SamplerError):
        sample_uniform_map(31, tables=t)


def test_one_edge_loop_frequency():
    t = build_sampler_tables(1)
    rng = make_rng(17)
    loops = sum(sample_uniform_map(1, tables=t, rng=rng).root_valency() == 2 for _ in range(4000))
    # loop and bridge are equally likely
    assert stats.binomtest(loops, 4000, 0.5).pvalue > 1e-3


@pytest.mark.parametrize("n", [2, 3])
def test_uniform_over_small_maps(n):
    forms = [m.canonical_form() for m in brute_force_maps(n)]
    index = {f: i for i, f in enumerate(forms)}
    assert len(index) == tutte_count(n)
    t = build_sampler_tables(n)
    rng = make_rng(100 + n)
    draws = 200 * len(forms)
    seen = Counter(index[sample_uniform_map(n, tables=t, rng=rng).canonical_form()]
                   for _ in range(draws))
    obs = [seen[i] for i in range(len(forms))]
    assert stats.chisquare(obs).pvalue > 1e-3


def test_seed_determinism():
    a = [sample_uniform_map(40, seed=5).to_text() for _ in range(2)]
    assert a[0] == a[1]
    assert sample_uniform_map(40, seed=6).to_text() != a[0]


def test_pattern_larger_than_host():
    rep = empirical_stats(builtin_pattern("koala"), 3, 10, seed=1)
    assert rep.counts == [0] * 10 and rep.mean == 0


def test_stats_independent_of_workers():
    pat = polygon_pattern(2)
    t = build_sampler_tables(30)
    one = empirical_stats(pat, 30, 600, seed=8, tables=t, workers=1)
    two = empirical_stats(pat, 30, 600, seed=8, tables=t, workers=2)
    assert one.counts == two.counts


def test_worker_env(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert worker_count() == 1
    monkeypatch.setenv(THREADS_ENV, "3")
    assert worker_count() == 3
    monkeypatch.setenv(THREADS_ENV, "x")
    with pytest.raises(SamplerError):
        worker_count()


def test_summary_examples():
    rep = summarize_counts([1, 2, 3, 4], 7, "p")
    assert rep.mean == 2.5 and rep.variance == pytest.approx(5 / 3)
    assert rep.to_csv().splitlines()[:2] == ["trial,n,count", "0,7,1"]
    with pytest.raises(SamplerError):
        summarize_counts([], 1)


@pytest.mark.parametrize("exact", [True, False])
def test_sampled_mean_matches_exact(exact):
    # 2-gon faces at n = 60: the empirical mean within 4 standard errors of the exact value
    n = 60
    fam = solve_marked_dde([MarkingTerm(0, 1, 0, 2)], n, 2)
    mean = float(factorial_moment_exact(fam, n, 1))
    var = float(factorial_moment_exact(fam, n, 2)) + mean - mean ** 2
    t = build_sampler_tables(n, exact=exact)
    rep = empirical_stats(polygon_pattern(2), n, 1500, seed=21, tables=t, workers=1)
    assert abs(rep.mean - mean) < 4 * np.sqrt(var / 1500)


def test_float_tail_draws_stay_consistent():
    # every planned root degree is the root degree of the map that is built;
    # tail draws must not lose precision when the tail is tiny
    from planarpatterns.sampler import _build, _Planner
    t = build_sampler_tables(2000, exact=False)
    planner = _Planner(t, make_rng(3))
    for lo in (0, 40, 100):               # 120 is the largest root degree with 60 edges
        assert all(lo <= planner._from_tail(60, lo) <= 120 for _ in range(200))
    for _ in range(40):
        j = planner.root_degree(2000)
        assert _build(planner.plan(2000, j)).root_valency() == j


def test_root_vertex_degree_matches_root_face_degree():
    # by duality both have the distribution of the table row
    n, trials = 1200, 600
    t = build_sampler_tables(n, exact=False)
    p = t.m[n] / t.m[n].sum()
    j = np.arange(len(p))
    mean = (p * j).sum()
    se = np.sqrt((p * j * j).sum() - mean ** 2) / np.sqrt(trials)
    rng = make_rng(12)
    deg = []
    for _ in range(trials):
        m = sample_uniform_map(n, tables=t, rng=rng)
        deg.append(len(m.vertices()[m.vertex_index()[m.root]]))
    assert abs(np.mean(deg) - mean) < 4 * se
