import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

import oracles
from reprocheck import stats

small_ints = st.lists(st.integers(0, 8), min_size=2, max_size=40)


@settings(max_examples=300, deadline=None)
@given(small_ints)
def test_average_ranks(values):
    assert list(stats.average_ranks(values)) == pytest.approx(oracles.ranks_by_counting(values))


@settings(max_examples=300, deadline=None)
@given(st.lists(small_ints, min_size=2, max_size=5))
def test_kruskal_matches_reference(groups):
    pooled = [v for g in groups for v in g]
    if len(set(pooled)) < 2:
        kw = stats.kruskal_wallis(groups)
        assert (kw.H, kw.p) == (0.0, 1.0)
        return
    kw = stats.kruskal_wallis(groups)
    assert kw.H == pytest.approx(oracles.kruskal_ref(groups), rel=1e-9, abs=1e-9)
    assert kw.df == len(groups) - 1
    assert kw.p == pytest.approx(float(sps.chi2.sf(kw.H, kw.df)), rel=1e-9, abs=1e-15)


def test_kruskal_with_ties_hand_computed():
    # pooled ranks 1.5 1.5 3 | 4 5.5 5.5, tie correction 1 - 12/210
    groups = [[1, 1, 2], [3, 4, 4]]
    h_raw = 12 / 42 * ((6 ** 2) / 3 + (15 ** 2) / 3) - 21
    assert stats.kruskal_wallis(groups).H == pytest.approx(h_raw / (1 - 12 / 210), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 50), st.booleans()), min_size=3, max_size=60))
def test_point_biserial_is_pearson(rows):
    scores = [float(s) for s, _ in rows]
    labels = [y for _, y in rows]
    if len(set(labels)) < 2:
        with pytest.raises(stats.StatsError):
            stats.point_biserial(scores, labels)
        return
    c = stats.point_biserial(scores, labels)
    if len(set(scores)) < 2:
        assert (c.r, c.p) == (0.0, 1.0)
        return
    assert c.r == pytest.approx(oracles.pearson_ref(scores, [float(y) for y in labels]), abs=1e-12)
    assert c.n == len(rows)
    if abs(c.r) < 1 - 1e-9:
        assert c.p == pytest.approx(sps.pearsonr(scores, [float(y) for y in labels])[1], rel=1e-6, abs=1e-12)


def test_cohens_d():
    a, b = [2.0, 4.0, 6.0, 9.0], [1.0, 1.5, 3.0]
    assert stats.cohens_d(a, b) == pytest.approx(oracles.cohens_d_ref(a, b), abs=1e-12)
    with pytest.raises(stats.StatsError):
        stats.cohens_d([1.0, 1.0], [1.0, 1.0])


@settings(max_examples=300, deadline=None)
@given(small_ints, small_ints)
def test_ks_statistic(a, b):
    assert stats.ks_statistic(a, b) == pytest.approx(oracles.ks_ref(a, b), abs=1e-12)
    res = stats.ks_test(a, b)
    assert res.D == pytest.approx(sps.ks_2samp(a, b).statistic, abs=1e-12)
    assert 0.0 <= res.p <= 1.0


def test_auc_extremes():
    assert stats.auc_roc([1, 2, 3, 4], [0, 0, 1, 1]) == 1.0
    assert stats.auc_roc([4, 3, 2, 1], [0, 0, 1, 1]) == 0.0
    assert stats.auc_roc([1, 1, 1, 1], [0, 1, 0, 1]) == 0.5
    with pytest.raises(stats.StatsError):
        stats.auc_roc([1, 2], [1, 1])


def test_bootstrap_ci_reproducible():
    rng = np.random.default_rng(3)
    scores = rng.normal(size=120)
    labels = (scores + rng.normal(size=120)) > 0.3
    first = stats.bootstrap_ci(scores, labels, resamples=2000, seed=11)
    assert first == stats.bootstrap_ci(scores, labels, resamples=2000, seed=11)
    assert first.lo <= stats.auc_roc(scores, labels) <= first.hi
    assert first.used <= first.resamples == 2000
    assert first != stats.bootstrap_ci(scores, labels, resamples=2000, seed=12)
    with pytest.raises(stats.StatsError):
        stats.bootstrap_ci(scores, labels, resamples=999)


def test_bootstrap_matches_index_resampling():
    """Same quantiles as a plain loop over resampled index vectors, within Monte Carlo noise."""
    rng = np.random.default_rng(5)
    scores = rng.integers(0, 10, 60).astype(float)
    labels = rng.random(60) < 0.4
    ci = stats.bootstrap_ci(scores, labels, resamples=4000, seed=1)
    loop_rng = np.random.default_rng(99)
    aucs = []
    while len(aucs) < 4000:
        idx = loop_rng.integers(0, 60, 60)
        if len(set(labels[idx].tolist())) == 2:
            aucs.append(oracles.auc_pairs(scores[idx].tolist(), labels[idx].tolist()))
    lo, hi = np.quantile(aucs, [0.025, 0.975])
    assert ci.lo == pytest.approx(lo, abs=0.02)
    assert ci.hi == pytest.approx(hi, abs=0.02)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=40))
def test_bh_matches_reference(p):
    q, reject = stats.benjamini_hochberg(p, fdr=0.1)
    assert q == pytest.approx(oracles.bh_ref(p), abs=1e-12)
    order = np.argsort(p, kind="stable")
    assert all(q[order[i]] <= q[order[i + 1]] + 1e-15 for i in range(len(p) - 1))
    assert reject == [v <= 0.1 for v in q]


def test_kendall_degenerate():
    assert stats.kendall_tau([1, 1, 1], [1, 2, 3]) is None
    assert stats.kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0
