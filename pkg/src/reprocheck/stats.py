"""Rank statistics, effect sizes and multiple-testing correction.

Statistics are computed here; scipy supplies only reference-distribution
tail probabilities (chi-square, Student t, two-sample KS).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as _dist


class StatsError(ValueError):
    pass


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with tied values sharing the mean of their positions."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x), dtype=float)
    sx = x[order]
    i = 0
    n = len(x)
    while i < n:
        j = i
        while j + 1 < n and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_sizes(values) -> np.ndarray:
    _, counts = np.unique(np.asarray(values, dtype=float), return_counts=True)
    return counts


def _binary(labels: Sequence) -> np.ndarray:
    y = np.asarray(labels)
    if y.dtype == bool:
        y = y.astype(int)
    uniq = set(np.unique(y).tolist())
    if not uniq <= {0, 1}:
        raise StatsError(f"labels must be binary 0/1, got {sorted(uniq)}")
    if len(uniq) < 2:
        raise StatsError("single-class input: both label classes are required")
    return y.astype(int)


@dataclass(frozen=True)
class KruskalWallis:
    H: float
    p: float
    df: int


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> KruskalWallis:
    """Rank-sum H with the standard tie correction; p from chi-square with groups-1 df."""
    if len(groups) < 2:
        raise StatsError("at least two groups required")
    if any(len(g) == 0 for g in groups):
        raise StatsError("every group must be non-empty")
    pooled = np.concatenate([np.asarray(g, dtype=float) for g in groups])
    n = len(pooled)
    ranks = average_ranks(pooled)
    h = 0.0
    start = 0
    for g in groups:
        r = ranks[start:start + len(g)]
        h += r.sum() ** 2 / len(g)
        start += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    t = _tie_sizes(pooled)
    correction = 1.0 - float(np.sum(t ** 3 - t)) / (n ** 3 - n)
    df = len(groups) - 1
    if correction <= 0.0:
        return KruskalWallis(0.0, 1.0, df)
    h /= correction
    h = max(h, 0.0)
    return KruskalWallis(h, float(_dist.chi2.sf(h, df)), df)


@dataclass(frozen=True)
class Correlation:
    r: float
    p: float
    n: int


def point_biserial(scores: Sequence[float], labels: Sequence) -> Correlation:
    """Pearson correlation between scores and a 0/1 label, two-sided t-test p-value.

    Constant scores carry no association: r = 0, p = 1.
    """
    x = np.asarray(scores, dtype=float)
    y = _binary(labels)
    if len(x) != len(y):
        raise StatsError("scores and labels differ in length")
    n = len(x)
    x1, x0 = x[y == 1], x[y == 0]
    sd = x.std()  # population SD, as in the point-biserial formula
    if sd == 0.0:
        return Correlation(0.0, 1.0, n)
    p1 = len(x1) / n
    r = (x1.mean() - x0.mean()) / sd * math.sqrt(p1 * (1.0 - p1))
    r = max(-1.0, min(1.0, float(r)))
    if n <= 2:
        return Correlation(r, 1.0, n)
    if abs(r) >= 1.0:
        return Correlation(r, 0.0, n)
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return Correlation(r, float(2.0 * _dist.t.sf(abs(t), n - 2)), n)


def cohens_d(a: Sequence[float], b: Sequence[float]) -> float:
    """(mean(a) - mean(b)) / pooled SD with n-1 denominators."""
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    if len(xa) == 0 or len(xb) == 0:
        raise StatsError("both samples must be non-empty")
    dof = len(xa) + len(xb) - 2
    if dof <= 0:
        raise StatsError("degenerate dispersion")
    ss = ((xa - xa.mean()) ** 2).sum() + ((xb - xb.mean()) ** 2).sum()
    pooled = math.sqrt(ss / dof)
    if pooled == 0.0:
        raise StatsError("degenerate dispersion")
    return float((xa.mean() - xb.mean()) / pooled)


def ks_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """Largest absolute gap between the two empirical CDFs."""
    xa = np.sort(np.asarray(a, dtype=float))
    xb = np.sort(np.asarray(b, dtype=float))
    if len(xa) == 0 or len(xb) == 0:
        raise StatsError("both samples must be non-empty")
    grid = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, grid, side="right") / len(xa)
    fb = np.searchsorted(xb, grid, side="right") / len(xb)
    return float(np.max(np.abs(fa - fb)))


@dataclass(frozen=True)
class KSTest:
    D: float
    p: float


def ks_test(a: Sequence[float], b: Sequence[float]) -> KSTest:
    d = ks_statistic(a, b)
    return KSTest(d, float(_dist.ks_2samp(a, b).pvalue))


def auc_roc(scores: Sequence[float], labels: Sequence) -> float:
    """Probability a positive outranks a negative, ties counting one half (rank formulation)."""
    x = np.asarray(scores, dtype=float)
    y = _binary(labels)
    if len(x) != len(y):
        raise StatsError("scores and labels differ in length")
    ranks = average_ranks(x)
    n1 = int(y.sum())
    n0 = len(y) - n1
    return float((ranks[y == 1].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0))


@dataclass(frozen=True)
class BootstrapCI:
    lo: float
    hi: float
    level: float
    resamples: int
    used: int  # resamples containing both classes


def _weighted_auc(counts: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """AUC for each row of per-observation multiplicities (one row per resample)."""
    uniq, inv = np.unique(x, return_inverse=True)
    onehot = np.zeros((len(x), len(uniq)))
    onehot[np.arange(len(x)), inv] = 1.0
    pos = (counts * (y == 1)) @ onehot
    neg = (counts * (y == 0)) @ onehot
    neg_below = np.cumsum(neg, axis=1) - neg
    wins = (pos * neg_below).sum(axis=1) + 0.5 * (pos * neg).sum(axis=1)
    denom = pos.sum(axis=1) * neg.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(denom > 0, wins / np.where(denom > 0, denom, 1.0), np.nan)


def bootstrap_ci(scores: Sequence[float], labels: Sequence, resamples: int = 10_000,
                 level: float = 0.95, seed: int = 0) -> BootstrapCI:
    """Percentile interval for AUC, resampling repositories with replacement."""
    if resamples < 1000:
        raise StatsError("at least 1000 resamples required")
    if not 0.0 < level < 1.0:
        raise StatsError("level must lie in (0, 1)")
    x = np.asarray(scores, dtype=float)
    y = _binary(labels)
    rng = np.random.default_rng(seed)
    n = len(x)
    aucs = []
    chunk = max(1, min(resamples, 2_000_000 // max(n, 1)))
    done = 0
    while done < resamples:
        m = min(chunk, resamples - done)
        counts = rng.multinomial(n, np.full(n, 1.0 / n), size=m).astype(float)
        aucs.append(_weighted_auc(counts, x, y))
        done += m
    all_aucs = np.concatenate(aucs)
    valid = all_aucs[~np.isnan(all_aucs)]
    if len(valid) == 0:
        raise StatsError("no resample contained both classes")
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(valid, [tail, 1.0 - tail])
    return BootstrapCI(float(lo), float(hi), level, resamples, int(len(valid)))


def kendall_tau(a: Sequence[float], b: Sequence[float]) -> float | None:
    """Tau-b (tie-corrected); ``None`` when either ranking is entirely tied."""
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    if len(xa) != len(xb):
        raise StatsError("rankings differ in length")
    n = len(xa)
    if n < 2:
        return None
    s = n_a = n_b = 0
    step = max(1, 4_000_000 // n)
    for start in range(0, n, step):
        sa = np.sign(xa[start:start + step, None] - xa[None, :])
        sb = np.sign(xb[start:start + step, None] - xb[None, :])
        s += int((sa * sb).sum())
        n_a += int(np.abs(sa).sum())
        n_b += int(np.abs(sb).sum())
    # each unordered pair was visited twice
    if n_a == 0 or n_b == 0:
        return None
    return float(s / math.sqrt(n_a * n_b))


def benjamini_hochberg(p_values: Sequence[float], fdr: float = 0.05) -> tuple[list[float], list[bool]]:
    """Step-up adjusted q-values and rejections at ``fdr``."""
    p = np.asarray(p_values, dtype=float)
    if len(p) and (np.any(p < 0) or np.any(p > 1) or np.any(np.isnan(p))):
        raise StatsError("p-values must lie in [0, 1]")
    m = len(p)
    if m == 0:
        return [], []
    order = np.argsort(p, kind="mergesort")
    ranked = p[order] * m / np.arange(1, m + 1)
    ranked = np.minimum.accumulate(ranked[::-1])[::-1]
    q = np.empty(m)
    q[order] = np.minimum(ranked, 1.0)
    return q.tolist(), (q <= fdr).tolist()
