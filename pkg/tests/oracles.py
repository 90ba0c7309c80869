"""Slow, obviously-correct reference implementations used as test oracles.

Deliberately written with plain loops and no shared code with the package.
"""

from __future__ import annotations

import math
from itertools import combinations


def gate_ref(x, tau, k):
    if x >= tau:
        return x / 100
    return (x / tau) ** k * tau / 100


def auc_pairs(scores, labels):
    """Probability that a random positive outranks a random negative, ties counted half."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def ranks_by_counting(values):
    """Average rank: 1 + (# strictly smaller) + (# equal others) / 2."""
    out = []
    for v in values:
        less = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        out.append(less + (equal + 1) / 2)
    return out


def kruskal_ref(groups):
    pooled = [v for g in groups for v in g]
    n = len(pooled)
    ranks = ranks_by_counting(pooled)
    h = 0.0
    pos = 0
    for g in groups:
        r = ranks[pos:pos + len(g)]
        pos += len(g)
        h += sum(r) ** 2 / len(g)
    h = 12 / (n * (n + 1)) * h - 3 * (n + 1)
    ties = {}
    for v in pooled:
        ties[v] = ties.get(v, 0) + 1
    c = 1 - sum(t ** 3 - t for t in ties.values()) / (n ** 3 - n)
    return h / c


def kendall_pairs(a, b):
    """Tau-b from explicit concordant/discordant/tie counts."""
    conc = disc = tie_a = tie_b = 0
    for i, j in combinations(range(len(a)), 2):
        da, db = a[i] - a[j], b[i] - b[j]
        if da == 0 and db == 0:
            continue
        if da == 0:
            tie_a += 1
        elif db == 0:
            tie_b += 1
        elif (da > 0) == (db > 0):
            conc += 1
        else:
            disc += 1
    denom = math.sqrt((conc + disc + tie_a) * (conc + disc + tie_b))
    return (conc - disc) / denom


def pearson_ref(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def cohens_d_ref(a, b):
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    va = sum((v - ma) ** 2 for v in a) / (len(a) - 1)
    vb = sum((v - mb) ** 2 for v in b) / (len(b) - 1)
    pooled = ((len(a) - 1) * va + (len(b) - 1) * vb) / (len(a) + len(b) - 2)
    return (ma - mb) / math.sqrt(pooled)


def ks_ref(a, b):
    """Largest gap between the two empirical CDFs, evaluated at every observed point."""
    best = 0.0
    for t in set(a) | set(b):
        fa = sum(1 for v in a if v <= t) / len(a)
        fb = sum(1 for v in b if v <= t) / len(b)
        best = max(best, abs(fa - fb))
    return best


def bh_ref(p):
    """q_i = min over j with rank_j >= rank_i of p_j * m / rank_j, capped at 1."""
    m = len(p)
    order = sorted(range(m), key=lambda i: p[i])
    rank = {i: r + 1 for r, i in enumerate(order)}
    q = []
    for i in range(m):
        q.append(min(1.0, min(p[j] * m / rank[j] for j in range(m) if rank[j] >= rank[i])))
    return q


def compositions(total, parts):
    """Every tuple of ``parts`` positive integers summing to ``total``, by nested loops."""
    if parts == 1:
        return [(total,)] if total >= 1 else []
    out = []
    for first in range(1, total):
        for rest in compositions(total - first, parts - 1):
            out.append((first, *rest))
    return out
