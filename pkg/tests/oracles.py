"""Slow reference implementations used only as test oracles.

None of these share code with the package.
"""

import itertools
import math

import numpy as np


def naive_convolve(series, weights, dilation):
    # direct definition: zero padding, kernel flipped
    n, k = len(series), len(weights)
    h = (k - 1) // 2
    out = []
    for t in range(n):
        s = 0.0
        for j in range(k):
            idx = t + (h - j) * dilation
            if 0 <= idx < n:
                s += weights[j] * series[idx]
        out.append(s)
    return np.array(out)


def naive_ppv(values, bias):
    return sum(1 for v in values if v - bias > 0) / len(values)


def pair_counts(a, b):
    """(same-same, same-diff, diff-same, diff-diff) over all item pairs."""
    ss = sd = ds = dd = 0
    for i, j in itertools.combinations(range(len(a)), 2):
        sa, sb = a[i] == a[j], b[i] == b[j]
        if sa and sb:
            ss += 1
        elif sa:
            sd += 1
        elif sb:
            ds += 1
        else:
            dd += 1
    return ss, sd, ds, dd


def brute_rand_index(a, b):
    ss, sd, ds, dd = pair_counts(a, b)
    return (ss + dd) / (ss + sd + ds + dd)


def brute_ari(a, b):
    """ARI from pair counts, with the usual convention for trivial partitions."""
    ss, sd, ds, dd = pair_counts(a, b)
    total = ss + sd + ds + dd
    same_a, same_b = ss + sd, ss + ds
    expected = same_a * same_b / total
    maximum = (same_a + same_b) / 2
    if maximum == expected:
        identical = sd == 0 and ds == 0
        return 1.0 if identical else 0.0
    return (ss - expected) / (maximum - expected)


def set_partitions(n, max_blocks):
    """Restricted-growth strings for partitions of n items into <= max_blocks blocks."""
    def grow(prefix, used):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(min(used + 1, max_blocks)):
            yield from grow(prefix + [b], max(used, b + 1))
    yield from grow([0], 1) if n else iter([()])


def chi2_sf_trapezoid(x, df, steps=200_000):
    # integrate the density from x to a far cutoff; substitution u = sqrt(t) smooths df = 1
    cutoff = max(x, df) + 60.0 * math.sqrt(2 * df) + 200.0
    lo, hi = math.sqrt(x), math.sqrt(cutoff)
    u = np.linspace(lo, hi, steps + 1)
    t = u**2
    k = df / 2.0
    log_pdf = (k - 1) * np.log(np.where(t > 0, t, 1e-300)) - t / 2 - k * math.log(2) - math.lgamma(k)
    f = np.exp(log_pdf) * 2 * u
    return float(np.trapezoid(f, u))


def wilcoxon_enumerate(d):
    """Exact two-sided signed-rank p by listing all 2**m sign patterns."""
    d = [v for v in d if v != 0]
    m = len(d)
    absd = [abs(v) for v in d]
    order = sorted(range(m), key=lambda i: absd[i])
    ranks = [0.0] * m
    i = 0
    while i < m:
        j = i
        while j + 1 < m and absd[order[j + 1]] == absd[order[i]]:
            j += 1
        for q in range(i, j + 1):
            ranks[order[q]] = (i + j) / 2 + 1
        i = j + 1
    w_plus = sum(r for r, v in zip(ranks, d) if v > 0)
    w_minus = sum(r for r, v in zip(ranks, d) if v < 0)
    w = min(w_plus, w_minus)
    hits = 0
    for signs in itertools.product((0, 1), repeat=m):
        s = sum(r for r, on in zip(ranks, signs) if on)
        if s <= w + 1e-9:
            hits += 1
    return min(1.0, 2 * hits / 2**m)


def covariance_eigenvalues(X):
    C = np.atleast_2d(np.cov(np.asarray(X, dtype=float), rowvar=False))
    return np.sort(np.linalg.eigvalsh(C))[::-1]
