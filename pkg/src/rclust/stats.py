"""Nonparametric comparison of algorithms over datasets, and Ljung-Box.

Ranks put the best score (highest ARI) at rank 1. Chi-square and normal
tail probabilities come from ``scipy.special``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .errors import DegenerateDataError, DomainError, ShapeError

__all__ = [
    "ScoreTable",
    "TestResult",
    "PairwiseRow",
    "PairwiseReport",
    "AggregateRow",
    "chi2_sf",
    "rank_rows",
    "friedman_test",
    "wilcoxon_signed_rank",
    "holm_adjust",
    "pairwise_wilcoxon",
    "control_wilcoxon",
    "ljung_box",
    "default_max_lag",
    "aggregate",
    "render_aggregate",
]

EXACT_CUTOFF = 25


@dataclass(frozen=True, eq=False)
class ScoreTable:
    """ARI of each algorithm (columns) on each dataset (rows)."""

    dataset_names: list
    algorithm_names: list
    scores: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "dataset_names", list(self.dataset_names))
        object.__setattr__(self, "algorithm_names", list(self.algorithm_names))
        if scores.shape != (len(self.dataset_names), len(self.algorithm_names)):
            raise ShapeError(
                f"scores have shape {scores.shape}, expected "
                f"({len(self.dataset_names)}, {len(self.algorithm_names)})")
        if not np.all(np.isfinite(scores)):
            raise DomainError("score table has missing or non-finite entries")

    def column(self, name) -> np.ndarray:
        return self.scores[:, self.algorithm_names.index(name)]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    alpha_used: float
    rejected: bool
    method: str
    degenerate: bool = False


@dataclass(frozen=True)
class PairwiseRow:
    algorithm_1: str
    algorithm_2: str
    p_value: float
    holm_alpha: float
    significant: bool


@dataclass
class PairwiseReport:
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["algorithm_1,algorithm_2,p_value,holm_alpha,significant"]
        for r in self.rows:
            lines.append(f"{r.algorithm_1},{r.algorithm_2},{r.p_value:.6f},"
                         f"{r.holm_alpha:.6f},{str(r.significant).lower()}")
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        lines = ["| Algorithm 1 | Algorithm 2 | p value | alpha w/ Holm | Significant difference |",
                 "|---|---|---|---|---|"]
        for r in self.rows:
            lines.append(f"| {r.algorithm_1} | {r.algorithm_2} | {r.p_value:.6f} | "
                         f"{r.holm_alpha:.6f} | {'Yes' if r.significant else 'No'} |")
        return "\n".join(lines) + "\n"


def chi2_sf(x: float, df: int) -> float:
    """Upper tail of the chi-square distribution."""
    if x <= 0.0:
        return 1.0
    return float(special.chdtrc(df, x))


def _normal_sf(z):
    return float(special.ndtr(-z))


def _rankdata_desc(row: np.ndarray) -> np.ndarray:
    # average ranks, rank 1 = largest value
    order = np.argsort(-row, kind="mergesort")
    ranks = np.empty(row.size, dtype=np.float64)
    sorted_vals = row[order]
    i = 0
    while i < row.size:
        j = i
        while j + 1 < row.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _rankdata_asc(values: np.ndarray) -> np.ndarray:
    return _rankdata_desc(-values)


def rank_rows(scores) -> np.ndarray:
    """Per-row ranks, 1 = highest score, ties share the average rank.

    >>> rank_rows([[0.5, 0.5, 0.1]])
    array([[1.5, 1.5, 3. ]])
    """
    S = np.atleast_2d(np.asarray(getattr(scores, "scores", scores), dtype=np.float64))
    return np.vstack([_rankdata_desc(row) for row in S])


def _decide(statistic, p, alpha, method, degenerate=False):
    p = float(min(max(p, 0.0), 1.0))
    return TestResult(float(statistic), p, alpha, p < alpha, method, degenerate)


def friedman_test(scores, alpha: float = 0.05) -> TestResult:
    """Friedman rank test for ``k`` algorithms over ``N`` datasets.

    ``chi2_F = 12 N / (k (k + 1)) * (sum_j Rbar_j^2 - k (k + 1)^2 / 4)``,
    referred to a chi-square with ``k - 1`` degrees of freedom.
    """
    S = np.atleast_2d(np.asarray(getattr(scores, "scores", scores), dtype=np.float64))
    N, k = S.shape
    if N < 2 or k < 2:
        raise ShapeError(f"Friedman test needs N >= 2 and k >= 2, got N={N}, k={k}")
    mean_ranks = rank_rows(S).mean(axis=0)
    stat = 12.0 * N / (k * (k + 1)) * (np.sum(mean_ranks**2) - k * (k + 1) ** 2 / 4.0)
    stat = max(float(stat), 0.0)
    if stat < 1e-12:
        return _decide(0.0, 1.0, alpha, "friedman", degenerate=True)
    return _decide(stat, chi2_sf(stat, k - 1), alpha, "friedman")


def _signed_rank_counts(doubled_ranks: np.ndarray) -> np.ndarray:
    # number of sign patterns giving each value of 2*W+ (subset-sum DP == full enumeration)
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled_ranks.astype(np.int64):
        counts[r:] = counts[r:] + counts[: total + 1 - r].copy()
    return counts


def wilcoxon_signed_rank(x, y=None, alpha: float = 0.05,
                         method: str = "auto") -> TestResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped. With ``m <= 25`` remaining pairs the
    p-value is exact: the null distribution of ``W+`` over all ``2**m``
    sign patterns is counted (ties handled through half-integer ranks).
    Larger samples use the normal approximation with tie and continuity
    corrections. ``method`` can force ``"exact"`` or ``"normal"``.

    The statistic is ``min(W+, W-)``. If every difference is zero the test
    is degenerate: ``p = 1``, not rejected.
    """
    d = np.asarray(x, dtype=np.float64)
    if y is not None:
        yv = np.asarray(y, dtype=np.float64)
        if yv.shape != d.shape:
            raise ShapeError("paired samples differ in length")
        d = d - yv
    d = d[d != 0.0]
    m = d.size
    if m == 0:
        return _decide(0.0, 1.0, alpha, "wilcoxon", degenerate=True)

    ranks = _rankdata_asc(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if method == "auto":
        method = "exact" if m <= EXACT_CUTOFF else "normal"
    if method == "exact":
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        counts = _signed_rank_counts(doubled)
        p = 2.0 * counts[: int(round(2.0 * w)) + 1].sum() / 2.0**m
        return _decide(w, p, alpha, "wilcoxon-exact")
    if method != "normal":
        raise DomainError(f"unknown method {method!r}")

    mean = m * (m + 1) / 4.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    var = m * (m + 1) * (2 * m + 1) / 24.0 - np.sum(tie_counts**3 - tie_counts) / 48.0
    if var <= 0.0:
        return _decide(w, 1.0, alpha, "wilcoxon-normal", degenerate=True)
    z = (mean - w - 0.5) / np.sqrt(var)
    p = 2.0 * _normal_sf(max(z, 0.0))
    return _decide(w, p, alpha, "wilcoxon-normal")


def holm_adjust(p_values: Sequence[float], alpha: float = 0.05, names=None):
    """Holm step-down decisions.

    Returns ``(order, thresholds, significant)``: the indices that sort the
    p-values ascending, the threshold ``alpha / (m - i + 1)`` for the i-th
    smallest (1-based), and the decision for each sorted entry. Once one
    sorted p-value fails its threshold, every later one is non-significant.
    """
    p = np.asarray(p_values, dtype=np.float64)
    m = p.size
    if m < 1:
        raise DomainError("holm_adjust needs at least one p-value")
    if np.any((p < 0.0) | (p > 1.0)):
        raise DomainError("p-values must lie in [0, 1]")
    order = np.argsort(p, kind="mergesort")
    thresholds = alpha / (m - np.arange(m))
    significant = np.zeros(m, dtype=bool)
    for i, idx in enumerate(order):
        if p[idx] < thresholds[i]:
            significant[i] = True
        else:
            break
    return order, thresholds, significant


def _report(pairs, p_values, alpha):
    order, thresholds, significant = holm_adjust(p_values, alpha)
    rows = [PairwiseRow(pairs[i][0], pairs[i][1], float(p_values[i]),
                        float(thresholds[r]), bool(significant[r]))
            for r, i in enumerate(order)]
    return PairwiseReport(rows)


def pairwise_wilcoxon(table: ScoreTable, alpha: float = 0.05) -> PairwiseReport:
    """All-pairs Wilcoxon signed-rank tests with Holm correction."""
    names = table.algorithm_names
    pairs = list(itertools.combinations(range(len(names)), 2))
    p = [wilcoxon_signed_rank(table.scores[:, a], table.scores[:, b], alpha).p_value
         for a, b in pairs]
    return _report([(names[a], names[b]) for a, b in pairs], p, alpha)


def control_wilcoxon(table: ScoreTable, control: str, alpha: float = 0.05) -> PairwiseReport:
    """Wilcoxon tests of ``control`` against every other algorithm, Holm-corrected."""
    names = table.algorithm_names
    c = names.index(control)
    others = [j for j in range(len(names)) if j != c]
    p = [wilcoxon_signed_rank(table.scores[:, c], table.scores[:, j], alpha).p_value
         for j in others]
    return _report([(control, names[j]) for j in others], p, alpha)


def default_max_lag(n: int) -> int:
    return max(1, min(20, n // 5))


def ljung_box(series, max_lag: int | None = None, alpha: float = 0.05) -> list:
    """Ljung-Box portmanteau statistics for lags ``1..max_lag``.

    ``Q(h) = n (n + 2) sum_{j<=h} rho_j^2 / (n - j)`` against a chi-square
    with ``h`` degrees of freedom.

    Raises
    ------
    DegenerateDataError
        If the series has zero variance.
    """
    x = np.asarray(series, dtype=np.float64).ravel()
    n = x.size
    if max_lag is None:
        max_lag = default_max_lag(n)
    if max_lag < 1 or n <= max_lag + 1:
        raise DomainError(f"need 1 <= max_lag < n - 1, got max_lag={max_lag}, n={n}")
    xc = x - x.mean()
    denom = float(xc @ xc)
    if not denom > 0.0:
        raise DegenerateDataError("Ljung-Box test of a constant series")
    lags = np.arange(1, max_lag + 1)
    rho = np.array([xc[:-h] @ xc[h:] for h in lags]) / denom
    q = n * (n + 2) * np.cumsum(rho**2 / (n - lags))
    return [_decide(q[h - 1], chi2_sf(q[h - 1], h), alpha, f"ljung-box[{h}]")
            for h in lags]


@dataclass(frozen=True)
class AggregateRow:
    algorithm: str
    mean_rank: float
    mean_ari: float
    wins: int


def aggregate(table: ScoreTable) -> list:
    """Mean rank, mean ARI and win count per algorithm.

    A dataset counts as a win only for a strict, unique maximum; tied best
    scores give nobody the win.
    """
    S = table.scores
    mean_ranks = rank_rows(S).mean(axis=0)
    wins = np.zeros(S.shape[1], dtype=np.int64)
    for row in S:
        best = row.max()
        winners = np.flatnonzero(row == best)
        if winners.size == 1:
            wins[winners[0]] += 1
    return [AggregateRow(name, float(mean_ranks[j]), float(S[:, j].mean()), int(wins[j]))
            for j, name in enumerate(table.algorithm_names)]


def render_aggregate(rows, fmt: str = "markdown") -> str:
    """Summary table sorted by mean rank."""
    rows = sorted(rows, key=lambda r: (r.mean_rank, r.algorithm))
    if fmt == "csv":
        lines = ["algorithm,mean_rank,mean_ari,wins"]
        lines += [f"{r.algorithm},{r.mean_rank:.2f},{r.mean_ari:.3f},{r.wins}" for r in rows]
    else:
        lines = ["| Algorithm | Mean rank | Mean ARI | Winning count |",
                 "|---|---|---|---|"]
        lines += [f"| {r.algorithm} | {r.mean_rank:.2f} | {r.mean_ari:.3f} | {r.wins} |"
                  for r in rows]
    return "\n".join(lines) + "\n"
