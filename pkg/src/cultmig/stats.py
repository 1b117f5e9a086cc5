"""Distribution-free statistics: robust summaries and one-sided rank tests.

Conventions follow R's defaults: type-7 quantiles, MAD scaled by 1.4826,
and a continuity correction in the normal approximation of both rank tests.
Exact null distributions are used for small tie-free samples (at most
``EXACT_MAX_N`` observations in total).
"""

import math
import sys
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DegenerateSampleError, InputError
from .validation import check_sample

MAD_SCALE = 1.4826
EXACT_MAX_N = 12
ALTERNATIVES = ("greater", "less")

_CODES = ((0.001, "***"), (0.01, "**"), (0.05, "*"), (0.1, "."))


@dataclass(frozen=True)
class RobustSummary:
    min: float
    lower_quartile: float
    median: float
    mean: float
    upper_quartile: float
    max: float
    mad: float

    def as_dict(self):
        return {
            "min": self.min,
            "lower_quartile": self.lower_quartile,
            "median": self.median,
            "mean": self.mean,
            "upper_quartile": self.upper_quartile,
            "max": self.max,
            "mad": self.mad,
        }


@dataclass(frozen=True)
class TestResult:
    """Outcome of a one-sided rank test.

    ``n2`` is ``None`` for the one-sample signed-rank test.
    ``method`` is ``"exact"``, ``"normal_approx"``, or ``"degenerate"`` for a
    sample with nothing to rank (reported with ``p_value = 1``).
    """

    __test__ = False  # not a pytest class

    statistic: float
    p_value: float
    alternative: str
    n1: int
    n2: int | None
    method: str
    significance_code: str


def quantile(values, p):
    """Hyndman-Fan type 7 sample quantile (linear interpolation)."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise InputError(f"quantile probability {p} outside [0, 1]")
    x = np.sort(check_sample(values))
    h = (x.size - 1) * p
    lo = math.floor(h)
    if lo >= x.size - 1:
        return float(x[-1])
    return float(x[lo] + (h - lo) * (x[lo + 1] - x[lo]))


def median(values):
    return quantile(values, 0.5)


def mad(values, scale=MAD_SCALE):
    x = check_sample(values)
    m = median(x)
    return scale * median(np.abs(x - m))


def robust_summary(values):
    x = check_sample(values)
    return RobustSummary(
        min=float(x.min()),
        lower_quartile=quantile(x, 0.25),
        median=quantile(x, 0.5),
        mean=float(math.fsum(x) / x.size),
        upper_quartile=quantile(x, 0.75),
        max=float(x.max()),
        mad=mad(x),
    )


def significance_code(p):
    """Star code for a p-value; comparisons are strict (p = 0.05 gives ".")."""
    if not 0.0 < p <= 1.0:
        raise InputError(f"p-value {p} outside (0, 1]")
    for cut, code in _CODES:
        if p < cut:
            return code
    return ""


def midranks(values):
    """Ranks 1..n with tied values sharing the mean of their positions."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(x.size)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and xs[j + 1] == xs[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_sizes(values):
    _, counts = np.unique(values, return_counts=True)
    return counts[counts > 1]


def _normal_cdf(z):
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _clip_p(p):
    # Keep p in (0, 1] even when the normal tail underflows.
    return min(1.0, max(p, sys.float_info.min))


def _check_alternative(alternative):
    if alternative not in ALTERNATIVES:
        raise InputError(f"alternative must be one of {ALTERNATIVES}, got {alternative!r}")


@lru_cache(maxsize=None)
def _rank_sum_counts(m, n):
    """Counts of U = 0..m*n over all C(m+n, m) tie-free rank splits."""
    # c[i][u]: arrangements of i x-values among the current y-values with U = u,
    # built by appending observations one at a time.
    table = {(0, j): (1,) for j in range(n + 1)}
    for i in range(1, m + 1):
        table[(i, 0)] = (1,)
        for j in range(1, n + 1):
            size = i * j + 1
            counts = [0] * size
            # last observation is an x (contributes j to U) ...
            for u, c in enumerate(table[(i - 1, j)]):
                counts[u + j] += c
            # ... or a y (contributes nothing)
            for u, c in enumerate(table[(i, j - 1)]):
                counts[u] += c
            table[(i, j)] = tuple(counts)
    return table[(m, n)]


@lru_cache(maxsize=None)
def _signed_rank_counts(n):
    """Counts of W = 0..n(n+1)/2 over all 2**n sign patterns."""
    counts = [1]
    for r in range(1, n + 1):
        nxt = counts + [0] * r
        for w, c in enumerate(counts):
            nxt[w + r] += c
        counts = nxt
    return tuple(counts)


def _exact_tail(counts, stat, alternative):
    total = sum(counts)
    k = int(round(stat))
    if alternative == "less":
        hits = sum(counts[: k + 1])
    else:
        hits = sum(counts[k:])
    return hits / total


def mann_whitney_u(x, y, alternative="greater", exact=None):
    """One-sided Wilcoxon rank-sum / Mann-Whitney U test.

    ``alternative="greater"`` tests whether ``x`` tends to exceed ``y``.
    The reported statistic is ``U = R_x - n1 (n1 + 1) / 2``.
    ``exact=None`` picks the exact null distribution for tie-free samples
    with ``n1 + n2 <= EXACT_MAX_N``.
    """
    _check_alternative(alternative)
    x = check_sample(x, "x")
    y = check_sample(y, "y")
    n1, n2 = x.size, y.size
    pooled = np.concatenate([x, y])
    ranks = midranks(pooled)
    u = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    ties = _tie_sizes(pooled)

    if exact is None:
        exact = ties.size == 0 and n1 + n2 <= EXACT_MAX_N
    if exact and ties.size:
        raise InputError("exact p-values require tie-free samples")

    if exact:
        p = _exact_tail(_rank_sum_counts(n1, n2), u, alternative)
        method = "exact"
    else:
        N = n1 + n2
        tie_term = float(np.sum(ties**3 - ties)) / (N * (N - 1))
        sigma = math.sqrt(n1 * n2 / 12.0 * ((N + 1) - tie_term))
        if sigma == 0.0:
            p = 1.0
        else:
            correction = 0.5 if alternative == "greater" else -0.5
            z = (u - n1 * n2 / 2.0 - correction) / sigma
            p = _normal_cdf(-z) if alternative == "greater" else _normal_cdf(z)
        method = "normal_approx"
    p = _clip_p(p)
    return TestResult(u, p, alternative, n1, n2, method, significance_code(p))


def wilcoxon_signed_rank(x, mu=0.0, alternative="greater", exact=None):
    """One-sided Wilcoxon signed-rank test of location ``mu``.

    Observations equal to ``mu`` are discarded before ranking; the statistic
    is the sum of ranks of positive differences.
    """
    _check_alternative(alternative)
    d = check_sample(x) - float(mu)
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        raise DegenerateSampleError("every observation equals mu")
    absd = np.abs(d)
    ranks = midranks(absd)
    w = float(ranks[d > 0].sum())
    ties = _tie_sizes(absd)

    if exact is None:
        exact = ties.size == 0 and n <= EXACT_MAX_N
    if exact and ties.size:
        raise InputError("exact p-values require tie-free samples")

    if exact:
        p = _exact_tail(_signed_rank_counts(n), w, alternative)
        method = "exact"
    else:
        sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(ties**3 - ties)) / 48.0)
        if sigma == 0.0:
            p = 1.0
        else:
            correction = 0.5 if alternative == "greater" else -0.5
            z = (w - n * (n + 1) / 4.0 - correction) / sigma
            p = _normal_cdf(-z) if alternative == "greater" else _normal_cdf(z)
        method = "normal_approx"
    p = _clip_p(p)
    return TestResult(w, p, alternative, n, None, method, significance_code(p))
