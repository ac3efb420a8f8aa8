"""Medians and the two-sided Wilcoxon rank-sum (Mann-Whitney U) test.

The exact null distribution of U is used when both samples are small
(min size <= 10) and tie-free; otherwise the normal approximation with
midrank tie correction and continuity correction. Two-sided throughout;
callers read the direction of a difference from the medians.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

EXACT_MAX_SIZE = 10


@dataclass
class RankSumResult:
    u_statistic: float  # U of the first sample; the second's is n*m - U
    p_value: float
    method: str  # "exact" | "normal-approx"
    degenerate: bool = False


def median(values) -> float:
    """Midpoint convention: mean of the two central order statistics."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("median of an empty vector is undefined")
    return float(np.median(arr))


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..N with ties sharing the mean of the ranks they span."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


@lru_cache(maxsize=None)
def _u_count(n: int, m: int, u: int) -> int:
    """Number of the C(n+m, n) rank arrangements giving exactly U = u."""
    if u < 0:
        return 0
    if n == 0 or m == 0:
        return 1 if u == 0 else 0
    return _u_count(n - 1, m, u - m) + _u_count(n, m - 1, u)


def _exact_two_sided_p(u: float, n: int, m: int) -> float:
    u_small = min(u, n * m - u)
    total = math.comb(n + m, n)
    cum = sum(_u_count(n, m, k) for k in range(int(u_small) + 1))
    return min(1.0, 2.0 * cum / total)


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def rank_sum_test(a, b, method: str = None) -> RankSumResult:
    """Two-sided Mann-Whitney U test on two independent samples.

    method None picks the policy above; "exact" or "normal-approx" force a
    route (exact requires tie-free data).
    """
    if method not in (None, "exact", "normal-approx"):
        raise ValueError(f"unknown method {method!r}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("rank_sum_test needs two non-empty samples")
    n, m = a.size, b.size
    combined = np.concatenate([a, b])
    ranks = _midranks(combined)
    u1 = float(np.sum(ranks[:n]) - n * (n + 1) / 2.0)

    _, tie_counts = np.unique(combined, return_counts=True)
    has_ties = bool((tie_counts > 1).any())

    if method == "exact" and has_ties:
        raise ValueError("exact method is only defined for tie-free samples")
    use_exact = (
        method == "exact"
        if method
        else not has_ties and min(n, m) <= EXACT_MAX_SIZE
    )
    if use_exact:
        return RankSumResult(
            u_statistic=u1,
            p_value=_exact_two_sided_p(u1, n, m),
            method="exact",
        )

    big_n = n + m
    tie_term = float(np.sum(tie_counts**3 - tie_counts))
    variance = (n * m / 12.0) * ((big_n + 1) - tie_term / (big_n * (big_n - 1)))
    if variance <= 0:
        # every value identical across both samples
        return RankSumResult(
            u_statistic=u1, p_value=1.0, method="normal-approx", degenerate=True
        )
    u_big = max(u1, n * m - u1)
    z = (u_big - n * m / 2.0 - 0.5) / math.sqrt(variance)  # continuity correction
    p = min(1.0, 2.0 * _normal_sf(z))
    return RankSumResult(u_statistic=u1, p_value=p, method="normal-approx")
