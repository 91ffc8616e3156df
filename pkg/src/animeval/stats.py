"""Rank correlation statistics with standard tie handling.

Spearman's rho is the Pearson correlation of average-tied ranks; Kendall's tau
is the tie-corrected tau-b.  Both are computed over integer rank/pair sums, so
perfectly monotone (or reversed) inputs yield exactly 1.0 (or -1.0) with no
floating-point slop.  Constant input leaves either statistic undefined: the
result is NaN, which serializers map to null.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from .errors import ContractViolation


def _check(xs: Sequence[float], ys: Sequence[float]) -> None:
    if len(xs) != len(ys):
        raise ContractViolation(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ContractViolation("correlation requires at least 2 observations")


def _average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties sharing their average rank."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        average = (i + j + 2) / 2
        for k in range(i, j + 1):
            ranks[order[k]] = average
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of average-tied ranks; NaN for constant input."""
    _check(xs, ys)
    n = len(xs)
    # Doubled, centered ranks are integers (average ranks are multiples of
    # 0.5 and always sum to n(n+1)/2), so the cross/self sums are exact.
    dx = [round(2 * r) - (n + 1) for r in _average_ranks(xs)]
    dy = [round(2 * r) - (n + 1) for r in _average_ranks(ys)]
    sxx = sum(v * v for v in dx)
    syy = sum(v * v for v in dy)
    if sxx == 0 or syy == 0:
        return math.nan
    if dx == dy:
        return 1.0
    if all(a == -b for a, b in zip(dx, dy)):
        return -1.0
    sxy = sum(a * b for a, b in zip(dx, dy))
    return sxy / math.sqrt(sxx * syy)


def kendall_tau(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Tau-b over all pairs (tie-corrected); NaN for constant input.

    Plain O(n^2) pair counting; evaluation runs are small enough that the
    clarity beats a merge-sort formulation.
    """
    _check(xs, ys)
    n = len(xs)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            sign_x = (xs[i] > xs[j]) - (xs[i] < xs[j])
            sign_y = (ys[i] > ys[j]) - (ys[i] < ys[j])
            if sign_x == 0:
                ties_x += 1
            if sign_y == 0:
                ties_y += 1
            if sign_x != 0 and sign_y != 0:
                if sign_x == sign_y:
                    concordant += 1
                else:
                    discordant += 1
    total_pairs = n * (n - 1) // 2
    denominator_sq = (total_pairs - ties_x) * (total_pairs - ties_y)
    if denominator_sq == 0:
        return math.nan
    numerator = concordant - discordant
    if numerator * numerator == denominator_sq:
        return 1.0 if numerator > 0 else -1.0
    return numerator / math.sqrt(denominator_sq)
