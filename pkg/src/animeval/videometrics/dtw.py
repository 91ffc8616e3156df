"""Dynamic time warping over sequences of scalars or vectors.

``exact`` mode is the classic O(nm) dynamic program with steps
{(1,0), (0,1), (1,1)} and is the verification oracle.  ``fast`` mode is the
recursive coarsening approximation (FastDTW): halve both sequences, align the
coarse pair, then refine inside a radius-widened corridor around the projected
path.  With a radius at least the longer sequence length the corridor covers
the full matrix, so fast mode equals exact mode.  ``auto`` picks exact for
typical clip lengths and fast beyond a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..defaults import EXACT_DTW_MAX_LEN, FAST_DTW_RADIUS
from ..errors import ContractViolation

MODE_EXACT = "exact"
MODE_FAST = "fast"
MODE_AUTO = "auto"

_INF = math.inf


@dataclass(frozen=True)
class AlignmentResult:
    """Total cost and path size of one DTW alignment."""

    distance: float
    path_length: int
    mode: str
    radius: int | None = None


def euclidean(x, y) -> float:
    """Euclidean distance; absolute difference for scalars."""
    if isinstance(x, (int, float)):
        return abs(x - y)
    diff = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return float(math.sqrt(float(np.dot(diff, diff))))


def cosine_gap(u, v) -> float:
    """1 - <u, v> for unit vectors, clamped at 0 against rounding overshoot."""
    return max(0.0, 1.0 - float(np.dot(np.asarray(u), np.asarray(v))))


def _window_dp(
    a: Sequence,
    b: Sequence,
    dist: Callable,
    window: set[tuple[int, int]] | None,
) -> tuple[float, list[tuple[int, int]]]:
    """Minimum-cost path DP, optionally restricted to a cell window."""
    n, m = len(a), len(b)
    if window is None:
        cells = [(i, j) for i in range(n) for j in range(m)]
    else:
        cells = sorted(window)
    cost: dict[tuple[int, int], float] = {}
    for i, j in cells:
        d = dist(a[i], b[j])
        if i == 0 and j == 0:
            cost[(i, j)] = d
            continue
        best = min(
            cost.get((i - 1, j - 1), _INF),
            cost.get((i - 1, j), _INF),
            cost.get((i, j - 1), _INF),
        )
        cost[(i, j)] = best + d
    total = cost.get((n - 1, m - 1), _INF)
    if total == _INF:
        return _INF, []
    # Backtrack one optimal path, preferring the diagonal step.
    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while (i, j) != (0, 0):
        steps = [(i - 1, j - 1), (i - 1, j), (i, j - 1)]
        i, j = min(
            (s for s in steps if s in cost),
            key=lambda s: cost[s],
        )
        path.append((i, j))
    path.reverse()
    return total, path


def _halve(seq: Sequence) -> list:
    return [(seq[2 * i] + seq[2 * i + 1]) / 2 for i in range(len(seq) // 2)]


def _expand_window(
    coarse_path: list[tuple[int, int]], n: int, m: int, radius: int
) -> set[tuple[int, int]]:
    """Project a coarse path up one resolution level and widen it by ``radius``."""
    widened: set[tuple[int, int]] = set()
    for i, j in coarse_path:
        for di in range(-radius, radius + 1):
            for dj in range(-radius, radius + 1):
                widened.add((i + di, j + dj))
    window: set[tuple[int, int]] = set()
    for i, j in widened:
        for x in (2 * i, 2 * i + 1):
            if not 0 <= x < n:
                continue
            for y in (2 * j, 2 * j + 1):
                if 0 <= y < m:
                    window.add((x, y))
    window.add((0, 0))
    window.add((n - 1, m - 1))
    return window


def _fast(
    a: Sequence, b: Sequence, dist: Callable, radius: int
) -> tuple[float, list[tuple[int, int]]]:
    if len(a) <= radius + 2 or len(b) <= radius + 2:
        return _window_dp(a, b, dist, None)
    coarse_total, coarse_path = _fast(_halve(a), _halve(b), dist, radius)
    window = _expand_window(coarse_path, len(a), len(b), radius)
    total, path = _window_dp(a, b, dist, window)
    if not path:
        # Corridor failed to connect (possible only at radius 0 with odd
        # lengths); fall back to the full matrix.
        return _window_dp(a, b, dist, None)
    return total, path


def dtw_distance(
    a: Sequence,
    b: Sequence,
    dist: Callable = euclidean,
    mode: str = MODE_EXACT,
    radius: int = FAST_DTW_RADIUS,
) -> AlignmentResult:
    """Align two sequences and return the cumulative cost of the best path.

    ``mode`` is ``exact``, ``fast``, or ``auto`` (exact up to a length
    threshold, then fast).  ``radius`` only applies to fast mode.
    """
    if len(a) == 0 or len(b) == 0:
        raise ContractViolation("dtw_distance requires non-empty sequences")
    if mode == MODE_AUTO:
        mode = MODE_EXACT if max(len(a), len(b)) <= EXACT_DTW_MAX_LEN else MODE_FAST
    if mode == MODE_EXACT:
        total, path = _window_dp(a, b, dist, None)
        return AlignmentResult(distance=total, path_length=len(path), mode=MODE_EXACT)
    if mode == MODE_FAST:
        if radius < 0:
            raise ContractViolation(f"radius must be >= 0, got {radius}")
        total, path = _fast(a, b, dist, radius)
        return AlignmentResult(
            distance=total, path_length=len(path), mode=MODE_FAST, radius=radius
        )
    raise ContractViolation(f"unknown DTW mode: {mode!r}")
