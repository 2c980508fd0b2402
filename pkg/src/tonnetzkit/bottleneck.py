"""Bottleneck (matching) distance between persistence diagrams.

Proper points are compared under the two-term cost
``min(L_inf(p, q), max(half_persistence(p), half_persistence(q)))`` with
diagonal augmentation: each side is padded with the other side's diagonal
projections, a real point may retire to the diagonal for half its lifetime,
and diagonal padding matches diagonal padding for free.  The optimal
threshold is found by binary search over the candidate costs, testing
feasibility with an augmenting-path maximum matching; the result is exact and
always one of the candidate values.

Essential (infinite) classes live on a line, so they are matched separately:
sort both birth lists and take the largest pairwise gap, infinite if the
counts differ.  The distance between two diagrams is the larger of the
essential and proper parts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .persistence import PersistenceDiagram

__all__ = ["MatchingInstance", "point_distance", "bottleneck_distance", "distance_matrix"]

Point = tuple[float, float]


def point_distance(p: Point, q: Point) -> float:
    """Matching cost between two diagram points (u, v) with u <= v.

    The direct term is the L-infinity distance; the alternative routes both
    points to the diagonal, paying the larger half-persistence.
    """
    u, v = p
    u2, v2 = q
    if v < u or v2 < u2:
        raise ValueError("diagram points need birth <= death")
    direct = max(abs(u - u2), abs(v - v2))
    via_diagonal = max((v - u) / 2.0, (v2 - u2) / 2.0)
    return min(direct, via_diagonal)


def _half_life(p: Point) -> float:
    return (p[1] - p[0]) / 2.0


@dataclass(frozen=True)
class MatchingInstance:
    """An augmented assignment problem between two proper-point sets.

    Each side is padded with the other side's diagonal projections, so both
    augmented sides have ``left_size + right_size`` points and a perfect
    matching always exists.  ``costs[i][j]`` is the matching cost of
    augmented left point i against augmented right point j; ``candidates``
    carries every distinct cost value ascending (exact-equality dedup, no
    epsilon collapsing).
    """

    left_size: int
    right_size: int
    costs: tuple[tuple[float, ...], ...]
    candidates: tuple[float, ...]

    @classmethod
    def build(cls, left: Sequence[Point], right: Sequence[Point]) -> "MatchingInstance":
        n, m = len(left), len(right)
        size = n + m
        costs = []
        for i in range(size):
            row = []
            for j in range(size):
                if i < n and j < m:
                    row.append(point_distance(left[i], right[j]))
                elif i < n:
                    row.append(_half_life(left[i]))  # retire left[i] to the diagonal
                elif j < m:
                    row.append(_half_life(right[j]))
                else:
                    row.append(0.0)  # diagonal matches diagonal for free
            costs.append(tuple(row))
        candidates = sorted({value for row in costs for value in row})
        return cls(n, m, tuple(costs), tuple(candidates))

    def feasible(self, threshold: float) -> bool:
        """Does a perfect matching exist using only costs <= threshold?"""
        size = self.left_size + self.right_size
        match_of: list[int] = [-1] * size

        def assign(u: int, seen: set[int]) -> bool:
            row = self.costs[u]
            for v in range(size):
                if row[v] <= threshold and v not in seen:
                    seen.add(v)
                    if match_of[v] == -1 or assign(match_of[v], seen):
                        match_of[v] = u
                        return True
            return False

        return all(assign(u, set()) for u in range(size))


def _proper_bottleneck(left: Sequence[Point], right: Sequence[Point]) -> float:
    if not left and not right:
        return 0.0
    instance = MatchingInstance.build(left, right)
    candidates = instance.candidates
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if instance.feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]


def bottleneck_distance(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Bottleneck distance between two diagrams of the same degree.

    Returns ``math.inf`` when the essential counts differ, since no bijection
    can pair a vertical line with anything else.  Raises ValueError on a
    degree mismatch.
    """
    if d1.degree != d2.degree:
        raise ValueError(f"degree mismatch: {d1.degree} vs {d2.degree}")
    if len(d1.essential) != len(d2.essential):
        return math.inf
    essential_part = max(
        (abs(a - b) for a, b in zip(d1.essential, d2.essential)), default=0.0
    )
    proper_part = _proper_bottleneck(d1.proper, d2.proper)
    return max(essential_part, proper_part)


def distance_matrix(
    diagrams: Sequence[PersistenceDiagram], max_workers: int | None = None
) -> list[list[float]]:
    """Full symmetric matrix of pairwise bottleneck distances.

    All diagrams must share one degree.  Pairs are independent, so they may
    be computed on a thread pool; the result is identical either way.
    """
    if len({d.degree for d in diagrams}) > 1:
        raise ValueError("diagrams have mixed degrees")
    n = len(diagrams)
    matrix = [[0.0] * n for _ in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def compute(pair: tuple[int, int]) -> float:
        i, j = pair
        return bottleneck_distance(diagrams[i], diagrams[j])

    if max_workers is not None and max_workers > 1 and pairs:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            values = list(pool.map(compute, pairs))
    else:
        values = [compute(pair) for pair in pairs]
    for (i, j), value in zip(pairs, values):
        matrix[i][j] = value
        matrix[j][i] = value
    return matrix
