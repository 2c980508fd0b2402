"""Agglomerative hierarchical clustering over a precomputed distance matrix.

Single, complete, and average linkage via Lance-Williams updates; all three
are monotone, so merge heights never decrease on a valid metric.  Ties are
broken by the lexicographically smallest cluster-id pair, which keeps output
identical across platforms.  Ward linkage is deliberately absent: it assumes
Euclidean geometry that a bottleneck matrix does not have.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

__all__ = ["Dendrogram", "hierarchical_cluster", "to_newick", "to_json", "from_json"]

LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree: leaves are ids 0..n-1, merge m creates id n+m.

    Each merge is (a, b, height, size) where a and b reference leaves or
    earlier merges and size counts the leaves of the new cluster.
    """

    labels: tuple[str, ...]
    merges: tuple[tuple[int, int, float, int], ...]

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        n = len(labels)
        if n == 0:
            raise ValueError("dendrogram needs at least one leaf")
        if len(self.merges) != n - 1:
            raise ValueError(f"{n} leaves need exactly {n - 1} merges, got {len(self.merges)}")
        sizes = {i: 1 for i in range(n)}
        used: set[int] = set()
        merges = []
        for m, raw in enumerate(self.merges):
            a, b, height, size = int(raw[0]), int(raw[1]), float(raw[2]), int(raw[3])
            new_id = n + m
            for child in (a, b):
                if not 0 <= child < new_id:
                    raise ValueError(f"merge {m} references unknown cluster {child}")
                if child in used:
                    raise ValueError(f"cluster {child} merged twice")
                used.add(child)
            if not (math.isfinite(height) and height >= 0.0):
                raise ValueError(f"merge height must be finite and >= 0, got {height}")
            if size != sizes[a] + sizes[b]:
                raise ValueError(f"merge {m} size {size} != {sizes[a]} + {sizes[b]}")
            sizes[new_id] = size
            merges.append((a, b, height, size))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "merges", tuple(merges))


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def hierarchical_cluster(
    matrix: Sequence[Sequence[float]],
    linkage: str = "average",
    labels: Sequence[str] | None = None,
) -> Dendrogram:
    """Agglomerate a symmetric, zero-diagonal, nonnegative distance matrix.

    Repeatedly merges the closest pair of clusters (smallest id pair on
    ties) and updates distances with the Lance-Williams rule of the chosen
    linkage: min for single, max for complete, size-weighted mean for
    average.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}, expected one of {LINKAGES}")
    rows = [[float(x) for x in row] for row in matrix]
    n = len(rows)
    if n == 0:
        raise ValueError("empty distance matrix")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError("distance matrix is not square")
        if row[i] != 0.0:
            raise ValueError(f"diagonal entry ({i},{i}) is {row[i]}, expected 0")
        for j, value in enumerate(row):
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"entry ({i},{j}) must be finite and >= 0, got {value}")
            if value != rows[j][i]:
                raise ValueError(f"matrix asymmetric at ({i},{j})")
    if labels is None:
        labels = tuple(str(i) for i in range(n))
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise ValueError(f"{n} rows but {len(labels)} labels")

    dist: dict[tuple[int, int], float] = {
        (i, j): rows[i][j] for i in range(n) for j in range(i + 1, n)
    }
    size = {i: 1 for i in range(n)}
    active = list(range(n))  # stays sorted: removals keep order, new ids grow
    merges: list[tuple[int, int, float, int]] = []
    next_id = n
    while len(active) > 1:
        best: tuple[float, int, int] | None = None
        for ai in range(len(active)):
            for bi in range(ai + 1, len(active)):
                i, j = active[ai], active[bi]
                key = (dist[(i, j)], i, j)
                if best is None or key < best:
                    best = key
        height, i, j = best
        merged_size = size[i] + size[j]
        merges.append((i, j, height, merged_size))
        for k in active:
            if k in (i, j):
                continue
            dik = dist[_pair(i, k)]
            djk = dist[_pair(j, k)]
            if linkage == "single":
                dnew = min(dik, djk)
            elif linkage == "complete":
                dnew = max(dik, djk)
            else:
                dnew = (size[i] * dik + size[j] * djk) / merged_size
            dist[(k, next_id)] = dnew
        size[next_id] = merged_size
        active.remove(i)
        active.remove(j)
        active.append(next_id)
        next_id += 1
    return Dendrogram(labels, tuple(merges))


def _format_length(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def _quote_label(label: str) -> str:
    if label and not any(c in label for c in "()[]{}:;,' \t\n"):
        return label
    return "'" + label.replace("'", "''") + "'"


def to_newick(dendrogram: Dendrogram) -> str:
    """Newick serialization; branch length = parent height - child height."""
    n = len(dendrogram.labels)
    heights = {i: 0.0 for i in range(n)}
    children: dict[int, tuple[int, int]] = {}
    for m, (a, b, height, _) in enumerate(dendrogram.merges):
        heights[n + m] = height
        children[n + m] = (a, b)

    def render(node: int) -> str:
        if node < n:
            return _quote_label(dendrogram.labels[node])
        a, b = children[node]
        height = heights[node]
        return "({}:{},{}:{})".format(
            render(a),
            _format_length(height - heights[a]),
            render(b),
            _format_length(height - heights[b]),
        )

    root = n + len(dendrogram.merges) - 1 if dendrogram.merges else 0
    return render(root) + ";"


def to_json(dendrogram: Dendrogram) -> bytes:
    """Stable JSON bytes; from_json(to_json(d)) round-trips losslessly."""
    doc = {
        "labels": list(dendrogram.labels),
        "merges": [[a, b, float(h), s] for a, b, h, s in dendrogram.merges],
    }
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def from_json(data: bytes | str) -> Dendrogram:
    obj = json.loads(data)
    if not isinstance(obj, dict) or "labels" not in obj or "merges" not in obj:
        raise ValueError("dendrogram JSON needs 'labels' and 'merges'")
    merges = tuple(
        (int(a), int(b), float(h), int(s)) for a, b, h, s in obj["merges"]
    )
    return Dendrogram(tuple(str(x) for x in obj["labels"]), merges)
