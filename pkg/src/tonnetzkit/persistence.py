"""Persistence diagrams of a filtration.

The main path reduces the boundary matrix over the two-element field with
plain left-to-right column reduction; nothing about the complex size is
hard-coded, so thousands of small windowed runs stay cheap.  A separate
union-find sweep recomputes degree 0 and acts as an independent check on the
reduction.

Paired simplices with distinct values become proper points (birth, death);
pairs of equal value sit on the diagonal, are invisible to the bottleneck
distance, and are dropped.  Unpaired simplices of dimension k become
essential points of degree k, conventionally drawn as vertical lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .tonnetz import Filtration

__all__ = [
    "PersistenceDiagram",
    "DiagramFeatures",
    "compute_persistence",
    "h0_oracle",
    "diagram_features",
]


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of proper points and essential births for one degree.

    ``proper`` holds (birth, death) pairs with birth < death, sorted
    lexicographically; ``essential`` holds births of classes that never die,
    sorted ascending.  Multiplicity is expressed by repetition.
    """

    degree: int
    proper: tuple[tuple[float, float], ...] = ()
    essential: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        proper = tuple(sorted((float(u), float(v)) for u, v in self.proper))
        for u, v in proper:
            if not (math.isfinite(u) and math.isfinite(v)):
                raise ValueError("proper points must be finite")
            if not u < v:
                raise ValueError(f"proper point needs birth < death, got ({u}, {v})")
        essential = tuple(sorted(float(u) for u in self.essential))
        for u in essential:
            if not math.isfinite(u):
                raise ValueError("essential births must be finite")
        object.__setattr__(self, "proper", proper)
        object.__setattr__(self, "essential", essential)

    def to_dict(self, profile_ref: str = "") -> dict:
        """JSON-ready form: arrays sorted ascending, essential by birth."""
        return {
            "degree": self.degree,
            "essential": list(self.essential),
            "proper": [[u, v] for u, v in self.proper],
            "profile_ref": profile_ref,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PersistenceDiagram":
        return cls(
            degree=int(data["degree"]),
            proper=tuple((float(u), float(v)) for u, v in data.get("proper", ())),
            essential=tuple(float(u) for u in data.get("essential", ())),
        )


def _ordered_boundaries(filtration: Filtration) -> list[set[int]]:
    """Boundary columns in filtration order, validating the order itself.

    Rejects filtrations whose values decrease, whose simplices repeat, or
    where a face does not strictly precede its coface.
    """
    position: dict[tuple[int, tuple[int, ...]], int] = {}
    columns: list[set[int]] = []
    previous = -math.inf
    for g, entry in enumerate(filtration.entries):
        if entry.value < previous:
            raise ValueError(f"filtration values decrease at position {g}")
        previous = entry.value
        key = (entry.dimension, entry.vertices)
        if key in position:
            raise ValueError(f"simplex {entry.vertices} appears twice")
        column: set[int] = set()
        if entry.dimension > 0:
            for face in combinations(entry.vertices, entry.dimension):
                face_pos = position.get((entry.dimension - 1, face))
                if face_pos is None:
                    raise ValueError(
                        f"face {face} missing or not before coface {entry.vertices}"
                    )
                column.add(face_pos)
        position[key] = g
        columns.append(column)
    return columns


def compute_persistence(
    filtration: Filtration, degrees: Iterable[int] = (0, 1, 2)
) -> dict[int, PersistenceDiagram]:
    """Persistence diagrams of a filtration, one per requested degree.

    Columns of the boundary matrix are reduced left to right over the
    two-element field; a column emptied by reduction creates a class, and a
    column whose pivot survives kills the class created at that pivot.
    """
    wanted = frozenset(int(k) for k in degrees)
    if not wanted <= {0, 1, 2}:
        raise ValueError(f"degrees must be within 0..2, got {sorted(wanted)}")
    entries = filtration.entries
    columns = _ordered_boundaries(filtration)

    pivot_owner: dict[int, int] = {}
    destroyer: dict[int, int] = {}
    creator = [False] * len(columns)
    for j, column in enumerate(columns):
        while column:
            low = max(column)
            k = pivot_owner.get(low)
            if k is None:
                break
            column ^= columns[k]
        if column:
            low = max(column)
            pivot_owner[low] = j
            destroyer[low] = j
        else:
            creator[j] = True

    proper: dict[int, list[tuple[float, float]]] = {k: [] for k in wanted}
    essential: dict[int, list[float]] = {k: [] for k in wanted}
    for i, entry in enumerate(entries):
        if not creator[i] or entry.dimension not in wanted:
            continue
        j = destroyer.get(i)
        if j is None:
            essential[entry.dimension].append(entry.value)
        elif entry.value < entries[j].value:
            proper[entry.dimension].append((entry.value, entries[j].value))

    return {
        k: PersistenceDiagram(k, tuple(proper[k]), tuple(essential[k]))
        for k in sorted(wanted)
    }


def _find(parent: dict[int, int], v: int) -> int:
    root = v
    while parent[root] != root:
        root = parent[root]
    while parent[v] != root:  # path compression
        parent[v], v = root, parent[v]
    return root


def h0_oracle(filtration: Filtration) -> PersistenceDiagram:
    """Degree-0 diagram by incremental union-find, independent of reduction.

    A vertex births a component at its value; an edge joining two components
    kills the younger one at the edge's value (elder rule).  Triangles are
    irrelevant to connectivity and are skipped.
    """
    parent: dict[int, int] = {}
    birth: dict[int, float] = {}
    proper: list[tuple[float, float]] = []
    previous = -math.inf
    for entry in filtration.entries:
        if entry.value < previous:
            raise ValueError("filtration values decrease")
        previous = entry.value
        if entry.dimension == 0:
            v = entry.vertices[0]
            if v in parent:
                raise ValueError(f"vertex {v} appears twice")
            parent[v] = v
            birth[v] = entry.value
        elif entry.dimension == 1:
            a, b = entry.vertices
            if a not in parent or b not in parent:
                raise ValueError(f"edge {entry.vertices} precedes one of its vertices")
            ra, rb = _find(parent, a), _find(parent, b)
            if ra == rb:
                continue
            # elder rule; ties resolved toward the smaller root, which does
            # not affect the diagram
            if (birth[ra], ra) <= (birth[rb], rb):
                elder, younger = ra, rb
            else:
                elder, younger = rb, ra
            if birth[younger] < entry.value:
                proper.append((birth[younger], entry.value))
            parent[younger] = elder
    survivors = sorted(birth[v] for v in parent if _find(parent, v) == v)
    return PersistenceDiagram(0, tuple(proper), tuple(survivors))


@dataclass(frozen=True)
class DiagramFeatures:
    """The quantities usually read straight off a diagram."""

    essential_births: tuple[float, ...]
    proper_count: int
    max_persistence: float
    essential_gap: float | None


def diagram_features(diagram: PersistenceDiagram) -> DiagramFeatures:
    """Summarize a diagram: essential births, proper count, max lifetime.

    ``essential_gap`` is the spread between the two essential births when the
    diagram has exactly two (the interesting case in degree 1 on the torus),
    otherwise None.
    """
    gap: float | None = None
    if len(diagram.essential) == 2:
        gap = abs(diagram.essential[1] - diagram.essential[0])
    max_persistence = max((v - u for u, v in diagram.proper), default=0.0)
    return DiagramFeatures(
        essential_births=diagram.essential,
        proper_count=len(diagram.proper),
        max_persistence=max_persistence,
        essential_gap=gap,
    )
