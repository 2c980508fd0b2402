"""The simplicial Tonnetz torus and its deformation by duration profiles.

Twelve pitch classes form a fixed two-dimensional simplicial complex: edges
join classes a minor third, major third, or perfect fifth apart (in either
direction), and the triangles are the 24 major and minor triads.  Identifying
translates of the planar fundamental domain turns the complex into a torus.

A duration profile assigns each vertex a height.  Every simplex inherits the
maximum of its vertex heights, and sorting by height yields the sublevel-set
filtration consumed by the persistence layer.  Sublevel sets of the
piecewise-linear height function on the lifted surface coincide with sublevel
sets of this max rule, so no geometric embedding is stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple

__all__ = [
    "PITCH_CLASS_NAMES",
    "EDGE_INTERVALS",
    "PitchClassProfile",
    "TonnetzComplex",
    "FiltrationEntry",
    "Filtration",
    "build_tonnetz",
    "induced_subcomplex",
    "deform",
]

PITCH_CLASS_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")

# Semitone distances joined by an edge: minor third, major third, perfect
# fifth, and their octave inversions.
EDGE_INTERVALS = frozenset({3, 4, 5, 7, 8, 9})


@dataclass(frozen=True)
class PitchClassProfile:
    """Seconds of sounding time per pitch class, indexed C=0 through B=11.

    Entries must be finite and nonnegative.  Overlapping notes of the same
    class each contribute their full duration, so entries are plain sums.
    """

    durations: tuple[float, ...]

    def __post_init__(self) -> None:
        durations = tuple(float(x) for x in self.durations)
        if len(durations) != 12:
            raise ValueError(f"profile needs 12 entries, got {len(durations)}")
        for pc, value in enumerate(durations):
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"duration for pitch class {pc} must be finite and >= 0, got {value}")
        object.__setattr__(self, "durations", durations)

    def rotated(self, k: int) -> "PitchClassProfile":
        """Profile of the same music transposed up by ``k`` semitones."""
        return PitchClassProfile(tuple(self.durations[(i - k) % 12] for i in range(12)))

    def total(self) -> float:
        return sum(self.durations)


@dataclass(frozen=True)
class TonnetzComplex:
    """A simplicial complex over pitch-class vertices.

    Simplex tuples are sorted ascending and listed lexicographically; the
    index of a simplex is its position within its dimension's tuple, which is
    stable across runs.  Instances are immutable and safe to share.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    triangles: tuple[tuple[int, int, int], ...]


@lru_cache(maxsize=1)
def build_tonnetz() -> TonnetzComplex:
    """Build the canonical Tonnetz torus: 12 vertices, 36 edges, 24 triads.

    Vertices are the pitch classes 0..11; {a, b} is an edge exactly when the
    interval between a and b lies in EDGE_INTERVALS; the triangles are the 12
    major and 12 minor triads.  The result is cached and immutable.
    """
    vertices = tuple(range(12))
    edges = tuple(
        (a, b)
        for a in range(12)
        for b in range(a + 1, 12)
        if (b - a) % 12 in EDGE_INTERVALS
    )
    triads = set()
    for root in range(12):
        triads.add(tuple(sorted((root, (root + 4) % 12, (root + 7) % 12))))  # major
        triads.add(tuple(sorted((root, (root + 3) % 12, (root + 7) % 12))))  # minor
    return TonnetzComplex(vertices, edges, tuple(sorted(triads)))


def induced_subcomplex(complex: TonnetzComplex, pcs: Iterable[int]) -> TonnetzComplex:
    """Full subcomplex on the given pitch classes.

    Keeps every edge and triangle of ``complex`` whose vertices all lie in
    ``pcs``.  An empty set yields the empty complex.
    """
    keep = frozenset(pcs)
    return TonnetzComplex(
        vertices=tuple(v for v in complex.vertices if v in keep),
        edges=tuple(e for e in complex.edges if keep.issuperset(e)),
        triangles=tuple(t for t in complex.triangles if keep.issuperset(t)),
    )


class FiltrationEntry(NamedTuple):
    """One simplex in filtration order; field order is the sort order."""

    value: float
    dimension: int
    index: int
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class Filtration:
    """Simplices sorted by (value, dimension, index), faces before cofaces."""

    entries: tuple[FiltrationEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[FiltrationEntry]:
        return iter(self.entries)


def deform(complex: TonnetzComplex, profile: PitchClassProfile | Iterable[float]) -> Filtration:
    """Order the simplices of ``complex`` by profile height.

    Each vertex takes its own profile entry; each edge and triangle takes the
    maximum over its vertices, so for every threshold t the simplices with
    value <= t form exactly the full subcomplex induced on the vertices with
    height <= t.  Ties are broken by dimension and then simplex index, which
    makes the order deterministic and keeps faces ahead of cofaces.

    Raises ValueError for profiles with negative or non-finite entries.
    """
    if not isinstance(profile, PitchClassProfile):
        profile = PitchClassProfile(tuple(profile))
    heights = profile.durations
    # (value, dimension, index) is unique per simplex, so native tuple order
    # on the entries never falls through to comparing the vertex tuples
    entries: list[FiltrationEntry] = []
    for idx, v in enumerate(complex.vertices):
        entries.append(FiltrationEntry(heights[v], 0, idx, (v,)))
    for idx, (a, b) in enumerate(complex.edges):
        ha, hb = heights[a], heights[b]
        entries.append(FiltrationEntry(ha if ha >= hb else hb, 1, idx, (a, b)))
    for idx, (a, b, c) in enumerate(complex.triangles):
        ha, hb, hc = heights[a], heights[b], heights[c]
        top = ha if ha >= hb else hb
        entries.append(FiltrationEntry(top if top >= hc else hc, 2, idx, (a, b, c)))
    entries.sort()
    return Filtration(tuple(entries))
