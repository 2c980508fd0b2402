"""Topological fingerprints of symbolic music.

Converts MIDI files or plain note lists into pitch-class duration profiles,
deforms the simplicial Tonnetz torus by those durations, fingerprints the
result with persistence diagrams of the height filtration, and compares and
clusters pieces under the bottleneck distance.
"""

from .bottleneck import bottleneck_distance, distance_matrix, point_distance
from .cluster import Dendrogram, hierarchical_cluster, to_newick
from .ingest import (
    MidiData,
    MidiParseError,
    Note,
    TempoMap,
    freq_to_pitch,
    notes_from_json,
    parse_midi,
    pitch_class,
    profile,
    randomize,
    segment,
    transpose,
)
from .persistence import (
    DiagramFeatures,
    PersistenceDiagram,
    compute_persistence,
    diagram_features,
    h0_oracle,
)
from .tonnetz import (
    EDGE_INTERVALS,
    PITCH_CLASS_NAMES,
    Filtration,
    FiltrationEntry,
    PitchClassProfile,
    TonnetzComplex,
    build_tonnetz,
    deform,
    induced_subcomplex,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EDGE_INTERVALS",
    "PITCH_CLASS_NAMES",
    "Dendrogram",
    "DiagramFeatures",
    "Filtration",
    "FiltrationEntry",
    "MidiData",
    "MidiParseError",
    "Note",
    "PersistenceDiagram",
    "PitchClassProfile",
    "TempoMap",
    "TonnetzComplex",
    "bottleneck_distance",
    "build_tonnetz",
    "compute_persistence",
    "deform",
    "diagram_features",
    "distance_matrix",
    "freq_to_pitch",
    "h0_oracle",
    "hierarchical_cluster",
    "induced_subcomplex",
    "notes_from_json",
    "parse_midi",
    "pitch_class",
    "point_distance",
    "profile",
    "randomize",
    "segment",
    "to_newick",
    "transpose",
]
