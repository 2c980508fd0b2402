"""Command-line pipeline from symbolic music to dendrograms.

Subcommands
-----------
analyze    MIDI or note-list JSON -> profile + persistence diagrams (JSON)
distance   analyzed pieces -> bottleneck distance matrix (JSON)
cluster    distance matrix -> dendrogram (JSON and Newick)
plot       diagram or dendrogram JSON -> SVG
transform  transpose, randomize, or segment a note list

Outputs are deterministic: JSON uses sorted keys and shortest round-trip
decimals, and every file embeds a manifest of the run that produced it (tool
version, input hashes, and the flags that affect output), so identical
manifests imply byte-identical files.  TONNETZ_THREADS caps worker threads
for analyze and distance.

Exit codes: 0 success, 1 partial failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, Iterator

from . import __version__, bottleneck, cluster, ingest, persistence, svgplot, tonnetz

__all__ = ["main", "main_entry"]

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _threads() -> int:
    raw = os.environ.get("TONNETZ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _json_bytes(obj: object) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _num(x: float) -> str:
    """Compact number for labels: integral floats lose the trailing .0."""
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def _manifest(
    inputs: Iterable[tuple[str, bytes]],
    *,
    degrees: list[int] | None = None,
    normalized: bool | None = None,
    linkage: str | None = None,
    seed: int | None = None,
    window: float | None = None,
    hop: float | None = None,
) -> dict:
    return {
        "degrees": degrees,
        "hop": hop,
        "inputs": [
            {"path": str(path), "sha256": hashlib.sha256(raw).hexdigest()}
            for path, raw in inputs
        ],
        "linkage": linkage,
        "normalized": normalized,
        "seed": seed,
        "version": __version__,
        "window": window,
    }


def _notes_from_bytes(raw: bytes, include_percussion: bool = False) -> list[ingest.Note]:
    if raw[:4] == b"MThd":
        return list(ingest.parse_midi(raw, include_percussion=include_percussion).notes)
    return ingest.notes_from_json(raw)


def _usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _parse_degrees(raw: str) -> list[int]:
    try:
        degrees = sorted({int(part) for part in raw.split(",") if part.strip() != ""})
    except ValueError:
        raise ValueError(f"bad degree list {raw!r}")
    if not degrees or not set(degrees) <= {0, 1, 2}:
        raise ValueError(f"degrees must be a subset of 0,1,2, got {raw!r}")
    return degrees


def _windows(
    label: str, notes: list[ingest.Note], window: float | None, hop: float | None
) -> Iterator[tuple[str, tuple[float, float] | None]]:
    if window is None:
        yield label, None
        return
    t_end = max((note.end for note in notes), default=0.0)
    t0 = 0.0
    while t0 < t_end:
        t1 = t0 + window
        yield f"{label}@{_num(t0)}-{_num(t1)}", (t0, t1)
        t0 += hop


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        degrees = _parse_degrees(args.degrees)
    except ValueError as exc:
        return _usage(str(exc))
    if args.window is not None and args.window <= 0:
        return _usage("--window must be positive")
    if args.hop is not None and args.window is None:
        return _usage("--hop requires --window")
    hop = args.hop if args.hop is not None else args.window
    if hop is not None and hop <= 0:
        return _usage("--hop must be positive")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    raw_inputs = [(path, Path(path).read_bytes()) for path in args.inputs]
    manifest = _manifest(
        raw_inputs,
        degrees=degrees,
        normalized=args.normalize,
        window=args.window,
        hop=hop,
    )
    complex_ = tonnetz.build_tonnetz()

    def process(item: tuple[str, bytes]):
        path, raw = item
        try:
            notes = _notes_from_bytes(raw, include_percussion=args.include_percussion)
        except ValueError as exc:
            return path, None, f"{path}: {exc}"
        label = Path(path).stem
        outputs = []
        for window_label, window in _windows(label, notes, args.window, hop):
            prof = ingest.profile(notes, window=window, normalize=args.normalize)
            diagrams = persistence.compute_persistence(
                tonnetz.deform(complex_, prof), degrees
            )
            doc = {
                "diagrams": [
                    diagrams[k].to_dict(profile_ref=window_label) for k in sorted(diagrams)
                ],
                "label": window_label,
                "manifest": manifest,
                "profile": ingest.profile_to_dict(
                    prof, label=window_label, normalized=args.normalize
                ),
            }
            outputs.append((window_label, _json_bytes(doc)))
        return path, outputs, None

    workers = _threads()
    if args.strict:
        results = []
        for item in raw_inputs:
            result = process(item)
            results.append(result)
            if result[2] is not None:
                break
    elif workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(process, raw_inputs))
    else:
        results = [process(item) for item in raw_inputs]

    failures = 0
    for _, outputs, error in results:
        if error is not None:
            failures += 1
            print(error, file=sys.stderr)
            continue
        for window_label, blob in outputs:
            (out_dir / f"{window_label}.json").write_bytes(blob)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_distance(args: argparse.Namespace) -> int:
    if len(args.inputs) < 2:
        return _usage("distance needs at least two diagram files")
    if args.degree not in (0, 1, 2):
        return _usage(f"--degree must be 0, 1, or 2, got {args.degree}")
    raw_inputs = [(path, Path(path).read_bytes()) for path in args.inputs]
    labels: list[str] = []
    diagrams: list[persistence.PersistenceDiagram] = []
    for path, raw in raw_inputs:
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            print(f"{path}: invalid JSON: {exc}", file=sys.stderr)
            return EXIT_PARTIAL
        picked = None
        label = Path(path).stem
        if isinstance(obj, dict) and "diagrams" in obj:
            label = obj.get("label", label)
            for diag in obj["diagrams"]:
                if diag.get("degree") == args.degree:
                    picked = diag
                    break
        elif isinstance(obj, dict) and "degree" in obj:
            if obj["degree"] == args.degree:
                picked = obj
                label = obj.get("profile_ref") or label
        if picked is None:
            print(f"{path}: no degree {args.degree} diagram", file=sys.stderr)
            return EXIT_PARTIAL
        try:
            diagrams.append(persistence.PersistenceDiagram.from_dict(picked))
        except (ValueError, KeyError, TypeError) as exc:
            print(f"{path}: bad diagram: {exc}", file=sys.stderr)
            return EXIT_PARTIAL
        labels.append(label)
    matrix = bottleneck.distance_matrix(diagrams, max_workers=_threads())
    doc = {
        "degree": args.degree,
        "labels": labels,
        "manifest": _manifest(raw_inputs, degrees=[args.degree]),
        "matrix": matrix,
    }
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(_json_bytes(doc))
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace) -> int:
    raw = Path(args.input).read_bytes()
    try:
        obj = json.loads(raw)
        labels = obj["labels"]
        matrix = obj["matrix"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"{args.input}: not a distance matrix file: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    try:
        dendrogram = cluster.hierarchical_cluster(matrix, linkage=args.linkage, labels=labels)
    except ValueError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    doc = {
        "labels": list(dendrogram.labels),
        "manifest": _manifest([(args.input, raw)], linkage=args.linkage),
        "merges": [[a, b, float(h), s] for a, b, h, s in dendrogram.merges],
    }
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    prefix.with_suffix(".json").write_bytes(_json_bytes(doc))
    prefix.with_suffix(".nwk").write_text(cluster.to_newick(dendrogram) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    raw = Path(args.input).read_bytes()
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"{args.input}: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    if isinstance(obj, dict) and "merges" in obj:
        svg = svgplot.render_dendrogram_svg(obj["labels"], obj["merges"])
    elif isinstance(obj, dict) and "diagrams" in obj:
        picked = None
        for diag in obj["diagrams"]:
            if diag.get("degree") == args.degree:
                picked = diag
                break
        if picked is None:
            print(f"{args.input}: no degree {args.degree} diagram", file=sys.stderr)
            return EXIT_PARTIAL
        svg = svgplot.render_diagram_svg(picked)
    elif isinstance(obj, dict) and ("proper" in obj or "essential" in obj):
        svg = svgplot.render_diagram_svg(obj)
    else:
        print(f"{args.input}: neither a diagram nor a dendrogram", file=sys.stderr)
        return EXIT_PARTIAL
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    chosen = [
        args.transpose is not None,
        args.randomize,
        args.segment is not None,
    ]
    if sum(chosen) != 1:
        return _usage("pick exactly one of --transpose, --randomize, --segment")
    if args.randomize and args.seed is None:
        return _usage("--randomize requires --seed for reproducibility")
    raw = Path(args.input).read_bytes()
    try:
        notes = _notes_from_bytes(raw, include_percussion=args.include_percussion)
    except ValueError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    if args.transpose is not None:
        notes = ingest.transpose(notes, args.transpose)
    elif args.randomize:
        notes = ingest.randomize(notes, args.seed)
    else:
        t0, t1 = args.segment
        if not t0 < t1:
            return _usage("--segment needs t0 < t1")
        notes = ingest.segment(notes, t0, t1)
    doc = {
        "manifest": _manifest([(args.input, raw)], seed=args.seed),
        "notes": ingest.notes_to_dicts(notes),
    }
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(_json_bytes(doc))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tonnetzkit",
        description="Topological fingerprints of symbolic music.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="profiles and persistence diagrams per piece")
    p.add_argument("inputs", nargs="+", help="MIDI files or note-list JSON files")
    p.add_argument("-o", "--out-dir", default=".", help="directory for output JSON")
    p.add_argument("--degrees", default="0,1,2", help="comma-separated degrees (default 0,1,2)")
    p.add_argument("--window", type=float, help="window length in seconds")
    p.add_argument("--hop", type=float, help="window hop in seconds (default: window)")
    p.add_argument("--normalize", action="store_true", help="divide profiles by total duration")
    p.add_argument("--include-percussion", action="store_true", help="keep channel 10 notes")
    p.add_argument("--strict", action="store_true", help="stop at the first bad input")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("distance", help="bottleneck distance matrix over analyzed pieces")
    p.add_argument("inputs", nargs="+", help="analyze output files")
    p.add_argument("--degree", type=int, default=0, help="diagram degree to compare")
    p.add_argument("-o", "--out", required=True, help="output matrix JSON path")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("cluster", help="hierarchical clustering of a distance matrix")
    p.add_argument("input", help="distance matrix JSON")
    p.add_argument("--linkage", choices=cluster.LINKAGES, default="average")
    p.add_argument("-o", "--out", required=True, help="output prefix (.json and .nwk)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("plot", help="SVG for a diagram or dendrogram JSON")
    p.add_argument("input")
    p.add_argument("--degree", type=int, default=0, help="degree to pick from analyze output")
    p.add_argument("-o", "--out", required=True, help="output SVG path")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("transform", help="transpose, randomize, or segment a note list")
    p.add_argument("input", help="MIDI file or note-list JSON")
    p.add_argument("--transpose", type=int, help="semitones to add to every pitch")
    p.add_argument("--randomize", action="store_true", help="replace pitches with seeded draws")
    p.add_argument("--seed", type=int, help="seed for --randomize")
    p.add_argument("--segment", type=float, nargs=2, metavar=("T0", "T1"))
    p.add_argument("--include-percussion", action="store_true")
    p.add_argument("-o", "--out", required=True, help="output note-list JSON path")
    p.set_defaults(func=cmd_transform)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_entry() -> None:
    raise SystemExit(main())
