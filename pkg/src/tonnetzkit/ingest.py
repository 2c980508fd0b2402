"""Symbolic music ingestion: MIDI and note-list parsing, profiles, transforms.

Standard MIDI Files (formats 0 and 1) are parsed bit-exactly: variable-length
deltas, running status, note-on with velocity zero as a release, and tempo
changes integrated piecewise when converting ticks to seconds.  All tracks
are merged onto absolute tick time and note-ons pair with the earliest
following release of the same pitch and channel.  Percussion (channel 10) has
no pitch class and is excluded from the note list by default.

A plain JSON array of {"pitch", "onset", "duration"} objects is accepted as
an alternate input so pipelines can be exercised without binary fixtures.
"""

from __future__ import annotations

import json
import math
import random
import struct
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .tonnetz import PitchClassProfile

__all__ = [
    "Note",
    "TempoMap",
    "MidiData",
    "MidiParseError",
    "DEFAULT_TEMPO",
    "PERCUSSION_CHANNEL",
    "freq_to_pitch",
    "pitch_class",
    "parse_midi",
    "profile",
    "transpose",
    "randomize",
    "segment",
    "notes_from_json",
    "notes_to_dicts",
    "profile_to_dict",
]

DEFAULT_TEMPO = 500_000  # microseconds per quarter note
PERCUSSION_CHANNEL = 9  # zero-based; "channel 10" in MIDI parlance

_NOTE_OFF = 0x80
_NOTE_ON = 0x90
_DATA_BYTES = {0x80: 2, 0x90: 2, 0xA0: 2, 0xB0: 2, 0xC0: 1, 0xD0: 1, 0xE0: 2}


class MidiParseError(ValueError):
    """Malformed MIDI input; carries the offending byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Note:
    """One sounding note: real-valued pitch (69 = A4), onset/duration in seconds."""

    pitch: float
    onset: float
    duration: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.pitch):
            raise ValueError("pitch must be finite")
        if not (math.isfinite(self.onset) and self.onset >= 0.0):
            raise ValueError("onset must be finite and >= 0")
        if not (math.isfinite(self.duration) and self.duration > 0.0):
            raise ValueError("duration must be finite and > 0")

    @property
    def end(self) -> float:
        return self.onset + self.duration


@dataclass(frozen=True)
class TempoMap:
    """Tempo changes as (tick, microseconds per quarter), first entry at tick 0."""

    ticks_per_quarter: int
    changes: tuple[tuple[int, int], ...] = ((0, DEFAULT_TEMPO),)

    def __post_init__(self) -> None:
        if self.ticks_per_quarter <= 0:
            raise ValueError("ticks_per_quarter must be positive")
        changes = tuple((int(t), int(u)) for t, u in self.changes)
        if not changes or changes[0][0] != 0:
            raise ValueError("tempo map must start at tick 0")
        for (t0, u0), (t1, _) in zip(changes, changes[1:]):
            if t1 <= t0:
                raise ValueError("tempo change ticks must strictly increase")
        for _, uspq in changes:
            if uspq <= 0:
                raise ValueError("tempo must be positive")
        object.__setattr__(self, "changes", changes)

    def seconds_at(self, tick: int) -> float:
        """Absolute time of a tick, integrating piecewise across tempo changes."""
        scale = self.ticks_per_quarter * 1e6
        seconds = 0.0
        prev_tick, prev_uspq = self.changes[0]
        for change_tick, uspq in self.changes[1:]:
            if change_tick >= tick:
                break
            seconds += (change_tick - prev_tick) * prev_uspq / scale
            prev_tick, prev_uspq = change_tick, uspq
        return seconds + (tick - prev_tick) * prev_uspq / scale


@dataclass(frozen=True)
class MidiData:
    """Parse result: notes sorted by onset plus the file's tempo map."""

    notes: tuple[Note, ...]
    tempo_map: TempoMap
    smf_format: int
    warnings: tuple[str, ...] = ()


def freq_to_pitch(frequency: float) -> float:
    """Pitch of a fundamental frequency in Hz; 440 Hz maps to 69 (A4)."""
    if not (math.isfinite(frequency) and frequency > 0.0):
        raise ValueError(f"frequency must be positive, got {frequency}")
    return 69.0 + 12.0 * math.log2(frequency / 440.0)


def pitch_class(pitch: float) -> int:
    """Nearest equal-tuning pitch class: round half away from zero, mod 12."""
    if not math.isfinite(pitch):
        raise ValueError("pitch must be finite")
    nearest = math.floor(abs(pitch) + 0.5)
    if pitch < 0:
        nearest = -nearest
    return int(nearest) % 12


class _Reader:
    """Cursor over the raw bytes; every read failure reports its offset."""

    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def remaining(self) -> int:
        return len(self.data) - self.pos

    def take(self, n: int) -> bytes:
        if self.remaining() < n:
            raise MidiParseError("unexpected end of data", self.pos)
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def skip(self, n: int) -> None:
        self.take(n)

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def data_byte(self) -> int:
        start = self.pos
        value = self.u8()
        if value >= 0x80:
            raise MidiParseError(f"invalid data byte 0x{value:02X}", start)
        return value

    def vlq(self) -> int:
        """Variable-length quantity, at most four bytes."""
        start = self.pos
        value = 0
        for _ in range(4):
            byte = self.u8()
            value = (value << 7) | (byte & 0x7F)
            if not byte & 0x80:
                return value
        raise MidiParseError("variable-length quantity too long", start)


def parse_midi(data: bytes, include_percussion: bool = False) -> MidiData:
    """Parse a Standard MIDI File (format 0 or 1) into timed notes.

    Tracks are merged onto absolute ticks; each note-on (velocity > 0) pairs
    with the earliest subsequent note-off or velocity-0 note-on of the same
    pitch and channel; ticks become seconds through the tempo map.  Note-ons
    left hanging at end of file are closed at the final event's timestamp
    with a warning rather than an error.  Malformed input raises
    MidiParseError with the byte offset of the problem.
    """
    reader = _Reader(data)
    if reader.take(4) != b"MThd":
        raise MidiParseError("missing MThd header", 0)
    header_len = reader.u32()
    if header_len < 6:
        raise MidiParseError(f"header length {header_len} too short", 4)
    smf_format = reader.u16()
    track_count = reader.u16()
    division = reader.u16()
    if smf_format == 2:
        raise MidiParseError("unsupported SMF format 2", 8)
    if smf_format > 2:
        raise MidiParseError(f"unknown SMF format {smf_format}", 8)
    if division & 0x8000:
        raise MidiParseError("SMPTE divisions are unsupported", 12)
    if division == 0:
        raise MidiParseError("division of zero ticks per quarter", 12)
    reader.skip(header_len - 6)

    # (tick, track, seq) orders simultaneous events deterministically
    note_events: list[tuple[int, int, int, bool, int, int]] = []
    tempo_events: list[tuple[int, int, int, int]] = []
    final_tick = 0

    tracks_read = 0
    while tracks_read < track_count:
        chunk_start = reader.pos
        if reader.remaining() == 0:
            raise MidiParseError(
                f"expected {track_count} tracks, found {tracks_read}", chunk_start
            )
        chunk_id = reader.take(4)
        chunk_len = reader.u32()
        if reader.remaining() < chunk_len:
            raise MidiParseError("truncated chunk", chunk_start)
        if chunk_id != b"MTrk":
            reader.skip(chunk_len)  # alien chunks are skipped, per the format
            continue
        end = reader.pos + chunk_len
        tick = 0
        seq = 0
        running_status: int | None = None
        while reader.pos < end:
            tick += reader.vlq()
            final_tick = max(final_tick, tick)
            first = reader.u8()
            if first < 0x80:
                if running_status is None:
                    raise MidiParseError("data byte without running status", reader.pos - 1)
                status, d1 = running_status, first
            else:
                status, d1 = first, None
            if status == 0xFF:
                running_status = None
                meta_type = reader.u8()
                meta_len = reader.vlq()
                payload = reader.take(meta_len)
                if meta_type == 0x51:
                    if meta_len != 3:
                        raise MidiParseError("tempo event must carry 3 bytes", reader.pos - meta_len)
                    uspq = int.from_bytes(payload, "big")
                    if uspq == 0:
                        raise MidiParseError("tempo of zero", reader.pos - meta_len)
                    tempo_events.append((tick, tracks_read, seq, uspq))
                elif meta_type == 0x2F:
                    reader.pos = end  # end of track; ignore any padding
            elif status in (0xF0, 0xF7):
                running_status = None
                reader.skip(reader.vlq())
            elif 0x80 <= status < 0xF0:
                running_status = status
                kind = status & 0xF0
                channel = status & 0x0F
                if d1 is None:
                    d1 = reader.data_byte()
                d2 = reader.data_byte() if _DATA_BYTES[kind] == 2 else 0
                if kind == _NOTE_ON and d2 > 0:
                    note_events.append((tick, tracks_read, seq, True, channel, d1))
                elif kind == _NOTE_OFF or kind == _NOTE_ON:
                    note_events.append((tick, tracks_read, seq, False, channel, d1))
            else:
                raise MidiParseError(f"unexpected status byte 0x{status:02X}", reader.pos - 1)
            seq += 1
        tracks_read += 1

    tempo_events.sort(key=lambda e: e[:3])
    change_at: dict[int, int] = {}
    for tick, _, _, uspq in tempo_events:
        change_at[tick] = uspq  # the last event at a tick wins
    change_at.setdefault(0, DEFAULT_TEMPO)
    tempo_map = TempoMap(division, tuple(sorted(change_at.items())))

    note_events.sort(key=lambda e: e[:3])
    warnings: list[str] = []
    pending: dict[tuple[int, int], deque[int]] = defaultdict(deque)
    spans: list[tuple[int, int, int, int]] = []  # (start, end, channel, pitch)
    for tick, _, _, is_on, channel, pitch in note_events:
        key = (channel, pitch)
        if is_on:
            pending[key].append(tick)
        elif pending[key]:
            spans.append((pending[key].popleft(), tick, channel, pitch))
        else:
            warnings.append(
                f"unmatched note-off for pitch {pitch} on channel {channel} at tick {tick}"
            )
    for (channel, pitch), starts in sorted(pending.items()):
        for start in starts:
            warnings.append(
                f"note-on without note-off for pitch {pitch} on channel {channel} "
                f"at tick {start}; closed at end of file"
            )
            spans.append((start, final_tick, channel, pitch))

    notes: list[Note] = []
    for start, stop, channel, pitch in spans:
        if channel == PERCUSSION_CHANNEL and not include_percussion:
            continue
        onset = tempo_map.seconds_at(start)
        duration = tempo_map.seconds_at(stop) - onset
        if duration <= 0.0:
            warnings.append(
                f"zero-length note for pitch {pitch} on channel {channel} at tick {start}; dropped"
            )
            continue
        notes.append(Note(float(pitch), onset, duration))
    notes.sort(key=lambda n: n.onset)
    return MidiData(tuple(notes), tempo_map, smf_format, tuple(warnings))


def profile(
    notes: Iterable[Note],
    window: tuple[float, float] | None = None,
    normalize: bool = False,
) -> PitchClassProfile:
    """Accumulate note durations per pitch class.

    With a window (t0, t1), each note contributes only its overlap with the
    window.  With ``normalize``, entries are divided by their sum so pieces
    of different lengths compare on shape; the all-zero profile stays zero.
    """
    if window is not None:
        t0, t1 = window
        if not t0 < t1:
            raise ValueError(f"window needs t0 < t1, got {window}")
    totals = [0.0] * 12
    for note in notes:
        if window is None:
            duration = note.duration
        else:
            duration = min(note.end, t1) - max(note.onset, t0)
            if duration <= 0.0:
                continue
        totals[pitch_class(note.pitch)] += duration
    if normalize:
        total = sum(totals)
        if total > 0.0:
            totals = [x / total for x in totals]
    return PitchClassProfile(tuple(totals))


def transpose(notes: Iterable[Note], k: int) -> list[Note]:
    """Shift every pitch by ``k`` semitones; onsets and durations unchanged."""
    return [Note(note.pitch + k, note.onset, note.duration) for note in notes]


def randomize(notes: Iterable[Note], seed: int) -> list[Note]:
    """Replace every pitch with a uniform draw from the piano range [21, 108].

    Onsets and durations are kept, so the rhythm skeleton survives; the
    generator is seeded and local to the call, so equal seeds reproduce.
    """
    rng = random.Random(seed)
    return [Note(float(rng.randint(21, 108)), note.onset, note.duration) for note in notes]


def segment(notes: Iterable[Note], t0: float, t1: float) -> list[Note]:
    """Notes intersecting [t0, t1], clipped, with time rebased to the segment."""
    if not t0 < t1:
        raise ValueError(f"segment needs t0 < t1, got ({t0}, {t1})")
    out: list[Note] = []
    for note in notes:
        start = max(note.onset, t0)
        stop = min(note.end, t1)
        if stop > start:
            out.append(Note(note.pitch, start - t0, stop - start))
    return out


def notes_from_json(data: bytes | str) -> list[Note]:
    """Parse a note-list JSON array (or an object carrying one under "notes")."""
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid note JSON: {exc}") from exc
    if isinstance(obj, dict):
        if "notes" not in obj:
            raise ValueError("note JSON object lacks a 'notes' array")
        obj = obj["notes"]
    if not isinstance(obj, list):
        raise ValueError("note JSON must be an array of objects")
    notes: list[Note] = []
    for i, item in enumerate(obj):
        if not isinstance(item, dict):
            raise ValueError(f"note {i} is not an object")
        try:
            notes.append(
                Note(float(item["pitch"]), float(item["onset"]), float(item["duration"]))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad note at index {i}: {exc}") from exc
    return notes


def notes_to_dicts(notes: Sequence[Note]) -> list[dict]:
    return [
        {"duration": note.duration, "onset": note.onset, "pitch": note.pitch}
        for note in notes
    ]


def profile_to_dict(profile: PitchClassProfile, label: str = "", normalized: bool = False) -> dict:
    return {"durations": list(profile.durations), "label": label, "normalized": normalized}
