"""MIDI parsing against hand-built fixtures, profiles, and corpus transforms."""

import json
import math
import random

import pytest

import smfbuild as smf
from tonnetzkit.ingest import (
    MidiParseError,
    Note,
    TempoMap,
    freq_to_pitch,
    notes_from_json,
    notes_to_dicts,
    parse_midi,
    pitch_class,
    profile,
    randomize,
    segment,
    transpose,
)


def random_notes(rng: random.Random, count: int = 20) -> list[Note]:
    notes = []
    t = 0.0
    for _ in range(count):
        t += rng.uniform(0.0, 1.0)
        notes.append(Note(float(rng.randint(36, 96)), t, rng.uniform(0.1, 3.0)))
    return notes


class TestPitchConversions:
    def test_a4_is_69(self):
        assert freq_to_pitch(440.0) == 69.0

    def test_octave_adds_twelve(self):
        assert freq_to_pitch(880.0) == 81.0

    def test_middle_c(self):
        assert freq_to_pitch(261.6255653) == pytest.approx(60.0, abs=1e-6)

    def test_monotone(self):
        rng = random.Random(0)
        freqs = sorted(rng.uniform(20.0, 8000.0) for _ in range(100))
        pitches = [freq_to_pitch(f) for f in freqs]
        assert pitches == sorted(pitches)

    def test_nonpositive_frequency_rejected(self):
        with pytest.raises(ValueError):
            freq_to_pitch(0.0)
        with pytest.raises(ValueError):
            freq_to_pitch(-10.0)

    def test_pitch_class_basics(self):
        assert pitch_class(69.0) == 9
        assert pitch_class(60.0) == 0
        assert pitch_class(61.4) == 1

    def test_pitch_class_rounds_ties_away_from_zero(self):
        assert pitch_class(60.5) == 1
        assert pitch_class(-0.5) == 11
        assert pitch_class(-12.5) == 11

    def test_pitch_class_consistent_with_freq(self):
        assert pitch_class(freq_to_pitch(440.0)) == 9


class TestParseMidi:
    def test_single_note_default_tempo(self):
        data = smf.single_note_file(pitch=60, ticks=480, division=480)
        parsed = parse_midi(data)
        assert len(parsed.notes) == 1
        note = parsed.notes[0]
        assert note.pitch == 60.0
        assert abs(note.onset - 0.0) < 1e-9
        assert abs(note.duration - 0.5) < 1e-9

    def test_tempo_change_midway(self):
        # 240 ticks at 500000 us/q then 240 ticks at 250000 us/q = 0.375 s
        events = (
            smf.note_on(0, 60)
            + smf.tempo(240, 250_000)
            + smf.note_off(240, 60)
            + smf.end_of_track()
        )
        parsed = parse_midi(smf.smf(0, 480, smf.track(events)))
        assert abs(parsed.notes[0].duration - 0.375) < 1e-9

    def test_format_1_tempo_in_first_track(self):
        conductor = smf.track(smf.tempo(0, 600_000) + smf.end_of_track())
        melody = smf.track(smf.note_on(0, 64) + smf.note_off(480, 64) + smf.end_of_track())
        parsed = parse_midi(smf.smf(1, 480, conductor, melody))
        assert parsed.smf_format == 1
        assert abs(parsed.notes[0].duration - 0.6) < 1e-9

    def test_running_status_and_velocity_zero_release(self):
        events = (
            smf.ev(0, 0x90, 60, 64)  # explicit note-on
            + smf.ev(480, 60, 0)  # running status, velocity 0 acts as note-off
            + smf.ev(0, 64, 64)  # running status note-on E4
            + smf.ev(480, 64, 0)
            + smf.end_of_track()
        )
        parsed = parse_midi(smf.smf(0, 480, smf.track(events)))
        assert [n.pitch for n in parsed.notes] == [60.0, 64.0]
        assert abs(parsed.notes[0].duration - 0.5) < 1e-9
        assert abs(parsed.notes[1].onset - 0.5) < 1e-9

    def test_empty_track_list(self):
        parsed = parse_midi(smf.header(0, 0, 480))
        assert parsed.notes == ()

    def test_overlapping_same_pitch_pairs_first_on_first_off(self):
        events = (
            smf.note_on(0, 60)
            + smf.note_on(120, 60)
            + smf.note_off(120, 60)  # tick 240, closes the tick-0 onset
            + smf.note_off(240, 60)  # tick 480, closes the tick-120 onset
            + smf.end_of_track()
        )
        parsed = parse_midi(smf.smf(0, 480, smf.track(events)))
        spans = sorted((n.onset, n.duration) for n in parsed.notes)
        assert spans[0] == pytest.approx((0.0, 0.25))
        assert spans[1] == pytest.approx((0.125, 0.375))

    def test_dangling_note_on_closed_with_warning(self):
        events = smf.note_on(0, 60) + smf.end_of_track(960)
        parsed = parse_midi(smf.smf(0, 480, smf.track(events)))
        assert len(parsed.notes) == 1
        assert abs(parsed.notes[0].duration - 1.0) < 1e-9
        assert any("without note-off" in w for w in parsed.warnings)

    def test_zero_length_note_dropped_with_warning(self):
        events = smf.note_on(0, 60) + smf.note_off(0, 60) + smf.end_of_track()
        parsed = parse_midi(smf.smf(0, 480, smf.track(events)))
        assert parsed.notes == ()
        assert any("zero-length" in w for w in parsed.warnings)

    def test_percussion_channel_excluded_by_default(self):
        events = (
            smf.note_on(0, 36, channel=9)
            + smf.note_off(480, 36, channel=9)
            + smf.note_on(0, 60)
            + smf.note_off(480, 60)
            + smf.end_of_track()
        )
        data = smf.smf(0, 480, smf.track(events))
        assert [n.pitch for n in parse_midi(data).notes] == [60.0]
        included = parse_midi(data, include_percussion=True)
        assert sorted(n.pitch for n in included.notes) == [36.0, 60.0]

    def test_alien_chunks_are_skipped(self):
        alien = b"XFIH" + (4).to_bytes(4, "big") + b"\x00\x01\x02\x03"
        body = smf.track(smf.note_on(0, 60) + smf.note_off(480, 60) + smf.end_of_track())
        parsed = parse_midi(smf.header(0, 1, 480) + alien + body)
        assert len(parsed.notes) == 1

    def test_other_channel_events_are_ignored(self):
        events = (
            smf.ev(0, 0xC0, 5)  # program change
            + smf.ev(0, 0xB0, 7, 100)  # control change
            + smf.ev(0, 0xE0, 0, 64)  # pitch bend
            + smf.note_on(0, 60)
            + smf.ev(10, 0xA0, 60, 50)  # poly aftertouch
            + smf.ev(0, 0xD0, 30)  # channel pressure
            + smf.note_off(470, 60)
            + smf.end_of_track()
        )
        parsed = parse_midi(smf.smf(0, 480, smf.track(events)))
        assert [n.pitch for n in parsed.notes] == [60.0]


class TestParseMidiErrors:
    def test_bad_magic(self):
        with pytest.raises(MidiParseError) as err:
            parse_midi(b"XXXX" + b"\x00" * 10)
        assert err.value.offset == 0

    def test_format_2_rejected(self):
        with pytest.raises(MidiParseError) as err:
            parse_midi(smf.header(2, 0, 480))
        assert "format 2" in str(err.value)
        assert err.value.offset == 8

    def test_smpte_division_rejected(self):
        with pytest.raises(MidiParseError):
            parse_midi(smf.header(0, 0, 0xE250))

    def test_truncated_vlq(self):
        body = smf.track(b"\x81")  # continuation bit set, then nothing
        with pytest.raises(MidiParseError) as err:
            parse_midi(smf.header(0, 1, 480) + body)
        assert "byte" in str(err.value)

    def test_truncated_chunk(self):
        data = smf.header(0, 1, 480) + b"MTrk" + (100).to_bytes(4, "big") + b"\x00"
        with pytest.raises(MidiParseError):
            parse_midi(data)

    def test_missing_tracks(self):
        with pytest.raises(MidiParseError):
            parse_midi(smf.header(0, 3, 480))

    def test_data_byte_without_running_status(self):
        body = smf.track(smf.ev(0, 0x3C, 0x40))
        with pytest.raises(MidiParseError):
            parse_midi(smf.header(0, 1, 480) + body)

    def test_fuzzing_only_raises_typed_errors(self):
        rng = random.Random(99)
        for i in range(2000):
            length = rng.randint(0, 120)
            blob = bytes(rng.getrandbits(8) for _ in range(length))
            if i % 3 == 0:
                blob = b"MThd" + blob
            elif i % 3 == 1:
                blob = smf.header(0, 1, 480) + blob
            try:
                parse_midi(blob)
            except MidiParseError:
                pass


class TestTempoMap:
    def test_default(self):
        tm = TempoMap(480)
        assert tm.seconds_at(480) == pytest.approx(0.5)

    def test_piecewise_integration(self):
        tm = TempoMap(480, ((0, 500_000), (480, 1_000_000)))
        assert tm.seconds_at(960) == pytest.approx(0.5 + 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            TempoMap(0)
        with pytest.raises(ValueError):
            TempoMap(480, ((10, 500_000),))
        with pytest.raises(ValueError):
            TempoMap(480, ((0, 500_000), (0, 250_000)))
        with pytest.raises(ValueError):
            TempoMap(480, ((0, 0),))


class TestProfile:
    def test_major_triad_eight_seconds(self):
        notes = [Note(60.0, 0.0, 8.0), Note(64.0, 0.0, 8.0), Note(67.0, 0.0, 8.0)]
        p = profile(notes)
        assert p.durations[0] == p.durations[4] == p.durations[7] == 8.0
        assert sum(p.durations) == 24.0

    def test_window_clips_durations(self):
        notes = [Note(60.0, 0.0, 8.0), Note(64.0, 0.0, 8.0), Note(67.0, 0.0, 8.0)]
        p = profile(notes, window=(0.0, 4.0))
        assert p.durations[0] == p.durations[4] == p.durations[7] == 4.0

    def test_octaves_share_a_class(self):
        p = profile([Note(60.0, 0.0, 2.0), Note(72.0, 0.0, 3.0)])
        assert p.durations[0] == 5.0

    def test_invalid_window(self):
        with pytest.raises(ValueError):
            profile([], window=(4.0, 4.0))

    def test_normalize_divides_by_total(self):
        p = profile([Note(60.0, 0.0, 2.0), Note(62.0, 0.0, 6.0)], normalize=True)
        assert p.durations[0] == 0.25
        assert p.durations[2] == 0.75
        assert profile([], normalize=True).durations == (0.0,) * 12

    def test_total_is_preserved(self):
        rng = random.Random(1)
        notes = random_notes(rng)
        total = sum(n.duration for n in notes)
        assert sum(profile(notes).durations) == pytest.approx(total, abs=1e-9)

    def test_windows_partition_the_total(self):
        rng = random.Random(2)
        notes = random_notes(rng)
        t_end = max(n.end for n in notes) + 1.0
        step = t_end / 7.0
        windows = [(i * step, (i + 1) * step) for i in range(7)]
        summed = sum(sum(profile(notes, window=w).durations) for w in windows)
        assert summed == pytest.approx(sum(n.duration for n in notes), abs=1e-9)


class TestTransforms:
    def test_transpose_octave(self):
        notes = [Note(60.0, 0.0, 1.0)]
        assert transpose(notes, 12)[0].pitch == 72.0
        assert transpose(notes, 0) == notes

    def test_transpose_rotates_profile(self):
        rng = random.Random(3)
        notes = random_notes(rng)
        for k in range(12):
            assert profile(transpose(notes, k)) == profile(notes).rotated(k)

    def test_randomize_is_reproducible(self):
        rng = random.Random(4)
        notes = random_notes(rng)
        assert randomize(notes, 123) == randomize(notes, 123)

    def test_randomize_keeps_rhythm_skeleton(self):
        rng = random.Random(5)
        notes = random_notes(rng)
        shuffled = randomize(notes, 7)
        assert sorted((n.onset, n.duration) for n in shuffled) == sorted(
            (n.onset, n.duration) for n in notes
        )
        assert all(21.0 <= n.pitch <= 108.0 for n in shuffled)

    def test_randomize_seeds_differ(self):
        rng = random.Random(6)
        notes = random_notes(rng, count=30)
        differing = sum(
            1 for seed in range(20) if randomize(notes, seed) != randomize(notes, seed + 100)
        )
        assert differing >= 19  # a collision over 30 pitches is astronomically unlikely

    def test_segment_full_range_is_identity_after_rebase(self):
        notes = [Note(60.0, 1.0, 2.0), Note(62.0, 4.0, 1.0)]
        out = segment(notes, 0.0, 10.0)
        assert out == [Note(60.0, 1.0, 2.0), Note(62.0, 4.0, 1.0)]
        rebased = segment(notes, 1.0, 10.0)
        assert rebased[0] == Note(60.0, 0.0, 2.0)

    def test_segment_empty_intersection(self):
        assert segment([Note(60.0, 0.0, 1.0)], 5.0, 6.0) == []

    def test_segment_clips_and_never_grows(self):
        rng = random.Random(7)
        notes = random_notes(rng)
        total = sum(n.duration for n in notes)
        for _ in range(20):
            t0 = rng.uniform(0.0, 10.0)
            t1 = t0 + rng.uniform(0.5, 10.0)
            part = segment(notes, t0, t1)
            assert sum(n.duration for n in part) <= total + 1e-9
            assert all(n.onset >= 0.0 and n.end <= t1 - t0 + 1e-9 for n in part)

    def test_profile_of_segment_equals_windowed_profile(self):
        rng = random.Random(8)
        notes = random_notes(rng)
        assert profile(segment(notes, 2.0, 9.0)) == profile(notes, window=(2.0, 9.0))

    def test_invalid_segment(self):
        with pytest.raises(ValueError):
            segment([], 3.0, 3.0)


class TestNoteJson:
    def test_round_trip(self):
        notes = [Note(60.0, 0.0, 1.5), Note(67.2, 2.0, 0.25)]
        data = json.dumps(notes_to_dicts(notes))
        assert notes_from_json(data) == notes

    def test_accepts_object_with_notes_key(self):
        data = json.dumps({"notes": notes_to_dicts([Note(60.0, 0.0, 1.0)])})
        assert notes_from_json(data) == [Note(60.0, 0.0, 1.0)]

    def test_rejects_malformed(self):
        with pytest.raises(ValueError):
            notes_from_json("not json at all")
        with pytest.raises(ValueError):
            notes_from_json('{"pitches": []}')
        with pytest.raises(ValueError):
            notes_from_json('[{"pitch": 60}]')
        with pytest.raises(ValueError):
            notes_from_json('[{"pitch": 60, "onset": 0, "duration": -1}]')


class TestNoteValidation:
    def test_invariants(self):
        with pytest.raises(ValueError):
            Note(60.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            Note(60.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            Note(math.nan, 0.0, 1.0)
        note = Note(60.0, 1.0, 2.0)
        assert note.end == 3.0
