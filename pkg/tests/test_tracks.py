import io

import numpy as np
import pytest

from trackmc import (
    Bin,
    BinarySequence,
    PointTrack,
    SegmentTrack,
    TrackFormatError,
    TrackValidationError,
    coverage_fraction,
    load_bins,
    load_point_track,
    load_segment_track,
    merge_overlapping,
    save_point_track,
    save_segment_track,
    to_binary_sequence,
)
from conftest import write_lines


class TestBin:
    def test_length(self):
        assert Bin("b", 10, 25).length == 15

    @pytest.mark.parametrize("start,end", [(-1, 5), (5, 5), (5, 4)])
    def test_invalid(self, start, end):
        with pytest.raises(TrackValidationError):
            Bin("b", start, end)


class TestPointTrack:
    def test_rejects_unsorted(self, bin10):
        with pytest.raises(TrackValidationError):
            PointTrack(bin10, [5, 2])

    def test_rejects_duplicates(self, bin10):
        with pytest.raises(TrackValidationError):
            PointTrack(bin10, [2, 2])

    def test_rejects_out_of_bin(self, bin10):
        with pytest.raises(TrackValidationError):
            PointTrack(bin10, [0, 10])

    def test_immutable(self, bin10):
        track = PointTrack(bin10, [1, 2])
        with pytest.raises(ValueError):
            track.positions[0] = 5


class TestSegmentTrack:
    def test_rejects_overlap(self, bin10):
        with pytest.raises(TrackValidationError):
            SegmentTrack(bin10, [(0, 5), (4, 8)])

    def test_touching_allowed(self, bin10):
        track = SegmentTrack(bin10, [(0, 5), (5, 8)])
        assert len(track) == 2

    def test_rejects_empty_segment(self, bin10):
        with pytest.raises(TrackValidationError):
            SegmentTrack(bin10, [(5, 5)])

    def test_rejects_out_of_bin(self, bin10):
        with pytest.raises(TrackValidationError):
            SegmentTrack(bin10, [(8, 11)])


class TestLoadPointTrack:
    def test_interval_rows_become_midpoints(self, tmp_path):
        path = write_lines(tmp_path / "p.tsv", ["100\t200"])
        track = load_point_track(path, Bin("b", 0, 1000))
        assert track.positions.tolist() == [150]

    def test_rows_are_sorted(self, tmp_path, bin10):
        path = write_lines(tmp_path / "p.tsv", ["5", "2", "9"])
        track = load_point_track(path, bin10)
        assert track.positions.tolist() == [2, 5, 9]

    def test_out_of_bin_raises(self, tmp_path, bin10):
        path = write_lines(tmp_path / "p.tsv", ["12"])
        with pytest.raises(TrackValidationError):
            load_point_track(path, bin10)

    def test_duplicate_raises(self, tmp_path, bin10):
        path = write_lines(tmp_path / "p.tsv", ["3", "3"])
        with pytest.raises(TrackValidationError):
            load_point_track(path, bin10)

    def test_malformed_line_reports_line_number(self, tmp_path, bin10):
        path = write_lines(tmp_path / "p.tsv", ["1", "oops", "3"])
        with pytest.raises(TrackFormatError, match="line 2"):
            load_point_track(path, bin10)

    def test_header_and_blank_lines_skipped(self, tmp_path, bin10):
        path = write_lines(tmp_path / "p.tsv", ["# a header", "", "4"])
        track = load_point_track(path, bin10)
        assert track.positions.tolist() == [4]

    def test_mixed_column_counts_rejected(self, tmp_path, bin10):
        path = write_lines(tmp_path / "p.tsv", ["1\t3", "4"])
        with pytest.raises(TrackFormatError, match="line 2"):
            load_point_track(path, bin10)

    def test_empty_file_gives_empty_track(self, tmp_path, bin10):
        path = write_lines(tmp_path / "p.tsv", [])
        assert len(load_point_track(path, bin10)) == 0


class TestLoadSegmentTrack:
    def test_overlapping_rows_merged(self, tmp_path, bin10):
        path = write_lines(tmp_path / "s.tsv", ["0\t5", "3\t8"])
        track = load_segment_track(path, bin10)
        assert track.segments.tolist() == [[0, 8]]

    def test_disjoint_rows_kept(self, tmp_path, bin10):
        path = write_lines(tmp_path / "s.tsv", ["1\t2", "4\t6"])
        track = load_segment_track(path, bin10)
        assert track.segments.tolist() == [[1, 2], [4, 6]]

    def test_empty_interval_raises(self, tmp_path, bin10):
        path = write_lines(tmp_path / "s.tsv", ["5\t5"])
        with pytest.raises(TrackValidationError):
            load_segment_track(path, bin10)

    def test_out_of_bin_raises(self, tmp_path, bin10):
        path = write_lines(tmp_path / "s.tsv", ["5\t11"])
        with pytest.raises(TrackValidationError):
            load_segment_track(path, bin10)

    def test_touching_rows_not_merged(self, tmp_path, bin10):
        path = write_lines(tmp_path / "s.tsv", ["0\t5", "5\t8"])
        track = load_segment_track(path, bin10)
        assert len(track) == 2


def test_merge_overlapping_chain():
    merged = merge_overlapping([(0, 4), (3, 6), (5, 9), (10, 12)])
    assert merged.tolist() == [[0, 9], [10, 12]]


class TestToBinarySequence:
    def test_direct_indicator(self):
        seq = to_binary_sequence(PointTrack(Bin("b", 0, 4), [0, 2]))
        assert seq.values.tolist() == [1, 0, 1, 0]

    def test_empty_track(self):
        seq = to_binary_sequence(PointTrack(Bin("b", 0, 3), []))
        assert seq.values.tolist() == [0, 0, 0]

    def test_offset_by_bin_start(self):
        seq = to_binary_sequence(PointTrack(Bin("b", 1, 3), [1]))
        assert seq.values.tolist() == [1, 0]

    def test_ones_count_matches_positions(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            length = int(rng.integers(1, 200))
            n = int(rng.integers(0, length + 1))
            pos = np.sort(rng.choice(length, size=n, replace=False))
            seq = to_binary_sequence(PointTrack(Bin("b", 0, length), pos))
            assert int(seq.values.sum()) == n


class TestCoverageFraction:
    def test_half(self, bin10):
        assert coverage_fraction(SegmentTrack(bin10, [(0, 5)])) == 0.5

    def test_empty(self, bin10):
        assert coverage_fraction(SegmentTrack(bin10, [])) == 0.0

    def test_full(self, bin10):
        assert coverage_fraction(SegmentTrack(bin10, [(0, 10)])) == 1.0

    def test_invariant_under_split(self, bin10):
        whole = SegmentTrack(bin10, [(2, 8)])
        split = SegmentTrack(bin10, [(2, 5), (5, 8)])
        assert coverage_fraction(whole) == coverage_fraction(split)


class TestRoundTrip:
    def test_point_track(self, tmp_path):
        rng = np.random.default_rng(7)
        for i in range(10):
            length = int(rng.integers(5, 500))
            n = int(rng.integers(0, min(length, 40)))
            pos = np.sort(rng.choice(length, size=n, replace=False))
            track = PointTrack(Bin("b", 0, length), pos)
            path = tmp_path / f"pts{i}.tsv"
            save_point_track(track, path)
            assert load_point_track(path, track.bin) == track

    def test_segment_track(self, tmp_path):
        rng = np.random.default_rng(8)
        for i in range(10):
            bounds = np.sort(rng.choice(400, size=2 * int(rng.integers(0, 8)), replace=False))
            segs = bounds.reshape(-1, 2)
            segs = segs[segs[:, 1] > segs[:, 0]]
            track = SegmentTrack(Bin("b", 0, 400), segs)
            path = tmp_path / f"segs{i}.tsv"
            save_segment_track(track, path)
            assert load_segment_track(path, track.bin) == track

    def test_save_to_stream(self, bin10):
        buf = io.StringIO()
        save_point_track(PointTrack(bin10, [1, 5]), buf)
        assert buf.getvalue() == "1\n5\n"


def test_load_bins(tmp_path):
    path = write_lines(tmp_path / "bins.tsv", ["# id\tstart\tend", "a\t0\t100", "b\t100\t250"])
    bins = load_bins(path)
    assert [(b.id, b.start, b.end) for b in bins] == [("a", 0, 100), ("b", 100, 250)]


def test_binary_sequence_validation():
    with pytest.raises(TrackValidationError):
        BinarySequence([])
    with pytest.raises(TrackValidationError):
        BinarySequence([0, 2])
