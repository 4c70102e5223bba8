"""Core track data types: bins, point tracks, segment tracks, binary sequences.

Coordinates are 0-based, half-open (BED convention), so a bin or segment
of length L satisfies ``end - start == L``. All types are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO, Union

import numpy as np


class TrackFormatError(ValueError):
    """Malformed input file (bad column count, non-integer field, ...)."""


class TrackValidationError(ValueError):
    """Structurally valid input that violates a track invariant."""


@dataclass(frozen=True)
class Bin:
    """A contiguous analysis region; one hypothesis test per bin."""

    id: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise TrackValidationError(f"bin {self.id!r}: start must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise TrackValidationError(
                f"bin {self.id!r}: end must exceed start, got [{self.start}, {self.end})"
            )

    @property
    def length(self) -> int:
        return self.end - self.start


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PointTrack:
    """Strictly increasing integer positions inside a bin."""

    bin: Bin
    positions: np.ndarray

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=np.int64).reshape(-1)
        if pos.size:
            if np.any(np.diff(pos) <= 0):
                raise TrackValidationError(
                    f"bin {self.bin.id!r}: positions must be strictly increasing "
                    "(sorted, no duplicates)"
                )
            if pos[0] < self.bin.start or pos[-1] >= self.bin.end:
                raise TrackValidationError(
                    f"bin {self.bin.id!r}: position outside [{self.bin.start}, {self.bin.end})"
                )
        object.__setattr__(self, "positions", _readonly(pos))

    def __len__(self) -> int:
        return int(self.positions.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointTrack):
            return NotImplemented
        return self.bin == other.bin and np.array_equal(self.positions, other.positions)


@dataclass(frozen=True, eq=False)
class SegmentTrack:
    """Sorted, non-overlapping half-open integer intervals inside a bin."""

    bin: Bin
    segments: np.ndarray

    def __post_init__(self) -> None:
        seg = np.asarray(self.segments, dtype=np.int64).reshape(-1, 2)
        if seg.size:
            if np.any(seg[:, 1] <= seg[:, 0]):
                raise TrackValidationError(f"bin {self.bin.id!r}: empty or inverted segment")
            if np.any(np.diff(seg[:, 0]) < 0):
                raise TrackValidationError(f"bin {self.bin.id!r}: segments not sorted by start")
            if np.any(seg[1:, 0] < seg[:-1, 1]):
                raise TrackValidationError(f"bin {self.bin.id!r}: overlapping segments")
            if seg[0, 0] < self.bin.start or seg[-1, 1] > self.bin.end:
                raise TrackValidationError(
                    f"bin {self.bin.id!r}: segment outside [{self.bin.start}, {self.bin.end})"
                )
        object.__setattr__(self, "segments", _readonly(seg))

    def __len__(self) -> int:
        return int(self.segments.shape[0])

    @property
    def lengths(self) -> np.ndarray:
        return self.segments[:, 1] - self.segments[:, 0]

    @property
    def total_length(self) -> int:
        return int(self.lengths.sum()) if len(self) else 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SegmentTrack):
            return NotImplemented
        return self.bin == other.bin and np.array_equal(self.segments, other.segments)


@dataclass(frozen=True, eq=False)
class BinarySequence:
    """0/1 indicator sequence, one value per coordinate."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if vals.size < 1:
            raise TrackValidationError("binary sequence must have length >= 1")
        if not np.isin(vals, (0, 1)).all():
            raise TrackValidationError("binary sequence values must be 0 or 1")
        object.__setattr__(self, "values", _readonly(vals.astype(np.uint8)))

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinarySequence):
            return NotImplemented
        return np.array_equal(self.values, other.values)


PathLike = Union[str, Path]


def _data_rows(path: PathLike) -> Iterable[tuple[int, list[str]]]:
    """Yield (1-based line number, fields) for non-comment, non-blank lines."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, [f.strip() for f in line.split("\t")]


def _parse_int(field: str, path: PathLike, lineno: int) -> int:
    try:
        return int(field)
    except ValueError:
        raise TrackFormatError(
            f"{path}: line {lineno}: expected integer, got {field!r}"
        ) from None


def load_point_track(path: PathLike, bin: Bin) -> PointTrack:
    """Read a point track from a tab-separated file.

    Accepts either one coordinate per line or a (start, end) interval per
    line; interval rows are reduced to their midpoints,
    ``floor((start + end) / 2)``. Lines starting with '#' are skipped.
    """
    positions: list[int] = []
    ncols: int | None = None
    for lineno, fields in _data_rows(path):
        if ncols is None:
            ncols = len(fields)
            if ncols not in (1, 2):
                raise TrackFormatError(
                    f"{path}: line {lineno}: expected 1 or 2 columns, got {ncols}"
                )
        elif len(fields) != ncols:
            raise TrackFormatError(
                f"{path}: line {lineno}: expected {ncols} columns, got {len(fields)}"
            )
        if ncols == 1:
            positions.append(_parse_int(fields[0], path, lineno))
        else:
            start = _parse_int(fields[0], path, lineno)
            end = _parse_int(fields[1], path, lineno)
            if end <= start:
                raise TrackValidationError(
                    f"{path}: line {lineno}: interval end must exceed start"
                )
            positions.append((start + end) // 2)
    arr = np.array(sorted(positions), dtype=np.int64)
    if arr.size and np.any(np.diff(arr) == 0):
        raise TrackValidationError(f"{path}: duplicate point coordinate")
    return PointTrack(bin, arr)


def load_segment_track(path: PathLike, bin: Bin) -> SegmentTrack:
    """Read a segment track from a 2-column tab-separated file.

    Overlapping input intervals are merged into maximal disjoint intervals;
    intervals that merely touch are kept separate.
    """
    raw: list[tuple[int, int]] = []
    for lineno, fields in _data_rows(path):
        if len(fields) != 2:
            raise TrackFormatError(
                f"{path}: line {lineno}: expected 2 columns, got {len(fields)}"
            )
        start = _parse_int(fields[0], path, lineno)
        end = _parse_int(fields[1], path, lineno)
        if end <= start:
            raise TrackValidationError(
                f"{path}: line {lineno}: segment end must exceed start"
            )
        raw.append((start, end))
    return SegmentTrack(bin, merge_overlapping(raw))


def merge_overlapping(intervals: Iterable[tuple[int, int]]) -> np.ndarray:
    """Merge strictly overlapping intervals; touching intervals stay apart."""
    merged: list[list[int]] = []
    for start, end in sorted(intervals):
        if merged and start < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return np.array(merged, dtype=np.int64).reshape(-1, 2)


def load_bins(path: PathLike) -> list[Bin]:
    """Read bins from a 3-column (id, start, end) tab-separated file."""
    bins: list[Bin] = []
    for lineno, fields in _data_rows(path):
        if len(fields) != 3:
            raise TrackFormatError(
                f"{path}: line {lineno}: expected 3 columns (id, start, end), got {len(fields)}"
            )
        bins.append(
            Bin(fields[0], _parse_int(fields[1], path, lineno), _parse_int(fields[2], path, lineno))
        )
    return bins


def save_point_track(track: PointTrack, path_or_file: PathLike | TextIO) -> None:
    """Write one coordinate per line (the loadable 1-column format)."""
    _write_rows(path_or_file, (f"{p}\n" for p in track.positions))


def save_segment_track(track: SegmentTrack, path_or_file: PathLike | TextIO) -> None:
    """Write one (start, end) pair per line."""
    _write_rows(path_or_file, (f"{s}\t{e}\n" for s, e in track.segments))


def _write_rows(path_or_file: PathLike | TextIO, rows: Iterable[str]) -> None:
    if hasattr(path_or_file, "write"):
        for row in rows:
            path_or_file.write(row)
    else:
        with open(path_or_file, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(row)


def to_binary_sequence(track: PointTrack) -> BinarySequence:
    """Indicator sequence over the bin: 1 exactly at point positions."""
    values = np.zeros(track.bin.length, dtype=np.uint8)
    values[track.positions - track.bin.start] = 1
    return BinarySequence(values)


def coverage_fraction(track: SegmentTrack) -> float:
    """Fraction of the bin covered by segments."""
    return track.total_length / track.bin.length
