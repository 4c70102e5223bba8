"""Resampling null models ordered by how much observed structure they keep.

Each resampler maps (track, seed) to a fresh randomized track in the same
bin. The four track-level models form a preservation hierarchy: holding the
empirical inter-element distances fixed restricts the resampling state space
to a subset of the uniform-location state space, which tends to push
p-values up. ``state_space_size`` makes the containment quantitative on
small instances.

All resamplers are pure in (input, seed); see :mod:`trackmc.seeding` for
the seed-derivation contract used by batch drivers.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Union

import numpy as np

from .seeding import rng_for
from .tracks import BinarySequence, PointTrack, SegmentTrack


class RandomizedSide(enum.Enum):
    POINTS = "points"
    SEGMENTS = "segments"


class Preservation(enum.Enum):
    UNIFORM_LOCATION = "uniform"
    PRESERVE_INTER_DISTANCES = "preserve"


@dataclass(frozen=True)
class NullModelSpec:
    """Which track is randomized and what the resampling preserves.

    ``block_size`` selects block permutation of the point indicator
    sequence instead of the track-level resamplers; it is only meaningful
    with ``randomized_side=POINTS``.
    """

    randomized_side: RandomizedSide
    preservation: Preservation
    block_size: int | None = None

    def __post_init__(self) -> None:
        if self.block_size is not None:
            if self.block_size < 1:
                raise ValueError(f"block size must be >= 1, got {self.block_size}")
            if self.randomized_side is not RandomizedSide.POINTS:
                raise ValueError("block permutation applies to the point track only")

    _NAMES = {
        (RandomizedSide.POINTS, Preservation.UNIFORM_LOCATION): "uniform-points",
        (RandomizedSide.POINTS, Preservation.PRESERVE_INTER_DISTANCES): "preserve-interpoint",
        (RandomizedSide.SEGMENTS, Preservation.UNIFORM_LOCATION): "uniform-segments",
        (RandomizedSide.SEGMENTS, Preservation.PRESERVE_INTER_DISTANCES): "preserve-intersegment",
    }

    def to_string(self) -> str:
        if self.block_size is not None:
            return f"block:{self.block_size}"
        return self._NAMES[(self.randomized_side, self.preservation)]

    @classmethod
    def from_string(cls, name: str) -> "NullModelSpec":
        """Parse the CLI form: uniform-points, preserve-interpoint,
        uniform-segments, preserve-intersegment, or block:<k>."""
        name = name.strip()
        if name.startswith("block:"):
            try:
                k = int(name.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad block size in null model {name!r}") from None
            return cls(RandomizedSide.POINTS, Preservation.UNIFORM_LOCATION, block_size=k)
        for key, val in cls._NAMES.items():
            if val == name:
                return cls(*key)
        raise ValueError(
            f"unknown null model {name!r}; expected one of "
            f"{sorted(cls._NAMES.values())} or block:<k>"
        )


UNIFORM_POINTS = NullModelSpec(RandomizedSide.POINTS, Preservation.UNIFORM_LOCATION)
PRESERVE_INTERPOINT = NullModelSpec(RandomizedSide.POINTS, Preservation.PRESERVE_INTER_DISTANCES)
UNIFORM_SEGMENTS = NullModelSpec(RandomizedSide.SEGMENTS, Preservation.UNIFORM_LOCATION)
PRESERVE_INTERSEGMENT = NullModelSpec(
    RandomizedSide.SEGMENTS, Preservation.PRESERVE_INTER_DISTANCES
)


@dataclass(frozen=True)
class Resample:
    """One randomized replicate together with the seed that produced it."""

    track: Union[PointTrack, SegmentTrack, BinarySequence]
    source_seed: int


def _uniform_subset(rng: np.random.Generator, size: int, count: int) -> np.ndarray:
    """Sorted uniform random count-subset of range(size), exactly uniform.

    Dense requests fall back to a full permutation; sparse ones draw with
    replacement and deduplicate, which by symmetry still yields a uniform
    subset once a uniform count-subset of the distinct values is kept.
    """
    if count < 0 or count > size:
        raise ValueError(f"cannot draw {count} distinct values from {size}")
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if size <= 64 or 4 * count >= size:
        return np.sort(rng.permutation(size)[:count]).astype(np.int64)
    have = np.empty(0, dtype=np.int64)
    while have.size < count:
        need = count - have.size
        draw = rng.integers(0, size, size=need + need // 4 + 16, dtype=np.int64)
        have = np.union1d(have, draw)
    if have.size > count:
        have = np.sort(have[rng.permutation(have.size)[:count]])
    return have


def _uniform_composition(rng: np.random.Generator, total: int, parts: int) -> np.ndarray:
    """Uniform composition of ``total`` into ``parts`` non-negative integers."""
    if parts < 1:
        raise ValueError("need at least one part")
    if parts == 1:
        return np.array([total], dtype=np.int64)
    if total == 0:
        return np.zeros(parts, dtype=np.int64)
    bars = _uniform_subset(rng, total + parts - 1, parts - 1)
    out = np.empty(parts, dtype=np.int64)
    out[0] = bars[0]
    out[1:-1] = np.diff(bars) - 1
    out[-1] = (total + parts - 2) - bars[-1]
    return out


def resample_points_uniform(track: PointTrack, rng_seed: int) -> PointTrack:
    """n points drawn uniformly without replacement from the bin."""
    n = len(track)
    length = track.bin.length
    if n > length:
        raise ValueError(f"bin of length {length} cannot host {n} distinct points")
    rng = rng_for(rng_seed)
    return PointTrack(track.bin, _uniform_subset(rng, length, n) + track.bin.start)


def resample_points_preserve_distances(track: PointTrack, rng_seed: int) -> PointTrack:
    """Permute the consecutive inter-point distances, uniform feasible offset.

    The multiset of n-1 gaps is preserved exactly; only their order and the
    block's start position are randomized.
    """
    n = len(track)
    if n < 1:
        raise ValueError("distance-preserving resample needs at least one point")
    rng = rng_for(rng_seed)
    length = track.bin.length
    if n == 1:
        pos = track.bin.start + rng.integers(0, length, dtype=np.int64)
        return PointTrack(track.bin, np.array([pos], dtype=np.int64))
    gaps = np.diff(track.positions)
    span = int(gaps.sum())
    if span >= length:
        raise ValueError("point span exceeds bin length")
    offset = int(rng.integers(0, length - span))
    steps = np.concatenate(([0], np.cumsum(rng.permutation(gaps))))
    return PointTrack(track.bin, track.bin.start + offset + steps)


def resample_segments_uniform(track: SegmentTrack, rng_seed: int) -> SegmentTrack:
    """Relocate segments uniformly, preserving the length multiset.

    Lengths are permuted and the slack is split into k+1 gaps by a uniform
    random composition (stars and bars), giving every disjoint arrangement
    equal probability without rejection sampling.
    """
    k = len(track)
    if k == 0:
        return SegmentTrack(track.bin, np.empty((0, 2), dtype=np.int64))
    lengths = track.lengths
    slack = track.bin.length - int(lengths.sum())
    if slack < 0:
        raise ValueError("total segment length exceeds bin length")
    rng = rng_for(rng_seed)
    new_lengths = rng.permutation(lengths)
    gaps = _uniform_composition(rng, slack, k + 1)
    starts = track.bin.start + np.cumsum(gaps[:-1]) + np.concatenate(
        ([0], np.cumsum(new_lengths[:-1]))
    )
    return SegmentTrack(track.bin, np.column_stack((starts, starts + new_lengths)))


def resample_segments_preserve_distances(track: SegmentTrack, rng_seed: int) -> SegmentTrack:
    """Permute inter-segment gaps and lengths independently; uniform offset.

    Both empirical multisets (gaps and lengths) are preserved exactly.
    """
    k = len(track)
    if k < 1:
        raise ValueError("distance-preserving resample needs at least one segment")
    rng = rng_for(rng_seed)
    lengths = track.lengths
    gaps = track.segments[1:, 0] - track.segments[:-1, 1]
    span = int(lengths.sum()) + int(gaps.sum())
    offset = int(rng.integers(0, track.bin.length - span + 1))
    new_gaps = rng.permutation(gaps)
    new_lengths = rng.permutation(lengths)
    starts = track.bin.start + offset + np.concatenate(
        ([0], np.cumsum(new_lengths[:-1] + new_gaps))
    )
    return SegmentTrack(track.bin, np.column_stack((starts, starts + new_lengths)))


def block_permutation(seq: BinarySequence, block_size: int, rng_seed: int) -> BinarySequence:
    """Permute consecutive blocks of the sequence, preserving within-block order.

    Short-range correlation up to lag block_size-1 survives the shuffle.
    If block_size does not divide the length, the trailing partial block
    stays in place.
    """
    n = len(seq)
    if block_size < 1 or block_size > n:
        raise ValueError(f"block size must be in [1, {n}], got {block_size}")
    m = n // block_size
    rng = rng_for(rng_seed)
    order = rng.permutation(m)
    head = seq.values[: m * block_size].reshape(m, block_size)[order].reshape(-1)
    return BinarySequence(np.concatenate((head, seq.values[m * block_size :])))


def resample_track(
    track: Union[PointTrack, SegmentTrack],
    spec: NullModelSpec,
    rng_seed: int,
) -> Resample:
    """Draw one replicate under ``spec``; dispatches to the right resampler."""
    if spec.block_size is not None:
        from .tracks import to_binary_sequence

        if not isinstance(track, PointTrack):
            raise TypeError("block permutation requires a point track")
        seq = block_permutation(to_binary_sequence(track), spec.block_size, rng_seed)
        positions = np.flatnonzero(seq.values).astype(np.int64) + track.bin.start
        return Resample(PointTrack(track.bin, positions), rng_seed)
    if spec.randomized_side is RandomizedSide.POINTS:
        if not isinstance(track, PointTrack):
            raise TypeError("null model randomizes points but a segment track was given")
        fn = (
            resample_points_uniform
            if spec.preservation is Preservation.UNIFORM_LOCATION
            else resample_points_preserve_distances
        )
        return Resample(fn(track, rng_seed), rng_seed)
    if not isinstance(track, SegmentTrack):
        raise TypeError("null model randomizes segments but a point track was given")
    fn = (
        resample_segments_uniform
        if spec.preservation is Preservation.UNIFORM_LOCATION
        else resample_segments_preserve_distances
    )
    return Resample(fn(track, rng_seed), rng_seed)


def _multiset_permutations(values: np.ndarray) -> int:
    counts = Counter(values.tolist())
    out = math.factorial(len(values))
    for c in counts.values():
        out //= math.factorial(c)
    return out


def state_space_size(
    obj: Union[PointTrack, SegmentTrack, BinarySequence],
    spec: NullModelSpec,
) -> int:
    """Exact number of distinct states reachable under ``spec``.

    Computed with arbitrary-precision integers, so it is exact at any size
    (the result may simply be astronomically large).
    """
    if spec.block_size is not None:
        if not isinstance(obj, BinarySequence):
            from .tracks import to_binary_sequence

            if not isinstance(obj, PointTrack):
                raise TypeError("block permutation applies to binary sequences or point tracks")
            obj = to_binary_sequence(obj)
        m = len(obj) // spec.block_size
        blocks = [tuple(b) for b in obj.values[: m * spec.block_size].reshape(m, spec.block_size)]
        out = math.factorial(m)
        for c in Counter(blocks).values():
            out //= math.factorial(c)
        return out

    if spec.randomized_side is RandomizedSide.POINTS:
        if not isinstance(obj, PointTrack):
            raise TypeError("expected a point track")
        n = len(obj)
        length = obj.bin.length
        if spec.preservation is Preservation.UNIFORM_LOCATION:
            return math.comb(length, n)
        if n == 0:
            return 1
        if n == 1:
            return length
        gaps = np.diff(obj.positions)
        return _multiset_permutations(gaps) * (length - int(gaps.sum()))

    if not isinstance(obj, SegmentTrack):
        raise TypeError("expected a segment track")
    k = len(obj)
    length = obj.bin.length
    if k == 0:
        return 1
    lengths = obj.lengths
    if spec.preservation is Preservation.UNIFORM_LOCATION:
        slack = length - int(lengths.sum())
        return _multiset_permutations(lengths) * math.comb(slack + k, k)
    gaps = obj.segments[1:, 0] - obj.segments[:-1, 1]
    span = int(lengths.sum()) + int(gaps.sum())
    return (
        _multiset_permutations(lengths)
        * _multiset_permutations(gaps)
        * (length - span + 1)
    )
