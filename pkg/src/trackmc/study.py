"""End-to-end experiment drivers.

``run_false_rejection_study`` crosses data-generation procedures (uniform,
clustered points, clustered segments) with testing assumptions (analytic
binomial, uniform-points MC, preserve-interpoint, uniform-segments) on
independently generated track pairs, counts FDR-corrected rejections per
cell, and so measures how many false positives an under-preserving null
model produces.

``run_ordering_experiment`` scores identical data under all four
track-level null models to expose the preservation ordering of p-values.

Replicates are pure functions of (master seed, experiment, replicate
index); worker count never changes any output.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .mc import Direction, MCConfig, echo_header, run_mc_test
from .null_models import (
    NullModelSpec,
    PRESERVE_INTERPOINT,
    PRESERVE_INTERSEGMENT,
    UNIFORM_POINTS,
    UNIFORM_SEGMENTS,
)
from .qvalues import estimate_pi0, qvalues, reject_at_fdr
from .ripley import estimate_l_profile
from .seeding import derive_seed
from .simulate import (
    PointGenConfig,
    PointMode,
    SegmentGenConfig,
    generate_points,
    generate_segments,
)
from .stats import binomial_upper_pvalue, count_points_in_segments
from .tracks import (
    Bin,
    PathLike,
    PointTrack,
    SegmentTrack,
    coverage_fraction,
    to_binary_sequence,
)


@dataclass(frozen=True)
class Assumption:
    """One testing-assumption row: a null model, or None for the analytic
    binomial resolution of the uniform-points null."""

    label: str
    null_model: NullModelSpec | None


DEFAULT_ASSUMPTIONS = (
    Assumption("uniform-point-location-analytic", None),
    Assumption("uniform-point-location-mc", UNIFORM_POINTS),
    Assumption("preserve-interpoint-distances", PRESERVE_INTERPOINT),
    Assumption("uniform-segment-location-mc", UNIFORM_SEGMENTS),
)

GENERATION_COLUMNS = ("uniform", "clustered-points", "clustered-segments")

ORDERING_MODELS = (
    UNIFORM_POINTS,
    PRESERVE_INTERPOINT,
    UNIFORM_SEGMENTS,
    PRESERVE_INTERSEGMENT,
)


@dataclass(frozen=True)
class StudyConfig:
    n_replicates: int = 100
    bin_length: int = 100_000
    fdr_threshold: float = 0.20
    mc_samples: int = 1000
    master_seed: int = 0
    point_config: PointGenConfig = field(
        default_factory=lambda: PointGenConfig(mode=PointMode.CLUSTERED)
    )
    segment_config: SegmentGenConfig = field(default_factory=SegmentGenConfig)
    assumptions: tuple[Assumption, ...] = DEFAULT_ASSUMPTIONS

    def __post_init__(self) -> None:
        if self.n_replicates < 1:
            raise ValueError(f"n_replicates must be >= 1, got {self.n_replicates}")
        if not 0.0 < self.fdr_threshold < 1.0:
            raise ValueError(f"fdr_threshold must lie in (0, 1), got {self.fdr_threshold}")
        if self.bin_length < 1:
            raise ValueError("bin_length must be positive")


@dataclass(frozen=True)
class StudyReport:
    rows: tuple[str, ...]
    columns: tuple[str, ...]
    counts: Mapping[tuple[str, str], int]
    pvalues: Mapping[tuple[str, str], tuple[float, ...]]
    n_replicates: int
    fdr_threshold: float


@dataclass(frozen=True)
class OrderingResult:
    labels: tuple[str, ...]
    pvalues: Mapping[str, np.ndarray]
    n_replicates: int

    def median(self, label: str) -> float:
        return float(np.median(self.pvalues[label]))


def filter_bins(
    bins: Sequence[Bin],
    points_by_bin: Mapping[str, PointTrack],
    segments_by_bin: Mapping[str, SegmentTrack],
    min_points: int,
    min_segments: int,
) -> list[Bin]:
    """Bins with enough data on both tracks, input order preserved."""
    return [
        b
        for b in bins
        if len(points_by_bin[b.id]) >= min_points
        and len(segments_by_bin[b.id]) >= min_segments
    ]


def _column_configs(
    column: str, base_points: PointGenConfig, base_segments: SegmentGenConfig
) -> tuple[PointGenConfig, SegmentGenConfig]:
    if column == "uniform":
        return replace(base_points, mode=PointMode.INDEPENDENT), replace(
            base_segments, clustered=False
        )
    if column == "clustered-points":
        return replace(base_points, mode=PointMode.CLUSTERED), replace(
            base_segments, clustered=False
        )
    if column == "clustered-segments":
        return replace(base_points, mode=PointMode.INDEPENDENT), replace(
            base_segments, clustered=True
        )
    raise ValueError(f"unknown generation column {column!r}")


def _generate_pair(
    cfg: StudyConfig, experiment: str, column: str, rep: int
) -> tuple[PointTrack, SegmentTrack]:
    pt_cfg, seg_cfg = _column_configs(column, cfg.point_config, cfg.segment_config)
    bin = Bin(f"{column}-{rep:04d}", 0, cfg.bin_length)
    points = generate_points(
        bin, pt_cfg, derive_seed(cfg.master_seed, experiment, column, rep, "points")
    )
    segments = generate_segments(
        bin, seg_cfg, derive_seed(cfg.master_seed, experiment, column, rep, "segments")
    )
    return points, segments


def _study_replicate(args: tuple) -> tuple[str, int, dict[str, float]]:
    cfg, column, rep = args
    points, segments = _generate_pair(cfg, "study", column, rep)
    mc_cfg = MCConfig(n_samples=cfg.mc_samples, master_seed=cfg.master_seed)
    out: dict[str, float] = {}
    for assumption in cfg.assumptions:
        if assumption.null_model is None:
            t = count_points_in_segments(points, segments)
            out[assumption.label] = binomial_upper_pvalue(
                t, len(points), coverage_fraction(segments)
            )
        else:
            out[assumption.label] = run_mc_test(
                points, segments, assumption.null_model, mc_cfg
            ).p_value
    return column, rep, out


def _run_jobs(fn, jobs: list, workers: int) -> list:
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(job) for job in jobs]


def run_false_rejection_study(cfg: StudyConfig, workers: int = 1) -> StudyReport:
    """Rejection counts per (assumption row, generation column) cell.

    Each cell's p-values are corrected jointly by q-values at
    ``cfg.fdr_threshold``; both tracks are always generated independently,
    so every rejection is a false one.
    """
    jobs = [
        (cfg, column, rep)
        for column in GENERATION_COLUMNS
        for rep in range(cfg.n_replicates)
    ]
    outcomes = _run_jobs(_study_replicate, jobs, workers)
    pvals: dict[tuple[str, str], list[float]] = {
        (a.label, col): [0.0] * cfg.n_replicates
        for a in cfg.assumptions
        for col in GENERATION_COLUMNS
    }
    for column, rep, row_p in outcomes:
        for label, p in row_p.items():
            pvals[(label, column)][rep] = p
    counts: dict[tuple[str, str], int] = {}
    for key, ps in pvals.items():
        report = reject_at_fdr(qvalues(ps, estimate_pi0(ps)), cfg.fdr_threshold)
        counts[key] = report.n_rejected
    return StudyReport(
        rows=tuple(a.label for a in cfg.assumptions),
        columns=GENERATION_COLUMNS,
        counts=counts,
        pvalues={k: tuple(v) for k, v in pvals.items()},
        n_replicates=cfg.n_replicates,
        fdr_threshold=cfg.fdr_threshold,
    )


def _ordering_replicate(args: tuple) -> tuple[int, dict[str, float]]:
    cfg, rep = args
    bin = Bin(f"ordering-{rep:04d}", 0, cfg.bin_length)
    points = generate_points(
        bin, cfg.point_config, derive_seed(cfg.master_seed, "ordering", rep, "points")
    )
    segments = generate_segments(
        bin, cfg.segment_config, derive_seed(cfg.master_seed, "ordering", rep, "segments")
    )
    mc_cfg = MCConfig(
        n_samples=cfg.mc_samples,
        master_seed=cfg.master_seed,
        direction=Direction.TWO_SIDED,
    )
    return rep, {
        model.to_string(): run_mc_test(points, segments, model, mc_cfg).p_value
        for model in ORDERING_MODELS
    }


def run_ordering_experiment(cfg: StudyConfig, workers: int = 1) -> OrderingResult:
    """p-values for identical data under all four track-level null models.

    Meant to be run with clustered generation; the headline comparison is
    the median p under preserve-interpoint versus uniform-points.

    The tracks are generated independently of each other, so any departure
    from a null model registers in either tail; the test is two-sided. An
    under-preserving null then understates p across the whole range, which
    is what the per-decile comparison of the four models exposes.
    """
    jobs = [(cfg, rep) for rep in range(cfg.n_replicates)]
    outcomes = sorted(_run_jobs(_ordering_replicate, jobs, workers))
    labels = tuple(m.to_string() for m in ORDERING_MODELS)
    pvalues = {
        label: np.array([row[label] for _, row in outcomes]) for label in labels
    }
    return OrderingResult(labels=labels, pvalues=pvalues, n_replicates=cfg.n_replicates)


def decile_table(
    result: OrderingResult, probs: Sequence[float] = tuple(i / 10 for i in range(1, 10))
) -> list[tuple[float, dict[str, float]]]:
    """Per-model p-value quantiles at the given probabilities."""
    return [
        (
            float(q),
            {
                label: float(np.quantile(result.pvalues[label], q))
                for label in result.labels
            },
        )
        for q in probs
    ]


def run_clustering_survey(
    tracks: Sequence[PointTrack], scales: Sequence[int]
) -> tuple[list[tuple[int, str, int, float, float]], list[tuple[int, str, str]]]:
    """L per (track, scale): rows (index, bin_id, tau, k_hat, l_hat).

    Per-track failures (too few points, bad scale) are collected and the
    survey continues.
    """
    rows: list[tuple[int, str, int, float, float]] = []
    failures: list[tuple[int, str, str]] = []
    for idx, track in enumerate(tracks):
        try:
            profile = estimate_l_profile(to_binary_sequence(track), scales)
        except ValueError as exc:
            failures.append((idx, track.bin.id, str(exc)))
            continue
        for tau, l_val in zip(profile.scales, profile.l_values):
            rows.append((idx, track.bin.id, tau, l_val * 2.0 * tau, l_val))
    return rows, failures


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _write_lines(path_or_file: PathLike | TextIO, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="utf-8") as fh:
            fh.write(text)


def write_study_tsv(
    report: StudyReport, path_or_file: PathLike | TextIO, config_echo: dict | None = None
) -> None:
    lines = echo_header(config_echo or {})
    lines.append(f"# rejected_out_of={report.n_replicates}")
    lines.append(f"# fdr_threshold={_fmt(report.fdr_threshold)}")
    lines.append("assumption\t" + "\t".join(report.columns))
    for row in report.rows:
        cells = "\t".join(str(report.counts[(row, col)]) for col in report.columns)
        lines.append(f"{row}\t{cells}")
    _write_lines(path_or_file, lines)


def write_ordering_tsv(
    result: OrderingResult, path_or_file: PathLike | TextIO, config_echo: dict | None = None
) -> None:
    lines = echo_header(config_echo or {})
    lines.append("replicate\t" + "\t".join(result.labels))
    for rep in range(result.n_replicates):
        cells = "\t".join(_fmt(float(result.pvalues[lab][rep])) for lab in result.labels)
        lines.append(f"{rep}\t{cells}")
    _write_lines(path_or_file, lines)


def write_deciles_tsv(
    result: OrderingResult, path_or_file: PathLike | TextIO, config_echo: dict | None = None
) -> None:
    lines = echo_header(config_echo or {})
    lines.append("decile\t" + "\t".join(result.labels))
    for q, row in decile_table(result):
        cells = "\t".join(_fmt(row[lab]) for lab in result.labels)
        lines.append(f"{_fmt(q)}\t{cells}")
    _write_lines(path_or_file, lines)


def write_survey_tsv(
    rows: Iterable[tuple[int, str, int, float, float]],
    path_or_file: PathLike | TextIO,
    config_echo: dict | None = None,
) -> None:
    lines = echo_header(config_echo or {})
    lines.append("track\tbin_id\ttau\tk_hat\tl_hat")
    for idx, bin_id, tau, k_hat, l_hat in rows:
        lines.append(f"{idx}\t{bin_id}\t{tau}\t{_fmt(k_hat)}\t{_fmt(l_hat)}")
    _write_lines(path_or_file, lines)
