"""Command-line interface.

Subcommands: test, batch, qvalue, ripley, simulate, study, ordering.
All outputs are TSV with '#'-prefixed header lines echoing the run
configuration (execution knobs like --workers are deliberately not echoed,
so outputs are byte-identical across worker counts).
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from dataclasses import replace

import numpy as np

from . import __version__
from .mc import ConfigError, Direction, EstimatorMode, MCConfig, run_mc_batch, run_mc_test, write_results_tsv
from .null_models import NullModelSpec
from .qvalues import estimate_pi0, qvalues, reject_at_fdr
from .ripley import DEFAULT_SCALES
from .simulate import PointGenConfig, PointMode, SegmentGenConfig, generate_points, generate_segments
from .study import (
    StudyConfig,
    filter_bins,
    run_clustering_survey,
    run_false_rejection_study,
    run_ordering_experiment,
    write_deciles_tsv,
    write_ordering_tsv,
    write_study_tsv,
    write_survey_tsv,
)
from .tracks import (
    Bin,
    PointTrack,
    SegmentTrack,
    TrackFormatError,
    TrackValidationError,
    _data_rows,
    _parse_int,
    load_bins,
    load_point_track,
    load_segment_track,
    merge_overlapping,
    save_point_track,
    save_segment_track,
)

_DIRECTIONS = {d.value: d for d in Direction}
_ESTIMATORS = {m.value: m for m in EstimatorMode}


@contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _add_bin_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bin-id", default="bin", help="bin identifier (default: bin)")
    p.add_argument("--bin-start", type=int, default=0, help="bin start, inclusive")
    p.add_argument("--bin-end", type=int, required=True, help="bin end, exclusive")


def _add_mc_args(p: argparse.ArgumentParser, default_samples: int) -> None:
    p.add_argument("--null-model", default="uniform-points",
                   help="uniform-points | preserve-interpoint | uniform-segments | "
                        "preserve-intersegment | block:<k>")
    p.add_argument("--samples", type=int, default=default_samples,
                   help=f"Monte Carlo samples (default: {default_samples})")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p.add_argument("--direction", choices=sorted(_DIRECTIONS), default="greater")
    p.add_argument("--estimator", choices=sorted(_ESTIMATORS), default="add-one")


def _mc_config(args: argparse.Namespace) -> MCConfig:
    return MCConfig(
        n_samples=args.samples,
        master_seed=args.seed,
        estimator_mode=_ESTIMATORS[args.estimator],
        direction=_DIRECTIONS[args.direction],
    )


def _cmd_test(args: argparse.Namespace) -> int:
    bin = Bin(args.bin_id, args.bin_start, args.bin_end)
    points = load_point_track(args.points, bin)
    segments = load_segment_track(args.segments, bin)
    spec = NullModelSpec.from_string(args.null_model)
    cfg = _mc_config(args)
    result = run_mc_test(points, segments, spec, cfg)
    echo = {
        "command": "test",
        "null_model": spec.to_string(),
        "samples": cfg.n_samples,
        "seed": cfg.master_seed,
        "direction": cfg.direction.value,
        "estimator": cfg.estimator_mode.value,
    }
    with _open_out(args.out) as fh:
        write_results_tsv([result], fh, echo, n_points={result.bin_id: len(points)})
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    bins = load_bins(args.bins)
    points_rows = _read_positions(args.points)
    segment_rows = _read_intervals(args.segments)
    points_by_bin: dict[str, PointTrack] = {}
    segments_by_bin: dict[str, SegmentTrack] = {}
    for b in bins:
        pos = np.array(sorted(p for p in points_rows if b.start <= p < b.end), dtype=np.int64)
        points_by_bin[b.id] = PointTrack(b, pos)
        segs = merge_overlapping(
            [(max(s, b.start), min(e, b.end)) for s, e in segment_rows
             if s < b.end and e > b.start]
        )
        segments_by_bin[b.id] = SegmentTrack(b, segs)
    kept = filter_bins(bins, points_by_bin, segments_by_bin, args.min_points, args.min_segments)
    spec = NullModelSpec.from_string(args.null_model)
    cfg = _mc_config(args)
    tests = [(points_by_bin[b.id], segments_by_bin[b.id]) for b in kept]
    if not tests:
        raise ConfigError("no bins left after filtering")
    results, errors = run_mc_batch(tests, spec, cfg, workers=args.workers)
    echo = {
        "command": "batch",
        "null_model": spec.to_string(),
        "samples": cfg.n_samples,
        "seed": cfg.master_seed,
        "direction": cfg.direction.value,
        "estimator": cfg.estimator_mode.value,
        "bins_tested": len(kept),
        "min_points": args.min_points,
        "min_segments": args.min_segments,
    }
    with _open_out(args.out) as fh:
        write_results_tsv(
            results, fh, echo, n_points={b.id: len(points_by_bin[b.id]) for b in kept}
        )
    for err in errors:
        print(f"warning: {err}", file=sys.stderr)
    return 0


def _read_positions(path: str) -> list[int]:
    out = []
    for lineno, fields in _data_rows(path):
        if len(fields) == 1:
            out.append(_parse_int(fields[0], path, lineno))
        elif len(fields) == 2:
            s = _parse_int(fields[0], path, lineno)
            e = _parse_int(fields[1], path, lineno)
            out.append((s + e) // 2)
        else:
            raise TrackFormatError(f"{path}: line {lineno}: expected 1 or 2 columns")
    return out


def _read_intervals(path: str) -> list[tuple[int, int]]:
    out = []
    for lineno, fields in _data_rows(path):
        if len(fields) != 2:
            raise TrackFormatError(f"{path}: line {lineno}: expected 2 columns")
        s = _parse_int(fields[0], path, lineno)
        e = _parse_int(fields[1], path, lineno)
        if e <= s:
            raise TrackValidationError(f"{path}: line {lineno}: segment end must exceed start")
        out.append((s, e))
    return out


def _cmd_qvalue(args: argparse.Namespace) -> int:
    header: list[str] = []
    rows: list[list[str]] = []
    with open(args.input, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                continue
            if not header:
                header = line.split("\t")
            else:
                rows.append(line.split("\t"))
    if args.column not in header:
        raise ConfigError(f"column {args.column!r} not found in {args.input}")
    col = header.index(args.column)
    ps = [float(r[col]) for r in rows]
    pi0 = args.pi0 if args.pi0 is not None else estimate_pi0(ps)
    report = qvalues(ps, pi0)
    if args.fdr is not None:
        report = reject_at_fdr(report, args.fdr)
    echo = {"command": "qvalue", "pi0": format(report.pi0, ".12g")}
    if args.fdr is not None:
        echo["fdr"] = format(args.fdr, ".12g")
    with _open_out(args.out) as fh:
        for line in (f"# {k}={v}" for k, v in echo.items()):
            fh.write(line + "\n")
        extra = ["q_value"] + (["rejected"] if args.fdr is not None else [])
        fh.write("\t".join(header + extra) + "\n")
        for row, entry in zip(rows, report.entries):
            cells = row + [format(entry.q_value, ".12g")]
            if args.fdr is not None:
                cells.append("1" if entry.rejected else "0")
            fh.write("\t".join(cells) + "\n")
    return 0


def _cmd_ripley(args: argparse.Namespace) -> int:
    bin = Bin(args.bin_id, args.bin_start, args.bin_end)
    track = load_point_track(args.points, bin)
    scales = [int(s) for s in args.scales.split(",") if s.strip()]
    rows, failures = run_clustering_survey([track], scales)
    if failures:
        raise ConfigError(failures[0][2])
    echo = {"command": "ripley", "scales": args.scales, "n_points": len(track)}
    with _open_out(args.out) as fh:
        write_survey_tsv(rows, fh, echo)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    bin = Bin(args.bin_id, 0, args.bin_length)
    if args.kind == "points":
        cfg = PointGenConfig(
            mode=PointMode.CLUSTERED if args.mode == "clustered" else PointMode.INDEPENDENT,
            lambda_inter=args.lambda_inter,
            lambda_intra=args.lambda_intra,
            new_cluster_prob=args.new_cluster_prob,
        )
        track = generate_points(bin, cfg, args.seed)
        with _open_out(args.out) as fh:
            fh.write(f"# command=simulate kind=points bin_length={args.bin_length} "
                     f"mode={args.mode} seed={args.seed}\n")
            save_point_track(track, fh)
    else:
        cfg = SegmentGenConfig(
            gap_lambda=args.gap_lambda,
            length_min=args.length_min,
            length_max=args.length_max,
            clustered=args.clustered,
            lambda_intra=args.lambda_intra,
            new_cluster_prob=args.new_cluster_prob,
        )
        track = generate_segments(bin, cfg, args.seed)
        with _open_out(args.out) as fh:
            fh.write(f"# command=simulate kind=segments bin_length={args.bin_length} "
                     f"clustered={int(args.clustered)} seed={args.seed}\n")
            save_segment_track(track, fh)
    return 0


def _study_config(args: argparse.Namespace) -> StudyConfig:
    cfg = StudyConfig(
        n_replicates=args.replicates,
        bin_length=args.bin_length,
        fdr_threshold=args.fdr,
        mc_samples=args.samples,
        master_seed=args.seed,
    )
    if args.cluster_segments:
        cfg = replace(cfg, segment_config=replace(cfg.segment_config, clustered=True))
    return cfg


def _cmd_study(args: argparse.Namespace) -> int:
    cfg = _study_config(args)
    report = run_false_rejection_study(cfg, workers=args.workers)
    echo = {
        "command": "study",
        "replicates": cfg.n_replicates,
        "bin_length": cfg.bin_length,
        "samples": cfg.mc_samples,
        "fdr": format(cfg.fdr_threshold, ".12g"),
        "seed": cfg.master_seed,
    }
    with _open_out(args.out) as fh:
        write_study_tsv(report, fh, echo)
    return 0


def _cmd_ordering(args: argparse.Namespace) -> int:
    cfg = _study_config(args)
    result = run_ordering_experiment(cfg, workers=args.workers)
    echo = {
        "command": "ordering",
        "replicates": cfg.n_replicates,
        "bin_length": cfg.bin_length,
        "samples": cfg.mc_samples,
        "seed": cfg.master_seed,
    }
    with _open_out(args.out) as fh:
        write_ordering_tsv(result, fh, echo)
    if args.deciles_out:
        with _open_out(args.deciles_out) as fh:
            write_deciles_tsv(result, fh, echo)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trackmc",
        description="Monte Carlo null-model testing for point and segment tracks",
    )
    parser.add_argument("--version", action="version", version=f"trackmc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="single-bin Monte Carlo test")
    p.add_argument("--points", required=True)
    p.add_argument("--segments", required=True)
    _add_bin_args(p)
    _add_mc_args(p, default_samples=10_000)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_test)

    p = sub.add_parser("batch", help="one test per bin from a bins file")
    p.add_argument("--bins", required=True, help="3-column TSV: id, start, end")
    p.add_argument("--points", required=True)
    p.add_argument("--segments", required=True)
    _add_mc_args(p, default_samples=1000)
    p.add_argument("--min-points", type=int, default=0)
    p.add_argument("--min-segments", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_batch)

    p = sub.add_parser("qvalue", help="append q-values to a p-value TSV")
    p.add_argument("--input", required=True)
    p.add_argument("--column", default="p_value")
    p.add_argument("--fdr", type=float, default=None, help="also flag rejections")
    p.add_argument("--pi0", type=float, default=None, help="override the pi0 estimate")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_qvalue)

    p = sub.add_parser("ripley", help="scaled Ripley L profile of a point track")
    p.add_argument("--points", required=True)
    _add_bin_args(p)
    p.add_argument("--scales", default=",".join(str(s) for s in DEFAULT_SCALES))
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_ripley)

    p = sub.add_parser("simulate", help="generate a synthetic track")
    p.add_argument("kind", choices=("points", "segments"))
    p.add_argument("--bin-id", default="sim")
    p.add_argument("--bin-length", type=int, required=True)
    p.add_argument("--mode", choices=("independent", "clustered"), default="independent")
    p.add_argument("--lambda-inter", type=float, default=0.01)
    p.add_argument("--lambda-intra", type=float, default=0.1)
    p.add_argument("--new-cluster-prob", type=float, default=0.3)
    p.add_argument("--gap-lambda", type=float, default=0.01)
    p.add_argument("--length-min", type=int, default=10)
    p.add_argument("--length-max", type=int, default=100)
    p.add_argument("--clustered", action="store_true", help="cluster segment starts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_simulate)

    for name, fn, help_text in (
        ("study", _cmd_study, "false-rejection study across null models"),
        ("ordering", _cmd_ordering, "p-value ordering across the four null models"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--replicates", type=int, default=100)
        p.add_argument("--bin-length", type=int, default=100_000)
        p.add_argument("--samples", type=int, default=1000)
        p.add_argument("--fdr", type=float, default=0.20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--cluster-segments", action="store_true",
                       help="use the clustered segment generator")
        p.add_argument("--out", default="-")
        if name == "ordering":
            p.add_argument("--deciles-out", default=None)
        p.set_defaults(fn=fn)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (TrackFormatError, TrackValidationError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
