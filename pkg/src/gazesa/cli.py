"""Batch command-line front end.

Exit codes: 0 success, 1 I/O or argument error, 2 data or precondition error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import __version__
from .baselines import BASELINE_COLUMNS, compute_baselines
from .errors import DataError, InvalidConfig, TooFewTrials
from .model import (
    TelemetryTrace,
    TrialRecord,
    gaze_to_csv,
    parse_gaze_csv,
    parse_telemetry_csv,
    telemetry_to_csv,
    validate_trial,
)
from .radar import normalize, render_radar
from .scoring import SCORE_COLUMNS, TrialFeatures, score_features, trial_features
from .segmentation import SegmentationResult, runs_to_csv, segment_runs
from .study import MEASURES, METHODS, MIN_TRIALS, CorrelationReport, collect_measures, correlation_table
from .synth import SynthConfig, cohort_seeds, generate_trial, ramp_thetas

EXIT_OK, EXIT_IO, EXIT_DATA = 0, 1, 2


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class ManifestEntry:
    trial_id: str
    gaze_path: Path
    telemetry_path: Path


@dataclass(frozen=True)
class RunManifest:
    entries: tuple[ManifestEntry, ...]
    nominal_hz: float = 90.0
    l2_pooled: bool = False
    count_first_run: bool = False
    permutation: int = 0
    out_dir: Path = Path(".")
    jobs: int = 1


def read_manifest(path: Path) -> list[ManifestEntry]:
    """Parse ``trial_id,gaze_path,telemetry_path`` lines; relative paths are
    resolved against the manifest's directory."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read manifest {path}: {exc.strerror or exc}") from None
    base = Path(path).parent
    entries, seen = [], set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#") or line == "trial_id,gaze_path,telemetry_path":
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3 or not parts[0]:
            raise CliError(EXIT_IO, f"{path}:{lineno}: expected trial_id,gaze_path,telemetry_path")
        tid, gaze, tele = parts
        if tid in seen:
            raise CliError(EXIT_IO, f"{path}:{lineno}: duplicate trial id {tid!r}")
        seen.add(tid)
        entries.append(ManifestEntry(tid, base / gaze, base / tele))
    if not entries:
        raise CliError(EXIT_IO, f"manifest {path} lists no trials")
    return sorted(entries, key=lambda e: e.trial_id)


def _check_paths(entries: Sequence[ManifestEntry], telemetry: bool) -> None:
    for e in entries:
        paths = (e.gaze_path, e.telemetry_path) if telemetry else (e.gaze_path,)
        for p in paths:
            if not os.access(p, os.R_OK) or not p.is_file():
                raise CliError(EXIT_IO, f"trial {e.trial_id}: cannot read {p}")


@dataclass(frozen=True)
class _Job:
    entry: ManifestEntry
    telemetry: bool
    count_first_run: bool
    features: bool = True


@dataclass(frozen=True, eq=False)
class _Outcome:
    trial_id: str
    record: Optional[TrialRecord] = None
    features: Optional[TrialFeatures] = None
    seg: Optional[SegmentationResult] = None
    error: Optional[str] = None


def _process(job: _Job) -> _Outcome:
    e = job.entry
    try:
        gaze = parse_gaze_csv(e.gaze_path.read_bytes(), e.trial_id)
        if job.telemetry:
            tele = parse_telemetry_csv(e.telemetry_path.read_bytes(), e.trial_id)
            record = TrialRecord(gaze, tele)
        else:
            record = TrialRecord(gaze, TelemetryTrace(e.trial_id, ()))
        if not job.features:
            return _Outcome(e.trial_id, record, seg=segment_runs(gaze, job.count_first_run))
        feats = trial_features(gaze, job.count_first_run)
        return _Outcome(e.trial_id, record, feats, feats.seg)
    except DataError as exc:
        return _Outcome(e.trial_id, error=f"{type(exc).__name__}: {exc}")


def _fan_out(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def _run_trials(
    manifest: RunManifest, telemetry: bool, features: bool = True
) -> tuple[list[_Outcome], list[_Outcome]]:
    _check_paths(manifest.entries, telemetry)
    jobs = [_Job(e, telemetry, manifest.count_first_run, features) for e in manifest.entries]
    outcomes = _fan_out(_process, jobs, manifest.jobs)
    ok = [o for o in outcomes if o.error is None]
    failed = [o for o in outcomes if o.error is not None]
    for o in failed:
        print(f"{o.trial_id}: {o.error}", file=sys.stderr)
    return ok, failed


def _cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)] + [",".join(_cell(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _out_dir(manifest: RunManifest) -> Path:
    try:
        manifest.out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create output directory {manifest.out_dir}: {exc}") from None
    return manifest.out_dir


# -- commands ----------------------------------------------------------------


def cmd_score(manifest: RunManifest, dump_runs: bool = False) -> int:
    ok, failed = _run_trials(manifest, telemetry=False)
    out = _out_dir(manifest)
    code = EXIT_DATA if failed else EXIT_OK
    payload: dict = {"failures": [{"trial_id": o.trial_id, "error": o.error} for o in failed]}
    try:
        batch = score_features([o.features for o in ok], l2_pooled=manifest.l2_pooled)
        scores = batch.scores
        payload["sa_l3_pca"] = batch.l3_model.to_dict()
        payload["sa_overall_pca"] = batch.overall_model.to_dict()
    except TooFewTrials as exc:
        print(f"error: {exc} (sa_l3 and sa_overall need a batch PCA over >= 2 trials)", file=sys.stderr)
        scores = exc.partial
        code = EXIT_DATA
    _write_csv(out / "scores.csv", SCORE_COLUMNS, (s.row() for s in scores))
    payload["trials"] = [dict(zip(SCORE_COLUMNS, s.row())) for s in scores]
    (out / "scores.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    if dump_runs:
        runs_dir = out / "runs"
        runs_dir.mkdir(exist_ok=True)
        for o in ok:
            (runs_dir / f"{o.trial_id}.csv").write_text(runs_to_csv(o.features.seg), encoding="utf-8")
    return code


def cmd_baselines(manifest: RunManifest) -> int:
    ok, failed = _run_trials(manifest, telemetry=False, features=False)
    out = _out_dir(manifest)
    rows = [compute_baselines(o.seg, o.record.gaze).row() for o in ok]
    _write_csv(out / "baselines.csv", BASELINE_COLUMNS, rows)
    return EXIT_DATA if failed else EXIT_OK


def cmd_correlate(manifest: RunManifest, radar: Optional[Sequence[str]] = None) -> int:
    ids = {e.trial_id for e in manifest.entries}
    for tid in radar or ():
        if tid not in ids:
            raise CliError(EXIT_IO, f"--radar: unknown trial id {tid!r}")
    if len(manifest.entries) < MIN_TRIALS:
        raise CliError(EXIT_DATA, f"TooFewTrials: correlation study needs at least {MIN_TRIALS} trials, "
                                  f"got {len(manifest.entries)}")
    ok, failed = _run_trials(manifest, telemetry=True)
    if len(ok) < MIN_TRIALS:
        raise CliError(EXIT_DATA, f"TooFewTrials: only {len(ok)} trials usable, need {MIN_TRIALS}")
    for o in ok:
        for w in validate_trial(o.record, nominal_hz=manifest.nominal_hz):
            print(f"{o.trial_id}: warning: {w}", file=sys.stderr)
    measures, _ = collect_measures([o.record for o in ok], [o.features for o in ok], manifest.l2_pooled)
    report = correlation_table(measures, permutation=manifest.permutation)
    out = _out_dir(manifest)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    _write_csv(
        out / "measures.csv",
        ("trial_id",) + MEASURES + ("performance",),
        ((tm.trial_id,) + tuple(tm.values[m] for m in MEASURES) + (tm.performance,) for tm in report.trials),
    )
    if radar:
        (out / "radar.svg").write_text(radar_svg(report, radar), encoding="utf-8")
    return EXIT_DATA if failed else EXIT_OK


def radar_svg(report: CorrelationReport, trial_ids: Sequence[str]) -> str:
    trials = report.trials
    columns = {m: [tm.values[m] for tm in trials] for m in MEASURES}
    columns["performance"] = [tm.performance for tm in trials]
    scaled = normalize(columns)
    index = {tm.trial_id: i for i, tm in enumerate(trials)}
    series, centre = [], []
    for tid in trial_ids:
        if tid not in index:
            raise CliError(EXIT_DATA, f"--radar: trial {tid!r} was excluded from the study")
        i = index[tid]
        series.append((tid, [scaled[m][i] for m in MEASURES]))
        centre.append(scaled["performance"][i])
    return render_radar(MEASURES, series, centre)


def cmd_report(report_path: Path, out_dir: Optional[Path]) -> int:
    try:
        data = json.loads(Path(report_path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {report_path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_IO, f"{report_path} is not valid JSON: {exc}") from None
    header = ["measure"]
    for m, _ in METHODS:
        header += [f"{m}_cc", f"{m}_p"]
    header.append("excluded")
    rows = []
    try:
        for row in data["measures"]:
            cells = [row["name"]]
            for m, _ in METHODS:
                cells += [row[m]["cc"], row[m]["p"]]
            cells.append(row.get("excluded", 0))
            rows.append(cells)
    except (KeyError, TypeError) as exc:
        raise CliError(EXIT_IO, f"{report_path} does not look like a correlation report: {exc!r}") from None
    target = Path(out_dir) if out_dir is not None else Path(report_path).parent
    target.mkdir(parents=True, exist_ok=True)
    _write_csv(target / "correlation_table.csv", header, rows)
    print(f"n = {data.get('n')}")
    for cells in rows:
        print(",".join(_cell(c) for c in cells))
    return EXIT_OK


def _synth_one(args: tuple[SynthConfig, Path]) -> None:
    config, out = args
    record = generate_trial(config)
    (out / f"gaze_{config.trial_id}.csv").write_text(gaze_to_csv(record.gaze), encoding="utf-8")
    (out / f"telemetry_{config.trial_id}.csv").write_text(telemetry_to_csv(record.telemetry), encoding="utf-8")


def cmd_synth(
    thetas: Sequence[float],
    seed: int,
    out_dir: Path,
    duration_s: float = 30.0,
    sample_rate_hz: float = 90.0,
    n_objects: int = 6,
    jobs: int = 1,
) -> int:
    if not thetas:
        raise CliError(EXIT_IO, "no thetas given")
    width = max(2, len(str(len(thetas))))
    configs = [
        SynthConfig(th, s, duration_s, sample_rate_hz, n_objects, f"t{i + 1:0{width}d}")
        for i, (th, s) in enumerate(zip(thetas, cohort_seeds(seed, len(thetas))))
    ]
    try:
        for c in configs:
            c.validate()
    except InvalidConfig as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    out_dir.mkdir(parents=True, exist_ok=True)
    _fan_out(_synth_one, [(c, out_dir) for c in configs], jobs)
    lines = ["trial_id,gaze_path,telemetry_path"]
    lines += [f"{c.trial_id},gaze_{c.trial_id}.csv,telemetry_{c.trial_id}.csv" for c in configs]
    (out_dir / "manifest.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes (default: CPU count)")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: current directory)")
    p.add_argument("--nominal-hz", type=float, default=90.0, help="expected gaze sample rate for warnings")
    p.add_argument("--l2-pooled", action="store_true", help="z-score event lengths against the whole batch")
    p.add_argument("--count-first-run", action="store_true", help="treat a trace's first run as a perception event")
    p.add_argument("--permutation", type=int, default=0, metavar="N", help="also report permutation p-values")
    p.add_argument("--radar", default=None, metavar="A,B", help="write radar.svg comparing two trials")
    return p


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="gazesa", description="Situation-awareness scores from gaze traces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("score", parents=[common], help="per-trial SA scores")
    p.add_argument("manifest", type=Path)
    p.add_argument("--dump-runs", action="store_true", help="write per-trial run tables to OUT/runs/")

    p = sub.add_parser("baselines", parents=[common], help="GTE, SGE, gaze rate, dwell time")
    p.add_argument("manifest", type=Path)

    p = sub.add_parser("correlate", parents=[common], help="correlation of every measure with driving performance")
    p.add_argument("manifest", type=Path)

    p = sub.add_parser("report", parents=[common], help="tabulate an existing report.json")
    p.add_argument("report", type=Path)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic cohort")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--thetas", type=_floats, help="comma-separated theta values in [0, 1]")
    group.add_argument("--ramp", type=int, metavar="N", help="N thetas evenly spaced over [0, 1]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration-s", type=float, default=30.0)
    p.add_argument("--hz", type=float, default=90.0)
    p.add_argument("--objects", type=int, default=6)
    return parser


def _manifest(args) -> RunManifest:
    return RunManifest(
        tuple(read_manifest(args.manifest)),
        nominal_hz=args.nominal_hz,
        l2_pooled=args.l2_pooled,
        count_first_run=args.count_first_run,
        permutation=args.permutation,
        out_dir=args.out or Path("."),
        jobs=max(1, args.jobs),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return exc.code if isinstance(exc.code, int) else EXIT_IO
    radar = [r.strip() for r in args.radar.split(",")] if args.radar else None
    if radar is not None and len(radar) != 2:
        print("error: --radar takes exactly two trial ids", file=sys.stderr)
        return EXIT_IO
    try:
        if args.command == "score":
            return cmd_score(_manifest(args), dump_runs=args.dump_runs)
        if args.command == "baselines":
            return cmd_baselines(_manifest(args))
        if args.command == "correlate":
            return cmd_correlate(_manifest(args), radar)
        if args.command == "report":
            return cmd_report(args.report, args.out)
        if args.command == "synth":
            if args.ramp is not None:
                if args.ramp < 1:
                    raise CliError(EXIT_IO, "--ramp needs at least one trial")
                thetas = ramp_thetas(args.ramp)
            else:
                thetas = args.thetas
            if args.seed < 0:
                raise CliError(EXIT_IO, "seed must be non-negative")
            return cmd_synth(thetas, args.seed, args.out or Path("."), args.duration_s, args.hz, args.objects, args.jobs)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DataError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
