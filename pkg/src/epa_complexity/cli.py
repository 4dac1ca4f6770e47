"""``epa-complexity`` command-line interface."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import multiprocessing as mp
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .automaton import build_epa_from_log, export_dot, to_json
from .entropy import LOG_BASE
from .generator import LogSpec, generate, to_csv
from .log import ColumnMapping, LogParseError, read_log
from .measures import (
    ALL_LABELS, DEFAULT_BUDGET, MeasureOptions, MeasureVector, measure_all, timing_summary,
)
from .stats import (
    MeasurementMatrix, StatsError, correlate_matrices, count_significant,
    overlap, read_matrix, regress,
)

BUDGET_ENV = "EPA_COMPLEXITY_BUDGET"
LOG_SUFFIXES = (".xes", ".xes.gz", ".csv", ".csv.gz")

_DURATION = re.compile(r"^\s*(\d+(?:\.\d*)?|\.\d+)\s*([smhd]?)\s*$", re.I)
_UNIT = {"": 1, "s": 1, "m": 60, "h": 3600, "d": 86400}


class CliError(Exception):
    pass


def parse_duration(text: str) -> float:
    """``"12h"``, ``"30m"``, ``"10s"``, ``"0"``, ``"inf"`` -> seconds."""
    if text.strip().lower() in ("inf", "none", "unlimited"):
        return math.inf
    m = _DURATION.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"invalid duration {text!r}")
    return float(m.group(1)) * _UNIT[m.group(2).lower()]


def fmt6(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "-"
    if isinstance(v, int):
        return str(v)
    return f"{v:.6g}"


@dataclass
class RunConfig:
    inputs: list[str] = field(default_factory=list)
    fmt: str = "auto"
    mapping: ColumnMapping = field(default_factory=ColumnMapping)
    selection: list[str] = field(default_factory=lambda: list(ALL_LABELS))
    budget: float = DEFAULT_BUDGET
    weighting: str = "traces"
    order: str = "timestamp"
    lz_delimited: bool = False
    output: str | None = None
    output_format: str = "csv"
    jobs: int = 1

    @property
    def options(self) -> MeasureOptions:
        return MeasureOptions(self.order, self.weighting, self.lz_delimited)


def _selection(text: str | None) -> list[str]:
    if not text:
        return list(ALL_LABELS)
    labels = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in labels if s not in ALL_LABELS]
    if unknown:
        raise CliError(f"unknown measure(s): {', '.join(unknown)}; known: {', '.join(ALL_LABELS)}")
    return labels


def _config(args) -> RunConfig:
    budget = args.budget
    if budget is None:
        env = os.environ.get(BUDGET_ENV)
        budget = parse_duration(env) if env else DEFAULT_BUDGET
    return RunConfig(
        inputs=[args.input],
        fmt=args.format,
        mapping=ColumnMapping(args.case_col, args.activity_col, args.timestamp_col,
                              args.timestamp_format, args.delimiter),
        selection=_selection(args.select),
        budget=budget,
        weighting=args.distance_weighting,
        order="trace" if args.trace_order else args.order,
        lz_delimited=args.lz_delimited,
        output=args.output,
        output_format=args.output_format,
        jobs=args.jobs or os.cpu_count() or 1,
    )


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


# --- measure ----------------------------------------------------------------

def _measure_one(path: str, cfg: RunConfig) -> tuple[str, MeasureVector]:
    log = read_log(path, cfg.fmt, cfg.mapping)
    return log.source_name or os.path.basename(path), measure_all(log, cfg.selection, cfg.budget, cfg.options)


def cmd_measure(args) -> int:
    cfg = _config(args)
    name, vec = _measure_one(cfg.inputs[0], cfg)
    if cfg.output_format == "json":
        doc = {
            "log": name,
            "log_base": LOG_BASE,
            "order": cfg.order,
            "distance_weighting": cfg.weighting,
            "values": {k: vec.values.get(k) for k in cfg.selection},
            "flags": vec.flags,
            "messages": vec.messages,
            "seconds": vec.seconds,
        }
        _emit(json.dumps(doc, indent=2) + "\n", cfg.output)
    else:
        rows = [["measure", "value", "status", "seconds"]]
        for k in cfg.selection:
            rows.append([k, fmt6(vec.values.get(k)), vec.flags.get(k, "ok"), fmt6(vec.seconds[k])])
        _emit(_csv_text(rows), cfg.output)
    for k, msg in vec.messages.items():
        print(f"warning: {k}: {msg}", file=sys.stderr)
    return 0


# --- batch ------------------------------------------------------------------

def _log_files(directory: str) -> list[str]:
    if not os.path.isdir(directory):
        raise CliError(f"not a directory: {directory}")
    names = sorted(n for n in os.listdir(directory) if n.lower().endswith(LOG_SUFFIXES))
    return [os.path.join(directory, n) for n in names]


def _batch_task(path, cfg):
    try:
        return _measure_one(path, cfg), None
    except (LogParseError, ValueError, OSError) as exc:
        return None, f"{path}: {exc}"


def cmd_batch(args) -> int:
    cfg = _config(args)
    files = _log_files(cfg.inputs[0])
    if not files:
        raise CliError(f"no event logs (*.xes, *.csv) in {cfg.inputs[0]}")
    if cfg.jobs > 1 and len(files) > 1 and "fork" in mp.get_all_start_methods():
        with ProcessPoolExecutor(min(cfg.jobs, len(files)), mp_context=mp.get_context("fork")) as ex:
            results = list(ex.map(_batch_task, files, [cfg] * len(files)))
    else:
        results = [_batch_task(f, cfg) for f in files]
    rows, vectors = [], []
    for res, err in results:
        if err:
            print(f"warning: skipped {err}", file=sys.stderr)
            continue
        rows.append(res[0])
        vectors.append(res[1])
    if not rows:
        raise CliError("no log in the directory could be parsed")
    if len(set(rows)) != len(rows):
        rows = [f"{r}#{i}" for i, r in enumerate(rows, 1)]
    cells = [[v.values[k] if k in v.values and k not in v.flags else math.nan for k in cfg.selection] for v in vectors]
    matrix = MeasurementMatrix(tuple(rows), tuple(cfg.selection), cells)
    summary = timing_summary(vectors, cfg.selection)
    if cfg.output_format == "json":
        doc = {
            "rows": list(matrix.row_ids),
            "columns": list(matrix.column_ids),
            "cells": [[None if math.isnan(c) else c for c in r] for r in matrix.cells.tolist()],
            "flags": {rid: v.flags for rid, v in zip(rows, vectors) if v.flags},
        }
        _emit(json.dumps(doc, indent=2) + "\n", cfg.output)
    else:
        _emit(matrix.to_csv(), cfg.output)
    timing_rows = [["measure", "AVG", "MAX", "MIN", "MEDIAN"]]
    for k, s in summary.items():
        timing_rows.append([k, fmt6(s["AVG"]), fmt6(s["MAX"]), fmt6(s["MIN"]), fmt6(s["MEDIAN"])])
    timing_text = _csv_text(timing_rows)
    timings_path = args.timings
    if timings_path is None and cfg.output not in (None, "-"):
        timings_path = os.path.splitext(cfg.output)[0] + ".timings.csv"
    if timings_path:
        _emit(timing_text, timings_path)
    else:
        sys.stderr.write(timing_text)
    for rid, v in zip(rows, vectors):
        for k, msg in v.messages.items():
            print(f"warning: {rid}: {k}: {msg}", file=sys.stderr)
    return 0


# --- correlate / regress ----------------------------------------------------

def _alphas(text: str) -> list[float]:
    try:
        vals = sorted(float(a) for a in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha list {text!r}") from None
    if not vals or any(not 0 < a < 1 for a in vals):
        raise argparse.ArgumentTypeError("alpha levels must lie in (0, 1)")
    return vals


def cmd_correlate(args) -> int:
    comp = read_matrix(args.complexity)
    qual = read_matrix(args.quality)
    methods = ["pearson", "kendall"] if args.method == "both" else [args.method]
    tables = {
        m: correlate_matrices(comp, qual, m, args.alpha, missing=args.missing)
        for m in methods
    }
    ov = overlap(tables["pearson"], tables["kendall"], args.alpha[-1]) if len(methods) == 2 else None
    if args.output_format == "json":
        doc = {
            "pairs": [c.as_dict() for m in methods for c in tables[m]],
            "significant": {m: {str(a): count_significant(tables[m], a) for a in args.alpha} for m in methods},
        }
        if ov is not None:
            doc["overlap"] = [{"complexity": c, "quality": q, "sign": s} for (c, q), s in ov.items()]
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        rows = [["complexity", "quality", "method", "coefficient", "p_value", "n", "significant_at"]]
        for m in methods:
            for c in tables[m]:
                rows.append([c.complexity, c.quality, c.method, fmt6(c.coefficient), fmt6(c.p_value), c.n,
                             "" if c.significant_at is None else f"{c.significant_at:g}"])
        text = _csv_text(rows)
        if ov is not None:
            qcols = list(dict.fromkeys(c.quality for c in tables["pearson"]))
            ccols = list(dict.fromkeys(c.complexity for c in tables["pearson"]))
            grid = [["overlap", *qcols]]
            for cc in ccols:
                grid.append([cc, *(ov.get((cc, q), "") for q in qcols)])
            text += "\n" + _csv_text(grid)
        _emit(text, args.output)
    for m in methods:
        counts = ", ".join(f"p<={a:g}: {count_significant(tables[m], a)}" for a in args.alpha)
        print(f"{m}: {len(tables[m])} pairs; significant {counts}", file=sys.stderr)
    return 0


def cmd_regress(args) -> int:
    comp = read_matrix(args.complexity)
    qual = read_matrix(args.quality)
    if not args.pair:
        raise CliError("give at least one --pair PREDICTOR OUTCOME")
    rows = regress(comp, qual, [tuple(p) for p in args.pair], missing=args.missing)
    if args.output_format == "json":
        _emit(json.dumps([r.as_dict() for r in rows], indent=2) + "\n", args.output)
    else:
        fields = ["predictor", "outcome", "residual_min", "residual_median", "residual_max",
                  "slope", "intercept", "p_value", "r_squared", "n"]
        out = [fields]
        for r in rows:
            d = r.as_dict()
            out.append([d[f] if f in ("predictor", "outcome", "n") else fmt6(d[f]) for f in fields])
        _emit(_csv_text(out), args.output)
    return 0


# --- generate / epa-export --------------------------------------------------

def _length(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    return int(text)


def cmd_generate(args) -> int:
    spec = LogSpec(
        n_traces=args.n_traces,
        trace_length=args.length,
        alphabet_size=args.alphabet,
        profile=args.profile,
        seed=args.seed,
        timestamp_step=args.step,
    )
    if args.duplicate:
        spec = LogSpec.duplicated(spec)
    _emit(to_csv(generate(spec)), args.output)
    return 0


def cmd_epa_export(args) -> int:
    log = read_log(args.input, args.format, ColumnMapping(
        args.case_col, args.activity_col, args.timestamp_col, args.timestamp_format, args.delimiter))
    epa = build_epa_from_log(log, "trace" if args.trace_order else args.order)
    text = to_json(epa) + "\n" if args.output_format == "json" else export_dot(epa)
    _emit(text, args.output)
    return 0


# --- parser -----------------------------------------------------------------

def _add_log_args(p, with_measures=True):
    p.add_argument("--format", choices=("xes", "csv", "auto"), default="auto")
    p.add_argument("--case-col", default="case")
    p.add_argument("--activity-col", default="activity")
    p.add_argument("--timestamp-col", default="timestamp")
    p.add_argument("--timestamp-format", default=None, help="strptime format for CSV timestamps")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--order", choices=("timestamp", "trace"), default="timestamp",
                   help="event order fed to the prefix automaton")
    p.add_argument("--trace-order", action="store_true", help="shorthand for --order trace")
    p.add_argument("--output", "-o", default=None)
    if with_measures:
        p.add_argument("--select", default=None, help="comma-separated measure labels")
        p.add_argument("--budget", type=parse_duration, default=None,
                       help=f"per-measure time limit, e.g. 12h, 30m, 10s (env {BUDGET_ENV})")
        p.add_argument("--distance-weighting", choices=("traces", "variants"), default="traces")
        p.add_argument("--lz-delimited", action="store_true",
                       help="separate traces with a delimiter symbol for LZ")
        p.add_argument("--output-format", choices=("csv", "json"), default="csv")
        p.add_argument("--jobs", type=int, default=None)


def _add_matrix_args(p):
    p.add_argument("complexity")
    p.add_argument("quality")
    p.add_argument("--missing", choices=("listwise", "pairwise"), default="listwise",
                   help="drop rows incomplete in any column (listwise) or per pair")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--output-format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epa-complexity", description="Event-log complexity measures.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="measure one log")
    p.add_argument("input")
    _add_log_args(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("batch", help="measure every log in a directory")
    p.add_argument("input", metavar="directory")
    _add_log_args(p)
    p.add_argument("--timings", default=None, help="where to write the timing summary")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("correlate", help="correlate complexity with quality")
    _add_matrix_args(p)
    p.add_argument("--method", choices=("pearson", "kendall", "both"), default="both")
    p.add_argument("--alpha", type=_alphas, default=[0.01, 0.05])
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("regress", help="single-predictor regressions")
    _add_matrix_args(p)
    p.add_argument("--pair", nargs=2, action="append", metavar=("PREDICTOR", "OUTCOME"))
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("generate", help="write a synthetic log as CSV")
    p.add_argument("--profile", choices=("identical", "all_distinct", "random"), default="random")
    p.add_argument("--n-traces", type=int, default=10)
    p.add_argument("--length", type=_length, default=5, help="N or LO..HI")
    p.add_argument("--alphabet", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step", type=float, default=60.0, help="seconds between events")
    p.add_argument("--duplicate", action="store_true", help="emit two copies of the log")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("epa-export", help="export the prefix automaton")
    p.add_argument("input")
    _add_log_args(p, with_measures=False)
    p.add_argument("--output-format", choices=("dot", "json"), default="dot")
    p.set_defaults(func=cmd_epa_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, LogParseError, StatsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
