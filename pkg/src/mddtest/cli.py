"""Command-line front end.

Commands: ``test`` (one dataset, one p-value), ``simulate`` (a grid of
Monte Carlo cells), ``bench`` (engine timing and agreement) and
``adjust`` (Benjamini-Hochberg over a batch of p-values).

Exit codes: 0 on success, 2 on malformed input, 3 on a distance or
point-space violation, 4 on an internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileio
from .errors import (
    CsvFormatError,
    GridConfigError,
    InvalidB,
    InvalidLabels,
    InvalidR,
    InvalidReps,
    InvalidSpec,
    MddError,
    MetricError,
    OutOfRangePValue,
    SizeMismatch,
    TooFewSamples,
)
from .estimator import LabelVector, build_ranks
from .harness import GridCell, bench_estimators, run_grid
from .inference import bh_adjust, fresh_seed, permutation_test
from .metrics import PointSet, load_precomputed

_INPUT_ERRORS = (
    CsvFormatError,
    GridConfigError,
    OutOfRangePValue,
    InvalidB,
    InvalidReps,
    InvalidR,
    InvalidSpec,
    InvalidLabels,
    SizeMismatch,
    TooFewSamples,
    FileNotFoundError,
    json.JSONDecodeError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mddtest",
        description="Independence tests between a metric-space sample and a categorical variable.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run one permutation test on a dataset")
    src = p_test.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="CSV of point rows")
    src.add_argument("--matrix", help="CSV holding a precomputed distance matrix")
    p_test.add_argument(
        "--metric",
        choices=("euclidean", "sphere", "shape"),
        default="euclidean",
        help="how to read --points (shape expects 2L columns x1,y1,...,xL,yL)",
    )
    p_test.add_argument("--labels", required=True, help="CSV holding the class labels")
    p_test.add_argument("--label-column", type=int, default=0)
    p_test.add_argument("--label-header", choices=("auto", "yes", "no"), default="auto")
    p_test.add_argument("--permutations", type=int, default=499)
    p_test.add_argument("--seed", type=int, default=None)
    p_test.add_argument("--output", default="mdd-result.json")
    p_test.add_argument("--format", choices=("json", "csv", "text"), default="json")

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo grid")
    grid_src = p_sim.add_mutually_exclusive_group()
    grid_src.add_argument("--grid", help="grid config JSON path")
    grid_src.add_argument("--preset", help="bundled preset name (see --list-presets)")
    p_sim.add_argument("--list-presets", action="store_true", help="list bundled presets and exit")
    p_sim.add_argument("--reps", type=int, default=None, help="override replicate count")
    p_sim.add_argument("--permutations", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_sim.add_argument("--alpha", type=float, default=None)
    p_sim.add_argument("--tests", default=None, help="comma list, e.g. mdd,dcov,hhg")
    p_sim.add_argument("--threads", type=int, default=1)
    p_sim.add_argument("--output", default=None, help="write the machine-readable report here")
    p_sim.add_argument("--format", choices=("json", "csv", "text"), default="json")

    p_bench = sub.add_parser("bench", help="time the estimator engines")
    p_bench.add_argument("--sizes", default="50,100,200", help="comma list of sample sizes")
    p_bench.add_argument("--classes", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--output", default=None, help="write a JSON report here")

    p_adj = sub.add_parser("adjust", help="Benjamini-Hochberg adjust a batch of p-values")
    p_adj.add_argument(
        "--input",
        required=True,
        help="CSV holding a p-value column, or a directory of result JSON files",
    )
    p_adj.add_argument("--column", type=int, default=0)
    p_adj.add_argument("--header", choices=("auto", "yes", "no"), default="auto")
    p_adj.add_argument("--output", default=None, help="adjusted CSV path")
    return parser


def _cmd_test(args) -> int:
    raw_labels = fileio.load_labels_csv(
        args.labels, column=args.label_column, header=args.label_header
    )
    labels = LabelVector.from_values(raw_labels)
    if args.matrix is not None:
        d = load_precomputed(fileio.load_matrix_csv(args.matrix))
    else:
        rows = fileio.load_points_csv(args.points)
        if args.metric == "shape":
            if rows.shape[1] % 2 != 0 or rows.shape[1] < 6:
                raise CsvFormatError(
                    f"{args.points}: shape rows need an even column count of at "
                    f"least 6 (x1,y1,...), got {rows.shape[1]}"
                )
            points = PointSet.shape(rows.reshape(rows.shape[0], -1, 2))
        elif args.metric == "sphere":
            points = PointSet.sphere(rows)
        else:
            points = PointSet.euclidean(rows)
        from .harness import distances_for

        d = distances_for(points, "geodesic" if args.metric == "sphere" else "euclidean")
    if labels.n != d.n:
        raise SizeMismatch(
            f"{args.labels} holds {labels.n} labels but the point source holds "
            f"{d.n} observations"
        )
    seed = args.seed if args.seed is not None else fresh_seed()
    result = permutation_test(
        build_ranks(d), labels, permutations=args.permutations, seed=seed
    )
    print(
        f"MDD={result.statistic:.6g}, p={result.p_value:.6g}, "
        f"n={result.n}, R={result.num_classes}"
    )
    if args.format == "json":
        fileio.write_json(args.output, fileio.result_to_dict(result))
    elif args.format == "csv":
        fileio.write_csv(args.output, fileio.result_csv_rows(result))
    else:
        Path(args.output).write_text(
            f"MDD={result.statistic!r} p={result.p_value!r} n={result.n} "
            f"R={result.num_classes} permutations={result.permutations} "
            f"seed={result.seed}\n",
            encoding="utf-8",
        )
    return 0


def _cmd_simulate(args) -> int:
    if args.list_presets:
        for name in fileio.preset_names():
            print(name)
        return 0
    if args.grid is None and args.preset is None:
        raise InvalidSpec("one of --grid or --preset is required (or --list-presets)")
    if args.grid is not None:
        grid = fileio.load_grid_json(args.grid)
    else:
        grid = fileio.load_preset(args.preset)
    overrides = {}
    if args.reps is not None:
        # a rep override flattens any per-cell replicate counts too
        overrides["reps"] = args.reps
        overrides["cells"] = tuple(GridCell(spec=c.spec, reps=None) for c in grid.cells)
    if args.permutations is not None:
        overrides["permutations"] = args.permutations
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.tests is not None:
        overrides["tests"] = tuple(t.strip() for t in args.tests.split(",") if t.strip())
    if overrides:
        from dataclasses import replace

        grid = replace(grid, **overrides)
    if args.threads < 1:
        raise InvalidSpec(f"--threads must be >= 1, got {args.threads}")
    report = run_grid(grid, threads=args.threads)
    print(report.to_text())
    if args.output is not None:
        if args.format == "json":
            fileio.write_json(args.output, report.to_json_dict())
        elif args.format == "csv":
            fileio.write_csv(args.output, report.to_csv_rows())
        else:
            Path(args.output).write_text(report.to_text() + "\n", encoding="utf-8")
    return 0


def _cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise InvalidSpec(f"--sizes must be a comma list of integers, got {args.sizes!r}")
    if not sizes or min(sizes) < 2 * args.classes:
        raise InvalidSpec("every bench size must be at least 2 * classes")
    report = bench_estimators(sizes, R=args.classes, seed=args.seed)
    print(f"{'n':>6}  {'naive_s':>10}  {'build_s':>10}  {'fast_eval_s':>12}  {'max_diff':>10}")
    for row in report.rows:
        print(
            f"{row.n:>6}  {row.naive_seconds:>10.4f}  {row.build_seconds:>10.4f}  "
            f"{row.fast_eval_seconds:>12.5f}  {row.max_abs_diff:>10.2e}"
        )
    if report.fast_exponent is not None:
        print(
            f"fit exponents: naive ~ n^{report.naive_exponent:.2f}, "
            f"fast eval ~ n^{report.fast_exponent:.2f}"
        )
    if args.output is not None:
        fileio.write_json(
            args.output,
            {
                "rows": [
                    {
                        "n": row.n,
                        "naive_seconds": row.naive_seconds,
                        "build_seconds": row.build_seconds,
                        "fast_eval_seconds": row.fast_eval_seconds,
                        "max_abs_diff": row.max_abs_diff,
                    }
                    for row in report.rows
                ],
                "fast_exponent": report.fast_exponent,
                "naive_exponent": report.naive_exponent,
            },
        )
    return 0


def _cmd_adjust(args) -> int:
    source = Path(args.input)
    if source.is_dir():
        files = sorted(p for p in source.iterdir() if p.suffix == ".json")
        if not files:
            raise CsvFormatError(f"{source} holds no result JSON files")
        names = []
        pvals = []
        for path in files:
            obj = json.loads(path.read_text(encoding="utf-8"))
            fileio.validate_result_dict(obj)
            names.append(path.name)
            pvals.append(float(obj["p_value"]))
        adjusted = bh_adjust(pvals)
        out_path = args.output or str(source / "adjusted.csv")
        rows = [["file", "p_value", "bh_adjusted"]]
        for name, p, adj in zip(names, pvals, adjusted):
            rows.append([name, fileio.fmt_float(p), fileio.fmt_float(adj)])
        fileio.write_csv(out_path, rows)
        print(f"adjusted {len(pvals)} p-values -> {out_path}")
        return 0
    rows = fileio.read_csv_rows(source)
    header_row: list[str] | None = None
    first_val = rows[0][args.column] if args.column < len(rows[0]) else ""
    has_header = args.header == "yes" or (
        args.header == "auto" and not fileio._is_number(first_val)
    )
    if has_header:
        header_row = rows[0]
        rows = rows[1:]
    if not rows:
        raise CsvFormatError(f"{source} holds no data rows")
    pvals = []
    for i, row in enumerate(rows):
        if args.column >= len(row):
            raise CsvFormatError(f"{source}: row {i + 1} has no column {args.column}")
        text = row[args.column]
        try:
            pvals.append(float(text))
        except ValueError:
            raise CsvFormatError(
                f"{source}: row {i + 1}, column {args.column + 1}: {text!r} is not a number"
            ) from None
    adjusted = bh_adjust(pvals)
    out_path = args.output or str(source.with_suffix(".adjusted.csv"))
    out_rows = []
    if header_row is not None:
        out_rows.append(list(header_row) + ["bh_adjusted"])
    for row, adj in zip(rows, adjusted):
        out_rows.append(list(row) + [fileio.fmt_float(adj)])
    fileio.write_csv(out_path, out_rows)
    print(f"adjusted {len(pvals)} p-values -> {out_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "test":
            return _cmd_test(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_adjust(args)
    except MetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MddError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
