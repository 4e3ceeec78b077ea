"""Monte Carlo harness: run test batteries over grids of scenario cells.

Each (cell, replicate) pair draws its seeds from a spawn of the master
seed keyed by the cell index and replicate index, so reruns with the
same master seed are bit-identical and neither the execution order nor
the worker count can change a result.  All tests requested for a
replicate share the same data and the same permutation streams.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .baselines import (
    discrete_label_distances,
    double_center,
    hhg_statistic_discrete,
)
from .errors import InvalidReps, InvalidSpec
from .estimator import (
    LabelVector,
    build_ranks,
    estimate_fast,
    estimate_naive,
    fast_statistic_value,
)
from .inference import draw_label_permutations, pvalue_from_null
from .metrics import (
    DistanceMatrix,
    PointSet,
    euclidean_distances,
    shape_distances,
    sphere_distances,
    unit_sphere_embedding,
)
from .simulate import ScenarioSpec, generate

KNOWN_TESTS = ("mdd", "dcov", "hhg")
SPHERE_METRICS = ("euclidean", "geodesic")
Y_ENCODING = "discrete 0/1 metric on class codes"


@dataclass(frozen=True)
class GridCell:
    spec: ScenarioSpec
    reps: int | None = None  # overrides the grid-level replicate count


@dataclass(frozen=True)
class ExperimentGrid:
    """A batch of scenario cells plus shared run settings."""

    cells: tuple[GridCell, ...]
    reps: int = 200
    permutations: int = 199
    alpha: float = 0.05
    tests: tuple[str, ...] = ("mdd",)
    seed: int = 0
    sphere_metric: str = "euclidean"
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.cells) == 0:
            raise InvalidSpec("a grid needs at least one cell")
        if self.reps < 1:
            raise InvalidReps(f"replicate count must be >= 1, got {self.reps}")
        for cell in self.cells:
            if cell.reps is not None and cell.reps < 1:
                raise InvalidReps(f"cell replicate count must be >= 1, got {cell.reps}")
        if self.permutations < 1:
            raise InvalidSpec(
                f"permutation count must be >= 1, got {self.permutations}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise InvalidSpec(f"alpha must lie in (0, 1), got {self.alpha}")
        bad = [t for t in self.tests if t not in KNOWN_TESTS]
        if bad:
            raise InvalidSpec(f"unknown tests {bad}; supported: {list(KNOWN_TESTS)}")
        if len(self.tests) == 0:
            raise InvalidSpec("at least one test must be requested")
        if self.sphere_metric not in SPHERE_METRICS:
            raise InvalidSpec(
                f"sphere_metric must be one of {SPHERE_METRICS}, got {self.sphere_metric!r}"
            )


def distances_for(points: PointSet, sphere_metric: str = "euclidean") -> DistanceMatrix:
    """Metric dispatch used by the harness.

    Shapes always use the shape metric.  Unit-sphere rows and raw
    coordinate tuples use plain Euclidean distance unless
    ``sphere_metric == "geodesic"``, in which case rows are (projected
    onto and) measured along the sphere.
    """
    if points.kind == "shape":
        return shape_distances(points)
    if points.kind == "sphere":
        if sphere_metric == "geodesic":
            return sphere_distances(points)
        return euclidean_distances(PointSet.euclidean(points.data, points.descriptor))
    if sphere_metric == "geodesic" and points.descriptor.startswith("sphere-coords"):
        return sphere_distances(unit_sphere_embedding(points))
    return euclidean_distances(points)


def _cell_seeds(master_seed: int, cell_index: int, rep: int) -> tuple[int, int]:
    ss = np.random.SeedSequence(master_seed, spawn_key=(cell_index, rep))
    state = ss.generate_state(2, dtype=np.uint64)
    return int(state[0] & (2**63 - 1)), int(state[1] & (2**63 - 1))


def _replicate_pvalues(
    d: DistanceMatrix,
    labels: LabelVector,
    tests: tuple[str, ...],
    permutations: int,
    perm_seed: int,
) -> dict[str, float]:
    """p-values for every requested test on one dataset.

    All tests see the same permutation streams.
    """
    n = d.n
    perms = draw_label_permutations(n, permutations, perm_seed)
    counts = labels.counts.astype(np.float64)
    proportions = labels.proportions
    codes = labels.codes
    out: dict[str, float] = {}
    ranks = build_ranks(d) if ("mdd" in tests or "hhg" in tests) else None
    if "mdd" in tests:
        observed = fast_statistic_value(ranks, codes, counts, proportions)
        null = np.empty(permutations)
        for b in range(permutations):
            null[b] = fast_statistic_value(ranks, codes[perms[b]], counts, proportions)
        out["mdd"] = pvalue_from_null(observed, null)
    if "dcov" in tests:
        a = double_center(d.values)
        b0 = double_center(discrete_label_distances(labels).values)
        observed = float(np.mean(a * b0))
        null = np.empty(permutations)
        for b in range(permutations):
            p = perms[b]
            null[b] = float(np.mean(a * b0[np.ix_(p, p)]))
        out["dcov"] = pvalue_from_null(observed, null)
    if "hhg" in tests:
        observed = hhg_statistic_discrete(ranks, codes, labels.counts)
        null = np.empty(permutations)
        for b in range(permutations):
            null[b] = hhg_statistic_discrete(ranks, codes[perms[b]], labels.counts)
        out["hhg"] = pvalue_from_null(observed, null)
    return out


def _run_replicate(args: tuple[ExperimentGrid, int, int]) -> tuple[int, int, dict[str, float]]:
    grid, cell_index, rep = args
    cell = grid.cells[cell_index]
    data_seed, perm_seed = _cell_seeds(grid.seed, cell_index, rep)
    points, labels = generate(cell.spec, seed=data_seed)
    d = distances_for(points, grid.sphere_metric)
    pvals = _replicate_pvalues(d, labels, grid.tests, grid.permutations, perm_seed)
    return cell_index, rep, pvals


@dataclass(frozen=True)
class CellResult:
    spec: ScenarioSpec
    reps: int
    rejections: dict[str, int]

    def frequency(self, test: str) -> float:
        return self.rejections[test] / self.reps


@dataclass
class TableReport:
    """Aggregated rejection frequencies for a grid run.

    The JSON form is deterministic for a fixed grid and master seed;
    wall-clock time is reported separately in the text rendering so
    identical runs serialise byte-identically.
    """

    cells: list[CellResult]
    config: dict
    elapsed_seconds: float = field(default=0.0, compare=False)

    def to_json_dict(self) -> dict:
        cells = []
        for cell in self.cells:
            spec_dict = {
                k: v for k, v in asdict(cell.spec).items() if v is not None
            }
            tests = {
                t: {
                    "rejections": cell.rejections[t],
                    "frequency": cell.rejections[t] / cell.reps,
                }
                for t in sorted(cell.rejections)
            }
            cells.append({"spec": spec_dict, "reps": cell.reps, "tests": tests})
        return {"config": self.config, "cells": cells}

    def to_text(self) -> str:
        tests = list(self.config["tests"])
        header = ["scenario", "col", "R", "n", "dim/L", "corr", "null", "reps"]
        header += tests
        rows = [header]
        for cell in self.cells:
            spec = cell.spec
            size = spec.landmarks if spec.scenario == "sim4" else spec.dim
            row = [
                spec.scenario,
                "-" if spec.scenario == "sim4" else str(spec.column),
                str(spec.R),
                str(spec.n),
                str(size),
                f"{spec.corr:g}" if spec.scenario == "sim4" else "-",
                "yes" if (spec.null or spec.scenario == "sim1") else "no",
                str(cell.reps),
            ]
            row += [f"{cell.frequency(t):.3f}" for t in tests]
            rows.append(row)
        widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
        lines = []
        for idx, row in enumerate(rows):
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
            if idx == 0:
                lines.append("  ".join("-" * w for w in widths))
        lines.append("")
        cfg = self.config
        lines.append(
            f"alpha={cfg['alpha']:g}  permutations={cfg['permutations']}  "
            f"seed={cfg['seed']}  sphere_metric={cfg['sphere_metric']}  "
            f"y_encoding={cfg['y_encoding']}"
        )
        if self.elapsed_seconds:
            lines.append(f"elapsed: {self.elapsed_seconds:.2f} s")
        return "\n".join(lines)

    def to_csv_rows(self) -> list[list[str]]:
        tests = list(self.config["tests"])
        header = [
            "scenario",
            "column",
            "R",
            "n",
            "dim",
            "landmarks",
            "corr",
            "null",
            "reps",
        ]
        for t in tests:
            header += [f"{t}_rejections", f"{t}_frequency"]
        rows = [header]
        for cell in self.cells:
            spec = cell.spec
            row = [
                spec.scenario,
                str(spec.column),
                str(spec.R),
                str(spec.n),
                str(spec.dim),
                str(spec.landmarks),
                repr(float(spec.corr)),
                str(bool(spec.null or spec.scenario == "sim1")).lower(),
                str(cell.reps),
            ]
            for t in tests:
                row += [str(cell.rejections[t]), repr(cell.frequency(t))]
            rows.append(row)
        return rows


def run_grid(grid: ExperimentGrid, threads: int = 1) -> TableReport:
    """Execute every cell of a grid and aggregate rejection frequencies.

    ``threads > 1`` fans (cell, replicate) tasks out to worker
    processes; aggregation is by task index, so the thread count never
    changes the report.
    """
    start = time.perf_counter()
    tasks = []
    for cell_index, cell in enumerate(grid.cells):
        reps = cell.reps if cell.reps is not None else grid.reps
        for rep in range(reps):
            tasks.append((grid, cell_index, rep))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunk = max(1, len(tasks) // (8 * threads))
            outcomes = list(pool.map(_run_replicate, tasks, chunksize=chunk))
    else:
        outcomes = [_run_replicate(task) for task in tasks]
    rejections: dict[int, dict[str, int]] = {}
    reps_done: dict[int, int] = {}
    for cell_index, _rep, pvals in outcomes:
        slot = rejections.setdefault(cell_index, {t: 0 for t in grid.tests})
        reps_done[cell_index] = reps_done.get(cell_index, 0) + 1
        for t in grid.tests:
            if pvals[t] <= grid.alpha:
                slot[t] += 1
    cells = [
        CellResult(
            spec=cell.spec,
            reps=reps_done[cell_index],
            rejections=rejections[cell_index],
        )
        for cell_index, cell in enumerate(grid.cells)
    ]
    config = {
        "name": grid.name,
        "tests": list(grid.tests),
        "reps": grid.reps,
        "permutations": grid.permutations,
        "alpha": grid.alpha,
        "seed": grid.seed,
        "sphere_metric": grid.sphere_metric,
        "y_encoding": Y_ENCODING,
        "p_value": "add-one permutation",
    }
    elapsed = time.perf_counter() - start
    return TableReport(cells=cells, config=config, elapsed_seconds=elapsed)


@dataclass(frozen=True)
class BenchRow:
    n: int
    naive_seconds: float
    build_seconds: float
    fast_eval_seconds: float
    max_abs_diff: float


@dataclass(frozen=True)
class BenchReport:
    """Timing and agreement of the two estimator engines.

    ``fast_exponent`` and ``naive_exponent`` are least-squares slopes
    of log time against log n (eval time for the fast engine).
    """

    rows: tuple[BenchRow, ...]
    fast_exponent: float | None
    naive_exponent: float | None


def bench_estimators(n_grid, R: int = 3, seed: int = 0) -> BenchReport:
    """Time the naive and rank-based engines on matched Gaussian draws.

    Also asserts that the engines agree to 1e-12 on every instance;
    the returned rows carry the observed maximum difference.
    """
    rows = []
    for idx, n in enumerate(n_grid):
        spec = ScenarioSpec(scenario="sim2", column=3, R=R, n=int(n), dim=3)
        points, labels = generate(spec, seed=seed + idx)
        d = euclidean_distances(points)
        t0 = time.perf_counter()
        naive = estimate_naive(d, labels)
        t1 = time.perf_counter()
        ranks = build_ranks(d)
        t2 = time.perf_counter()
        fast = estimate_fast(ranks, labels)
        t3 = time.perf_counter()
        diff = abs(naive.value - fast.value)
        for a, b in zip(naive.per_class, fast.per_class):
            diff = max(diff, abs(a - b))
        if diff > 1e-12:
            raise AssertionError(
                f"estimator engines disagree at n={n}: |difference| = {diff:.3e}"
            )
        rows.append(
            BenchRow(
                n=int(n),
                naive_seconds=t1 - t0,
                build_seconds=t2 - t1,
                fast_eval_seconds=t3 - t2,
                max_abs_diff=diff,
            )
        )
    if len(rows) > 1:
        logn = np.log([row.n for row in rows])
        fast_exp = float(np.polyfit(logn, np.log([row.fast_eval_seconds for row in rows]), 1)[0])
        naive_exp = float(np.polyfit(logn, np.log([row.naive_seconds for row in rows]), 1)[0])
    else:
        fast_exp = None
        naive_exp = None
    return BenchReport(rows=tuple(rows), fast_exponent=fast_exp, naive_exponent=naive_exp)
