"""Permutation inference, multiplicity adjustment and sampling diagnostics.

The permutation test draws label permutations from a counter-based
generator keyed by ``(seed, replicate index)``, so replicate ``b``
always sees the same permutation no matter how or in what order the
replicates are executed.  The p-value uses the add-one convention

    p = (1 + #{b : T_b >= T_observed}) / (B + 1),

which is exact for exchangeable labels and never returns zero.
"""

from __future__ import annotations

import secrets
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateLabelsWarning,
    InvalidB,
    InvalidReps,
    OutOfRangePValue,
)
from .estimator import (
    LabelVector,
    RankStructure,
    estimate_fast,
    fast_statistic_value,
)
from .metrics import _freeze

DEFAULT_PERMUTATIONS = 499
MIN_SCALING_REPS = 20
MIN_CLT_REPS = 100


@dataclass(frozen=True)
class TestResult:
    """Outcome of one permutation test.

    ``scaled`` is ``n * statistic``, the quantity with a nondegenerate
    null limit.  ``per_class`` is the per-class decomposition of the
    observed statistic (None for statistics that do not decompose).
    ``null_stats`` holds the permuted statistic values when the caller
    asked to retain them.
    """

    statistic: float
    scaled: float
    p_value: float
    permutations: int
    seed: int
    n: int
    num_classes: int
    method: str = "permutation"
    per_class: tuple[float, ...] | None = None
    null_stats: np.ndarray | None = None


def _substream(seed: int, stream: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def fresh_seed() -> int:
    """A 63-bit seed drawn from system entropy."""
    return secrets.randbits(63)


def draw_label_permutations(n: int, permutations: int, seed: int) -> np.ndarray:
    """The ``(permutations, n)`` array of index permutations for a seed.

    Row ``b`` comes from the ``(seed, b)`` substream, independent of
    execution order.
    """
    if permutations < 1:
        raise InvalidB(f"permutation count must be >= 1, got {permutations}")
    out = np.empty((permutations, n), dtype=np.int64)
    for b in range(permutations):
        out[b] = _substream(seed, b).permutation(n)
    return out


def pvalue_from_null(observed: float, null_stats: np.ndarray) -> float:
    """Add-one permutation p-value: (1 + #{T_b >= T}) / (B + 1)."""
    b = null_stats.size
    if b < 1:
        raise InvalidB("need at least one permutation replicate")
    ge = int(np.count_nonzero(null_stats >= observed))
    return (1 + ge) / (b + 1)


def permutation_test_statistic(
    statistic: Callable[[np.ndarray], float],
    labels: LabelVector,
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int | None = None,
    retain_null: bool = False,
    method: str = "permutation",
) -> TestResult:
    """Permutation test for an arbitrary statistic of the label codes.

    ``statistic`` must be a pure function of a codes array (the
    observed codes or a permutation of them).  Inputs are never
    mutated; the same seed gives bit-identical results.
    """
    if permutations < 1:
        raise InvalidB(f"permutation count must be >= 1, got {permutations}")
    if seed is None:
        seed = fresh_seed()
    if labels.num_classes == 1:
        warnings.warn(
            "labels hold a single class; the statistic is identically zero "
            "and the permutation p-value is 1",
            DegenerateLabelsWarning,
        )
    observed = float(statistic(labels.codes))
    perms = draw_label_permutations(labels.n, permutations, seed)
    null = np.empty(permutations)
    for b in range(permutations):
        null[b] = statistic(labels.codes[perms[b]])
    p = pvalue_from_null(observed, null)
    return TestResult(
        statistic=observed,
        scaled=labels.n * observed,
        p_value=p,
        permutations=permutations,
        seed=seed,
        n=labels.n,
        num_classes=labels.num_classes,
        method=method,
        null_stats=_freeze(null) if retain_null else None,
    )


def permutation_test(
    ranks: RankStructure,
    labels: LabelVector,
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int | None = None,
    retain_null: bool = False,
    include_diagonal: bool = True,
) -> TestResult:
    """Permutation test of the MDD statistic against label exchange."""
    est = estimate_fast(ranks, labels, include_diagonal=include_diagonal)
    counts = labels.counts.astype(np.float64)
    proportions = labels.proportions

    def stat(codes: np.ndarray) -> float:
        return fast_statistic_value(
            ranks, codes, counts, proportions, include_diagonal=include_diagonal
        )

    result = permutation_test_statistic(
        stat,
        labels,
        permutations=permutations,
        seed=seed,
        retain_null=retain_null,
    )
    return TestResult(
        statistic=est.value,
        scaled=labels.n * est.value,
        p_value=result.p_value,
        permutations=result.permutations,
        seed=result.seed,
        n=result.n,
        num_classes=result.num_classes,
        method=result.method,
        per_class=est.per_class,
        null_stats=result.null_stats,
    )


def bh_adjust(p_values: Sequence[float]) -> np.ndarray:
    """Benjamini-Hochberg adjusted p-values in the input order.

    With sorted raw values p_(1) <= ... <= p_(m), the adjusted value at
    rank i is ``min_{j >= i} (m * p_(j) / j)`` clamped to 1; the result
    is mapped back to the original order.  Adjustment preserves order
    and never decreases a p-value.
    """
    raw = np.asarray(p_values, dtype=np.float64)
    if raw.ndim != 1 or raw.size == 0:
        raise OutOfRangePValue("need a non-empty 1-d vector of p-values")
    if not np.isfinite(raw).all() or (raw < 0.0).any() or (raw > 1.0).any():
        raise OutOfRangePValue("p-values must lie in [0, 1]")
    m = raw.size
    order = np.argsort(raw, kind="stable")
    ranked = raw[order] * m / np.arange(1, m + 1)
    adjusted_sorted = np.minimum.accumulate(ranked[::-1])[::-1]
    np.clip(adjusted_sorted, 0.0, 1.0, out=adjusted_sorted)
    out = np.empty(m)
    out[order] = adjusted_sorted
    return out


Generator = Callable[[int, int], tuple]


@dataclass(frozen=True)
class ScalingReport:
    """Medians of ``n * statistic`` over a grid of sample sizes.

    Under dependence the medians should grow with ``n``; under
    independence they should stay within a constant factor.  With a
    single grid entry no monotonicity claim is made.
    """

    n_grid: tuple[int, ...]
    medians: tuple[float, ...]
    reps: int
    strictly_increasing: bool | None
    max_min_ratio: float | None


def scaling_diagnostic(
    generator: Generator,
    n_grid: Sequence[int],
    reps: int = 50,
    seed: int = 0,
) -> ScalingReport:
    """Track the median of ``n * statistic`` along ``n_grid``.

    ``generator(n, seed)`` must return a ``(DistanceMatrix,
    LabelVector)`` pair for a fresh replicate.
    """
    if reps < MIN_SCALING_REPS:
        raise InvalidReps(
            f"scaling diagnostic needs at least {MIN_SCALING_REPS} replicates, got {reps}"
        )
    grid = tuple(int(n) for n in n_grid)
    if len(grid) == 0:
        raise InvalidReps("n_grid must be non-empty")
    from .estimator import build_ranks  # local import to keep module load light

    medians = []
    for idx, n in enumerate(grid):
        values = np.empty(reps)
        for rep in range(reps):
            rep_seed = int(
                _substream(seed, idx * reps + rep).integers(0, 2**63, dtype=np.int64)
            )
            d, labels = generator(n, rep_seed)
            values[rep] = n * estimate_fast(build_ranks(d), labels).value
        medians.append(float(np.median(values)))
    if len(grid) > 1:
        increasing = all(b > a for a, b in zip(medians, medians[1:]))
        ratio = max(medians) / min(medians) if min(medians) > 0 else float("inf")
    else:
        increasing = None
        ratio = None
    return ScalingReport(
        n_grid=grid,
        medians=tuple(medians),
        reps=reps,
        strictly_increasing=increasing,
        max_min_ratio=ratio,
    )


@dataclass(frozen=True)
class CltReport:
    """Variance-halving check for the estimator at ``n`` versus ``2n``.

    When the statistic has a root-n limit away from independence,
    ``variance_ratio = var(n) / var(2n)`` should sit near 2.  When the
    mean estimate is within three standard errors of zero the sample
    looks independence-like and the ratio is flagged as not applicable.
    """

    n: int
    reps: int
    mean_estimate: float
    stderr: float
    variance_ratio: float
    h0_like: bool
    note: str


def clt_diagnostic(
    generator: Generator,
    n: int = 100,
    reps: int = 200,
    seed: int = 0,
) -> CltReport:
    """Compare estimator variance at ``n`` and ``2n`` over replicates."""
    if reps < MIN_CLT_REPS:
        raise InvalidReps(
            f"CLT diagnostic needs at least {MIN_CLT_REPS} replicates, got {reps}"
        )
    from .estimator import build_ranks

    values = {n: np.empty(reps), 2 * n: np.empty(reps)}
    for idx, size in enumerate((n, 2 * n)):
        for rep in range(reps):
            rep_seed = int(
                _substream(seed, idx * reps + rep).integers(0, 2**63, dtype=np.int64)
            )
            d, labels = generator(size, rep_seed)
            values[size][rep] = estimate_fast(build_ranks(d), labels).value
    var_small = float(values[n].var(ddof=1))
    var_large = float(values[2 * n].var(ddof=1))
    mean_estimate = float(values[n].mean())
    stderr = float(values[n].std(ddof=1) / np.sqrt(reps))
    ratio = var_small / var_large if var_large > 0 else float("inf")
    h0_like = mean_estimate < 3 * stderr
    note = (
        "independence-like sample, variance ratio not applicable"
        if h0_like
        else "variance ratio should sit near 2 under a root-n limit"
    )
    return CltReport(
        n=n,
        reps=reps,
        mean_estimate=mean_estimate,
        stderr=stderr,
        variance_ratio=ratio,
        h0_like=h0_like,
        note=note,
    )
