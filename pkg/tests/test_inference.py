import numpy as np
import pytest

from conftest import random_distances, random_labels

from mddtest import (
    DegenerateLabelsWarning,
    InvalidB,
    InvalidReps,
    LabelVector,
    OutOfRangePValue,
    PointSet,
    bh_adjust,
    build_ranks,
    clt_diagnostic,
    draw_label_permutations,
    estimate_fast,
    euclidean_distances,
    fresh_seed,
    permutation_test,
    permutation_test_statistic,
    pvalue_from_null,
    scaling_diagnostic,
)


def test_pvalue_from_null_worked_example():
    null = np.array([1.0, 2.0, 3.0, 4.0])
    assert pvalue_from_null(2.5, null) == 0.6
    assert pvalue_from_null(5.0, null) == 0.2
    assert pvalue_from_null(0.0, null) == 1.0
    # ties on the observed value count toward the numerator
    assert pvalue_from_null(4.0, null) == 0.4
    with pytest.raises(InvalidB):
        pvalue_from_null(1.0, np.array([]))


def test_constant_statistic_gives_p_one():
    labels = LabelVector.from_codes(np.array([0, 1, 0, 1, 1, 0]))
    result = permutation_test_statistic(lambda codes: 1.0, labels, permutations=19, seed=3)
    assert result.p_value == 1.0
    assert result.statistic == 1.0
    assert result.scaled == 6.0


def test_single_class_labels_warn_and_p_is_one():
    rng = np.random.default_rng(0)
    d = random_distances(rng, 8)
    labels = LabelVector.from_codes(np.zeros(8, dtype=np.int64))
    with pytest.warns(DegenerateLabelsWarning):
        result = permutation_test(build_ranks(d), labels, permutations=19, seed=1)
    assert result.statistic == 0.0
    assert result.p_value == 1.0


def test_permutation_test_reports_and_determinism():
    rng = np.random.default_rng(5)
    d = random_distances(rng, 20)
    labels = random_labels(rng, 20, 3)
    ranks = build_ranks(d)
    a = permutation_test(ranks, labels, permutations=99, seed=42, retain_null=True)
    b = permutation_test(ranks, labels, permutations=99, seed=42, retain_null=True)
    assert a.statistic == estimate_fast(ranks, labels).value
    assert a.scaled == 20 * a.statistic
    assert a.per_class == estimate_fast(ranks, labels).per_class
    assert a.permutations == 99 and a.seed == 42
    assert a.n == 20 and a.num_classes == 3 and a.method == "permutation"
    assert 1.0 / 100.0 <= a.p_value <= 1.0
    assert a.p_value == b.p_value
    assert np.array_equal(a.null_stats, b.null_stats)
    assert not a.null_stats.flags.writeable
    c = permutation_test(ranks, labels, permutations=99, seed=43, retain_null=True)
    assert not np.array_equal(a.null_stats, c.null_stats)
    assert permutation_test(ranks, labels, permutations=99, seed=42).null_stats is None


def test_permutation_rows_extend_with_the_count():
    five = draw_label_permutations(12, 5, seed=7)
    ten = draw_label_permutations(12, 10, seed=7)
    # replicate b depends on the seed and b alone, not on the total count
    assert np.array_equal(five, ten[:5])
    for row in ten:
        assert np.array_equal(np.sort(row), np.arange(12))
    with pytest.raises(InvalidB):
        draw_label_permutations(12, 0, seed=7)


def test_null_statistics_match_direct_reestimation():
    rng = np.random.default_rng(9)
    d = random_distances(rng, 15)
    labels = random_labels(rng, 15, 3)
    ranks = build_ranks(d)
    result = permutation_test(ranks, labels, permutations=20, seed=11, retain_null=True)
    perms = draw_label_permutations(15, 20, seed=11)
    for b in range(20):
        relabeled = LabelVector.from_codes(labels.codes[perms[b]], 3)
        assert abs(result.null_stats[b] - estimate_fast(ranks, relabeled).value) <= 1e-15


def test_permutation_pvalues_are_superuniform_under_independence():
    rng = np.random.default_rng(12)
    hits = 0
    reps = 500
    for rep in range(reps):
        d = random_distances(rng, 12)
        labels = random_labels(rng, 12, 2)
        result = permutation_test(
            build_ranks(d), labels, permutations=19, seed=int(rng.integers(2**62))
        )
        if result.p_value <= 0.05:
            hits += 1
    # true rate is at most 0.05; 0.08 sits three sigmas above it
    assert hits / reps <= 0.08


def test_bh_adjust_worked_examples():
    adj = bh_adjust([0.01, 0.02, 0.03, 0.04])
    assert np.allclose(adj, 0.04, atol=1e-12)
    assert np.array_equal(bh_adjust([1.0, 1.0]), [1.0, 1.0])
    assert bh_adjust([0.2]) == [0.2]
    spread = bh_adjust([0.001, 0.02, 0.9])
    assert np.allclose(spread, [0.003, 0.03, 0.9], atol=1e-12)


def test_bh_adjust_properties():
    rng = np.random.default_rng(13)
    raw = rng.uniform(size=40)
    adj = bh_adjust(raw)
    assert np.all(adj >= raw - 1e-15)
    assert np.all(adj <= 1.0)
    # adjustment never reorders evidence
    order = np.argsort(raw)
    assert np.all(np.diff(adj[order]) >= -1e-15)
    p = rng.permutation(40)
    assert np.array_equal(bh_adjust(raw[p]), adj[p])


def test_bh_adjust_matches_step_up_decisions():
    rng = np.random.default_rng(17)
    for level in (0.05, 0.1, 0.25):
        raw = rng.uniform(size=25) ** 2
        adj = bh_adjust(raw)
        order = np.argsort(raw)
        m = raw.size
        passing = [
            k for k in range(1, m + 1) if raw[order[k - 1]] <= level * k / m
        ]
        cutoff = max(passing) if passing else 0
        rejected = np.zeros(m, dtype=bool)
        rejected[order[:cutoff]] = True
        assert np.array_equal(adj <= level, rejected)


def test_bh_adjust_rejects_bad_input():
    for bad in ([], [1.2], [-0.1], [np.nan]):
        with pytest.raises(OutOfRangePValue):
            bh_adjust(bad)


def gaussian_pair(n, seed, gap=1.0):
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, 2, size=n)
    while np.bincount(codes, minlength=2).min() == 0:
        codes = rng.integers(0, 2, size=n)
    pts = rng.standard_normal((n, 2)) + gap * codes[:, None]
    return euclidean_distances(PointSet.euclidean(pts)), LabelVector.from_codes(codes)


def test_scaling_diagnostic_shape_and_validation():
    report = scaling_diagnostic(gaussian_pair, n_grid=(16, 32), reps=20, seed=1)
    assert report.n_grid == (16, 32)
    assert len(report.medians) == 2
    assert all(m > 0 for m in report.medians)
    assert report.reps == 20
    assert report.strictly_increasing in (True, False)
    assert report.max_min_ratio >= 1.0
    single = scaling_diagnostic(gaussian_pair, n_grid=(16,), reps=20, seed=1)
    assert single.strictly_increasing is None and single.max_min_ratio is None
    with pytest.raises(InvalidReps):
        scaling_diagnostic(gaussian_pair, n_grid=(16, 32), reps=19)
    with pytest.raises(InvalidReps):
        scaling_diagnostic(gaussian_pair, n_grid=(), reps=20)


def test_scaling_diagnostic_is_deterministic():
    a = scaling_diagnostic(gaussian_pair, n_grid=(16, 24), reps=20, seed=5)
    b = scaling_diagnostic(gaussian_pair, n_grid=(16, 24), reps=20, seed=5)
    assert a == b


def mostly_degenerate_pair(n, seed):
    # all-equal points give a zero statistic, so over many replicates the
    # mean lands within a few standard errors of zero and trips the flag
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, 2, size=n)
    while np.bincount(codes, minlength=2).min() == 0:
        codes = rng.integers(0, 2, size=n)
    if rng.random() < 0.97:
        pts = np.zeros((n, 2))
    else:
        pts = rng.standard_normal((n, 2))
    return euclidean_distances(PointSet.euclidean(pts)), LabelVector.from_codes(codes)


def test_clt_diagnostic_flags_signal_and_null():
    strong = clt_diagnostic(lambda n, s: gaussian_pair(n, s, gap=2.0), n=24, reps=100, seed=2)
    assert strong.n == 24 and strong.reps == 100
    assert not strong.h0_like
    assert strong.variance_ratio > 0
    assert strong.mean_estimate > 0
    # independent labels put the estimator in its 1/n regime, so the
    # variance ratio rises toward 4 and leaves the root-n band; the mean
    # stays a positive bias term, many standard errors above zero
    null = clt_diagnostic(lambda n, s: gaussian_pair(n, s, gap=0.0), n=24, reps=100, seed=2)
    assert not null.h0_like
    assert null.variance_ratio > 2.8
    degenerate = clt_diagnostic(mostly_degenerate_pair, n=10, reps=100, seed=2)
    assert degenerate.h0_like
    assert "not applicable" in degenerate.note
    with pytest.raises(InvalidReps):
        clt_diagnostic(gaussian_pair, n=24, reps=99)


def test_fresh_seed_range_and_variability():
    seeds = {fresh_seed() for _ in range(8)}
    assert all(0 <= s < 2**63 for s in seeds)
    assert len(seeds) > 1


def test_invalid_permutation_count():
    rng = np.random.default_rng(21)
    d = random_distances(rng, 6)
    labels = random_labels(rng, 6, 2)
    with pytest.raises(InvalidB):
        permutation_test(build_ranks(d), labels, permutations=0, seed=1)
