"""Reference competitors: distance covariance and the pairwise 2x2
chi-square test, adapted to a categorical second variable.

Categorical labels enter through the discrete metric
``d(y_i, y_j) = I(y_i != y_j)``, so both statistics accept ordinary
distance matrices on each side and plug into the shared label
permutation machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeMismatch, TooFewSamples
from .estimator import LabelVector, RankStructure
from .metrics import DistanceMatrix


@dataclass(frozen=True)
class BaselineStatistic:
    name: str
    value: float
    n: int


def discrete_label_distances(labels: LabelVector) -> DistanceMatrix:
    """The 0/1 discrete metric on label codes."""
    codes = labels.codes
    out = (codes[:, None] != codes[None, :]).astype(np.float64)
    return DistanceMatrix(out)


def double_center(values: np.ndarray) -> np.ndarray:
    """Subtract row and column means and add back the grand mean."""
    mu_rows = values.mean(axis=1, keepdims=True)
    mu_cols = values.mean(axis=0, keepdims=True)
    mu = values.mean()
    return values - mu_rows - mu_cols + mu


def dcov_statistic(dx: DistanceMatrix, dy: DistanceMatrix) -> BaselineStatistic:
    """Squared distance covariance, V-statistic form.

    The mean of the elementwise product of the two double-centred
    distance matrices, ``(1/n^2) sum_{ij} A_ij B_ij``.
    """
    if dx.n != dy.n:
        raise SizeMismatch(f"distance matrices disagree: {dx.n} vs {dy.n}")
    a = double_center(dx.values)
    b = double_center(dy.values)
    return BaselineStatistic(name="dcov", value=float(np.mean(a * b)), n=dx.n)


def _chi_square_sum(n11, r1, c1, m):
    """Summed Pearson chi-squares of 2x2 tables with the given counts.

    Tables have ``m`` units, first-row margin ``r1``, first-column
    margin ``c1`` and top-left cell ``n11``; a zero margin contributes
    zero.
    """
    n12 = r1 - n11
    n21 = c1 - n11
    n22 = m - r1 - c1 + n11
    det = n11 * n22 - n12 * n21
    den = r1 * (m - r1) * c1 * (m - c1)
    valid = den > 0
    num = np.zeros_like(den, dtype=np.float64)
    np.divide(
        m * det.astype(np.float64) ** 2,
        den.astype(np.float64),
        out=num,
        where=valid,
    )
    return float(num.sum())


def hhg_statistic(dx: DistanceMatrix, dy: DistanceMatrix) -> BaselineStatistic:
    """Sum of pairwise 2x2 chi-square statistics.

    For each ordered pair ``(i, j)`` with ``i != j`` the remaining
    ``n - 2`` observations are cross-classified by
    ``I(d_x(i, k) <= d_x(i, j))`` and ``I(d_y(i, k) <= d_y(i, j))``;
    the Pearson chi-squares of those tables are summed.
    """
    if dx.n != dy.n:
        raise SizeMismatch(f"distance matrices disagree: {dx.n} vs {dy.n}")
    n = dx.n
    if n < 3:
        raise TooFewSamples(f"pairwise chi-square needs n >= 3, got {n}")
    m = n - 2
    total = 0.0
    for i in range(n):
        a = dx.values[i]
        b = dy.values[i]
        in_x = a[None, :] <= a[:, None]
        in_y = b[None, :] <= b[:, None]
        # k = i and k = j always satisfy both memberships, so dropping
        # them removes exactly 2 from each count.
        n11 = (in_x & in_y).sum(axis=1) - 2
        r1 = in_x.sum(axis=1) - 2
        c1 = in_y.sum(axis=1) - 2
        keep = np.ones(n, dtype=bool)
        keep[i] = False
        total += _chi_square_sum(n11[keep], r1[keep], c1[keep], m)
    return BaselineStatistic(name="hhg", value=total, n=n)


def hhg_statistic_discrete(
    ranks: RankStructure, codes: np.ndarray, counts: np.ndarray
) -> float:
    """Fast path of :func:`hhg_statistic` when ``dy`` is the discrete metric.

    Under the discrete metric only ordered pairs with ``y_i == y_j``
    produce a table without a zero margin, and for those pairs every
    count is a ball count already held by the rank structure.  Each
    table's chi-square matches the general routine exactly (the grand
    total differs only by float summation order); each call is
    O(R n^2), which is what makes label permutations affordable.
    """
    n = ranks.n
    if n < 3:
        raise TooFewSamples(f"pairwise chi-square needs n >= 3, got {n}")
    m = n - 2
    self_pos = ranks.order == np.arange(n)[:, None]
    pos = ranks.sorted_counts - 1
    total = 0.0
    for r in range(counts.size):
        rows = np.flatnonzero(codes == r)
        if rows.size == 0:
            continue
        member_sorted = codes[ranks.order[rows]] == r
        cum = np.cumsum(member_sorted, axis=1, dtype=np.int64)
        n11 = np.take_along_axis(cum, pos[rows], axis=1) - 2
        r1 = ranks.sorted_counts[rows] - 2
        c1 = int(counts[r]) - 2
        keep = member_sorted & ~self_pos[rows]
        total += _chi_square_sum(n11[keep], r1[keep], c1, m)
    return total
