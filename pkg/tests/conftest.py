"""Shared helpers: random instances and an exact rational reference
evaluation of the statistic."""

from fractions import Fraction

import numpy as np

from mddtest import (
    LabelVector,
    PointSet,
    euclidean_distances,
    shape_distances,
    sphere_distances,
)


def random_labels(rng, n, R):
    # redraw until every class appears; LabelVector rejects empty classes
    while True:
        codes = rng.integers(0, R, size=n)
        if np.bincount(codes, minlength=R).min() > 0:
            return LabelVector.from_codes(codes.astype(np.int64), R)


def random_distances(rng, n, kind="euclidean", ties=False):
    if kind == "sphere":
        raw = rng.standard_normal((n, 3))
        raw /= np.sqrt((raw * raw).sum(axis=1, keepdims=True))
        return sphere_distances(PointSet.sphere(raw))
    if kind == "shape":
        return shape_distances(PointSet.shape(rng.standard_normal((n, 4, 2))))
    if ties:
        # small integer grid coordinates force many tied and zero distances
        pts = rng.integers(0, 3, size=(n, 2)).astype(np.float64)
    else:
        pts = rng.standard_normal((n, 3))
    return euclidean_distances(PointSet.euclidean(pts))


def exact_statistic(values, codes, R, include_diagonal=True):
    """Quadruple-loop evaluation of the definition over Fractions.

    Only comparisons touch the distances, so the result is an exact
    rational for any float input.
    """
    n = len(codes)
    counts = [sum(1 for c in codes if c == r) for r in range(R)]
    per_class = []
    for r in range(R):
        acc = Fraction(0)
        for i in range(n):
            for j in range(n):
                if not include_diagonal and i == j:
                    continue
                ball = [k for k in range(n) if values[i][k] <= values[i][j]]
                f_all = Fraction(len(ball), n)
                f_r = Fraction(sum(1 for k in ball if codes[k] == r), counts[r])
                acc += (f_r - f_all) ** 2
        per_class.append(Fraction(counts[r], n) * acc / n**2)
    return sum(per_class), per_class
