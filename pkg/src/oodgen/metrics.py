"""Distances and detector scores.

Sequence comparison uses classic dynamic time warping; set comparison
uses the empirical 1-Wasserstein distance under an exact optimal
assignment; detector quality uses AUROC (rank form), F1, and the
relative F1 ratio against a baseline detector. The all-pairs report
normalizes a symmetric distance matrix by its largest entry so tables
from different metrics are comparable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

from .errors import ValidationError
from .geometry import RandomStream
from .points import as_labels, as_point_set
from .synth import TimeSeriesSet

METRICS = ("dtw", "euclidean")


# ---------------------------------------------------------------------------
# dynamic time warping


def _as_sequence(data, name: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"{name} must be a numeric sequence ({exc})") from None
    if arr.ndim not in (1, 2):
        raise ValidationError(f"{name} must be 1- or 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must contain only finite values")
    return arr


def _dtw_rows(cost_rows) -> float:
    # Row-by-row dynamic program. Within a row the recurrence is
    # D[j] = min(base[j], D[j-1] + c[j]) with base[j] = c[j] + min over
    # the upper and diagonal predecessors; subtracting the running sum
    # S = cumsum(c) turns that into a prefix minimum, so each row is a
    # handful of vectorized passes instead of a scalar loop.
    prev = None
    for c in cost_rows:
        if prev is None:
            prev = np.cumsum(c)
            continue
        shifted = np.concatenate(([np.inf], prev[:-1]))
        base = c + np.minimum(prev, shifted)
        s = np.cumsum(c)
        prev = s + np.minimum.accumulate(base - s)
    return float(prev[-1])


def dtw_distance(a, b) -> float:
    """Dynamic time warping distance between two sequences.

    Full dynamic program over the |a| x |b| grid, anchored at both ends,
    each cell extending its best neighbor among (up, left, diagonal).
    Scalar sequences use |a_i - b_j| as local cost; sequences of vectors
    (equal feature dimension) use the pointwise Euclidean distance.
    Lengths may differ; there is no windowing or other approximation.
    """
    A = _as_sequence(a, "a")
    B = _as_sequence(b, "b")
    if A.ndim != B.ndim:
        raise ValidationError(f"a and b must have matching layout, got shapes {A.shape} and {B.shape}")
    if A.ndim == 1:
        rows = (np.abs(ai - B) for ai in A)
    else:
        if A.shape[1] != B.shape[1]:
            raise ValidationError(
                f"a and b must share the feature dimension, got {A.shape[1]} and {B.shape[1]}"
            )
        rows = (np.sqrt(np.sum((ai - B) ** 2, axis=1)) for ai in A)
    return _dtw_rows(rows)


def _dtw_all_pairs(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # Same recurrence and float order as _dtw_rows, run for all
    # (row of A, row of B) pairs at once on (nA, nB, t) slabs. Requires
    # equal-length scalar sequences, which is the batched report case.
    prev = None
    for i in range(A.shape[1]):
        c = np.abs(A[:, i, None, None] - B[None, :, :])
        if prev is None:
            prev = np.cumsum(c, axis=2)
            continue
        shifted = np.concatenate([np.full(c.shape[:2] + (1,), np.inf), prev[:, :, :-1]], axis=2)
        base = c + np.minimum(prev, shifted)
        s = np.cumsum(c, axis=2)
        prev = s + np.minimum.accumulate(base - s, axis=2)
    return prev[:, :, -1]


# ---------------------------------------------------------------------------
# set-to-set costs


@dataclass(frozen=True)
class CostMatrix:
    """All-pairs costs between the rows of two sets."""

    costs: np.ndarray  # (rows, cols), finite, >= 0
    metric: str = "dtw"

    def __post_init__(self):
        costs = as_point_set(self.costs, name="costs")
        if np.any(costs < 0):
            raise ValidationError("costs must be >= 0")
        object.__setattr__(self, "costs", costs)

    @property
    def shape(self):
        return self.costs.shape


def _as_matrix(data, name: str) -> np.ndarray:
    if isinstance(data, TimeSeriesSet):
        return data.series
    return as_point_set(data, name=name)


def pairwise_cost(set_a, set_b, metric: str = "dtw") -> CostMatrix:
    """Cost of every (row of set_a, row of set_b) pair under `metric`.

    "dtw" treats rows as equal-length scalar sequences; "euclidean"
    treats them as points.
    """
    A = _as_matrix(set_a, "set_a")
    B = _as_matrix(set_b, "set_b")
    if A.shape[1] != B.shape[1]:
        raise ValidationError(
            f"sets must share the row length, got {A.shape[1]} and {B.shape[1]}"
        )
    if metric == "dtw":
        costs = _dtw_all_pairs(A, B)
    elif metric == "euclidean":
        costs = cdist(A, B)
    else:
        raise ValidationError(f"metric must be one of {METRICS}, got {metric!r}")
    return CostMatrix(costs=costs, metric=metric)


def wasserstein_assignment(cost) -> float:
    """Empirical 1-Wasserstein distance between two equal-size sets.

    Both sets carry uniform weight, so the optimal transport plan is an
    optimal one-to-one assignment; the distance is that assignment's
    total cost divided by the set size. Accepts a CostMatrix or a square
    array; rectangular input is rejected because uniform weights need
    equal sizes (subsample the larger set first).
    """
    matrix = cost.costs if isinstance(cost, CostMatrix) else as_point_set(cost, name="cost")
    rows, cols = matrix.shape
    if rows != cols:
        raise ValidationError(
            f"cost matrix must be square, got {rows}x{cols}; "
            "subsample the larger set to the smaller size first"
        )
    if np.any(matrix < 0):
        raise ValidationError("costs must be >= 0")
    r, c = linear_sum_assignment(matrix)
    return float(matrix[r, c].sum() / rows)


@dataclass(frozen=True)
class DistanceReport:
    """Symmetric all-pairs distance table over named data sets."""

    dataset_ids: tuple  # names, in input order
    matrix: np.ndarray  # raw pairwise distances, zero diagonal
    normalized: np.ndarray  # matrix / max off-diagonal entry
    degenerate: bool  # True when every pairwise distance is zero
    metric: str
    subsample_size: int  # common size the sets were reduced to
    subsample_seed: int


def normalized_distance_report(datasets, metric: str = "dtw", dataset_ids=None,
                               subsample_size=None, subsample_seed: int = 0) -> DistanceReport:
    """Pairwise Wasserstein distances over two or more sets, normalized.

    Sets are first reduced to a common size: the smallest set size, or
    `subsample_size` if that is smaller still. Reduction draws rows
    without replacement from a stream derived from `subsample_seed` (one
    substream per set position), so the report is reproducible. Each
    unordered pair is computed once and mirrored; the diagonal is zero
    by definition. Entries are then divided by the largest distance in
    the table, so the maximum entry is exactly 1.0. If every distance is
    zero the table cannot be normalized; the raw zeros are returned with
    degenerate=True and a warning.
    """
    matrices = [_as_matrix(d, f"datasets[{i}]") for i, d in enumerate(datasets)]
    if len(matrices) < 2:
        raise ValidationError(f"need at least two datasets, got {len(matrices)}")
    if dataset_ids is None:
        dataset_ids = tuple(f"set{i}" for i in range(len(matrices)))
    else:
        dataset_ids = tuple(str(s) for s in dataset_ids)
        if len(dataset_ids) != len(matrices):
            raise ValidationError(
                f"got {len(dataset_ids)} ids for {len(matrices)} datasets"
            )
    widths = {m.shape[1] for m in matrices}
    if len(widths) != 1:
        raise ValidationError(f"datasets must share the row length, got {sorted(widths)}")

    common = min(m.shape[0] for m in matrices)
    if subsample_size is not None:
        if subsample_size < 1:
            raise ValidationError(f"subsample_size must be >= 1, got {subsample_size}")
        common = min(common, int(subsample_size))
    root = RandomStream(int(subsample_seed))
    reduced = []
    for i, m in enumerate(matrices):
        if m.shape[0] > common:
            idx = np.sort(root.substream(i).generator().choice(m.shape[0], size=common, replace=False))
            m = m[idx]
        reduced.append(m)

    count = len(reduced)
    matrix = np.zeros((count, count))
    for i in range(count):
        for j in range(i + 1, count):
            value = wasserstein_assignment(pairwise_cost(reduced[i], reduced[j], metric=metric))
            matrix[i, j] = matrix[j, i] = value

    peak = float(matrix.max())
    if peak > 0.0:
        normalized = matrix / peak
        degenerate = False
    else:
        warnings.warn("all pairwise distances are zero; normalization skipped", stacklevel=2)
        normalized = matrix.copy()
        degenerate = True
    return DistanceReport(
        dataset_ids=dataset_ids,
        matrix=matrix,
        normalized=normalized,
        degenerate=degenerate,
        metric=metric,
        subsample_size=common,
        subsample_seed=int(subsample_seed),
    )


# ---------------------------------------------------------------------------
# detector scores


def _scores_and_labels(scores, labels):
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1 or s.shape[0] == 0:
        raise ValidationError(f"scores must be a nonempty 1-d array, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValidationError("scores must be finite")
    y = as_labels(labels, count=s.shape[0])
    return s, y


def auroc(scores, labels) -> float:
    """Area under the ROC curve, positive class = label 1.

    Rank form of the Mann-Whitney statistic: the fraction of
    (positive, negative) pairs the score orders correctly, ties counted
    half. Requires both classes to be present.
    """
    s, y = _scores_and_labels(scores, labels)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("auroc needs at least one positive and one negative label")
    ranks = rankdata(s)
    u = float(ranks[y == 1].sum()) - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_points(scores, labels):
    """Operating points of the score sweep, for plotting.

    Returns (fpr, tpr, thresholds) where row i is the classifier
    "predict positive when score >= thresholds[i]", thresholds sweeping
    the distinct scores from high to low; a leading (0, 0) point with an
    infinite threshold is included.
    """
    s, y = _scores_and_labels(scores, labels)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("roc_points needs at least one positive and one negative label")
    order = np.argsort(-s, kind="stable")
    s = s[order]
    y = y[order]
    distinct = np.nonzero(np.diff(s))[0]
    cut = np.concatenate([distinct, [s.shape[0] - 1]])
    tp = np.cumsum(y == 1)[cut]
    fp = np.cumsum(y == 0)[cut]
    fpr = np.concatenate([[0.0], fp / n_neg])
    tpr = np.concatenate([[0.0], tp / n_pos])
    thresholds = np.concatenate([[np.inf], s[cut]])
    return fpr, tpr, thresholds


def f1_score(predictions, labels) -> float:
    """F1 of hard 0/1 predictions, positive class = label 1.

    2 TP / (2 TP + FP + FN). When the denominator is zero (no positives
    anywhere) the score is defined as 1.0 and a warning is issued.
    """
    p = as_labels(predictions, name="predictions")
    y = as_labels(labels, count=p.shape[0])
    tp = int(np.sum((p == 1) & (y == 1)))
    fp = int(np.sum((p == 1) & (y == 0)))
    fn = int(np.sum((p == 0) & (y == 1)))
    denom = 2 * tp + fp + fn
    if denom == 0:
        warnings.warn("no positive labels or predictions; F1 defined as 1.0", stacklevel=2)
        return 1.0
    return 2.0 * tp / denom


def f1_hat(f1_candidate: float, f1_baseline: float) -> float:
    """Relative F1 against a baseline: candidate / baseline - 1.

    Zero means the candidate matched the baseline detector; negative
    means it fell short. Undefined for a non-positive baseline.
    """
    if not np.isfinite(f1_candidate) or f1_candidate < 0:
        raise ValidationError(f"f1_candidate must be finite and >= 0, got {f1_candidate}")
    if not np.isfinite(f1_baseline) or f1_baseline <= 0:
        raise ValidationError(f"f1_baseline must be finite and > 0, got {f1_baseline}")
    return f1_candidate / f1_baseline - 1.0
