"""Estimating the number of clusters: BIC scores, split tests, and the CSV rule.

The BIC of a partition is the complete-data log-likelihood of the spherical
Gaussian mixture fitted to it, minus the Schwarz penalty
(param_count / 2) * log n with natural logs; larger is better. The free
parameters are k - 1 component probabilities, k * d centroid coordinates
and one shared variance.

The centroid scatter value (CSV) treats the current leaf centroids as data
vectors and takes their scatter; a divisive run stops once the CSV exceeds
the largest scatter of any single leaf, a dynamic threshold that needs no
preset cluster count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sgem
from .linalg import centroid, scatter_value
from .partition import Partition


def param_count(k: int, d: int) -> int:
    """Free parameters of a k-component spherical mixture in d dimensions."""
    if k < 1 or d < 1:
        raise ValueError("param_count needs k >= 1 and d >= 1")
    return (k - 1) + k * d + 1


@dataclass(frozen=True)
class BICScore:
    loglik: float
    param_count: int
    n: int

    @property
    def value(self) -> float:
        return self.loglik - (self.param_count / 2.0) * math.log(self.n)


def bic_score(partition: Partition, matrix) -> BICScore:
    """Fit the spherical model to a partition (one M-step) and score it.

    A fit whose shared variance collapses to the numerical floor (every
    cluster holds identical rows, e.g. all-singleton partitions) is a
    singular maximum-likelihood solution whose density blows up; it is
    scored -inf so model selection can never prefer it.
    """
    if np.any(partition.sizes() == 0):
        raise ValueError("bic_score requires nonempty clusters")
    n, d = matrix.shape
    model = sgem.m_step(partition, matrix)
    if model.sigma2 <= sgem.SIGMA2_FLOOR:
        return BICScore(-np.inf, param_count(partition.k, d), n)
    loglik = sgem.complete_log_likelihood(model, partition, matrix)
    return BICScore(loglik, param_count(partition.k, d), n)


def bic_split_test(
    parent_members: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    before: Partition,
    after: Partition,
    matrix,
) -> bool:
    """Accept a candidate split only if local AND global BIC strictly improve.

    Local: the parent's rows scored as one cluster versus as the two
    children. Global: the full leaf partition before versus after the
    split. Equal scores reject.
    """
    parent_members = np.asarray(parent_members, dtype=np.intp)
    sub = matrix[parent_members]
    local_before = bic_score(Partition(np.zeros(parent_members.size, dtype=np.int64), 1), sub)

    pos = {int(doc): p for p, doc in enumerate(parent_members)}
    local_labels = np.empty(parent_members.size, dtype=np.int64)
    for doc in np.asarray(left).ravel():
        local_labels[pos[int(doc)]] = 0
    for doc in np.asarray(right).ravel():
        local_labels[pos[int(doc)]] = 1
    local_after = bic_score(Partition(local_labels, 2), sub)

    if not local_after.value > local_before.value:
        return False
    global_before = bic_score(before, matrix)
    global_after = bic_score(after, matrix)
    return global_after.value > global_before.value


def csv(tree) -> float:
    """Scatter of the leaf centroids treated as data vectors."""
    leaves = tree.leaves()
    centers = np.stack([leaf.stats.centroid for leaf in leaves])
    return scatter_value(centers, centroid(centers), tree.scatter_mode)


def csv_stop(tree) -> bool:
    """True once the CSV exceeds the maximum leaf scatter (never at one leaf)."""
    leaves = tree.leaves()
    if len(leaves) < 2:
        return False
    return csv(tree) > max(leaf.scatter for leaf in leaves)
