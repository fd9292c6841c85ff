"""
SoftRank: Gaussian score noise -> pairwise win probabilities -> per-document
rank distributions -> expected NDCG.
"""
import math
from typing import Optional

import numpy as np

from ..gradcore import Tensor, matmul, normal_cdf, reduce_sum, reshape, transpose
from .base import LossInput, attached, discounts, gains, ideal_dcg

DEFAULT_SIGMA = 0.1


def softrank_pair_prob(score_i, score_j, sigma: float = DEFAULT_SIGMA) -> Tensor:
    """Pr(S_i' > S_j') for S' ~ N(S, sigma^2) independently"""
    return normal_cdf((score_i - score_j) * (1.0 / (sigma * math.sqrt(2.0))))


def pair_probabilities(scores: Tensor, sigma: float = DEFAULT_SIGMA) -> Tensor:
    """[m x m] matrix with entry (i, j) = pi_ij"""
    m = scores.shape[0]
    rows = np.arange(m * m)
    differences = np.zeros((m * m, m))
    differences[rows, rows // m] += 1.0
    differences[rows, rows % m] -= 1.0
    diffs = reshape(matmul(Tensor(differences), scores), (m, m))
    return softrank_pair_prob(diffs, 0.0, sigma)


def softrank_rank_dist(scores: Tensor, sigma: float = DEFAULT_SIGMA,
                       fold_order: Optional[np.ndarray] = None) -> Tensor:
    """Rank distribution p[j][r] (documents x ranks, rank 0 is the top).

    Every document starts as a point mass on rank 0; the other documents are
    folded in one at a time in fold_order (default: list order). Folding in
    document i shifts each j != i down one rank with probability pi_ij.
    """
    m = scores.shape[0]
    if fold_order is None:
        fold_order = np.arange(m)
    if m == 1:
        return attached(Tensor(np.ones((1, 1))), scores)
    pi = pair_probabilities(scores, sigma)
    shift = np.eye(m, k=-1)
    # ranks x documents
    dist = np.zeros((m, m))
    dist[0, :] = 1.0
    q = Tensor(dist)
    for i in fold_order:
        keep = np.ones(m)
        keep[i] = 0.0
        beaten = pi[int(i)] * keep
        q = matmul(Tensor(shift), q) * beaten + q * (1.0 - beaten)
    return transpose(q)


def softrank_loss(loss_input: LossInput, sigma: float = DEFAULT_SIGMA) -> Tensor:
    """Negative expected NDCG; 0 when the ideal DCG is 0"""
    labels = loss_input.labels
    ideal = ideal_dcg(labels)
    if ideal == 0.0:
        return attached(Tensor(0.0), loss_input.scores)
    fold_order = np.argsort(loss_input.initial_order, kind="stable")
    dist = softrank_rank_dist(loss_input.scores, sigma, fold_order)
    expected_discount = matmul(dist, Tensor(discounts(len(labels))))
    expected_dcg = reduce_sum(expected_discount * Tensor(gains(labels)))
    return expected_dcg * (-1.0 / ideal)
