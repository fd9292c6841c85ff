"""
ListMLE: negative log-likelihood of the best permutation under sequential selection
"""
import numpy as np

from ..gradcore import Tensor, logsumexp, reduce_sum
from .base import LossInput, attached


def best_permutation(labels: np.ndarray, initial_order: np.ndarray) -> np.ndarray:
    """Labels descending, ties by initial order ascending"""
    return np.lexsort((initial_order, -labels))


def listmle_loss(loss_input: LossInput) -> Tensor:
    m = loss_input.size
    perm = best_permutation(loss_input.labels, loss_input.initial_order)
    ordered = loss_input.scores[perm]
    terms = [logsumexp(ordered[np.arange(i, m)]) for i in range(m - 1)]
    if not terms:
        return attached(Tensor(0.0), loss_input.scores)
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    # The last selection has probability 1 and contributes nothing
    return total - reduce_sum(ordered[np.arange(m - 1)])
