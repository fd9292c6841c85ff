"""
Attention rank: cross entropy between label attention and score attention,
both normalized through psi(x) = e^x for x > 0 and 0 otherwise.
"""
import numpy as np

from ..gradcore import Tensor, log, rectified_softmax, reduce_sum, softmax
from .base import LossInput, attached


def label_attention(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.float64)
    psi = np.where(labels > 0, np.exp(np.where(labels > 0, labels, 0.0)), 0.0)
    total = psi.sum()
    return psi / total if total > 0 else np.zeros_like(psi)


def attrank_loss(loss_input: LossInput, attn_softmax: bool = False) -> Tensor:
    """attn_softmax swaps psi-normalization of the scores for a plain softmax"""
    target = label_attention(loss_input.labels)
    scores = loss_input.scores
    attention = softmax(scores) if attn_softmax else rectified_softmax(scores)
    loss = -reduce_sum(Tensor(target) * log(attention) + Tensor(1.0 - target) * log(1.0 - attention))
    return attached(loss, scores)
