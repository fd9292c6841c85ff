"""
Loss inputs restricted to real documents
"""
from dataclasses import dataclass

import numpy as np

from ..core.errors import ContractError
from ..data_io import RankedInput
from ..gradcore import Tensor, reduce_sum


@dataclass
class LossInput:
    scores: Tensor
    labels: np.ndarray
    initial_order: np.ndarray

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.initial_order = np.asarray(self.initial_order, dtype=np.int64)
        if self.scores.ndim != 1 or self.scores.shape[0] < 1:
            raise ContractError(f"loss scores must be a non-empty vector, got shape {self.scores.shape}")
        if len(self.labels) != self.scores.shape[0] or len(self.initial_order) != self.scores.shape[0]:
            raise ContractError("loss scores, labels and initial_order disagree in length")

    @property
    def size(self) -> int:
        return self.scores.shape[0]

    @classmethod
    def from_ranked(cls, ranked: RankedInput, scores: Tensor) -> "LossInput":
        """Drop padded slots; slots are already in initial-list order"""
        m = ranked.num_real
        real = scores if m == scores.shape[0] else scores[np.arange(m)]
        return cls(real, ranked.labels, np.arange(m))


def gains(labels: np.ndarray) -> np.ndarray:
    return np.power(2.0, labels) - 1.0


def discounts(m: int) -> np.ndarray:
    """1 / log2(r + 1) for ranks r = 1..m"""
    return 1.0 / np.log2(np.arange(2, m + 2, dtype=np.float64))


def ideal_dcg(labels: np.ndarray) -> float:
    ordered = np.sort(labels)[::-1]
    return float(np.sum(gains(ordered) * discounts(len(ordered))))


def attached(value: Tensor, scores: Tensor) -> Tensor:
    """Keep a constant-valued loss on the graph so backward yields zero gradients"""
    if value.requires_grad or not scores.requires_grad:
        return value
    return value + reduce_sum(scores) * 0.0
