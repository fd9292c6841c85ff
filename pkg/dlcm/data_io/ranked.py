"""
Fixed-size top-n input lists for re-ranking
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core.errors import ContractError
from .letor import QueryGroup


@dataclass(frozen=True)
class RankedInput:
    """Top-n slice of a query's initial ranking.

    Slot i holds the document at initial rank i+1. Real documents occupy the
    first len(order) slots; the pad_count remaining slots are zero vectors.
    """

    query_group: QueryGroup
    order: np.ndarray
    initial_scores: np.ndarray
    n: int
    pad_count: int
    tail: np.ndarray

    @property
    def num_real(self) -> int:
        return len(self.order)

    @property
    def labels(self) -> np.ndarray:
        return self.query_group.labels[self.order]

    @property
    def mask(self) -> np.ndarray:
        """True for real slots, False for padding"""
        return np.arange(self.n) < self.num_real

    def padded_features(self) -> np.ndarray:
        g = self.query_group
        features = np.zeros((self.n, g.num_features), dtype=g.features.dtype)
        features[: self.num_real] = g.features[self.order]
        return features


def assemble_top_n(group: QueryGroup, scores: Sequence[float], n: int) -> RankedInput:
    """Stable sort by score (ties keep file order), keep the top n, pad the rest"""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (group.num_docs,):
        raise ContractError(
            f"query {group.query_id}: {len(scores)} scores for {group.num_docs} documents"
        )
    if n < 1:
        raise ContractError(f"list size n must be >= 1, got {n}")
    ranking = np.argsort(-scores, kind="stable")
    keep = min(n, group.num_docs)
    order = ranking[:keep]
    return RankedInput(
        query_group=group,
        order=order,
        initial_scores=scores[order],
        n=n,
        pad_count=max(0, n - group.num_docs),
        tail=ranking[keep:],
    )
