"""
Linear pairwise-hinge initial ranker
"""
import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from ..core.errors import TrainingError, NO_DISCORDANT_PAIRS
from ..data_io import QueryGroup

logger = logging.getLogger(__name__)


@dataclass
class LinearRanker:
    w: np.ndarray

    @property
    def num_features(self) -> int:
        return len(self.w)

    def score(self, features: np.ndarray) -> np.ndarray:
        return features @ self.w

    def score_groups(self, groups: List[QueryGroup]) -> Dict[str, np.ndarray]:
        return {g.query_id: self.score(g.features) for g in groups}


def discordant_pairs(labels: np.ndarray) -> np.ndarray:
    """All (better, worse) index pairs with strictly different labels"""
    better, worse = np.nonzero(labels[:, None] > labels[None, :])
    return np.stack([better, worse], axis=1)


def hinge_gradient(w: np.ndarray, diffs: np.ndarray, margin: float) -> np.ndarray:
    """Mean gradient of max(0, margin - w.(x+ - x-)) over pair differences"""
    active = margin - diffs @ w > 0
    if not np.any(active):
        return np.zeros_like(w)
    return -diffs[active].sum(axis=0) / len(diffs)


def hinge_loss(w: np.ndarray, diffs: np.ndarray, margin: float) -> float:
    return float(np.maximum(0.0, margin - diffs @ w).mean())


def linear_train(groups: List[QueryGroup], epochs: int = 20, lr: float = 0.1, margin: float = 1.0,
                 pairs_per_query: int = 32, seed: int = 0) -> LinearRanker:
    """SGD on the pairwise hinge loss, one update per query per epoch"""
    rng = np.random.default_rng(seed)
    pair_sets = [(g, discordant_pairs(g.labels)) for g in groups]
    pair_sets = [(g, pairs) for g, pairs in pair_sets if len(pairs)]
    if not pair_sets:
        raise TrainingError(NO_DISCORDANT_PAIRS)
    w = np.zeros(groups[0].num_features, dtype=np.float64)
    for epoch in range(epochs):
        losses = []
        for index in rng.permutation(len(pair_sets)):
            group, pairs = pair_sets[index]
            if len(pairs) > pairs_per_query:
                pairs = pairs[rng.choice(len(pairs), size=pairs_per_query, replace=False)]
            diffs = group.features[pairs[:, 0]] - group.features[pairs[:, 1]]
            losses.append(hinge_loss(w, diffs, margin))
            w -= lr * hinge_gradient(w, diffs, margin)
        logger.info(f"linear ranker epoch {epoch + 1}/{epochs}: hinge loss {np.mean(losses):.4f}")
    return LinearRanker(w)
