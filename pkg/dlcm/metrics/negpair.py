"""
Negative-pair analysis of re-ranking.

NP(d) counts documents ranked above d with a strictly lower label; the
reduction of d is NP under the baseline minus NP under the model.
"""
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from ..core.errors import ContractError

PERFECT_LABEL = 4

AVERAGING_NOTE = (
    "NegPair values are averaged over documents within each query first, "
    "then over queries (micro-then-macro weighting)."
)


@dataclass
class NegPairResult:
    labels: np.ndarray
    baseline_np: np.ndarray
    model_np: np.ndarray

    @property
    def reduction(self) -> np.ndarray:
        return self.baseline_np - self.model_np

    def by_label(self) -> Dict[int, float]:
        """Mean reduction per label within this query"""
        return {
            int(label): float(self.reduction[self.labels == label].mean())
            for label in np.unique(self.labels)
        }


def negative_pairs(ranking: Sequence[int], labels: np.ndarray) -> np.ndarray:
    """NP per document index for one ranking (a permutation of document indices)"""
    counts = np.zeros(len(labels), dtype=np.int64)
    ranked_labels = labels[np.asarray(ranking)]
    for position, doc in enumerate(ranking):
        counts[doc] = int(np.sum(ranked_labels[:position] < labels[doc]))
    return counts


def negpair_analysis(baseline_ranks: Sequence[int], model_ranks: Sequence[int], labels: Sequence[int]) -> NegPairResult:
    labels = np.asarray(labels, dtype=np.int64)
    size = len(labels)
    for name, ranking in (("baseline", baseline_ranks), ("model", model_ranks)):
        if sorted(int(d) for d in ranking) != list(range(size)):
            raise ContractError(f"{name} ranking is not a permutation of {size} documents")
    return NegPairResult(labels, negative_pairs(baseline_ranks, labels), negative_pairs(model_ranks, labels))


def _macro(values: List[float]) -> float:
    return float(np.mean(values)) if values else 0.0


def reduction_by_label(results: Dict[str, NegPairResult]) -> Dict[int, float]:
    """Mean reduction per label: within query first, then across the queries having that label"""
    per_label: Dict[int, List[float]] = defaultdict(list)
    for result in results.values():
        for label, value in result.by_label().items():
            per_label[label].append(value)
    return {label: _macro(values) for label, values in sorted(per_label.items())}


@dataclass
class BucketRow:
    perfect_count: int
    num_queries: int
    mean_reduction: float
    mean_baseline_np: float

    @property
    def proportion(self) -> float:
        """Reduction relative to the baseline NP"""
        return self.mean_reduction / self.mean_baseline_np if self.mean_baseline_np else 0.0


def bucket_by_perfect_count(results: Dict[str, NegPairResult]) -> List[BucketRow]:
    """Group queries by their number of perfect documents; queries with none are skipped"""
    buckets: Dict[int, List[NegPairResult]] = defaultdict(list)
    for result in results.values():
        perfect = int(np.sum(result.labels == PERFECT_LABEL))
        if perfect:
            buckets[perfect].append(result)
    rows = []
    for count, members in sorted(buckets.items()):
        reductions = [float(r.reduction[r.labels == PERFECT_LABEL].mean()) for r in members]
        baselines = [float(r.baseline_np[r.labels == PERFECT_LABEL].mean()) for r in members]
        rows.append(BucketRow(count, len(members), _macro(reductions), _macro(baselines)))
    return rows
