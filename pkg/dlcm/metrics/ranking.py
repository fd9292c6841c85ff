"""
Graded ranking metrics at a cutoff
"""
import math
from typing import Sequence

ERR_MAX_GRADE = 4


def dcg_at_k(ranked_labels: Sequence[int], k: int) -> float:
    return sum((2.0 ** g - 1.0) / math.log2(r + 2) for r, g in enumerate(ranked_labels[:k]))


def ndcg_at_k(ranked_labels: Sequence[int], k: int) -> float:
    """DCG@k over the ideal DCG@k; 0 when the ideal is 0"""
    if k < 1:
        raise ValueError(f"cutoff must be >= 1, got {k}")
    labels = [int(g) for g in ranked_labels]
    ideal = dcg_at_k(sorted(labels, reverse=True), k)
    if ideal == 0.0:
        return 0.0
    return dcg_at_k(labels, k) / ideal


def err_at_k(ranked_labels: Sequence[int], k: int, max_grade: int = ERR_MAX_GRADE) -> float:
    """Expected reciprocal rank with R(g) = (2^g - 1) / 2^max_grade"""
    if k < 1:
        raise ValueError(f"cutoff must be >= 1, got {k}")
    score = 0.0
    not_stopped = 1.0
    for r, g in enumerate(ranked_labels[:k], start=1):
        stop = (2.0 ** int(g) - 1.0) / 2.0 ** max_grade
        score += not_stopped * stop / r
        not_stopped *= 1.0 - stop
    return score
