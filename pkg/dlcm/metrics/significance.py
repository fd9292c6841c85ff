"""
Paired Fisher randomization test over per-query metric values
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import numpy as np

from ..core.errors import ContractError

CHUNK = 10000
TOLERANCE = 1e-12


def _paired_differences(a: Dict[str, float], b: Dict[str, float]) -> np.ndarray:
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))[:3]
        only_b = sorted(set(b) - set(a))[:3]
        raise ContractError(f"query sets differ (only in a: {only_a}, only in b: {only_b})")
    if len(a) < 2:
        raise ContractError(f"need at least 2 queries, got {len(a)}")
    qids = sorted(a)
    return np.array([a[q] - b[q] for q in qids], dtype=np.float64)


def _count_extreme(diffs: np.ndarray, observed: float, permutations: int, seed_seq: np.random.SeedSequence) -> int:
    rng = np.random.default_rng(seed_seq)
    count = 0
    remaining = permutations
    while remaining > 0:
        size = min(CHUNK, remaining)
        signs = rng.integers(0, 2, size=(size, len(diffs))) * 2 - 1
        stats = np.abs(signs @ diffs) / len(diffs)
        count += int(np.sum(stats >= observed - TOLERANCE))
        remaining -= size
    return count


def fisher_randomization(a: Dict[str, float], b: Dict[str, float], permutations: int = 100000,
                         seed: int = 0, workers: int = 1) -> float:
    """Two-sided p-value (count + 1) / (permutations + 1).

    Each permutation swaps a query's pair with probability 0.5. Work is
    split into `workers` shards with seeds spawned from `seed`; the shard
    layout depends only on `workers`, so p(a, b) == p(b, a).
    """
    diffs = _paired_differences(a, b)
    observed = abs(diffs.mean())
    shards = max(1, workers)
    sizes = [permutations // shards + (1 if i < permutations % shards else 0) for i in range(shards)]
    seeds = np.random.SeedSequence(seed).spawn(shards)
    if shards == 1:
        count = _count_extreme(diffs, observed, sizes[0], seeds[0])
    else:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            count = sum(pool.map(lambda args: _count_extreme(diffs, observed, *args), zip(sizes, seeds)))
    return (count + 1) / (permutations + 1)


def fisher_exact(a: Dict[str, float], b: Dict[str, float], max_queries: int = 20) -> float:
    """Exact randomization p-value by enumerating every swap pattern"""
    diffs = _paired_differences(a, b)
    if len(diffs) > max_queries:
        raise ContractError(f"exhaustive enumeration limited to {max_queries} queries, got {len(diffs)}")
    observed = abs(diffs.mean())
    total = 2 ** len(diffs)
    bits = np.arange(len(diffs))
    count = 0
    for start in range(0, total, CHUNK):
        patterns = np.arange(start, min(start + CHUNK, total))
        signs = 1 - 2 * ((patterns[:, None] >> bits) & 1)
        stats = np.abs(signs @ diffs) / len(diffs)
        count += int(np.sum(stats >= observed - TOLERANCE))
    return count / total


def compare_metrics(report_values: Dict[str, Dict[str, float]], baseline_values: Dict[str, Dict[str, float]],
                    permutations: int = 100000, seed: int = 0, workers: int = 1,
                    metrics: Optional[List[str]] = None) -> Dict[str, float]:
    """p-value per metric name; inputs map metric -> qid -> value"""
    names = metrics or sorted(report_values)
    return {
        name: fisher_randomization(report_values[name], baseline_values[name], permutations, seed, workers)
        for name in names
    }
