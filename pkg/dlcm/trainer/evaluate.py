"""
Re-ranking and evaluation of trained models
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Sequence

import numpy as np

from ..core import config
from ..core.errors import ConfigError, ContractError, CoverageError
from ..data_io import QueryGroup, RankedInput, assemble_top_n
from ..metrics import build_report, ndcg_at_k
from ..models import ReRanker, masked_scores
from ..schemas import EvalReport

logger = logging.getLogger(__name__)


def rerank(model: ReRanker, ranked: RankedInput) -> np.ndarray:
    """Full final order of document indices: re-ranked head, then the tail in initial order"""
    scores = masked_scores(ranked, model.score(ranked))[: ranked.num_real]
    # Slots are in initial order, so a stable sort breaks ties by initial rank
    head = ranked.order[np.argsort(-scores, kind="stable")]
    final = np.concatenate([head, ranked.tail])
    if not np.array_equal(np.sort(final), np.arange(ranked.query_group.num_docs)):
        raise ContractError(f"query {ranked.query_group.query_id}: re-ranking is not a permutation")
    return final


def initial_order(scores: np.ndarray) -> np.ndarray:
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


def rank_scores(order: np.ndarray) -> np.ndarray:
    """Scores that reproduce an order under a stable descending sort"""
    scores = np.empty(len(order), dtype=np.float64)
    scores[order] = np.arange(len(order), 0, -1, dtype=np.float64)
    return scores


def check_coverage(groups: List[QueryGroup], initial_scores: Dict[str, np.ndarray]) -> None:
    for group in groups:
        if group.query_id not in initial_scores:
            raise CoverageError(f"no initial scores for query '{group.query_id}'")


def assemble_all(groups: List[QueryGroup], initial_scores: Dict[str, np.ndarray], n: int) -> List[RankedInput]:
    check_coverage(groups, initial_scores)
    return [assemble_top_n(g, initial_scores[g.query_id], n) for g in groups]


def rerank_all(model: ReRanker, ranked_inputs: Sequence[RankedInput], threads: int = 1) -> Dict[str, np.ndarray]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            orders = list(pool.map(lambda r: rerank(model, r), ranked_inputs))
    else:
        orders = [rerank(model, r) for r in ranked_inputs]
    return {r.query_group.query_id: order for r, order in zip(ranked_inputs, orders)}


def mean_ndcg(model: ReRanker, ranked_inputs: Sequence[RankedInput], k: int = 10) -> float:
    """Mean NDCG@k of the full re-ranked lists"""
    values = [
        ndcg_at_k(r.query_group.labels[rerank(model, r)], k)
        for r in ranked_inputs
    ]
    return float(np.mean(values)) if values else 0.0


def check_dimensions(model: ReRanker, groups: List[QueryGroup]) -> None:
    for group in groups:
        if group.num_features != model.num_features:
            raise ConfigError(
                f"model expects {model.num_features} features, query '{group.query_id}' "
                f"has {group.num_features}"
            )


def evaluate_checkpoint(model: ReRanker, groups: List[QueryGroup], initial_scores: Dict[str, np.ndarray],
                        cutoffs: Sequence[int] = config.DEFAULT_CUTOFFS, threads: int = 1) -> EvalReport:
    """Re-rank every query's top-n and score the full resulting list"""
    report, _ = evaluate_with_orders(model, groups, initial_scores, cutoffs, threads)
    return report


def evaluate_with_orders(model: ReRanker, groups: List[QueryGroup], initial_scores: Dict[str, np.ndarray],
                         cutoffs: Sequence[int] = config.DEFAULT_CUTOFFS, threads: int = 1):
    check_dimensions(model, groups)
    ranked_inputs = assemble_all(groups, initial_scores, model.n)
    orders = rerank_all(model, ranked_inputs, threads)
    by_qid = {g.query_id: g for g in groups}
    report = build_report({qid: by_qid[qid].labels[order] for qid, order in orders.items()}, cutoffs)
    logger.info(f"evaluated {len(groups)} queries: ndcg@10 {report.aggregate.get('ndcg@10', float('nan')):.4f}")
    return report, orders


def baseline_orders(groups: List[QueryGroup], initial_scores: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    check_coverage(groups, initial_scores)
    return {g.query_id: initial_order(initial_scores[g.query_id]) for g in groups}


def baseline_report(groups: List[QueryGroup], initial_scores: Dict[str, np.ndarray],
                    cutoffs: Sequence[int] = config.DEFAULT_CUTOFFS) -> EvalReport:
    """Metrics of the initial ranking itself"""
    orders = baseline_orders(groups, initial_scores)
    by_qid = {g.query_id: g for g in groups}
    return build_report({qid: by_qid[qid].labels[order] for qid, order in orders.items()}, cutoffs)
