"""
Synthetic ranking corpora with known generating utilities.

Grades are cut from a latent utility v relative to the best document in
the same query: ratio = v / max(v) thresholded at 0.6/0.75/0.85/0.95.

* context corpus: the feature driving v (x0 or x1) is chosen per query and
  only revealed by the distribution of x2 across the query's documents
  (skewed high for x0-queries, skewed low for x1-queries). A pointwise
  scorer sees one x2 value and cannot tell reliably which feature matters.
* global corpus: v is one fixed positive linear function of all features.
"""
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .letor import QueryGroup

GRADE_CUTS = np.array([0.6, 0.75, 0.85, 0.95])


@dataclass
class SyntheticCorpus:
    groups: List[QueryGroup]
    utilities: Dict[str, np.ndarray]


def grade_relative_to_max(utility: np.ndarray) -> np.ndarray:
    ratio = utility / max(float(utility.max()), 1e-12)
    return np.searchsorted(GRADE_CUTS, ratio, side="right").astype(np.int64)


def _assemble(features: List[np.ndarray], utilities: List[np.ndarray]) -> SyntheticCorpus:
    groups = []
    utility_map = {}
    for index, (x, v) in enumerate(zip(features, utilities)):
        qid = f"q{index}"
        doc_ids = [f"{qid}-d{j}" for j in range(len(v))]
        groups.append(QueryGroup(qid, doc_ids, x, grade_relative_to_max(v)))
        utility_map[qid] = v
    return SyntheticCorpus(groups, utility_map)


def generate_context_corpus(num_queries: int = 2000, docs_per_query: int = 20,
                            num_features: int = 10, seed: int = 0) -> SyntheticCorpus:
    if num_features < 3:
        raise ValueError("the context corpus needs at least 3 features")
    rng = np.random.default_rng(seed)
    features, utilities = [], []
    for _ in range(num_queries):
        x = rng.uniform(0.0, 1.0, size=(docs_per_query, num_features))
        u = rng.uniform(0.0, 1.0, size=docs_per_query)
        driver = int(rng.integers(0, 2))
        x[:, 2] = 1.0 - u * u if driver == 0 else u * u
        features.append(x)
        utilities.append(x[:, driver].copy())
    return _assemble(features, utilities)


def generate_global_corpus(num_queries: int = 2000, docs_per_query: int = 20,
                           num_features: int = 10, seed: int = 0) -> SyntheticCorpus:
    rng = np.random.default_rng(seed)
    weights = rng.uniform(0.2, 1.0, size=num_features)
    weights /= weights.sum()
    features, utilities = [], []
    for _ in range(num_queries):
        x = rng.uniform(0.0, 1.0, size=(docs_per_query, num_features))
        features.append(x)
        utilities.append(x @ weights)
    return _assemble(features, utilities)


def split_corpus(groups: List[QueryGroup], fractions: Tuple[float, float] = (0.6, 0.2)
                 ) -> Tuple[List[QueryGroup], List[QueryGroup], List[QueryGroup]]:
    """Contiguous train/valid/test split; the test split takes the remainder"""
    train_end = int(round(len(groups) * fractions[0]))
    valid_end = train_end + int(round(len(groups) * fractions[1]))
    return groups[:train_end], groups[train_end:valid_end], groups[valid_end:]


def oracle_scores(corpus: SyntheticCorpus, groups: List[QueryGroup]) -> Dict[str, np.ndarray]:
    """Bayes-optimal re-ranking scores: the latent utility itself"""
    return {g.query_id: corpus.utilities[g.query_id].copy() for g in groups}
