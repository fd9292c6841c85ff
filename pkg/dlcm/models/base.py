"""
Common interface of the re-ranking models
"""
from typing import Dict, List, Sequence

import numpy as np

from ..data_io import RankedInput
from ..gradcore import Tensor
from .params import ModelParams

PAD_SCORE = -np.inf


class ReRanker:
    """A scoring model over fixed-size top-n lists"""

    kind = "base"

    def __init__(self, num_features: int, n: int, params: ModelParams,
                 hidden: Sequence[int] = (), beta: int = 0, k: int = 1):
        self.num_features = num_features
        self.n = n
        self.params = params
        self.hidden: List[int] = list(hidden)
        self.beta = beta
        self.k = k

    def score(self, ranked: RankedInput) -> Tensor:
        raise NotImplementedError

    def hyper(self) -> Dict[str, object]:
        return {
            "model_kind": self.kind,
            "num_features": self.num_features,
            "n": self.n,
            "hidden": list(self.hidden),
            "beta": self.beta,
            "k": self.k,
        }

    def inputs(self, ranked: RankedInput) -> Tensor:
        return Tensor(ranked.padded_features())

    def output_params(self) -> List[str]:
        """Parameters whose negation negates every score"""
        return []

    def flip_output(self) -> None:
        for name in self.output_params():
            tensor = self.params[name]
            tensor.data = -tensor.data

    def with_params(self, params: ModelParams) -> "ReRanker":
        return type(self)(self.num_features, self.n, params, hidden=self.hidden, beta=self.beta, k=self.k)

    def initial_list(self) -> "ReRanker":
        """All-zero parameters: every slot ties, so re-ranking keeps the initial order"""
        return self.with_params(self.params.zeroed())


def masked_scores(ranked: RankedInput, scores: Tensor) -> np.ndarray:
    """Scores as a plain array with padded slots set to -inf"""
    values = scores.data.astype(np.float64)
    return np.where(ranked.mask, values, PAD_SCORE)
