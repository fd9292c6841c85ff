# Scoring models
from typing import Sequence

import numpy as np

from ..core.errors import ConfigError
from .base import PAD_SCORE, ReRanker, masked_scores
from .dlcm import (
    DlcmRanker,
    abstraction_forward,
    dlcm_forward,
    dlcm_score,
    gru_encode,
    init_dlcm_params,
    local_ranking,
)
from .dnn import DnnRanker, dnn_score, init_dnn_params
from .lidnn import LidnnRanker, init_lidnn_params, lidnn_forward, lidnn_score
from .linear import LinearRanker, linear_train
from .params import ModelParams

MODEL_CLASSES = {
    DnnRanker.kind: DnnRanker,
    LidnnRanker.kind: LidnnRanker,
    DlcmRanker.kind: DlcmRanker,
}


def build_model(kind: str, num_features: int, n: int, hidden: Sequence[int] = (64,),
                beta: int = 0, k: int = 1, seed: int = 0) -> ReRanker:
    """Freshly initialized re-ranker of the given kind"""
    rng = np.random.default_rng(seed)
    if kind == DnnRanker.kind:
        return DnnRanker.create(num_features, n, hidden, rng)
    if kind == LidnnRanker.kind:
        return LidnnRanker.create(num_features, n, hidden, rng)
    if kind == DlcmRanker.kind:
        return DlcmRanker.create(num_features, n, beta, k, rng)
    raise ConfigError(f"unknown model kind '{kind}'")


from .checkpoint import checkpoint_of, load_checkpoint, save_checkpoint  # noqa: E402
