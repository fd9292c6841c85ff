# Listwise training objectives
from ..core.errors import ConfigError
from ..gradcore import Tensor
from .attrank import attrank_loss, label_attention
from .base import LossInput, discounts, gains, ideal_dcg
from .listmle import best_permutation, listmle_loss
from .softrank import (
    DEFAULT_SIGMA,
    pair_probabilities,
    softrank_loss,
    softrank_pair_prob,
    softrank_rank_dist,
)

LOSS_KINDS = ("listmle", "softrank", "attrank")


def compute_loss(kind: str, loss_input: LossInput, sigma: float = DEFAULT_SIGMA,
                 attn_softmax: bool = False) -> Tensor:
    if kind == "listmle":
        return listmle_loss(loss_input)
    if kind == "softrank":
        return softrank_loss(loss_input, sigma)
    if kind == "attrank":
        return attrank_loss(loss_input, attn_softmax)
    raise ConfigError(f"unknown loss kind '{kind}'")
