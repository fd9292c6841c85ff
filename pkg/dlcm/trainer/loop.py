"""
SGD training of re-rankers over sampled query batches.

Each iteration samples batch_size training queries with replacement,
averages the listwise loss over their top-n lists, clips the global
gradient norm and takes one SGD step. An epoch is ceil(queries/batch_size)
iterations; when an epoch's mean loss exceeds the previous epoch's, the
learning rate is multiplied by the decay factor. The parameters with the
best validation NDCG@10 are kept.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..core.errors import ConfigError, NumericError, TrainingError
from ..data_io import QueryGroup, RankedInput
from ..gradcore import Graph, backward, global_norm, global_norm_clip
from ..losses import LossInput, compute_loss
from ..models import ModelParams, ReRanker, build_model
from ..metrics import ndcg_at_k
from ..schemas import HistoryRecord, LossKind, TrainConfig
from .evaluate import assemble_all, mean_ndcg

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

HISTORY_COLUMNS = ["epoch", "iterations", "train_loss", "lr", "valid_ndcg10", "max_grad_norm", "seconds"]


@dataclass
class TrainState:
    params: ModelParams
    lr: float
    iteration: int = 0
    epoch: int = 0
    increases: int = 0
    last_epoch_loss: Optional[float] = None
    best_val_ndcg10: float = -math.inf
    best_params: Optional[ModelParams] = None
    stale_epochs: int = 0
    rng: np.random.Generator = field(default_factory=np.random.default_rng)


@dataclass
class TrainResult:
    model: ReRanker
    history: List[HistoryRecord]
    best_val_ndcg10: float
    initial_val_ndcg10: float


def batch_loss(model: ReRanker, batch: Sequence[RankedInput], config: TrainConfig):
    """Mean loss over a batch of lists, recorded on the active graph"""
    total = None
    for ranked in batch:
        loss_input = LossInput.from_ranked(ranked, model.score(ranked))
        loss = compute_loss(config.loss_kind.value, loss_input, config.sigma, config.attn_softmax)
        total = loss if total is None else total + loss
    return total * (1.0 / len(batch))


def sgd_step(params: ModelParams, lr: float, clip_norm: float) -> float:
    """Clip the accumulated gradients and apply params <- params - lr * grad; returns the applied norm"""
    clipped = global_norm_clip(params.grads(), clip_norm)
    params.apply_update(clipped, lr)
    return global_norm(clipped)


def train_step(model: ReRanker, batch: Sequence[RankedInput], config: TrainConfig, lr: float):
    model.params.zero_grad()
    try:
        with Graph():
            loss = batch_loss(model, batch, config)
            backward(loss)
        value = loss.item()
        if not math.isfinite(value):
            raise NumericError(f"loss evaluated to {value}")
    except NumericError as e:
        qids = [ranked.query_group.query_id for ranked in batch]
        logger.error(f"non-finite training step; batch qids: {qids}")
        raise TrainingError(f"{e.detail}; offending batch qids: {qids}")
    return value, sgd_step(model.params, lr, config.clip_norm)


def live_lists(model: ReRanker, ranked_inputs: Sequence[RankedInput]) -> Tuple[int, int]:
    """Lists with some positive real score, and with some negative one"""
    positive = negative = 0
    for ranked in ranked_inputs:
        scores = model.score(ranked).data[: ranked.num_real]
        positive += bool(np.any(scores > 0))
        negative += bool(np.any(scores < 0))
    return positive, negative


def orient_output(model: ReRanker, ranked_inputs: Sequence[RankedInput]) -> bool:
    """Negate the output layer when that leaves more lists with a positive score.

    Under psi attention a list whose scores are all non-positive has zero
    gradient. Returns whether the model was flipped.
    """
    positive, negative = live_lists(model, ranked_inputs)
    if negative <= positive or not model.output_params():
        return False
    model.flip_output()
    logger.info(f"output layer negated: {negative} of {len(ranked_inputs)} lists now have a positive score")
    return True


def initial_list_ndcg(ranked_inputs: Sequence[RankedInput], k: int = 10) -> float:
    """Mean NDCG@k of the initial lists themselves"""
    values = [
        ndcg_at_k(r.query_group.labels[np.concatenate([r.order, r.tail])], k)
        for r in ranked_inputs
    ]
    return float(np.mean(values)) if values else 0.0


def starting_candidate(model: ReRanker, valid_inputs: Sequence[RankedInput]) -> Tuple[ModelParams, float, float]:
    """Best parameters before training: the model as initialized, or all zeros
    (the initial list) when that validates at least as well.

    Returns (params, their valid NDCG@10, the initialized model's valid NDCG@10).
    """
    model_ndcg = mean_ndcg(model, valid_inputs, 10)
    list_ndcg = initial_list_ndcg(valid_inputs, 10)
    if list_ndcg >= model_ndcg:
        return model.params.zeroed(), list_ndcg, model_ndcg
    return model.params.copy(), model_ndcg, model_ndcg


def _check_inputs(train_groups: List[QueryGroup], valid_groups: List[QueryGroup]) -> int:
    if not train_groups:
        raise ConfigError("training split has no queries")
    if not valid_groups:
        raise ConfigError("validation split has no queries")
    widths = {g.num_features for g in train_groups} | {g.num_features for g in valid_groups}
    if len(widths) != 1:
        raise ConfigError(f"train and valid splits disagree on feature count: {sorted(widths)}")
    return widths.pop()


def train(config: TrainConfig, train_groups: List[QueryGroup], valid_groups: List[QueryGroup],
          initial_scores: Dict[str, np.ndarray], history_path: Optional[PathLike] = None,
          model: Optional[ReRanker] = None) -> TrainResult:
    """Train a re-ranker on the top-n lists given by initial_scores"""
    num_features = _check_inputs(train_groups, valid_groups)
    if model is None:
        model = build_model(config.model_kind.value, num_features, config.n, config.hidden,
                            config.beta, config.k, config.seed)
    train_inputs = assemble_all(train_groups, initial_scores, model.n)
    valid_inputs = assemble_all(valid_groups, initial_scores, model.n)

    state = TrainState(
        params=model.params,
        lr=config.lr0,
        rng=np.random.default_rng([config.seed, 1]),
    )
    if config.loss_kind == LossKind.ATTRANK and not config.attn_softmax:
        orient_output(model, train_inputs)
    state.best_params, state.best_val_ndcg10, initial_ndcg = starting_candidate(model, valid_inputs)
    iters_per_epoch = math.ceil(len(train_inputs) / config.batch_size)
    logger.info(
        f"training {model.kind}/{config.loss_kind.value}: {model.params.count()} parameters, "
        f"{len(train_inputs)} queries, {iters_per_epoch} iterations per epoch, "
        f"initial valid ndcg@10 {initial_ndcg:.4f}"
    )

    history: List[HistoryRecord] = []
    started = time.perf_counter()
    while state.iteration < config.max_iters:
        state.epoch += 1
        losses = []
        max_norm = 0.0
        for _ in range(min(iters_per_epoch, config.max_iters - state.iteration)):
            picks = state.rng.integers(0, len(train_inputs), size=config.batch_size)
            loss, norm = train_step(model, [train_inputs[i] for i in picks], config, state.lr)
            losses.append(loss)
            max_norm = max(max_norm, norm)
            state.iteration += 1
        epoch_loss = float(np.mean(losses))
        lr_used = state.lr
        if state.last_epoch_loss is not None and epoch_loss > state.last_epoch_loss:
            state.increases += 1
            state.lr = config.lr0 * config.decay ** state.increases
            logger.info(f"epoch {state.epoch}: loss rose to {epoch_loss:.5f}, lr decayed to {state.lr:.5g}")
        state.last_epoch_loss = epoch_loss

        valid_ndcg = mean_ndcg(model, valid_inputs, 10)
        if valid_ndcg > state.best_val_ndcg10:
            state.best_val_ndcg10 = valid_ndcg
            state.best_params = model.params.copy()
            state.stale_epochs = 0
        else:
            state.stale_epochs += 1
        history.append(HistoryRecord(
            epoch=state.epoch, iterations=state.iteration, train_loss=epoch_loss, lr=lr_used,
            valid_ndcg10=valid_ndcg, max_grad_norm=max_norm, seconds=time.perf_counter() - started,
        ))
        logger.info(
            f"epoch {state.epoch} ({state.iteration} iters): loss {epoch_loss:.5f}, "
            f"valid ndcg@10 {valid_ndcg:.4f}, best {state.best_val_ndcg10:.4f}"
        )
        if config.patience is not None and state.stale_epochs >= config.patience:
            logger.info(f"early stop after {state.stale_epochs} epochs without validation gain")
            break

    if history_path is not None:
        write_history(history, history_path)
    return TrainResult(model.with_params(state.best_params), history, state.best_val_ndcg10, initial_ndcg)


def history_frame(history: List[HistoryRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.model_dump() for record in history], columns=HISTORY_COLUMNS)


def write_history(history: List[HistoryRecord], path: PathLike) -> None:
    history_frame(history).to_csv(path, sep="\t", index=False)


def read_history(path: PathLike) -> List[HistoryRecord]:
    frame = pd.read_csv(path, sep="\t")
    return [HistoryRecord(**row) for row in frame.to_dict(orient="records")]
