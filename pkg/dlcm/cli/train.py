"""
train: fit a re-ranker on top-n lists of the initial ranking
"""
import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ..core.errors import UsageError
from ..data_io import QueryGroup, load_external_scores
from ..losses import LOSS_KINDS
from ..models import MODEL_CLASSES, linear_train, save_checkpoint
from ..schemas import ModelKind, TrainConfig
from ..trainer import train
from .common import (
    BUILTIN_SCORES,
    add_common,
    add_flag,
    add_switch,
    load_scores,
    load_split,
    parse_int_list,
    registered_run,
)

logger = logging.getLogger(__name__)

MODEL_CHECKPOINT = "model.ckpt.json"
HISTORY_FILE = "history.tsv"

# Flags mapped onto TrainConfig fields
CONFIG_FLAGS = {
    "n": "n",
    "beta": "beta",
    "k": "k",
    "batch_size": "batch_size",
    "lr0": "lr0",
    "decay": "decay",
    "clip_norm": "clip_norm",
    "max_iters": "max_iters",
    "sigma": "sigma",
    "patience": "patience",
}
DLCM_ONLY_FLAGS = ("beta", "k")


def add_train_flags(parser: argparse.ArgumentParser) -> None:
    add_flag(parser, "--train", required=True, help="Training split (LETOR)")
    add_flag(parser, "--valid", required=True, help="Validation split (LETOR)")
    add_flag(parser, "--scores", BUILTIN_SCORES,
             help="'builtin' to train the linear initial ranker, or a directory/file of initial scores")
    add_flag(parser, "--model", ModelKind.DLCM.value, choices=sorted(MODEL_CLASSES))
    add_flag(parser, "--loss", "attrank", choices=LOSS_KINDS)
    add_flag(parser, "--n", None, int, help="Re-ranked list size")
    add_flag(parser, "--beta", None, int, help="Input abstraction width (dlcm only)")
    add_flag(parser, "--k", None, int, help="Local ranking function width (dlcm only)")
    add_flag(parser, "--hidden", None, help="Comma-separated hidden widths (dnn/lidnn only)")
    add_flag(parser, "--batch-size", None, int)
    add_flag(parser, "--lr0", None, float, help="Initial learning rate")
    add_flag(parser, "--decay", None, float, help="Learning-rate decay on epoch loss increase")
    add_flag(parser, "--clip-norm", None, float)
    add_flag(parser, "--max-iters", None, int)
    add_flag(parser, "--sigma", None, float, help="SoftRank score noise")
    add_flag(parser, "--patience", None, int, help="Stop after this many epochs without validation gain")
    add_switch(parser, "--attn-softmax", help="AttRank model attention via softmax instead of psi")
    add_switch(parser, "--desk", help="Desk-scale profile: batch 16, n 10")


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="Train a re-ranker")
    add_common(parser)
    add_train_flags(parser)
    parser.set_defaults(handler=run)


def config_from_args(args: argparse.Namespace, **overrides) -> TrainConfig:
    """Resolve flags into a validated TrainConfig; explicit values win over the desk profile"""
    given = {field: getattr(args, flag) for flag, field in CONFIG_FLAGS.items() if getattr(args, flag) is not None}
    given.update(overrides)
    if args.model != ModelKind.DLCM.value:
        conflicting = [f"--{flag}" for flag in DLCM_ONLY_FLAGS if flag in given]
        if conflicting:
            raise UsageError(f"{', '.join(conflicting)} only apply to --model dlcm, not --model {args.model}")
    if args.hidden is not None:
        if args.model == ModelKind.DLCM.value:
            raise UsageError("--hidden applies to --model dnn or lidnn only")
        given["hidden"] = parse_int_list(args.hidden)
    values = dict(given, model_kind=args.model, loss_kind=args.loss, seed=args.seed,
                  attn_softmax=args.attn_softmax)
    try:
        return TrainConfig.desk(**values) if args.desk else TrainConfig(**values)
    except ValidationError as e:
        raise UsageError(f"invalid training configuration: {e}")


def initial_scores_for(args: argparse.Namespace, splits: Dict[str, List[QueryGroup]]) -> Dict[str, np.ndarray]:
    """Initial scores for every split: the builtin linear ranker fit on 'train', or score files"""
    scores: Dict[str, np.ndarray] = {}
    if args.scores == BUILTIN_SCORES:
        ranker = linear_train(splits["train"], seed=args.seed)
        for groups in splits.values():
            scores.update(ranker.score_groups(groups))
        return scores
    if Path(args.scores).is_file():
        # One file covering every split
        return load_external_scores(args.scores, [g for groups in splits.values() for g in groups])
    for name, groups in splits.items():
        scores.update(load_scores(args.scores, name, groups))
    return scores


def load_training_data(args: argparse.Namespace, extra: Optional[Dict[str, str]] = None
                       ) -> Tuple[Dict[str, List[QueryGroup]], Dict[str, np.ndarray]]:
    """Parse train/valid (plus extra named splits at the training width) and their initial scores"""
    normalize = not args.no_normalize
    train_groups = load_split(args.train, normalize)
    width = train_groups[0].num_features
    splits = {"train": train_groups, "valid": load_split(args.valid, normalize, width)}
    for name, path in (extra or {}).items():
        splits[name] = load_split(path, normalize, width)
    return splits, initial_scores_for(args, splits)


def run(args: argparse.Namespace) -> None:
    train_config = config_from_args(args)
    scores_input = None if args.scores == BUILTIN_SCORES else args.scores
    with registered_run("train", args, [args.train, args.valid, scores_input]) as handle:
        handle.manifest.config["train_config"] = train_config.model_dump(mode="json")
        splits, scores = load_training_data(args)
        result = train(train_config, splits["train"], splits["valid"], scores, history_path=handle.path(HISTORY_FILE))
        save_checkpoint(handle.path(MODEL_CHECKPOINT), result.model)
        handle.record_values("valid", {
            "ndcg@10": result.best_val_ndcg10,
            "initial_ndcg@10": result.initial_val_ndcg10,
        })
        print(
            f"✅ valid ndcg@10 {result.initial_val_ndcg10:.4f} -> {result.best_val_ndcg10:.4f} "
            f"after {result.history[-1].iterations if result.history else 0} iterations"
        )
