"""
sweep: metric versus one hyper-parameter, all others fixed
"""
import argparse
import logging
from typing import List

import pandas as pd

from ..core.errors import UsageError
from ..trainer import evaluate_checkpoint, train
from .common import add_common, add_flag, parse_int_list, registered_run
from .train import add_train_flags, config_from_args, load_training_data

logger = logging.getLogger(__name__)

SWEEP_FILE = "sweep.tsv"
SWEEP_PARAMS = {"n": "n", "beta": "beta", "k": "k", "iters": "max_iters"}


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="Train and evaluate over a range of one hyper-parameter")
    add_common(parser)
    add_train_flags(parser)
    add_flag(parser, "--param", required=True, choices=sorted(SWEEP_PARAMS))
    add_flag(parser, "--range", required=True, help="Inclusive range START..STOP")
    add_flag(parser, "--step", 1, int)
    add_flag(parser, "--test", required=True, help="Split to evaluate each setting on (LETOR)")
    add_flag(parser, "--cutoffs", "1,3,5,10")
    parser.set_defaults(handler=run)


def sweep_values(raw: str, step: int) -> List[int]:
    """START..STOP inclusive in steps of step"""
    start, sep, stop = raw.partition("..")
    try:
        start, stop = int(start), int(stop)
    except ValueError:
        raise UsageError(f"--range expects START..STOP, got '{raw}'")
    if not sep or step < 1 or stop < start:
        raise UsageError(f"--range {raw} with --step {step} is empty")
    return list(range(start, stop + 1, step))


def run(args: argparse.Namespace) -> None:
    values = sweep_values(args.range, args.step)
    field = SWEEP_PARAMS[args.param]
    configs = [config_from_args(args, **{field: value}) for value in values]
    cutoffs = parse_int_list(args.cutoffs)
    with registered_run("sweep", args, [args.train, args.valid, args.test]) as handle:
        splits, scores = load_training_data(args, extra={"test": args.test})

        rows = []
        for value, train_config in zip(values, configs):
            logger.info(f"sweep {args.param}={value}")
            result = train(train_config, splits["train"], splits["valid"], scores)
            report = evaluate_checkpoint(result.model, splits["test"], scores, cutoffs, args.threads)
            row = {"param": args.param, "value": value, "valid_ndcg10": result.best_val_ndcg10}
            row.update(report.aggregate)
            rows.append(row)
            print(f"✅ {args.param}={value}: test ndcg@10 {report.aggregate.get('ndcg@10', float('nan')):.4f}")
        pd.DataFrame(rows).to_csv(handle.path(SWEEP_FILE), sep="\t", index=False, float_format="%.6f")
