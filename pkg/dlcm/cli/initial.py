"""
initial: train the linear pairwise ranker and score every split
"""
import argparse

from ..metrics import write_aggregate, write_report
from ..models import linear_train, load_checkpoint, save_checkpoint
from ..data_io import write_scores
from ..trainer import baseline_report
from .common import (
    SPLITS,
    add_common,
    add_flag,
    load_split,
    parse_int_list,
    registered_run,
    scores_file,
    split_paths,
)

LINEAR_CHECKPOINT = "linear.ckpt.json"
BASELINE_REPORT = "baseline.tsv"
BASELINE_AGGREGATE = "baseline.aggregate.tsv"


def register(subparsers) -> None:
    parser = subparsers.add_parser("initial", help="Initial ranking with the linear pairwise ranker")
    add_common(parser)
    add_flag(parser, "--train", required=True, help="Training split (LETOR)")
    add_flag(parser, "--valid", required=True, help="Validation split (LETOR)")
    add_flag(parser, "--test", required=True, help="Test split (LETOR)")
    add_flag(parser, "--epochs", 20, int)
    add_flag(parser, "--lr", 0.1, float)
    add_flag(parser, "--cutoffs", "1,3,5,10")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> None:
    cutoffs = parse_int_list(args.cutoffs)
    normalize = not args.no_normalize
    with registered_run("initial", args, split_paths(args, SPLITS)) as handle:
        train_groups = load_split(args.train, normalize)
        width = train_groups[0].num_features
        splits = {
            "train": train_groups,
            "valid": load_split(args.valid, normalize, width),
            "test": load_split(args.test, normalize, width),
        }
        fitted = linear_train(train_groups, epochs=args.epochs, lr=args.lr, seed=args.seed)
        save_checkpoint(handle.path(LINEAR_CHECKPOINT), fitted)
        # Scores come from the float32 weights as persisted
        ranker = load_checkpoint(handle.path(LINEAR_CHECKPOINT))
        for name, groups in splits.items():
            write_scores(handle.path(scores_file(name)), groups, ranker.score_groups(groups))

        report = baseline_report(splits["test"], ranker.score_groups(splits["test"]), cutoffs)
        write_report(report, handle.path(BASELINE_REPORT))
        write_aggregate(report, handle.path(BASELINE_AGGREGATE), label="linear")
        handle.record("test", report)
        print(f"✅ initial ranker test ndcg@10 {report.aggregate.get('ndcg@10', float('nan')):.4f}")
