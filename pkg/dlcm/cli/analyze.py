"""
analyze: NegPair comparison of two runs' final rankings on one split
"""
import argparse
from pathlib import Path

import pandas as pd

from ..core.errors import ConfigError
from ..data_io import load_external_scores
from ..metrics import AVERAGING_NOTE, bucket_by_perfect_count, negpair_analysis, reduction_by_label
from ..trainer import initial_order
from .common import add_common, add_flag, load_split, registered_run, resolve_run, scores_file
from .evaluate import RUN_SCORES

BY_LABEL_FILE = "negpair_by_label.tsv"
BUCKETS_FILE = "negpair_buckets.tsv"


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="NegPair analysis of a model run against a baseline run")
    add_common(parser)
    add_flag(parser, "--baseline-run", required=True, help="Baseline run directory, score file or run id")
    add_flag(parser, "--model-run", required=True, help="Model run directory, score file or run id")
    add_flag(parser, "--data", required=True, help="Split both runs ranked (LETOR)")
    add_flag(parser, "--split", "test")
    parser.set_defaults(handler=run)


def run_scores_path(ref: str, split: str) -> Path:
    """A run's final ranking: eval output first, then the initial scores of the split"""
    path = resolve_run(ref)
    if path.is_file():
        return path
    for name in (RUN_SCORES, scores_file(split)):
        if (path / name).is_file():
            return path / name
    raise ConfigError(f"{path}: no {RUN_SCORES} or {scores_file(split)} in run directory")


def run(args: argparse.Namespace) -> None:
    with registered_run("analyze", args, [args.data]) as handle:
        groups = load_split(args.data, not args.no_normalize)
        baseline = load_external_scores(run_scores_path(args.baseline_run, args.split), groups)
        model = load_external_scores(run_scores_path(args.model_run, args.split), groups)
        results = {
            g.query_id: negpair_analysis(initial_order(baseline[g.query_id]), initial_order(model[g.query_id]), g.labels)
            for g in groups
        }

        by_label = pd.DataFrame(
            [{"label": label, "mean_reduction": value} for label, value in reduction_by_label(results).items()],
            columns=["label", "mean_reduction"],
        )
        buckets = pd.DataFrame(
            [{
                "perfect_count": row.perfect_count,
                "num_queries": row.num_queries,
                "mean_reduction": row.mean_reduction,
                "mean_baseline_np": row.mean_baseline_np,
                "proportion": row.proportion,
            } for row in bucket_by_perfect_count(results)],
            columns=["perfect_count", "num_queries", "mean_reduction", "mean_baseline_np", "proportion"],
        )
        by_label.to_csv(handle.path(BY_LABEL_FILE), sep="\t", index=False, float_format="%.6f")
        buckets.to_csv(handle.path(BUCKETS_FILE), sep="\t", index=False, float_format="%.6f")
        print(by_label.to_string(index=False))
        print(buckets.to_string(index=False))
        print(f"ℹ️ {AVERAGING_NOTE}")
