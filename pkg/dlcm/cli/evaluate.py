"""
eval: score a checkpoint on a split, optionally against a baseline report
"""
import argparse
from pathlib import Path

from ..core import config
from ..core.errors import ConfigError, UsageError
from ..data_io import write_scores
from ..metrics import (
    attach_significance,
    build_report,
    read_report,
    render_table,
    results_table,
    write_aggregate,
    write_report,
)
from ..models import LinearRanker, load_checkpoint
from ..trainer import evaluate_with_orders, initial_order, rank_scores
from .common import add_common, add_flag, load_scores, load_split, parse_int_list, registered_run, resolve_run
from .initial import BASELINE_REPORT

REPORT_FILE = "report.tsv"
AGGREGATE_FILE = "aggregate.tsv"
RUN_SCORES = "run.scores.tsv"


def register(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="Evaluate a checkpoint")
    add_common(parser)
    add_flag(parser, "--checkpoint", required=True)
    add_flag(parser, "--data", required=True, help="Split to evaluate (LETOR)")
    add_flag(parser, "--scores", None,
             help="Initial score file, or a directory holding <split>.scores.tsv; not used by linear checkpoints")
    add_flag(parser, "--split", "test", help="Split name used to pick <split>.scores.tsv from a directory")
    add_flag(parser, "--cutoffs", "1,3,5,10")
    add_flag(parser, "--baseline-report", None, help="Report TSV, run directory or run id to test against")
    add_flag(parser, "--permutations", config.DEFAULT_PERMUTATIONS, int)
    add_flag(parser, "--label", None, help="Row label in the results table")
    parser.set_defaults(handler=run)


def baseline_report_path(ref: str) -> Path:
    path = resolve_run(ref)
    if path.is_file():
        return path
    for name in (REPORT_FILE, BASELINE_REPORT):
        if (path / name).is_file():
            return path / name
    raise ConfigError(f"{path}: no {REPORT_FILE} or {BASELINE_REPORT} in run directory")


def run(args: argparse.Namespace) -> None:
    cutoffs = parse_int_list(args.cutoffs)
    with registered_run("eval", args, [args.checkpoint, args.data, args.scores]) as handle:
        model = load_checkpoint(args.checkpoint)
        groups = load_split(args.data, not args.no_normalize, model.num_features)
        if isinstance(model, LinearRanker):
            orders = {g.query_id: initial_order(model.score(g.features)) for g in groups}
            report = build_report({g.query_id: g.labels[orders[g.query_id]] for g in groups}, cutoffs)
        else:
            if not args.scores:
                raise UsageError(f"--scores is required to evaluate a {model.kind} checkpoint")
            scores = load_scores(args.scores, args.split, groups)
            report, orders = evaluate_with_orders(model, groups, scores, cutoffs, args.threads)

        systems = {}
        if args.baseline_report:
            baseline = read_report(baseline_report_path(args.baseline_report))
            report = attach_significance(report, baseline, args.permutations, args.seed, args.threads)
            systems["baseline"] = baseline
        label = args.label or f"{Path(args.checkpoint).stem}"
        systems[label] = report

        write_report(report, handle.path(REPORT_FILE))
        write_aggregate(report, handle.path(AGGREGATE_FILE), label=label)
        write_scores(handle.path(RUN_SCORES), groups, {qid: rank_scores(order) for qid, order in orders.items()})
        handle.record(args.split, report)
        print(render_table(results_table(systems), report.footnotes))
