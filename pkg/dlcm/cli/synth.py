"""
synth: write a bundled synthetic corpus as LETOR splits plus oracle scores
"""
import argparse

from ..data_io import serialize_letor, synthetic, write_scores
from .common import SPLITS, add_common, add_flag, registered_run

CORPUS_KINDS = ("context", "global")


def register(subparsers) -> None:
    parser = subparsers.add_parser("synth", help="Generate a synthetic LETOR corpus")
    add_common(parser)
    add_flag(parser, "--kind", "context", choices=CORPUS_KINDS,
             help="context: grades depend on the query's document set; global: one linear utility")
    add_flag(parser, "--queries", 2000, int)
    add_flag(parser, "--docs", 20, int, help="Documents per query")
    add_flag(parser, "--features", 10, int)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> None:
    generate = synthetic.generate_context_corpus if args.kind == "context" else synthetic.generate_global_corpus
    with registered_run("synth", args, []) as handle:
        corpus = generate(args.queries, args.docs, args.features, args.seed)
        for name, groups in zip(SPLITS, synthetic.split_corpus(corpus.groups)):
            serialize_letor(groups, handle.path(f"{name}.txt"))
            write_scores(handle.path(f"oracle.{name}.scores.tsv"), groups, synthetic.oracle_scores(corpus, groups))
            print(f"✅ {name}: {len(groups)} queries")
