"""
runs: list registered runs
"""
import argparse

import pandas as pd

from ..core.database import get_db
from ..crud import get_run_metrics, get_runs
from ..schemas import RunSummary
from .common import add_flag

RUN_COLUMNS = ["id", "command", "status", "seed", "started_at", "out_dir", "ndcg@10"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("runs", help="List registered runs")
    add_flag(parser, "--command", None, help="Only runs of this command")
    add_flag(parser, "--limit", 50, int)
    parser.set_defaults(handler=run)


def runs_frame(command=None, limit: int = 50) -> pd.DataFrame:
    rows = []
    with get_db() as db:
        for db_run in get_runs(db, command=command, limit=limit):
            summary = RunSummary.model_validate(db_run)
            row = summary.model_dump()
            row["started_at"] = summary.started_at.isoformat(timespec="seconds")
            row["ndcg@10"] = get_run_metrics(db, summary.id).get("ndcg@10")
            rows.append(row)
    return pd.DataFrame(rows, columns=RUN_COLUMNS)


def run(args: argparse.Namespace) -> None:
    frame = runs_frame(args.command, args.limit)
    if frame.empty:
        print("⚠️ no runs registered")
        return
    print(frame.to_csv(sep="\t", index=False), end="")
