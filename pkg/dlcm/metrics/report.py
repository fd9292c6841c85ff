"""
Evaluation reports: per-query metric rows, aggregates, significance
annotations, TSV persistence and the model-by-metric results table.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..core import config
from ..core.errors import ConfigError, ContractError
from ..schemas import EvalReport
from .ranking import err_at_k, ndcg_at_k
from .significance import compare_metrics

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SIGNIFICANCE_LEVEL = 0.01
SIGNIFICANCE_MARK = "*"


def metric_row(ranked_labels: Sequence[int], cutoffs: Sequence[int]) -> Dict[str, float]:
    row = {}
    for k in cutoffs:
        row[f"ndcg@{k}"] = ndcg_at_k(ranked_labels, k)
    for k in cutoffs:
        row[f"err@{k}"] = err_at_k(ranked_labels, k)
    return row


def build_report(ranked_labels: Dict[str, Sequence[int]],
                 cutoffs: Sequence[int] = config.DEFAULT_CUTOFFS) -> EvalReport:
    """Metrics for each query's final ranking plus their arithmetic means"""
    if not ranked_labels:
        raise ContractError("cannot build a report over zero queries")
    per_query = {qid: metric_row(labels, cutoffs) for qid, labels in ranked_labels.items()}
    return EvalReport(per_query=per_query, aggregate=_aggregate(per_query), cutoffs=list(cutoffs))


def _aggregate(per_query: Dict[str, Dict[str, float]]) -> Dict[str, float]:
    names = list(next(iter(per_query.values())))
    return {name: float(np.mean([row[name] for row in per_query.values()])) for name in names}


def attach_significance(report: EvalReport, baseline: EvalReport,
                        permutations: int = config.DEFAULT_PERMUTATIONS,
                        seed: int = 0, workers: int = 1) -> EvalReport:
    """Copy of report with Fisher randomization p-values against the baseline"""
    if set(report.per_query) != set(baseline.per_query):
        raise ConfigError(
            f"baseline report covers {len(baseline.per_query)} queries, "
            f"this report {len(report.per_query)}; query sets must match"
        )
    names = [name for name in report.metric_names() if name in baseline.aggregate]
    p_values = compare_metrics(
        {name: report.values(name) for name in names},
        {name: baseline.values(name) for name in names},
        permutations=permutations, seed=seed, workers=workers, metrics=names,
    )
    footnote = (
        f"{SIGNIFICANCE_MARK} p <= {SIGNIFICANCE_LEVEL} under a two-sided Fisher randomization "
        f"test with {permutations} permutations (seed {seed})"
    )
    return report.model_copy(update={
        "significance": p_values,
        "footnotes": list(report.footnotes) + [footnote],
    })


def report_frame(report: EvalReport) -> pd.DataFrame:
    names = report.metric_names()
    frame = pd.DataFrame.from_dict(report.per_query, orient="index")[names]
    frame.index.name = "qid"
    return frame.reset_index()


def write_report(report: EvalReport, path: PathLike) -> None:
    """Per-query TSV: qid then one column per metric@k"""
    report_frame(report).to_csv(path, sep="\t", index=False, float_format="%.17g")


def read_report(path: PathLike) -> EvalReport:
    try:
        frame = pd.read_csv(path, sep="\t", dtype={"qid": str}, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"{path}: cannot read report: {e}")
    if "qid" not in frame.columns or len(frame) == 0:
        raise ConfigError(f"{path}: report needs a qid column and at least one row")
    names = [c for c in frame.columns if c != "qid"]
    cutoffs = sorted({int(name.split("@", 1)[1]) for name in names if "@" in name})
    per_query = {
        str(row["qid"]): {name: float(row[name]) for name in names}
        for _, row in frame.iterrows()
    }
    return EvalReport(per_query=per_query, aggregate=_aggregate(per_query), cutoffs=cutoffs)


def write_aggregate(report: EvalReport, path: PathLike, label: str = "model") -> None:
    """One-row aggregate TSV, p-value columns appended when present"""
    row = {"system": label}
    row.update({name: report.aggregate[name] for name in report.metric_names()})
    if report.significance:
        row.update({f"p({name})": value for name, value in report.significance.items()})
    pd.DataFrame([row]).to_csv(path, sep="\t", index=False, float_format="%.6g")


def results_table(systems: Dict[str, EvalReport], metrics: Optional[List[str]] = None) -> pd.DataFrame:
    """Rows are systems (model/loss), columns metric@k; significant cells carry a marker"""
    if not systems:
        raise ContractError("results table needs at least one system")
    names = metrics or next(iter(systems.values())).metric_names()
    rows = []
    for label, report in systems.items():
        row = {"system": label}
        for name in names:
            cell = f"{report.aggregate[name]:.4f}"
            p_value = (report.significance or {}).get(name)
            if p_value is not None and p_value <= SIGNIFICANCE_LEVEL:
                cell += SIGNIFICANCE_MARK
            row[name] = cell
        rows.append(row)
    return pd.DataFrame(rows, columns=["system"] + names)


def render_table(table: pd.DataFrame, footnotes: Sequence[str] = ()) -> str:
    text = table.to_string(index=False)
    if footnotes:
        text += "\n" + "\n".join(footnotes)
    return text
