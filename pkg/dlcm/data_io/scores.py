"""
Initial-score files: UTF-8 TSV lines '<qid>\t<doc_index>\t<score>'
"""
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas as pd

from ..core.errors import CoverageError, ParseError
from .letor import QueryGroup

PathLike = Union[str, Path]

SCORE_COLUMNS = ["qid", "doc", "score"]


def _parsed(cast, value):
    """cast(value), or None when the cell is missing or malformed"""
    if not isinstance(value, str):
        return None
    try:
        return cast(value)
    except ValueError:
        return None


def read_score_frame(path: PathLike) -> pd.DataFrame:
    """Raw score table with typed columns; no coverage checks"""
    path = str(path)
    try:
        frame = pd.read_csv(path, sep="\t", header=None, dtype=str, skip_blank_lines=True, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return pd.DataFrame({"qid": [], "doc": [], "score": []})
    except pd.errors.ParserError as e:
        raise ParseError(f"expected '<qid>\\t<doc_index>\\t<score>': {e}", path=path)
    if frame.shape[1] != len(SCORE_COLUMNS):
        raise ParseError(f"expected 3 tab-separated columns, found {frame.shape[1]}", path=path)
    frame.columns = SCORE_COLUMNS
    doc = frame["doc"].map(lambda v: _parsed(int, v))
    score = frame["score"].map(lambda v: _parsed(float, v))
    bad = frame.index[doc.isna() | score.isna()]
    if len(bad):
        row = frame.loc[bad[0]]
        raise ParseError(f"malformed score line '{row['qid']}\t{row['doc']}\t{row['score']}'", int(bad[0]) + 1, path)
    frame = frame.assign(doc=doc.astype(np.int64), score=score.astype(np.float64))
    infinite = frame.index[~np.isfinite(frame["score"].to_numpy())]
    if len(infinite):
        row = frame.loc[infinite[0]]
        raise ParseError(f"non-finite score for (qid={row['qid']}, doc={row['doc']})", int(infinite[0]) + 1, path)
    return frame


def load_external_scores(path: PathLike, groups: List[QueryGroup]) -> Dict[str, np.ndarray]:
    """Read a score file and align it to each group's document order"""
    path = str(path)
    frame = read_score_frame(path)
    sizes = pd.Series({g.query_id: g.num_docs for g in groups}, dtype=np.int64)

    unknown = frame.index[~frame["qid"].isin(sizes.index)]
    if len(unknown):
        raise CoverageError(f"{path}:{int(unknown[0]) + 1}: unknown qid '{frame.loc[unknown[0], 'qid']}'")
    limits = sizes.reindex(frame["qid"]).to_numpy()
    out_of_range = frame.index[(frame["doc"].to_numpy() < 0) | (frame["doc"].to_numpy() >= limits)]
    if len(out_of_range):
        row = frame.loc[out_of_range[0]]
        raise CoverageError(
            f"{path}:{int(out_of_range[0]) + 1}: doc index {row['doc']} out of range for qid '{row['qid']}'"
        )
    duplicated = frame.index[frame.duplicated(subset=["qid", "doc"])]
    if len(duplicated):
        row = frame.loc[duplicated[0]]
        raise CoverageError(
            f"{path}:{int(duplicated[0]) + 1}: duplicate score for (qid={row['qid']}, doc={row['doc']})"
        )

    filled = {qid: np.full(size, np.nan) for qid, size in sizes.items()}
    for qid, rows in frame.groupby("qid", sort=False):
        filled[qid][rows["doc"].to_numpy()] = rows["score"].to_numpy()
    for group in groups:
        missing = np.flatnonzero(np.isnan(filled[group.query_id]))
        if len(missing):
            raise CoverageError(f"{path}: missing score for (qid={group.query_id}, doc={int(missing[0])})")
    return filled


def write_scores(path: PathLike, groups: List[QueryGroup], scores: Dict[str, np.ndarray]) -> None:
    frame = pd.DataFrame({
        "qid": [g.query_id for g in groups for _ in range(g.num_docs)],
        "doc": [doc for g in groups for doc in range(g.num_docs)],
        "score": np.concatenate([np.asarray(scores[g.query_id], dtype=np.float64) for g in groups])
        if groups else np.array([], dtype=np.float64),
    })
    frame.to_csv(path, sep="\t", header=False, index=False, float_format="%.17g")
