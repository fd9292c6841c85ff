"""
LETOR / SVMlight ranking files: parsing, serialization, per-query normalization
"""
import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, TextIO, Tuple, Union

import numpy as np

from ..core.errors import ContractError, ParseError

logger = logging.getLogger(__name__)

MIN_LABEL = 0
MAX_LABEL = 4

PathLike = Union[str, Path]


@dataclass(frozen=True)
class QueryGroup:
    query_id: str
    doc_ids: List[str]
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] < 1:
            raise ContractError(f"query {self.query_id}: features must be a non-empty matrix")
        if len(self.doc_ids) != self.features.shape[0] or len(self.labels) != self.features.shape[0]:
            raise ContractError(f"query {self.query_id}: doc_ids, labels and features disagree in length")
        if self.labels.min() < MIN_LABEL or self.labels.max() > MAX_LABEL:
            raise ContractError(f"query {self.query_id}: labels outside [{MIN_LABEL},{MAX_LABEL}]")

    @property
    def num_docs(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]


@dataclass
class ParseStats:
    lines: int = 0
    documents: int = 0
    clamped_labels: int = 0
    num_features: int = 0


@dataclass
class _Pending:
    doc_ids: List[str] = field(default_factory=list)
    rows: List[Dict[int, float]] = field(default_factory=list)
    labels: List[int] = field(default_factory=list)


def _doc_id_from_comment(comment: str) -> Optional[str]:
    """First token of the comment, or the value of a 'docid = X' pair"""
    tokens = comment.replace("=", " = ").split()
    if not tokens:
        return None
    if tokens[0].lower() == "docid" and len(tokens) >= 3 and tokens[1] == "=":
        return tokens[2]
    return tokens[0]


def _parse_line(line: str, line_no: int, path: str) -> Tuple[int, str, Dict[int, float], Optional[str]]:
    data, hash_mark, comment = line.partition("#")
    tokens = data.split()
    if len(tokens) < 2:
        raise ParseError("expected '<label> qid:<id> <idx>:<val> ...'", line_no, path)
    try:
        label = int(tokens[0])
    except ValueError:
        raise ParseError(f"non-integer label '{tokens[0]}'", line_no, path)
    if not tokens[1].startswith("qid:") or len(tokens[1]) == 4:
        raise ParseError(f"expected qid:<id>, got '{tokens[1]}'", line_no, path)
    qid = tokens[1][4:]
    row: Dict[int, float] = {}
    for token in tokens[2:]:
        index, colon, value = token.partition(":")
        if not colon:
            raise ParseError(f"malformed feature token '{token}'", line_no, path)
        try:
            position = int(index)
            number = float(value)
        except ValueError:
            raise ParseError(f"malformed feature token '{token}'", line_no, path)
        if not math.isfinite(number):
            raise ParseError(f"non-finite feature value in '{token}'", line_no, path)
        if position < 1:
            raise ParseError(f"feature indices are 1-based, got {position}", line_no, path)
        row[position - 1] = number
    doc_id = _doc_id_from_comment(comment) if hash_mark else None
    return label, qid, row, doc_id


def read_letor(path: PathLike, num_features: Optional[int] = None) -> Tuple[List[QueryGroup], ParseStats]:
    """Parse a LETOR file into query groups (first-appearance order) plus parse statistics.

    num_features pins the matrix width, e.g. to the training split's width;
    a file using a larger index is rejected.
    """
    path = str(path)
    stats = ParseStats()
    pending: "OrderedDict[str, _Pending]" = OrderedDict()
    max_index = 0
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.split("#", 1)[0].strip():
                continue
            stats.lines += 1
            label, qid, row, doc_id = _parse_line(line, line_no, path)
            if label < MIN_LABEL or label > MAX_LABEL:
                stats.clamped_labels += 1
                label = min(MAX_LABEL, max(MIN_LABEL, label))
            group = pending.setdefault(qid, _Pending())
            group.doc_ids.append(doc_id or f"{qid}-{len(group.doc_ids)}")
            group.rows.append(row)
            group.labels.append(label)
            if row:
                max_index = max(max_index, max(row) + 1)

    width = max_index
    if num_features is not None:
        if max_index > num_features:
            raise ParseError(f"feature index {max_index} exceeds the expected {num_features} features", path=path)
        width = num_features
    if width == 0:
        raise ParseError("no features found", path=path)
    stats.num_features = width

    groups = []
    for qid, group in pending.items():
        features = np.zeros((len(group.rows), width), dtype=np.float64)
        for i, row in enumerate(group.rows):
            for index, value in row.items():
                features[i, index] = value
        groups.append(QueryGroup(qid, group.doc_ids, features, np.array(group.labels, dtype=np.int64)))
        stats.documents += len(group.rows)

    if stats.clamped_labels:
        logger.warning(f"{path}: clamped {stats.clamped_labels} labels into [{MIN_LABEL},{MAX_LABEL}]")
    logger.info(f"{path}: {len(groups)} queries, {stats.documents} documents, {width} features")
    return groups, stats


def parse_letor(path: PathLike, num_features: Optional[int] = None) -> List[QueryGroup]:
    """Parse a LETOR file into query groups"""
    return read_letor(path, num_features)[0]


def serialize_letor(groups: List[QueryGroup], out: Union[PathLike, TextIO]) -> None:
    """Write groups back in LETOR format, all features dense, doc id as comment"""
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as handle:
            serialize_letor(groups, handle)
        return
    for group in groups:
        for i in range(group.num_docs):
            features = " ".join(f"{j + 1}:{float(v)!r}" for j, v in enumerate(group.features[i]))
            out.write(f"{int(group.labels[i])} qid:{group.query_id} {features} #{group.doc_ids[i]}\n")


def normalize_per_query(group: QueryGroup) -> QueryGroup:
    """Min-max scale each feature column to [0,1] within the query; constant columns become 0"""
    features = group.features
    low = features.min(axis=0)
    span = features.max(axis=0) - low
    safe = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (features - low) / safe, 0.0)
    return QueryGroup(group.query_id, list(group.doc_ids), np.clip(scaled, 0.0, 1.0), group.labels.copy())


def load_groups(path: PathLike, normalize: bool = True, num_features: Optional[int] = None) -> List[QueryGroup]:
    """Parse a split and optionally normalize each query"""
    groups = parse_letor(path, num_features)
    if normalize:
        groups = [normalize_per_query(g) for g in groups]
    return groups
