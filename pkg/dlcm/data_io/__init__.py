# LETOR data pipeline
from .letor import (
    MAX_LABEL,
    MIN_LABEL,
    ParseStats,
    QueryGroup,
    load_groups,
    normalize_per_query,
    parse_letor,
    read_letor,
    serialize_letor,
)
from .ranked import RankedInput, assemble_top_n
from .scores import load_external_scores, write_scores
