# Evaluation metrics and re-ranking analyses
from .negpair import (
    AVERAGING_NOTE,
    PERFECT_LABEL,
    BucketRow,
    NegPairResult,
    bucket_by_perfect_count,
    negative_pairs,
    negpair_analysis,
    reduction_by_label,
)
from .ranking import ERR_MAX_GRADE, dcg_at_k, err_at_k, ndcg_at_k
from .report import (
    SIGNIFICANCE_LEVEL,
    attach_significance,
    build_report,
    metric_row,
    read_report,
    render_table,
    report_frame,
    results_table,
    write_aggregate,
    write_report,
)
from .significance import compare_metrics, fisher_exact, fisher_randomization
