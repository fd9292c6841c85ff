# Training loop and evaluation of re-rankers
from .evaluate import (
    assemble_all,
    baseline_orders,
    baseline_report,
    check_coverage,
    evaluate_checkpoint,
    evaluate_with_orders,
    initial_order,
    mean_ndcg,
    rank_scores,
    rerank,
    rerank_all,
)
from .loop import (
    HISTORY_COLUMNS,
    TrainResult,
    TrainState,
    batch_loss,
    initial_list_ndcg,
    live_lists,
    orient_output,
    read_history,
    sgd_step,
    starting_candidate,
    train,
    train_step,
    write_history,
)
