"""
End-to-end checks on the synthetic corpora. Training runs are marked slow.
"""
import time

import pytest

from dlcm.data_io import normalize_per_query, synthetic
from dlcm.metrics import attach_significance, negpair_analysis, reduction_by_label
from dlcm.models import build_model, linear_train
from dlcm.schemas import TrainConfig
from dlcm.trainer import (
    assemble_all,
    baseline_orders,
    baseline_report,
    evaluate_with_orders,
    train,
    train_step,
)


def prepared(corpus):
    groups = [normalize_per_query(g) for g in corpus.groups]
    train_groups, valid_groups, test_groups = synthetic.split_corpus(groups)
    scores = linear_train(train_groups, seed=0).score_groups(groups)
    return train_groups, valid_groups, test_groups, scores


def test_context_corpus_leaves_room_above_a_global_ranker():
    corpus = synthetic.generate_context_corpus(num_queries=300, docs_per_query=20, num_features=10, seed=11)
    _, _, test_groups, scores = prepared(corpus)
    linear = baseline_report(test_groups, scores, cutoffs=[10]).aggregate["ndcg@10"]
    oracle = baseline_report(test_groups, synthetic.oracle_scores(corpus, test_groups), cutoffs=[10])
    assert oracle.aggregate["ndcg@10"] == pytest.approx(1.0)
    assert oracle.aggregate["ndcg@10"] - linear >= 0.10


def context_config(model_kind, seed, **overrides):
    values = dict(model_kind=model_kind, loss_kind="attrank", n=20, batch_size=16, lr0=0.5,
                  max_iters=900, patience=5, seed=seed)
    if model_kind == "dnn":
        values["hidden"] = [64]
    values.update(overrides)
    return TrainConfig(**values)


@pytest.fixture(scope="module")
def context_runs():
    corpus = synthetic.generate_context_corpus(num_queries=2000, docs_per_query=20, num_features=10, seed=0)
    train_groups, valid_groups, test_groups, scores = prepared(corpus)
    runs = []
    for seed in (0, 1, 2):
        reports = {}
        for kind in ("dnn", "dlcm"):
            result = train(context_config(kind, seed), train_groups, valid_groups, scores)
            reports[kind] = evaluate_with_orders(result.model, test_groups, scores, cutoffs=[10], threads=4)
        runs.append(reports)
    return test_groups, scores, runs


@pytest.mark.slow
def test_context_model_beats_pointwise_model(context_runs):
    _, _, runs = context_runs
    for reports in runs:
        (dnn, _), (dlcm, _) = reports["dnn"], reports["dlcm"]
        assert dlcm.aggregate["ndcg@10"] - dnn.aggregate["ndcg@10"] >= 0.05
        marked = attach_significance(dlcm, dnn, permutations=20000, seed=0, workers=4)
        assert marked.significance["ndcg@10"] <= 0.01


@pytest.mark.slow
def test_top_grade_gains_most_from_context(context_runs):
    test_groups, scores, runs = context_runs
    initial = baseline_orders(test_groups, scores)
    _, orders = runs[0]["dlcm"]
    results = {g.query_id: negpair_analysis(initial[g.query_id], orders[g.query_id], g.labels) for g in test_groups}
    assert reduction_by_label(results)[4] > 0.0


@pytest.mark.slow
def test_context_model_does_no_harm_on_global_relevance():
    corpus = synthetic.generate_global_corpus(num_queries=2000, docs_per_query=20, num_features=10, seed=0)
    train_groups, valid_groups, test_groups, scores = prepared(corpus)
    result = train(context_config("dlcm", 0), train_groups, valid_groups, scores)
    report, _ = evaluate_with_orders(result.model, test_groups, scores, cutoffs=[10], threads=4)
    initial = baseline_report(test_groups, scores, cutoffs=[10])
    assert report.aggregate["ndcg@10"] >= initial.aggregate["ndcg@10"] - 0.01


@pytest.mark.slow
def test_training_cost_ordering_of_losses():
    corpus = synthetic.generate_context_corpus(num_queries=200, docs_per_query=20, num_features=10, seed=0)
    train_groups, _, _, scores = prepared(corpus)
    inputs = assemble_all(train_groups, scores, 20)
    seconds = {}
    for loss in ("attrank", "listmle", "softrank"):
        config = context_config("dlcm", 0, loss_kind=loss)
        model = build_model("dlcm", 10, 20, k=config.k, seed=0)
        started = time.perf_counter()
        for step in range(20):
            train_step(model, inputs[step * 4:(step + 1) * 4], config, config.lr0)
        seconds[loss] = time.perf_counter() - started
    assert seconds["attrank"] < seconds["listmle"] < seconds["softrank"]
