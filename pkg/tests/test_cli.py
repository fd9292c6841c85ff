import json

import pandas as pd
import pytest

from dlcm.cli import main
from dlcm.cli.sweep import sweep_values
from dlcm.core.database import get_db
from dlcm.core.errors import EXIT_DATA, EXIT_USAGE, UsageError
from dlcm.crud import get_run_by_out_dir
from dlcm.data_io import parse_letor
from dlcm.models import build_model, save_checkpoint
from dlcm.records import RunStatus


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipeline")
    data, initial = root / "data", root / "initial"
    assert main(["synth", "--out", str(data), "--queries", "30", "--docs", "8", "--features", "4", "--seed", "5"]) == 0
    assert main([
        "initial", "--out", str(initial), "--epochs", "3",
        "--train", str(data / "train.txt"), "--valid", str(data / "valid.txt"), "--test", str(data / "test.txt"),
    ]) == 0
    return data, initial


def train_args(data, out, *extra):
    return [
        "train", "--out", str(out), "--train", str(data / "train.txt"), "--valid", str(data / "valid.txt"),
        "--desk", "--max-iters", "4", *extra,
    ]


def test_synth_writes_splits_and_oracle_scores(corpus):
    data, _ = corpus
    assert len(parse_letor(data / "train.txt")) == 18
    assert len(parse_letor(data / "test.txt")) == 6
    oracle = pd.read_csv(data / "oracle.test.scores.tsv", sep="\t", header=None)
    assert len(oracle) == 6 * 8
    manifest = json.loads((data / "manifest.json").read_text())
    assert manifest["command"] == "synth" and manifest["seed"] == 5


def test_synth_is_reproducible(corpus, tmp_path):
    data, _ = corpus
    assert main(["synth", "--out", str(tmp_path), "--queries", "30", "--docs", "8", "--features", "4", "--seed", "5"]) == 0
    for name in ("train.txt", "valid.txt", "test.txt"):
        assert (tmp_path / name).read_bytes() == (data / name).read_bytes()


def test_initial_writes_scores_and_baseline(corpus):
    _, initial = corpus
    for name in ("train.scores.tsv", "valid.scores.tsv", "test.scores.tsv", "linear.ckpt.json", "baseline.tsv"):
        assert (initial / name).is_file()


def test_linear_checkpoint_reproduces_baseline_report(corpus, tmp_path):
    data, initial = corpus
    assert main([
        "eval", "--out", str(tmp_path), "--checkpoint", str(initial / "linear.ckpt.json"),
        "--data", str(data / "test.txt"), "--scores", str(initial),
    ]) == 0
    assert (tmp_path / "report.tsv").read_text() == (initial / "baseline.tsv").read_text()


def test_initial_ranking_is_not_significant_against_its_own_baseline(corpus, tmp_path):
    data, initial = corpus
    assert main([
        "eval", "--out", str(tmp_path), "--checkpoint", str(initial / "linear.ckpt.json"),
        "--data", str(data / "test.txt"), "--baseline-report", str(initial), "--permutations", "500",
    ]) == 0
    aggregate = pd.read_csv(tmp_path / "aggregate.tsv", sep="\t")
    p_columns = [c for c in aggregate.columns if c.startswith("p(")]
    assert p_columns
    assert all(aggregate.loc[0, c] == 1.0 for c in p_columns)
    baseline = pd.read_csv(initial / "baseline.tsv", sep="\t", dtype={"qid": str})
    report = pd.read_csv(tmp_path / "report.tsv", sep="\t", dtype={"qid": str})
    pd.testing.assert_frame_equal(report, baseline)


def test_train_eval_analyze(corpus, tmp_path, capsys):
    data, initial = corpus
    trained, evaluated, analyzed = tmp_path / "train", tmp_path / "eval", tmp_path / "analyze"
    assert main(train_args(data, trained, "--scores", str(initial), "--k", "2")) == 0
    assert (trained / "model.ckpt.json").is_file()
    history = pd.read_csv(trained / "history.tsv", sep="\t")
    assert history["iterations"].iloc[-1] == 4

    assert main([
        "eval", "--out", str(evaluated), "--checkpoint", str(trained / "model.ckpt.json"),
        "--data", str(data / "test.txt"), "--scores", str(initial),
        "--baseline-report", str(initial), "--permutations", "200", "--label", "dlcm/attrank",
    ]) == 0
    out = capsys.readouterr().out
    assert "dlcm/attrank" in out and "baseline" in out
    aggregate = pd.read_csv(evaluated / "aggregate.tsv", sep="\t")
    assert "p(ndcg@10)" in aggregate.columns
    assert len(pd.read_csv(evaluated / "run.scores.tsv", sep="\t", header=None)) == 6 * 8

    assert main([
        "analyze", "--out", str(analyzed), "--baseline-run", str(initial),
        "--model-run", str(evaluated), "--data", str(data / "test.txt"),
    ]) == 0
    by_label = pd.read_csv(analyzed / "negpair_by_label.tsv", sep="\t")
    assert list(by_label.columns) == ["label", "mean_reduction"]
    assert (analyzed / "negpair_buckets.tsv").is_file()


def test_training_is_reproducible(corpus, tmp_path):
    data, initial = corpus
    for name in ("a", "b"):
        assert main(train_args(data, tmp_path / name, "--scores", str(initial), "--model", "dnn", "--hidden", "64")) == 0
    assert (tmp_path / "a" / "model.ckpt.json").read_bytes() == (tmp_path / "b" / "model.ckpt.json").read_bytes()


def test_sweep(corpus, tmp_path):
    data, _ = corpus
    assert main([
        "sweep", "--out", str(tmp_path), "--train", str(data / "train.txt"), "--valid", str(data / "valid.txt"),
        "--test", str(data / "test.txt"), "--param", "n", "--range", "5..10", "--step", "5",
        "--desk", "--max-iters", "2", "--k", "2",
    ]) == 0
    sweep = pd.read_csv(tmp_path / "sweep.tsv", sep="\t")
    assert sweep["value"].tolist() == [5, 10]
    assert "ndcg@10" in sweep.columns


def test_sweep_values():
    assert sweep_values("10..60", 10) == [10, 20, 30, 40, 50, 60]
    for raw, step in (("10-60", 10), ("60..10", 10), ("1..5", 0)):
        with pytest.raises(UsageError):
            sweep_values(raw, step)


class TestExitCodes:
    def test_dlcm_only_flags_with_other_models(self, corpus, tmp_path):
        data, _ = corpus
        assert main(train_args(data, tmp_path, "--model", "dnn", "--beta", "4")) == EXIT_USAGE

    def test_hidden_with_dlcm(self, corpus, tmp_path):
        data, _ = corpus
        assert main(train_args(data, tmp_path, "--hidden", "128")) == EXIT_USAGE

    def test_bad_sweep_range(self, corpus, tmp_path):
        data, _ = corpus
        assert main([
            "sweep", "--out", str(tmp_path), "--train", str(data / "train.txt"), "--valid", str(data / "valid.txt"),
            "--test", str(data / "test.txt"), "--param", "k", "--range", "9..1",
        ]) == EXIT_USAGE

    def test_reranker_checkpoint_needs_initial_scores(self, corpus, tmp_path):
        data, _ = corpus
        checkpoint = tmp_path / "dnn.ckpt.json"
        save_checkpoint(checkpoint, build_model("dnn", 4, 10, hidden=[64]))
        assert main([
            "eval", "--out", str(tmp_path / "o"), "--checkpoint", str(checkpoint), "--data", str(data / "test.txt"),
        ]) == EXIT_USAGE

    def test_missing_required_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["train", "--out", "x"])
        assert info.value.code == 2

    def test_missing_input_file(self, tmp_path):
        missing = str(tmp_path / "nope.txt")
        assert main(["initial", "--out", str(tmp_path / "o"), "--train", missing, "--valid", missing, "--test", missing]) == EXIT_DATA
        with get_db() as db:
            failed = get_run_by_out_dir(db, tmp_path / "o")
            assert failed.status == RunStatus.FAILED
            assert "nope.txt" in failed.detail

    def test_malformed_letor(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("1 qid:1 1:0.5\nnot-a-label qid:1 1:0.2\n")
        assert main(["initial", "--out", str(tmp_path / "o"), "--train", str(bad), "--valid", str(bad), "--test", str(bad)]) == EXIT_DATA

    def test_scores_not_covering_the_split(self, corpus, tmp_path):
        data, initial = corpus
        assert main(train_args(data, tmp_path, "--scores", str(initial / "test.scores.tsv"))) == EXIT_DATA


def test_flags_fall_back_to_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("DLCM_QUERIES", "10")
    monkeypatch.setenv("DLCM_FEATURES", "3")
    assert main(["synth", "--out", str(tmp_path), "--docs", "5"]) == 0
    groups = parse_letor(tmp_path / "train.txt")
    assert len(groups) == 6 and groups[0].num_features == 3


def test_runs_listing(corpus, capsys):
    capsys.readouterr()
    assert main(["runs", "--command", "initial"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t")[:3] == ["id", "command", "status"]
    assert any("\tinitial\tfinished\t" in line for line in lines[1:])
