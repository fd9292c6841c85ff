from datetime import datetime

import pytest

from dlcm.core.database import get_db
from dlcm.core.errors import ConfigError
from dlcm.crud import (
    create_run,
    finish_run,
    get_run,
    get_run_by_out_dir,
    get_run_metrics,
    get_runs,
    record_metrics,
    resolve_run_dir,
)
from dlcm.records import RunStatus
from dlcm.schemas import RunManifest


def manifest(command="train", seed=0, **config):
    return RunManifest(
        command=command,
        config=config or {"lr0": 1.0},
        inputs={"train.txt": "ab12"},
        seed=seed,
        tool_version="1.0.0",
        started_at=datetime.now(),
    )


def test_create_registers_a_running_run(tmp_path):
    with get_db() as db:
        run = create_run(db, manifest(seed=4), tmp_path / "out")
        assert run.status == RunStatus.RUNNING
        assert run.seed == 4
        assert run.get_config() == {"lr0": 1.0}
        assert run.get_inputs() == {"train.txt": "ab12"}
        assert get_run_by_out_dir(db, tmp_path / "out").id == run.id


def test_rerun_into_same_directory_replaces_record(tmp_path):
    with get_db() as db:
        first = create_run(db, manifest(), tmp_path / "out")
        record_metrics(db, first.id, "valid", {"ndcg@10": 0.5})
        finish_run(db, first.id)
    with get_db() as db:
        second = create_run(db, manifest(command="eval", n=10), tmp_path / "out")
        assert second.id == first.id
        assert second.command == "eval"
        assert second.status == RunStatus.RUNNING
        assert second.get_config() == {"n": 10}
        assert get_run_metrics(db, second.id) == {}


def test_finish_and_fail(tmp_path):
    with get_db() as db:
        ok_id = create_run(db, manifest(), tmp_path / "ok").id
        bad_id = create_run(db, manifest(), tmp_path / "bad").id
        finish_run(db, ok_id)
        finish_run(db, bad_id, RunStatus.FAILED, "loss evaluated to nan")
    with get_db() as db:
        assert get_run(db, ok_id).status == RunStatus.FINISHED
        assert get_run(db, ok_id).finished_at is not None
        failed = get_run(db, bad_id)
        assert failed.status == RunStatus.FAILED and failed.detail == "loss evaluated to nan"
        assert finish_run(db, 10 ** 9) is None


def test_metrics_by_split(tmp_path):
    with get_db() as db:
        run = create_run(db, manifest(), tmp_path / "out")
        record_metrics(db, run.id, "test", {"ndcg@10": 0.61, "err@10": 0.4}, {"ndcg@10": 0.003})
        record_metrics(db, run.id, "valid", {"ndcg@10": 0.58})
        assert get_run_metrics(db, run.id, "test") == {"ndcg@10": 0.61, "err@10": 0.4}
        assert get_run_metrics(db, run.id, "valid") == {"ndcg@10": 0.58}


def test_runs_listed_newest_first(tmp_path):
    with get_db() as db:
        older = create_run(db, manifest(command="sweep"), tmp_path / "a")
        newer = create_run(db, manifest(command="sweep"), tmp_path / "b")
        ids = [r.id for r in get_runs(db, command="sweep")]
        assert ids.index(newer.id) < ids.index(older.id)
        assert all(r.command == "sweep" for r in get_runs(db, command="sweep"))
        assert len(get_runs(db, limit=1)) == 1


def test_resolve_run_dir(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    with get_db() as db:
        run = create_run(db, manifest(), out)
        assert resolve_run_dir(db, str(out)) == out
        assert resolve_run_dir(db, str(run.id)) == out.resolve()
        with pytest.raises(ConfigError):
            resolve_run_dir(db, "no-such-run")
