"""
Shared command plumbing: env-backed flags, input loading, manifests and
run registration.
"""
import argparse
import hashlib
import logging
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .. import __version__
from ..core import config
from ..core.database import get_db
from ..core.errors import ConfigError, DlcmError, UsageError
from ..crud import create_run, finish_run, record_metrics, resolve_run_dir
from ..data_io import QueryGroup, load_external_scores, load_groups
from ..records import RunStatus
from ..schemas import EvalReport, RunManifest

logger = logging.getLogger(__name__)

# Constants
MANIFEST_FILE = "manifest.json"
BUILTIN_SCORES = "builtin"
SPLITS = ("train", "valid", "test")


def scores_file(split: str) -> str:
    return f"{split}.scores.tsv"


def add_flag(parser: argparse.ArgumentParser, flag: str, fallback=None, cast=str, **kwargs) -> None:
    """Add --flag whose default comes from DLCM_<FLAG> when set"""
    default = config.env_default(flag, fallback, cast)
    if kwargs.pop("required", False) and default is None:
        kwargs["required"] = True
    parser.add_argument(flag, type=cast, default=default, **kwargs)


def add_switch(parser: argparse.ArgumentParser, flag: str, **kwargs) -> None:
    parser.add_argument(flag, action="store_true", default=config.env_flag(flag), **kwargs)


def parse_int_list(raw: str) -> List[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got '{raw}'")
    if not values:
        raise UsageError("expected at least one integer")
    return values


def add_common(parser: argparse.ArgumentParser, out: bool = True) -> None:
    add_flag(parser, "--seed", 0, int, help="Seed for every random choice of the command")
    add_flag(parser, "--threads", 1, int, help="Worker cap for evaluation and permutation tests")
    add_switch(parser, "--no-normalize", help="Skip per-query min-max feature normalization")
    if out:
        add_flag(parser, "--out", required=True, help="Output directory")


def load_split(path: str, normalize: bool, num_features: Optional[int] = None) -> List[QueryGroup]:
    groups = load_groups(path, normalize=normalize, num_features=num_features)
    if not groups:
        raise ConfigError(f"{path}: no queries")
    return groups


def load_scores(ref: str, split: str, groups: List[QueryGroup]) -> Dict[str, np.ndarray]:
    """Scores for a split from a score file or from <dir>/<split>.scores.tsv"""
    path = Path(ref)
    if path.is_dir():
        path = path / scores_file(split)
    return load_external_scores(path, groups)


def digest(path) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            sha.update(block)
    return sha.hexdigest()


def input_digests(paths: Iterable[Optional[str]]) -> Dict[str, str]:
    digests = {}
    for raw in paths:
        if not raw:
            continue
        path = Path(raw)
        if path.is_file():
            digests[str(path)] = digest(path)
        elif path.is_dir():
            for child in sorted(path.glob("*.tsv")):
                digests[str(child)] = digest(child)
    return digests


def resolved_config(args: argparse.Namespace) -> Dict[str, object]:
    return {key: value for key, value in sorted(vars(args).items()) if key != "handler"}


def resolve_run(ref: str) -> Path:
    with get_db() as db:
        return resolve_run_dir(db, ref)


class RunHandle:
    """A registered run; metrics recorded through it land in the registry"""

    def __init__(self, run_id: int, manifest: RunManifest, out_dir: Path):
        self.run_id = run_id
        self.manifest = manifest
        self.out_dir = out_dir

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def record(self, split: str, report: EvalReport) -> None:
        with get_db() as db:
            record_metrics(db, self.run_id, split, report.aggregate, report.significance)

    def record_values(self, split: str, values: Dict[str, float]) -> None:
        with get_db() as db:
            record_metrics(db, self.run_id, split, values)


@contextmanager
def registered_run(command: str, args: argparse.Namespace, inputs: Iterable[Optional[str]]):
    """Create the output directory, register the run, write the manifest on success"""
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        command=command,
        config=resolved_config(args),
        inputs=input_digests(inputs),
        seed=args.seed,
        tool_version=__version__,
        started_at=datetime.now(),
    )
    with get_db() as db:
        run_id = create_run(db, manifest, out_dir).id
    handle = RunHandle(run_id, manifest, out_dir)
    try:
        yield handle
    except Exception as e:
        detail = e.detail if isinstance(e, DlcmError) else f"{type(e).__name__}: {e}"
        with get_db() as db:
            finish_run(db, run_id, RunStatus.FAILED, detail)
        raise
    manifest.finished_at = datetime.now()
    handle.path(MANIFEST_FILE).write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    with get_db() as db:
        finish_run(db, run_id)
    print(f"✅ {command} run {run_id} written to {out_dir}")


def split_paths(args: argparse.Namespace, names: Tuple[str, ...]) -> List[str]:
    return [getattr(args, name) for name in names if getattr(args, name, None)]
