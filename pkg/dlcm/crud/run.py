from sqlalchemy.orm import Session
from typing import Dict, List, Optional
from datetime import datetime
from pathlib import Path

from ..core.errors import ConfigError
from ..records import Run, RunMetric, RunStatus
from ..schemas import RunManifest


def _normalize_dir(out_dir) -> str:
    return str(Path(out_dir).resolve())


def get_run(db: Session, run_id: int) -> Optional[Run]:
    """Get run by ID"""
    return db.query(Run).filter(Run.id == run_id).first()


def get_run_by_out_dir(db: Session, out_dir) -> Optional[Run]:
    """Get run by its output directory"""
    return db.query(Run).filter(Run.out_dir == _normalize_dir(out_dir)).first()


def get_runs(db: Session, command: Optional[str] = None, limit: int = 100) -> List[Run]:
    """List runs, newest first"""
    query = db.query(Run)
    if command:
        query = query.filter(Run.command == command)
    return query.order_by(Run.id.desc()).limit(limit).all()


def create_run(db: Session, manifest: RunManifest, out_dir) -> Run:
    """Register a run; a rerun into the same directory replaces the earlier record"""
    db_run = get_run_by_out_dir(db, out_dir)
    if db_run is None:
        db_run = Run(out_dir=_normalize_dir(out_dir))
        db.add(db_run)
    else:
        db_run.metrics.clear()
    db_run.command = manifest.command
    db_run.seed = manifest.seed
    db_run.tool_version = manifest.tool_version
    db_run.status = RunStatus.RUNNING
    db_run.detail = None
    db_run.started_at = manifest.started_at
    db_run.finished_at = None
    db_run.set_config(manifest.config)
    db_run.set_inputs(manifest.inputs)

    db.commit()
    db.refresh(db_run)
    return db_run


def finish_run(db: Session, run_id: int, status: RunStatus = RunStatus.FINISHED,
               detail: Optional[str] = None) -> Optional[Run]:
    """Mark a run finished or failed"""
    db_run = get_run(db, run_id)
    if not db_run:
        return None
    db_run.status = status
    db_run.detail = detail
    db_run.finished_at = datetime.now()
    db.commit()
    db.refresh(db_run)
    return db_run


def record_metrics(db: Session, run_id: int, split: str, values: Dict[str, float],
                   p_values: Optional[Dict[str, float]] = None) -> List[RunMetric]:
    """Store aggregate metric values (and optional p-values) of a run"""
    p_values = p_values or {}
    rows = [
        RunMetric(run_id=run_id, split=split, metric=name, value=float(value), p_value=p_values.get(name))
        for name, value in values.items()
    ]
    db.add_all(rows)
    db.commit()
    return rows


def get_run_metrics(db: Session, run_id: int, split: Optional[str] = None) -> Dict[str, float]:
    query = db.query(RunMetric).filter(RunMetric.run_id == run_id)
    if split:
        query = query.filter(RunMetric.split == split)
    return {row.metric: row.value for row in query.all()}


def resolve_run_dir(db: Session, ref: str) -> Path:
    """A run reference is either an existing path or a registered run id"""
    path = Path(ref)
    if path.exists():
        return path
    if ref.isdigit():
        db_run = get_run(db, int(ref))
        if db_run:
            return Path(db_run.out_dir)
    raise ConfigError(f"'{ref}' is neither an existing path nor a registered run id")
