from sqlalchemy import Column, DateTime, Float, ForeignKey, Integer, String, Text, Enum as SQLEnum
from sqlalchemy.orm import relationship
from enum import Enum
import json

from ..core.database import Base

# Constants for table references
RUNS_TABLE_REF = "runs.id"
CASCADE_DELETE_ORPHAN = "all, delete-orphan"


class RunStatus(str, Enum):
    RUNNING = "running"
    FINISHED = "finished"
    FAILED = "failed"


class Run(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)
    command = Column(String(32), nullable=False, index=True)
    out_dir = Column(String(1024), unique=True, nullable=False)
    seed = Column(Integer, nullable=False, default=0)
    config = Column(Text, nullable=False, default="{}")  # JSON string of the resolved configuration
    inputs = Column(Text, nullable=False, default="{}")  # JSON string path -> sha256
    tool_version = Column(String(32), nullable=False)
    status = Column(SQLEnum(RunStatus), nullable=False, default=RunStatus.RUNNING)
    detail = Column(Text, nullable=True)
    started_at = Column(DateTime, nullable=False)
    finished_at = Column(DateTime, nullable=True)

    metrics = relationship("RunMetric", back_populates="run", cascade=CASCADE_DELETE_ORPHAN)

    def get_config(self):
        """Parse JSON config string to dict"""
        try:
            value = json.loads(self.config or "{}")
            return value if isinstance(value, dict) else {}
        except (json.JSONDecodeError, TypeError):
            return {}

    def set_config(self, config):
        self.config = json.dumps(config if isinstance(config, dict) else {}, sort_keys=True, default=str)

    def get_inputs(self):
        """Parse JSON input digests to dict"""
        try:
            value = json.loads(self.inputs or "{}")
            return value if isinstance(value, dict) else {}
        except (json.JSONDecodeError, TypeError):
            return {}

    def set_inputs(self, inputs):
        self.inputs = json.dumps(inputs if isinstance(inputs, dict) else {}, sort_keys=True)


class RunMetric(Base):
    __tablename__ = "run_metrics"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey(RUNS_TABLE_REF), nullable=False, index=True)
    split = Column(String(32), nullable=False)
    metric = Column(String(32), nullable=False)
    value = Column(Float, nullable=False)
    p_value = Column(Float, nullable=True)

    run = relationship("Run", back_populates="metrics")
