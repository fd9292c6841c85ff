from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core import config


class LossKind(str, Enum):
    LISTMLE = "listmle"
    SOFTRANK = "softrank"
    ATTRANK = "attrank"


class ModelKind(str, Enum):
    DNN = "dnn"
    LIDNN = "lidnn"
    DLCM = "dlcm"


# Training schemas
class TrainConfig(BaseModel):
    loss_kind: LossKind = LossKind.ATTRANK
    model_kind: ModelKind = ModelKind.DLCM
    n: int = Field(40, ge=1, le=200)
    beta: int = Field(0, ge=0)
    k: int = Field(5, ge=1)
    hidden: List[int] = Field(default_factory=lambda: [256], min_length=1, max_length=2)
    batch_size: int = Field(config.DEFAULT_BATCH_SIZE, ge=1)
    lr0: float = Field(config.DEFAULT_LR, ge=0)  # 0 allowed for frozen runs
    decay: float = Field(config.DEFAULT_DECAY, gt=0, le=1)
    clip_norm: float = Field(config.DEFAULT_CLIP_NORM, gt=0)
    max_iters: int = Field(config.DEFAULT_MAX_ITERS, ge=1)
    seed: int = 0
    sigma: float = Field(config.DEFAULT_SIGMA, gt=0)
    attn_softmax: bool = False
    patience: Optional[int] = Field(None, ge=1)

    @field_validator("hidden")
    @classmethod
    def validate_hidden(cls, v):
        for width in v:
            if not 64 <= width <= 1024:
                raise ValueError(f"hidden widths must lie in [64, 1024], got {width}")
        return v

    @model_validator(mode="after")
    def validate_kind_specific(self):
        if self.model_kind != ModelKind.DLCM and (self.beta != 0):
            raise ValueError("beta only applies to the dlcm model")
        return self

    @classmethod
    def desk(cls, **overrides) -> "TrainConfig":
        """Desk-scale profile: small batches and lists"""
        values = {"batch_size": config.DESK_BATCH_SIZE, "n": config.DESK_LIST_SIZE}
        values.update(overrides)
        return cls(**values)


class HistoryRecord(BaseModel):
    epoch: int
    iterations: int
    train_loss: float
    lr: float
    valid_ndcg10: float
    max_grad_norm: float = 0.0
    seconds: float


# Evaluation schemas
class EvalReport(BaseModel):
    per_query: Dict[str, Dict[str, float]]
    aggregate: Dict[str, float]
    cutoffs: List[int]
    significance: Optional[Dict[str, float]] = None
    footnotes: List[str] = Field(default_factory=list)

    def metric_names(self) -> List[str]:
        return [f"{metric}@{k}" for metric in ("ndcg", "err") for k in self.cutoffs]

    def values(self, metric: str) -> Dict[str, float]:
        return {qid: row[metric] for qid, row in self.per_query.items()}


# Run bookkeeping schemas
class RunManifest(BaseModel):
    command: str
    config: Dict[str, Any]
    inputs: Dict[str, str] = Field(default_factory=dict)
    seed: int = 0
    tool_version: str
    started_at: datetime
    finished_at: Optional[datetime] = None


class RunSummary(BaseModel):
    id: int
    command: str
    out_dir: str
    status: str
    seed: int
    started_at: datetime

    model_config = ConfigDict(from_attributes=True)

    @field_validator("status", mode="before")
    @classmethod
    def status_value(cls, v):
        return v.value if isinstance(v, Enum) else v


# Checkpoint container
class ParamBlob(BaseModel):
    name: str
    shape: List[int]
    values: List[float]

    @model_validator(mode="after")
    def validate_size(self):
        expected = 1
        for extent in self.shape:
            expected *= extent
        if expected != len(self.values):
            raise ValueError(f"parameter {self.name}: shape {self.shape} needs {expected} values, got {len(self.values)}")
        return self


class CheckpointFile(BaseModel):
    format: Literal["dlcm-checkpoint"] = "dlcm-checkpoint"
    version: int = 1
    model_kind: str
    num_features: int = Field(..., ge=1)
    n: int = Field(0, ge=0)
    hidden: List[int] = Field(default_factory=list)
    beta: int = Field(0, ge=0)
    k: int = Field(1, ge=1)
    params: List[ParamBlob]
