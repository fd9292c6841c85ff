"""
Versioned JSON checkpoints: each parameter listed with name, shape and
decimal float32 values. Float32 -> float64 -> shortest decimal is exact, so
a save/load round trip is bit-identical.
"""
import logging
from pathlib import Path
from typing import Union

import numpy as np

from ..core.errors import ConfigError
from ..schemas import CheckpointFile, ParamBlob
from .base import ReRanker
from .linear import LinearRanker
from .params import ModelParams, PARAM_DTYPE

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1

PathLike = Union[str, Path]


def _blob(name: str, array: np.ndarray) -> ParamBlob:
    values = np.asarray(array, dtype=PARAM_DTYPE).reshape(-1)
    return ParamBlob(name=name, shape=list(array.shape), values=[float(v) for v in values])


def _array(blob: ParamBlob) -> np.ndarray:
    return np.array(blob.values, dtype=np.float64).astype(PARAM_DTYPE).reshape(blob.shape)


def checkpoint_of(model: Union[ReRanker, LinearRanker]) -> CheckpointFile:
    if isinstance(model, LinearRanker):
        return CheckpointFile(
            version=CHECKPOINT_VERSION, model_kind="linear",
            num_features=model.num_features, params=[_blob("linear.w", model.w)],
        )
    return CheckpointFile(
        version=CHECKPOINT_VERSION,
        **model.hyper(),
        params=[_blob(name, t.data) for name, t in model.params.items()],
    )


def save_checkpoint(path: PathLike, model: Union[ReRanker, LinearRanker]) -> None:
    Path(path).write_text(checkpoint_of(model).model_dump_json(indent=1), encoding="utf-8")
    logger.info(f"checkpoint written to {path}")


def load_checkpoint(path: PathLike) -> Union[ReRanker, LinearRanker]:
    from . import MODEL_CLASSES

    try:
        blob = CheckpointFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValueError as e:
        raise ConfigError(f"{path}: not a valid checkpoint: {e}")
    if blob.version > CHECKPOINT_VERSION:
        raise ConfigError(f"{path}: checkpoint version {blob.version} is newer than supported {CHECKPOINT_VERSION}")
    if blob.model_kind == "linear":
        return LinearRanker(_array(blob.params[0]).astype(np.float64))
    if blob.model_kind not in MODEL_CLASSES:
        raise ConfigError(f"{path}: unknown model kind '{blob.model_kind}'")
    params = ModelParams.from_arrays({p.name: _array(p) for p in blob.params})
    model_cls = MODEL_CLASSES[blob.model_kind]
    return model_cls(blob.num_features, blob.n, params, hidden=blob.hidden, beta=blob.beta, k=blob.k)
