"""
Pointwise feed-forward re-ranker
"""
from typing import Sequence

import numpy as np

from ..data_io import RankedInput
from ..gradcore import Tensor, elu, matmul, reshape, transpose
from .base import ReRanker
from .params import ModelParams, OUTPUT_BIAS, PARAM_DTYPE, scaled_uniform


def init_dnn_params(num_features: int, hidden: Sequence[int], rng: np.random.Generator) -> ModelParams:
    widths = [num_features, *hidden, 1]
    arrays = {}
    for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        arrays[f"dnn.W{i}"] = scaled_uniform(rng, (fan_out, fan_in))
        arrays[f"dnn.b{i}"] = np.full(fan_out, OUTPUT_BIAS if i == len(widths) - 2 else 0.0, dtype=PARAM_DTYPE)
    return ModelParams.from_arrays(arrays)


def layer_count(params, prefix: str) -> int:
    return sum(1 for name in params if name.startswith(f"{prefix}.W"))


def dnn_score(x: Tensor, params) -> Tensor:
    """Score every row of x [n x features] independently"""
    layers = layer_count(params, "dnn")
    h = x
    for i in range(layers):
        h = matmul(h, transpose(params[f"dnn.W{i}"])) + params[f"dnn.b{i}"]
        if i < layers - 1:
            h = elu(h)
    return reshape(h, (x.shape[0],))


class DnnRanker(ReRanker):
    kind = "dnn"

    @classmethod
    def create(cls, num_features: int, n: int, hidden: Sequence[int], rng: np.random.Generator) -> "DnnRanker":
        return cls(num_features, n, init_dnn_params(num_features, hidden, rng), hidden=hidden)

    def output_params(self):
        last = layer_count(self.params, "dnn") - 1
        return [f"dnn.W{last}", f"dnn.b{last}"]

    def score(self, ranked: RankedInput) -> Tensor:
        return dnn_score(self.inputs(ranked), self.params)
