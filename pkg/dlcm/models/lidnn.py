"""
List-input feed-forward baseline: all n documents concatenated into one input
"""
from typing import Sequence

import numpy as np

from ..data_io import RankedInput
from ..gradcore import Tensor, elu, matmul, reshape
from .base import ReRanker
from .dnn import layer_count
from .params import ModelParams, OUTPUT_BIAS, PARAM_DTYPE, scaled_uniform


def init_lidnn_params(num_features: int, n: int, hidden: Sequence[int], rng: np.random.Generator) -> ModelParams:
    widths = [n * num_features, *hidden, n]
    arrays = {}
    for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        arrays[f"lidnn.W{i}"] = scaled_uniform(rng, (fan_out, fan_in))
        arrays[f"lidnn.b{i}"] = np.full(fan_out, OUTPUT_BIAS if i == len(widths) - 2 else 0.0, dtype=PARAM_DTYPE)
    return ModelParams.from_arrays(arrays)


def lidnn_forward(x: Tensor, params) -> Tensor:
    """x [n x features] flattened row-major, mapped to an [n] score vector"""
    layers = layer_count(params, "lidnn")
    h = reshape(x, (x.size,))
    for i in range(layers):
        h = matmul(params[f"lidnn.W{i}"], h) + params[f"lidnn.b{i}"]
        if i < layers - 1:
            h = elu(h)
    return h


def lidnn_score(ranked: RankedInput, params) -> Tensor:
    return lidnn_forward(Tensor(ranked.padded_features()), params)


class LidnnRanker(ReRanker):
    kind = "lidnn"

    @classmethod
    def create(cls, num_features: int, n: int, hidden: Sequence[int], rng: np.random.Generator) -> "LidnnRanker":
        return cls(num_features, n, init_lidnn_params(num_features, n, hidden, rng), hidden=hidden)

    def output_params(self):
        last = layer_count(self.params, "lidnn") - 1
        return [f"lidnn.W{last}", f"lidnn.b{last}"]

    def score(self, ranked: RankedInput) -> Tensor:
        return lidnn_forward(self.inputs(ranked), self.params)
