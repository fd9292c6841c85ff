"""
Deep listwise context model: input abstraction, GRU encoder over the
initial list from the lowest-ranked document to the top one, and the local
ranking function phi(o, s_n) = V . (o . tanh(W s_n + b)).
"""
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..core.errors import ContractError
from ..data_io import RankedInput
from ..gradcore import (
    Tensor,
    concat,
    elu,
    matmul,
    reshape,
    sigmoid,
    stack,
    tanh,
    transpose,
    zeros,
)
from .base import ReRanker
from .params import ModelParams, PARAM_DTYPE, scaled_uniform

GRU_MATRICES = ("gru.Wx", "gru.Ws", "gru.Wux", "gru.Wus", "gru.Wrx", "gru.Wrs")


def init_dlcm_params(num_features: int, beta: int, k: int, rng: np.random.Generator) -> ModelParams:
    if beta < 0 or k < 1:
        raise ContractError(f"need beta >= 0 and k >= 1, got beta={beta}, k={k}")
    d = num_features + beta
    arrays = {}
    if beta > 0:
        # Both abstraction layers have width beta
        arrays["abstraction.W0"] = scaled_uniform(rng, (beta, num_features))
        arrays["abstraction.b0"] = np.zeros(beta, dtype=PARAM_DTYPE)
        arrays["abstraction.W1"] = scaled_uniform(rng, (beta, beta))
        arrays["abstraction.b1"] = np.zeros(beta, dtype=PARAM_DTYPE)
    for name in GRU_MATRICES:
        arrays[name] = scaled_uniform(rng, (d, d))
    arrays["phi.W"] = scaled_uniform(rng, (d, k, d))
    arrays["phi.b"] = np.zeros((d, k), dtype=PARAM_DTYPE)
    arrays["phi.V"] = scaled_uniform(rng, (k,))
    return ModelParams.from_arrays(arrays)


def abstraction_forward(x: Tensor, params) -> Tensor:
    """x' = concat(x, elu(W1 elu(W0 x + b0) + b1)); x itself when beta is 0"""
    if "abstraction.W0" not in params:
        return x
    z1 = elu(matmul(x, transpose(params["abstraction.W0"])) + params["abstraction.b0"])
    z2 = elu(matmul(z1, transpose(params["abstraction.W1"])) + params["abstraction.b1"])
    return concat([x, z2], axis=1)


def gru_encode(inputs: Union[Tensor, Sequence[Tensor]], params) -> Tuple[Tensor, Tensor]:
    """Run the gated recurrence over inputs [T x d] in sequence order.

    Returns the stacked outputs o_1..o_T as [T x d] and the final state s_T.
    The recurrence has no bias terms and gates on the previous output o.
    """
    if isinstance(inputs, Tensor):
        sequence = inputs
    else:
        if len(inputs) == 0:
            raise ContractError("gru_encode: empty input sequence")
        sequence = stack(list(inputs))
    if sequence.ndim != 2:
        raise ContractError(f"gru_encode: expected a [T x d] sequence, got shape {sequence.shape}")
    steps, d = sequence.shape

    # Input projections for all steps at once
    xs = matmul(sequence, transpose(params["gru.Wx"]))
    xu = matmul(sequence, transpose(params["gru.Wux"]))
    xr = matmul(sequence, transpose(params["gru.Wrx"]))

    o = zeros((d,))
    s = o
    outputs: List[Tensor] = []
    for t in range(steps):
        r = sigmoid(xr[t] + matmul(params["gru.Wrs"], o))
        s = tanh(xs[t] + matmul(params["gru.Ws"], r * o))
        u = sigmoid(xu[t] + matmul(params["gru.Wus"], o))
        o = (1.0 - u) * o + u * s
        outputs.append(o)
    return stack(outputs), s


def local_ranking(outputs: Tensor, state: Tensor, params) -> Tensor:
    """phi for every row of outputs [n x d] against the encoded context s_n"""
    d = state.shape[0]
    k = params["phi.V"].shape[0]
    projected = matmul(reshape(params["phi.W"], (d * k, d)), state)
    context = tanh(reshape(projected, (d, k)) + params["phi.b"])
    return matmul(matmul(outputs, context), params["phi.V"])


def dlcm_forward(x: Tensor, params) -> Tensor:
    """Scores for slots of x [n x features], slot i holding initial rank i+1"""
    n = x.shape[0]
    reverse = np.arange(n)[::-1]
    expanded = abstraction_forward(x, params)
    outputs, state = gru_encode(expanded[reverse], params)
    # Document at rank i reads output o_{n+1-i}
    return local_ranking(outputs[reverse], state, params)


def dlcm_score(ranked: RankedInput, params) -> Tensor:
    return dlcm_forward(Tensor(ranked.padded_features()), params)


class DlcmRanker(ReRanker):
    kind = "dlcm"

    @classmethod
    def create(cls, num_features: int, n: int, beta: int, k: int, rng: np.random.Generator) -> "DlcmRanker":
        return cls(num_features, n, init_dlcm_params(num_features, beta, k, rng), beta=beta, k=k)

    def output_params(self):
        return ["phi.V"]

    def score(self, ranked: RankedInput) -> Tensor:
        return dlcm_forward(self.inputs(ranked), self.params)
