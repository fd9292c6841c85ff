# Reverse-mode differentiation substrate
from .tensor import (
    LOG_CLAMP,
    Graph,
    Tensor,
    active_graph,
    add,
    backward,
    clamped_reciprocal,
    concat,
    elementwise,
    elu,
    exp,
    get_dtype,
    global_norm,
    global_norm_clip,
    log,
    logsumexp,
    matmul,
    mul,
    neg,
    normal_cdf,
    precision,
    rectified_softmax,
    reduce,
    reshape,
    sigmoid,
    softmax,
    stack,
    sub,
    take,
    tanh,
    transpose,
    zeros,
)
from .tensor import max as reduce_max
from .tensor import sum as reduce_sum
from .gradcheck import GradCheckResult, check_gradients
