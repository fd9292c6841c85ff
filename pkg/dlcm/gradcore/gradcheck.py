"""
Central finite-difference oracle evaluated on a float64 shadow pass
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from .tensor import Graph, Tensor, backward, precision


@dataclass
class GradCheckResult:
    ok: bool
    max_abs_error: float
    max_rel_error: float
    failures: List[Tuple[str, tuple, float, float]] = field(default_factory=list)


def check_gradients(
    build_loss: Callable[[Dict[str, Tensor]], Tensor],
    params: Dict[str, np.ndarray],
    step: float = 1e-3,
    rtol: float = 1e-3,
    atol: float = 1e-5,
) -> GradCheckResult:
    """Compare analytic gradients of build_loss with central differences.

    build_loss receives float64 leaf tensors keyed like params and must
    return a scalar. An entry passes when its absolute error is <= atol or
    its relative error is <= rtol.
    """
    shadow = {name: np.array(value, dtype=np.float64) for name, value in params.items()}
    with precision(np.float64):
        leaves = {name: Tensor(value, requires_grad=True) for name, value in shadow.items()}
        with Graph():
            loss = build_loss(leaves)
            backward(loss)
        analytic = {
            name: leaf.grad if leaf.grad is not None else np.zeros_like(shadow[name])
            for name, leaf in leaves.items()
        }

        def evaluate(name: str, position: tuple, delta: float) -> float:
            values = dict(shadow)
            bumped = shadow[name].copy()
            bumped[position] += delta
            values[name] = bumped
            return build_loss({key: Tensor(value) for key, value in values.items()}).item()

        result = GradCheckResult(ok=True, max_abs_error=0.0, max_rel_error=0.0)
        for name, value in shadow.items():
            for position in np.ndindex(value.shape):
                numeric = (evaluate(name, position, step) - evaluate(name, position, -step)) / (2 * step)
                exact = float(analytic[name][position])
                abs_error = abs(exact - numeric)
                rel_error = abs_error / max(abs(exact), abs(numeric), 1e-300)
                result.max_abs_error = max(result.max_abs_error, abs_error)
                if abs_error > atol:
                    result.max_rel_error = max(result.max_rel_error, rel_error)
                    if rel_error > rtol:
                        result.ok = False
                        result.failures.append((name, position, exact, numeric))
    return result
