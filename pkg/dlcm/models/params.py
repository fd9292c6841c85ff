"""
Named parameter collections shared by every model
"""
from collections import OrderedDict
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..gradcore import Tensor

PARAM_DTYPE = np.float32

# Starting bias of pointwise output layers, keeping initial scores above the psi kink
OUTPUT_BIAS = 1.0


class ModelParams:
    """Ordered mapping name -> float32 leaf tensor"""

    def __init__(self, tensors: Optional[Dict[str, Tensor]] = None):
        self._tensors: "OrderedDict[str, Tensor]" = OrderedDict(tensors or {})

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray]) -> "ModelParams":
        return cls(OrderedDict(
            (name, Tensor(np.asarray(value, dtype=PARAM_DTYPE), requires_grad=True))
            for name, value in arrays.items()
        ))

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def names(self) -> List[str]:
        return list(self._tensors)

    def items(self) -> List[Tuple[str, Tensor]]:
        return list(self._tensors.items())

    def tensors(self) -> List[Tensor]:
        return list(self._tensors.values())

    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {name: t.shape for name, t in self._tensors.items()}

    def count(self) -> int:
        """Total number of scalar parameters"""
        return int(np.sum([t.size for t in self._tensors.values()])) if self._tensors else 0

    def arrays(self) -> Dict[str, np.ndarray]:
        return OrderedDict((name, t.data.copy()) for name, t in self._tensors.items())

    def copy(self) -> "ModelParams":
        return ModelParams.from_arrays(self.arrays())

    def zeroed(self) -> "ModelParams":
        """Same names and shapes, every value zero"""
        return ModelParams.from_arrays({name: np.zeros_like(value) for name, value in self.arrays().items()})

    def zero_grad(self) -> None:
        for t in self._tensors.values():
            t.grad = None

    def grads(self) -> List[np.ndarray]:
        return [t.grad if t.grad is not None else np.zeros_like(t.data) for t in self._tensors.values()]

    def apply_update(self, updates: Sequence[np.ndarray], lr: float) -> None:
        """params <- params - lr * update, in parameter order"""
        for t, update in zip(self._tensors.values(), updates):
            t.data = (t.data - lr * update).astype(PARAM_DTYPE)


def scaled_uniform(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    """Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], fan_in = last extent"""
    bound = 1.0 / np.sqrt(shape[-1])
    return rng.uniform(-bound, bound, size=shape).astype(PARAM_DTYPE)
