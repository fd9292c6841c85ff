"""
Dense tensors with tape-based reverse-mode differentiation.

Operations executed inside an active ``Graph`` are recorded in creation
order, which is already a topological order; ``backward`` walks the tape
once in reverse. Outside a graph the same operations run without recording.
"""
import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from ..core.errors import (
    ContractError,
    DimensionError,
    NumericError,
    NON_SCALAR_ROOT,
    ROOT_NOT_ON_GRAPH,
)

LOG_CLAMP = 1e-12
_SQRT_2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

_state = threading.local()

ArrayLike = Union[np.ndarray, float, int, Sequence]
BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


def get_dtype():
    return getattr(_state, "dtype", np.float32)


@contextmanager
def precision(dtype):
    """Temporarily create tensors with another storage dtype (float64 shadow passes)"""
    previous = get_dtype()
    _state.dtype = np.dtype(dtype).type
    try:
        yield
    finally:
        _state.dtype = previous


def _ensure_finite(op: str, array: np.ndarray) -> None:
    if not np.all(np.isfinite(array)):
        raise NumericError(f"{op}: produced non-finite values")


class Tensor:
    """Dense float array that can take part in a differentiation graph"""

    __slots__ = ("data", "requires_grad", "grad", "_graph", "_node_index")

    def __init__(self, data: ArrayLike, requires_grad: bool = False):
        array = np.array(data, dtype=get_dtype())
        if 0 in array.shape:
            raise DimensionError(f"tensor extents must be positive, got {array.shape}")
        _ensure_finite("tensor", array)
        self.data = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._graph: Optional["Graph"] = None
        self._node_index = -1

    @classmethod
    def _wrap(cls, array: np.ndarray) -> "Tensor":
        out = cls.__new__(cls)
        out.data = array
        out.requires_grad = False
        out.grad = None
        out._graph = None
        out._node_index = -1
        return out

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return self._graph is None

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            return mul(self, clamped_reciprocal(other))
        return mul(self, 1.0 / float(other))

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return take(self, index)


@dataclass
class Node:
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn


class Graph:
    """Operation tape; use as a context manager to make it the active graph"""

    def __init__(self):
        self.nodes: List[Node] = []
        self._previous: Optional["Graph"] = None

    def __enter__(self) -> "Graph":
        self._previous = getattr(_state, "graph", None)
        _state.graph = self
        return self

    def __exit__(self, exc_type, exc, tb):
        _state.graph = self._previous
        self._previous = None
        return False

    def __len__(self):
        return len(self.nodes)

    def record(self, op: str, inputs: Tuple[Tensor, ...], output: Tensor, backward_fn: BackwardFn) -> None:
        output._graph = self
        output._node_index = len(self.nodes)
        self.nodes.append(Node(op, inputs, output, backward_fn))

    def backward(self, root: Tensor) -> None:
        grads = {id(root): np.ones_like(root.data)}
        leaves = {}
        for node in reversed(self.nodes[: root._node_index + 1]):
            upstream = grads.pop(id(node.output), None)
            if upstream is None:
                continue
            for tensor, grad in zip(node.inputs, node.backward(upstream)):
                if grad is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                grads[key] = grads[key] + grad if key in grads else grad
                if tensor.is_leaf:
                    leaves[key] = tensor
        for key, leaf in leaves.items():
            grad = np.array(grads[key], dtype=leaf.data.dtype)
            _ensure_finite("backward", grad)
            leaf.grad = grad if leaf.grad is None else leaf.grad + grad


def active_graph() -> Optional[Graph]:
    return getattr(_state, "graph", None)


def backward(root: Tensor) -> None:
    """Populate .grad of every requires_grad leaf reachable from a scalar root"""
    if root.size != 1:
        raise ContractError(f"{NON_SCALAR_ROOT}, got shape {root.shape}")
    if not root.requires_grad or root._graph is None or root._graph is not active_graph():
        raise ContractError(ROOT_NOT_ON_GRAPH)
    root._graph.backward(root)


def _coerce(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _make(op: str, data: np.ndarray, inputs: Tuple[Tensor, ...], backward_fn: BackwardFn) -> Tensor:
    array = np.asarray(data, dtype=get_dtype())
    _ensure_finite(op, array)
    out = Tensor._wrap(array)
    graph = active_graph()
    if graph is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        graph.record(op, inputs, out, backward_fn)
    return out


# Broadcasting is limited to scalars and trailing-axis vectors

def _broadcast_shape(op: str, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    if a == b:
        return a
    if int(np.prod(a)) == 1 and len(a) <= len(b):
        return b
    if int(np.prod(b)) == 1 and len(b) <= len(a):
        return a
    if len(a) < len(b) and b[len(b) - len(a):] == a:
        return b
    if len(b) < len(a) and a[len(a) - len(b):] == b:
        return a
    raise DimensionError(f"{op}: cannot broadcast shapes {a} and {b}")


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    if int(np.prod(shape)) == 1:
        return np.reshape(grad.sum(), shape)
    lead = grad.ndim - len(shape)
    return grad.sum(axis=tuple(range(lead)))


# Elementwise operations

def add(a, b) -> Tensor:
    a, b = _coerce(a), _coerce(b)
    _broadcast_shape("add", a.shape, b.shape)

    def backward_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _make("add", a.data + b.data, (a, b), backward_fn)


def sub(a, b) -> Tensor:
    a, b = _coerce(a), _coerce(b)
    _broadcast_shape("sub", a.shape, b.shape)

    def backward_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _make("sub", a.data - b.data, (a, b), backward_fn)


def mul(a, b) -> Tensor:
    a, b = _coerce(a), _coerce(b)
    _broadcast_shape("mul", a.shape, b.shape)

    def backward_fn(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _make("mul", a.data * b.data, (a, b), backward_fn)


def neg(a) -> Tensor:
    a = _coerce(a)
    return _make("neg", -a.data, (a,), lambda g: (-g,))


def sigmoid(a) -> Tensor:
    a = _coerce(a)
    out = special.expit(a.data)
    return _make("sigmoid", out, (a,), lambda g: (g * out * (1.0 - out),))


def tanh(a) -> Tensor:
    a = _coerce(a)
    out = np.tanh(a.data)
    return _make("tanh", out, (a,), lambda g: (g * (1.0 - out * out),))


def elu(a) -> Tensor:
    a = _coerce(a)
    x = a.data
    negative = np.expm1(np.minimum(x, 0.0))
    out = np.where(x >= 0, x, negative)
    slope = np.where(x >= 0, 1.0, negative + 1.0)
    return _make("elu", out, (a,), lambda g: (g * slope,))


def exp(a) -> Tensor:
    a = _coerce(a)
    with np.errstate(over="ignore"):
        out = np.exp(a.data)
    return _make("exp", out, (a,), lambda g: (g * out,))


def log(a) -> Tensor:
    """Natural log with inputs clamped to >= 1e-12; clamped entries get zero gradient"""
    a = _coerce(a)
    clamped = np.maximum(a.data, LOG_CLAMP)
    live = a.data >= LOG_CLAMP
    return _make("log", np.log(clamped), (a,), lambda g: (np.where(live, g / clamped, 0.0),))


def clamped_reciprocal(a) -> Tensor:
    a = _coerce(a)
    clamped = np.maximum(a.data, LOG_CLAMP)
    live = a.data >= LOG_CLAMP
    out = 1.0 / clamped
    return _make(
        "clamped_reciprocal", out, (a,), lambda g: (np.where(live, -g * out * out, 0.0),)
    )


def normal_cdf(a) -> Tensor:
    """Standard normal CDF via erfc; backward uses the Gaussian density"""
    a = _coerce(a)
    x = a.data
    out = 0.5 * special.erfc(-x / _SQRT_2)
    density = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return _make("normal_cdf", out, (a,), lambda g: (g * density,))


_ELEMENTWISE = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "sigmoid": sigmoid,
    "tanh": tanh,
    "elu": elu,
    "exp": exp,
    "log": log,
    "neg": neg,
    "clamped_reciprocal": clamped_reciprocal,
    "normal_cdf": normal_cdf,
}


def elementwise(op: str, *args) -> Tensor:
    if op not in _ELEMENTWISE:
        raise ContractError(f"unknown elementwise op '{op}'")
    return _ELEMENTWISE[op](*args)


# Linear algebra and shape operations

def matmul(a, b) -> Tensor:
    """Matrix product of a [p x q] with b [q] or [q x r]"""
    a, b = _coerce(a), _coerce(b)
    if a.ndim != 2 or b.ndim not in (1, 2) or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: inner dimensions disagree for shapes {a.shape} and {b.shape}")

    def backward_fn(g):
        if b.ndim == 1:
            return np.outer(g, b.data), a.data.T @ g
        return g @ b.data.T, a.data.T @ g

    return _make("matmul", a.data @ b.data, (a, b), backward_fn)


def transpose(a) -> Tensor:
    a = _coerce(a)
    if a.ndim != 2:
        raise DimensionError(f"transpose: expected a matrix, got shape {a.shape}")
    return _make("transpose", a.data.T.copy(), (a,), lambda g: (g.T,))


def reshape(a, shape: Sequence[int]) -> Tensor:
    a = _coerce(a)
    try:
        out = a.data.reshape(tuple(shape))
    except ValueError:
        raise DimensionError(f"reshape: cannot view shape {a.shape} as {tuple(shape)}")
    return _make("reshape", out.copy(), (a,), lambda g: (g.reshape(a.shape),))


def concat(tensors: Sequence, axis: int = -1) -> Tensor:
    parts = tuple(_coerce(t) for t in tensors)
    try:
        out = np.concatenate([t.data for t in parts], axis=axis)
    except ValueError as e:
        raise DimensionError(f"concat: {e}; shapes {[t.shape for t in parts]}")
    bounds = np.cumsum([t.shape[axis] for t in parts])[:-1]

    def backward_fn(g):
        return np.split(g, bounds, axis=axis)

    return _make("concat", out, parts, backward_fn)


def stack(tensors: Sequence) -> Tensor:
    parts = tuple(_coerce(t) for t in tensors)
    if not parts:
        raise ContractError("stack: empty sequence")
    if any(t.shape != parts[0].shape for t in parts):
        raise DimensionError(f"stack: shapes differ {[t.shape for t in parts]}")
    out = np.stack([t.data for t in parts])
    return _make("stack", out, parts, lambda g: tuple(g[i] for i in range(len(parts))))


def take(a, index) -> Tensor:
    """Basic or integer-array indexing; backward scatters into the indexed slots"""
    a = _coerce(a)
    out = np.array(a.data[index])

    def backward_fn(g):
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    return _make("take", out, (a,), backward_fn)


# Reductions

def _check_axis(op: str, t: Tensor, axis: Optional[int]) -> Optional[int]:
    if axis is None:
        return None
    if not -t.ndim <= axis < t.ndim:
        raise DimensionError(f"{op}: axis {axis} out of range for shape {t.shape}")
    return axis % t.ndim


def sum(a, axis: Optional[int] = None) -> Tensor:  # noqa: A001
    a = _coerce(a)
    axis = _check_axis("sum", a, axis)

    def backward_fn(g):
        if axis is None:
            return (np.full(a.shape, g, dtype=a.data.dtype),)
        return (np.broadcast_to(np.expand_dims(g, axis), a.shape).copy(),)

    return _make("sum", a.data.sum(axis=axis), (a,), backward_fn)


def max(a, axis: Optional[int] = None) -> Tensor:  # noqa: A001
    """Max reduction; gradient flows to the first maximal element"""
    a = _coerce(a)
    axis = _check_axis("max", a, axis)

    def backward_fn(g):
        full = np.zeros_like(a.data)
        if axis is None:
            full.flat[int(np.argmax(a.data))] = g
        else:
            idx = np.expand_dims(np.argmax(a.data, axis=axis), axis)
            np.put_along_axis(full, idx, np.expand_dims(g, axis), axis)
        return (full,)

    return _make("max", a.data.max(axis=axis), (a,), backward_fn)


def _last_axis(op: str, a: Tensor, axis: Optional[int]) -> None:
    if axis is not None and _check_axis(op, a, axis) != a.ndim - 1:
        raise DimensionError(f"{op}: only the last axis is supported, got axis {axis}")


def softmax(a, axis: Optional[int] = None) -> Tensor:
    """Softmax over the last axis, stabilized by max-subtraction"""
    a = _coerce(a)
    _last_axis("softmax", a, axis)
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=-1, keepdims=True)

    def backward_fn(g):
        return (out * (g - (out * g).sum(axis=-1, keepdims=True)),)

    return _make("softmax", out, (a,), backward_fn)


def logsumexp(a, axis: Optional[int] = None) -> Tensor:
    a = _coerce(a)
    _last_axis("logsumexp", a, axis)
    top = a.data.max(axis=-1, keepdims=True)
    e = np.exp(a.data - top)
    total = e.sum(axis=-1, keepdims=True)
    out = (top + np.log(total)).squeeze(-1)
    weights = e / total

    def backward_fn(g):
        return (weights * np.expand_dims(g, -1),)

    return _make("logsumexp", out, (a,), backward_fn)


def rectified_softmax(a, axis: Optional[int] = None) -> Tensor:
    """psi(x)/sum(psi) with psi(x) = e^x for x > 0 and 0 otherwise.

    Evaluated with the positive maximum subtracted. When no entry is
    positive the result is all zeros.
    """
    a = _coerce(a)
    _last_axis("rectified_softmax", a, axis)
    x = a.data
    positive = x > 0
    top = np.where(positive, x, -np.inf).max(axis=-1, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    e = np.where(positive, np.exp(np.where(positive, x - top, 0.0)), 0.0)
    total = e.sum(axis=-1, keepdims=True)
    out = np.where(total > 0, e / np.where(total > 0, total, 1.0), 0.0)

    def backward_fn(g):
        return (out * (g - (out * g).sum(axis=-1, keepdims=True)),)

    return _make("rectified_softmax", out, (a,), backward_fn)


_REDUCTIONS = {
    "sum": sum,
    "max": max,
    "softmax_lastaxis": softmax,
    "logsumexp": logsumexp,
    "rectified_softmax": rectified_softmax,
}


def reduce(op: str, t, axis: Optional[int] = None) -> Tensor:
    if op not in _REDUCTIONS:
        raise ContractError(f"unknown reduction '{op}'")
    return _REDUCTIONS[op](t, axis)


# Gradient utilities

def global_norm(grads: Sequence[np.ndarray]) -> float:
    return math.sqrt(float(np.sum([np.sum(np.square(g, dtype=np.float64)) for g in grads])))


def global_norm_clip(grads: Sequence[np.ndarray], max_norm: float) -> List[np.ndarray]:
    """Scale all gradients by max_norm/norm when the global norm exceeds max_norm"""
    if max_norm <= 0:
        raise ContractError(f"max_norm must be positive, got {max_norm}")
    norm = global_norm(grads)
    if norm <= max_norm:
        return list(grads)
    scale = max_norm / norm
    return [(g * scale).astype(g.dtype) for g in grads]


def zeros(shape: Sequence[int]) -> Tensor:
    return Tensor(np.zeros(tuple(shape)))
