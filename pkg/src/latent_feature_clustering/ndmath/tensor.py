"""Reverse-mode differentiable array used by every model and loss"""
import logging
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import NonFiniteError, ShapeError

# Configure logging
logger = logging.getLogger(__name__)

Scalar = Union[int, float]
Operand = Union["Tensor", np.ndarray, Scalar]


class Function:
    """Base class for differentiable operations

    Subclasses implement ``forward`` on raw numpy arrays and ``backward``, which
    receives dL/d(output) and returns dL/d(input) for every input tensor.
    """

    def __init__(self, *tensors: "Tensor"):
        self.tensors = tensors

    def forward(self, *args: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no forward pass")

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError(f"{type(self).__name__} has no backward pass")

    @classmethod
    def apply(cls, *tensors: "Tensor", **kwargs: Any) -> "Tensor":
        """Run the forward pass and wrap the result in a graph node"""
        func = cls(*tensors)
        out = func.forward(*(t.data for t in tensors), **kwargs)
        if not np.all(np.isfinite(out)):
            raise NonFiniteError(f"{cls.__name__} produced non-finite values", op=cls.__name__)
        requires_grad = any(t.requires_grad for t in tensors)
        return Tensor(out, requires_grad=requires_grad, creator=func if requires_grad else None)

    @staticmethod
    def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
        """Sum a broadcast gradient back down to ``shape``"""
        if grad.shape == shape:
            return grad
        while grad.ndim > len(shape):
            grad = grad.sum(axis=0)
        for axis, extent in enumerate(shape):
            if extent == 1 and grad.shape[axis] != 1:
                grad = grad.sum(axis=axis, keepdims=True)
        return grad


class Tensor:
    """Dense float array that records the operations applied to it"""

    def __init__(
        self,
        data: Any,
        requires_grad: bool = False,
        creator: Optional[Function] = None,
        dtype: Optional[Any] = None,
    ):
        array = np.asarray(data, dtype=dtype)
        if array.dtype.kind != "f":
            array = array.astype(np.float32)
        self.data = array
        self.requires_grad = requires_grad
        self.creator = creator
        self._grad: Optional[np.ndarray] = None

    # Properties

    @property
    def grad(self) -> Optional[np.ndarray]:
        return self._grad

    @grad.setter
    def grad(self, value: Optional[np.ndarray]) -> None:
        if value is not None and value.shape != self.data.shape:
            raise ShapeError(f"gradient shape {value.shape} does not match value shape {self.data.shape}")
        self._grad = value

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def T(self) -> "Tensor":
        return self.transpose()

    def __len__(self) -> int:
        return self.data.shape[0]

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def astype(self, dtype: Any) -> "Tensor":
        return Tensor(self.data.astype(dtype), requires_grad=self.requires_grad)

    def zero_grad(self) -> None:
        self._grad = None

    # Arithmetic

    def _lift(self, other: Operand) -> "Tensor":
        if isinstance(other, Tensor):
            return other
        return Tensor(np.asarray(other, dtype=self.data.dtype))

    def __add__(self, other: Operand) -> "Tensor":
        return Add.apply(self, self._lift(other))

    def __radd__(self, other: Operand) -> "Tensor":
        return Add.apply(self._lift(other), self)

    def __sub__(self, other: Operand) -> "Tensor":
        return Add.apply(self, Neg.apply(self._lift(other)))

    def __rsub__(self, other: Operand) -> "Tensor":
        return Add.apply(self._lift(other), Neg.apply(self))

    def __mul__(self, other: Operand) -> "Tensor":
        return Mul.apply(self, self._lift(other))

    def __rmul__(self, other: Operand) -> "Tensor":
        return Mul.apply(self._lift(other), self)

    def __truediv__(self, other: Operand) -> "Tensor":
        return Div.apply(self, self._lift(other))

    def __rtruediv__(self, other: Operand) -> "Tensor":
        return Div.apply(self._lift(other), self)

    def __neg__(self) -> "Tensor":
        return Neg.apply(self)

    def __pow__(self, exponent: Scalar) -> "Tensor":
        return Pow.apply(self, exponent=float(exponent))

    def __matmul__(self, other: Operand) -> "Tensor":
        return MatMul.apply(self, self._lift(other))

    # Reductions and elementwise functions

    def sum(self, axis: Optional[Union[int, Sequence[int]]] = None, keepdims: bool = False) -> "Tensor":
        return Sum.apply(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: Optional[Union[int, Sequence[int]]] = None, keepdims: bool = False) -> "Tensor":
        if axis is None:
            count = self.size
        else:
            axes = (axis,) if isinstance(axis, int) else tuple(axis)
            count = int(np.prod([self.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / max(count, 1))

    def min(self, axis: int, keepdims: bool = False) -> "Tensor":
        return Min.apply(self, axis=axis, keepdims=keepdims)

    def exp(self) -> "Tensor":
        return Exp.apply(self)

    def log(self) -> "Tensor":
        return Log.apply(self)

    def sqrt(self) -> "Tensor":
        return Sqrt.apply(self)

    def relu(self) -> "Tensor":
        return Relu.apply(self)

    def maximum(self, other: Operand) -> "Tensor":
        return Maximum.apply(self, self._lift(other))

    def reshape(self, *shape: int) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Reshape.apply(self, shape=shape)

    def transpose(self) -> "Tensor":
        if self.ndim != 2:
            raise ShapeError(f"transpose expects a 2-D tensor, got shape {self.shape}")
        return Transpose.apply(self)

    # Backpropagation

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """Propagate gradients to every node upstream of this one

        Gradients of nodes reached through several paths are summed. The graph
        is released afterwards, so ``backward`` runs once per forward pass.
        """
        if not self.requires_grad:
            return
        if grad is None:
            if self.data.size != 1:
                raise ShapeError(f"backward without a seed gradient needs a scalar, got shape {self.shape}")
            grad = np.ones_like(self.data)
        self._accumulate(np.asarray(grad, dtype=self.data.dtype))

        order: List[Tensor] = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in visited:
                continue
            if expanded:
                visited.add(id(node))
                order.append(node)
                continue
            stack.append((node, True))
            if node.creator is not None:
                for parent in node.creator.tensors:
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))

        for node in reversed(order):
            if node.creator is None or node._grad is None:
                continue
            grads = node.creator.backward(node._grad)
            for parent, g in zip(node.creator.tensors, grads):
                if g is not None and parent.requires_grad:
                    parent._accumulate(g)

        for node in order:
            if node.creator is not None:
                node.creator.tensors = ()
                node.creator = None

    def _accumulate(self, grad: np.ndarray) -> None:
        grad = np.asarray(grad, dtype=self.data.dtype).reshape(self.data.shape)
        if self._grad is None:
            self._grad = grad.copy()
        else:
            self._grad = self._grad + grad


def as_tensor(value: Operand, dtype: Any = None) -> Tensor:
    """Wrap a constant as a non-differentiable tensor"""
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=dtype))


def init_parameter(
    shape: Tuple[int, ...], fan_in: int, rng: np.random.Generator, dtype: Any = np.float32
) -> Tensor:
    """Learnable array drawn uniformly from [-sqrt(1/fan_in), +sqrt(1/fan_in)]"""
    bound = float(np.sqrt(1.0 / fan_in))
    return Tensor(rng.uniform(-bound, bound, size=shape).astype(dtype), requires_grad=True)


# Primitive operations


class Add(Function):
    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.shapes = (x.shape, y.shape)
        return x + y

    def backward(self, grad):
        return self.unbroadcast(grad, self.shapes[0]), self.unbroadcast(grad, self.shapes[1])


class Neg(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        return -x

    def backward(self, grad):
        return (-grad,)


class Mul(Function):
    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.x, self.y = x, y
        return x * y

    def backward(self, grad):
        return (
            self.unbroadcast(grad * self.y, self.x.shape),
            self.unbroadcast(grad * self.x, self.y.shape),
        )


class Div(Function):
    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.x, self.y = x, y
        return x / y

    def backward(self, grad):
        return (
            self.unbroadcast(grad / self.y, self.x.shape),
            self.unbroadcast(-grad * self.x / (self.y * self.y), self.y.shape),
        )


class Pow(Function):
    def forward(self, x: np.ndarray, exponent: float) -> np.ndarray:
        self.x, self.exponent = x, exponent
        return np.power(x, exponent)

    def backward(self, grad):
        return (grad * self.exponent * np.power(self.x, self.exponent - 1.0),)


class MatMul(Function):
    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[0]:
            raise ShapeError(f"cannot multiply shapes {x.shape} and {y.shape}")
        self.x, self.y = x, y
        return x @ y

    def backward(self, grad):
        return grad @ self.y.T, self.x.T @ grad


class Sum(Function):
    def forward(self, x: np.ndarray, axis=None, keepdims: bool = False) -> np.ndarray:
        self.shape = x.shape
        self.axis = axis
        self.keepdims = keepdims
        return np.asarray(np.sum(x, axis=axis, keepdims=keepdims))

    def backward(self, grad):
        if self.axis is not None and not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return (np.broadcast_to(grad, self.shape).copy(),)


class Min(Function):
    """Minimum along one axis; the gradient goes to the first minimal entry"""

    def forward(self, x: np.ndarray, axis: int, keepdims: bool = False) -> np.ndarray:
        self.shape = x.shape
        self.axis = axis
        self.keepdims = keepdims
        self.index = np.expand_dims(np.argmin(x, axis=axis), axis)
        return np.min(x, axis=axis, keepdims=keepdims)

    def backward(self, grad):
        if not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        out = np.zeros(self.shape, dtype=grad.dtype)
        np.put_along_axis(out, self.index, grad, axis=self.axis)
        return (out,)


class Exp(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.out = np.exp(x)
        return self.out

    def backward(self, grad):
        return (grad * self.out,)


class Log(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.x = x
        return np.log(x)

    def backward(self, grad):
        return (grad / self.x,)


class Sqrt(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.out = np.sqrt(x)
        return self.out

    def backward(self, grad):
        return (grad * 0.5 / self.out,)


class Relu(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.mask = x > 0
        return np.where(self.mask, x, 0).astype(x.dtype)

    def backward(self, grad):
        return (grad * self.mask,)


class Maximum(Function):
    """Elementwise maximum; ties send the gradient to the first operand"""

    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.shapes = (x.shape, y.shape)
        self.first = x >= y
        return np.maximum(x, y)

    def backward(self, grad):
        return (
            self.unbroadcast(grad * self.first, self.shapes[0]),
            self.unbroadcast(grad * ~self.first, self.shapes[1]),
        )


class Reshape(Function):
    def forward(self, x: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
        self.shape = x.shape
        try:
            return x.reshape(shape)
        except ValueError as e:
            raise ShapeError(f"cannot reshape {x.shape} to {shape}: {str(e)}")

    def backward(self, grad):
        return (grad.reshape(self.shape),)


class Transpose(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        return x.T

    def backward(self, grad):
        return (grad.T,)
