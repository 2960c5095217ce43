"""Layer primitives built on the differentiable tensor: convolutions, linear maps, distances"""
import logging
from typing import Optional, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ConfigurationError, ShapeError
from .tensor import Function, Tensor, as_tensor

# Configure logging
logger = logging.getLogger(__name__)

DISTANCE_EPS = 1e-12


def conv_output_size(size: int, stride: int = 2, pad: int = 1, kernel: int = 3) -> int:
    """Spatial extent after a convolution"""
    return (size + 2 * pad - kernel) // stride + 1


def transpose_output_padding(target: int, size: int, stride: int = 2, pad: int = 1, kernel: int = 3) -> int:
    """Output padding that makes a transpose convolution map ``size`` back to ``target``"""
    padding = target - ((size - 1) * stride - 2 * pad + kernel)
    if not 0 <= padding < stride:
        raise ConfigurationError(
            f"no output padding maps {size} back to {target} with stride {stride} and pad {pad}"
        )
    return padding


class Conv2d(Function):
    """Batched cross-correlation; input (B, C_in, H, W), kernels (C_out, C_in, k, k)"""

    def forward(self, x: np.ndarray, w: np.ndarray, stride: int = 2, pad: int = 1) -> np.ndarray:
        kh, kw = w.shape[2:]
        self.stride, self.pad = stride, pad
        self.input_shape = x.shape
        padded = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
        self.padded_shape = padded.shape
        self.windows = sliding_window_view(padded, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
        self.w = w
        return np.einsum("bchwij,ocij->bohw", self.windows, w, optimize=True)

    def backward(self, grad):
        kh, kw = self.w.shape[2:]
        s = self.stride
        out_h, out_w = grad.shape[2:]
        grad_w = np.einsum("bchwij,bohw->ocij", self.windows, grad, optimize=True)
        grad_padded = np.zeros(self.padded_shape, dtype=grad.dtype)
        for i in range(kh):
            for j in range(kw):
                grad_padded[:, :, i:i + s * out_h:s, j:j + s * out_w:s] += np.einsum(
                    "bohw,oc->bchw", grad, self.w[:, :, i, j], optimize=True
                )
        h, w = self.input_shape[2:]
        p = self.pad
        return grad_padded[:, :, p:p + h, p:p + w], grad_w


class ConvTranspose2d(Function):
    """Adjoint of Conv2d; input (B, C_in, H, W), kernels (C_in, C_out, k, k)"""

    def forward(
        self, x: np.ndarray, w: np.ndarray, stride: int = 2, pad: int = 1, output_padding=(0, 0)
    ) -> np.ndarray:
        batch, _, h, wd = x.shape
        op_h, op_w = output_padding
        _, c_out, kh, kw = w.shape
        s = stride
        self.x, self.w = x, w
        self.stride, self.pad = stride, pad
        self.canvas_shape = (batch, c_out, (h - 1) * s + kh + op_h, (wd - 1) * s + kw + op_w)
        canvas = np.zeros(self.canvas_shape, dtype=np.result_type(x, w))
        for i in range(kh):
            for j in range(kw):
                canvas[:, :, i:i + s * h:s, j:j + s * wd:s] += np.einsum(
                    "bchw,co->bohw", x, w[:, :, i, j], optimize=True
                )
        self.out_h = self.canvas_shape[2] - 2 * pad
        self.out_w = self.canvas_shape[3] - 2 * pad
        return canvas[:, :, pad:pad + self.out_h, pad:pad + self.out_w]

    def backward(self, grad):
        kh, kw = self.w.shape[2:]
        s, p = self.stride, self.pad
        h, wd = self.x.shape[2:]
        canvas = np.zeros(self.canvas_shape, dtype=grad.dtype)
        canvas[:, :, p:p + self.out_h, p:p + self.out_w] = grad
        grad_x = np.zeros_like(self.x, dtype=grad.dtype)
        grad_w = np.zeros_like(self.w, dtype=grad.dtype)
        for i in range(kh):
            for j in range(kw):
                window = canvas[:, :, i:i + s * h:s, j:j + s * wd:s]
                grad_x += np.einsum("bohw,co->bchw", window, self.w[:, :, i, j], optimize=True)
                grad_w[:, :, i, j] = np.einsum("bchw,bohw->co", self.x, window, optimize=True)
        return grad_x, grad_w


class PairwiseDistances(Function):
    """Euclidean distance matrix with an epsilon-stabilized square root"""

    def forward(self, x: np.ndarray, eps: float = DISTANCE_EPS) -> np.ndarray:
        self.x = x
        n = x.shape[0]
        diff = x[:, None, :] - x[None, :, :]
        squared = np.einsum("ijd,ijd->ij", diff, diff)
        offdiag = ~np.eye(n, dtype=bool)
        self.active = (squared > eps) & offdiag
        self.dist = np.sqrt(np.maximum(squared, eps)) * offdiag
        return self.dist

    def backward(self, grad):
        weight = np.zeros_like(grad)
        np.divide(grad + grad.T, self.dist, out=weight, where=self.active)
        grad_x = weight.sum(axis=1)[:, None] * self.x - weight @ self.x
        return (grad_x,)


class CrossEntropy(Function):
    """Mean softmax cross-entropy of logits (B, C) against integer labels"""

    def forward(self, logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        log_probs = shifted - log_norm
        self.probs = np.exp(log_probs)
        self.labels = labels.astype(np.int64)
        rows = np.arange(logits.shape[0])
        return np.asarray(-log_probs[rows, self.labels].mean(), dtype=logits.dtype)

    def backward(self, grad):
        batch = self.probs.shape[0]
        delta = self.probs.copy()
        delta[np.arange(batch), self.labels] -= 1.0
        return grad * delta / batch, None


def _batched(x: Tensor) -> Tensor:
    if x.ndim == 3:
        return x.reshape(1, *x.shape)
    if x.ndim != 4:
        raise ShapeError(f"convolution input must be (C, H, W) or (B, C, H, W), got {x.shape}")
    return x


def conv2d(
    x: Tensor, kernels: Tensor, bias: Optional[Tensor] = None, stride: int = 2, pad: int = 1
) -> Tensor:
    """3x3 convolution with zero padding"""
    if stride not in (1, 2):
        raise ConfigurationError(f"stride must be 1 or 2, got {stride}")
    unbatched = x.ndim == 3
    x = _batched(x)
    if kernels.ndim != 4 or kernels.shape[2:] != (3, 3):
        raise ShapeError(f"kernels must have shape (C_out, C_in, 3, 3), got {kernels.shape}")
    if x.shape[1] != kernels.shape[1]:
        raise ShapeError(f"input has {x.shape[1]} channels but kernels expect {kernels.shape[1]}")
    out = Conv2d.apply(x, kernels, stride=stride, pad=pad)
    if bias is not None:
        out = out + bias.reshape(1, -1, 1, 1)
    return out.reshape(out.shape[1:]) if unbatched else out


def conv2d_transpose(
    x: Tensor,
    kernels: Tensor,
    bias: Optional[Tensor] = None,
    stride: int = 2,
    pad: int = 1,
    output_padding: Union[int, Tuple[int, int]] = 0,
) -> Tensor:
    """Transpose of ``conv2d``; ``output_padding`` selects among the shapes it could invert

    A single integer pads both spatial axes; a pair pads (height, width).
    """
    if isinstance(output_padding, int):
        output_padding = (output_padding, output_padding)
    unbatched = x.ndim == 3
    x = _batched(x)
    if kernels.ndim != 4 or kernels.shape[2:] != (3, 3):
        raise ShapeError(f"kernels must have shape (C_in, C_out, 3, 3), got {kernels.shape}")
    if x.shape[1] != kernels.shape[0]:
        raise ShapeError(f"input has {x.shape[1]} channels but kernels expect {kernels.shape[0]}")
    if not all(0 <= p < stride for p in output_padding):
        raise ConfigurationError(f"output_padding {output_padding} must lie in [0, {stride})")
    out = ConvTranspose2d.apply(x, kernels, stride=stride, pad=pad, output_padding=tuple(output_padding))
    if bias is not None:
        out = out + bias.reshape(1, -1, 1, 1)
    return out.reshape(out.shape[1:]) if unbatched else out


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """Affine map x @ W + b with W of shape (in, out)"""
    if x.ndim != 2 or x.shape[1] != weight.shape[0]:
        raise ShapeError(f"linear layer expects (B, {weight.shape[0]}) input, got {x.shape}")
    out = x @ weight
    return out + bias if bias is not None else out


def relu(x: Tensor) -> Tensor:
    return x.relu()


def flatten(x: Tensor) -> Tensor:
    return x.reshape(x.shape[0], -1)


def dropout(x: Tensor, p: float, rng: Optional[np.random.Generator], training: bool) -> Tensor:
    """Inverted dropout: scale kept units by 1/(1-p) in training, identity otherwise"""
    if not training or p <= 0.0:
        return x
    if rng is None:
        raise ConfigurationError("dropout in training mode needs a random generator")
    keep = (rng.random(x.shape) >= p).astype(x.dtype) / (1.0 - p)
    return x * as_tensor(keep.astype(x.dtype))


def pairwise_distances(points: Tensor, eps: float = DISTANCE_EPS) -> Tensor:
    """Symmetric Euclidean distance matrix with a zero diagonal"""
    if points.ndim != 2:
        raise ShapeError(f"pairwise_distances expects (N, D) points, got {points.shape}")
    if points.shape[0] == 0:
        return Tensor(np.zeros((0, 0), dtype=points.dtype))
    return PairwiseDistances.apply(points, eps=eps)


def cross_entropy(logits: Tensor, labels: np.ndarray) -> Tensor:
    if logits.ndim != 2 or logits.shape[0] != len(labels):
        raise ShapeError(f"logits {logits.shape} do not match {len(labels)} labels")
    return CrossEntropy.apply(logits, as_tensor(np.asarray(labels, dtype=logits.dtype)))
