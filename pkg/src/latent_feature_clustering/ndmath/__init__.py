"""Differentiable array substrate: tensors, layer primitives, Adam and a gradient checker"""

from .tensor import Tensor, Function, as_tensor, init_parameter
from .functional import (
    conv2d,
    conv2d_transpose,
    conv_output_size,
    cross_entropy,
    dropout,
    flatten,
    linear,
    pairwise_distances,
    relu,
    transpose_output_padding,
)
from .optim import Adam, AdamState, adam_update
from .gradcheck import gradient_check

__all__ = [
    'Tensor',
    'Function',
    'as_tensor',
    'init_parameter',
    'conv2d',
    'conv2d_transpose',
    'conv_output_size',
    'cross_entropy',
    'dropout',
    'flatten',
    'linear',
    'pairwise_distances',
    'relu',
    'transpose_output_padding',
    'Adam',
    'AdamState',
    'adam_update',
    'gradient_check',
]
