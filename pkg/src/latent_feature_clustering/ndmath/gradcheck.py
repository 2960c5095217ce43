"""Central-difference gradient checker"""
import logging
from typing import Callable, Union

import numpy as np

from ..errors import GradientCheckError, NonFiniteError, ShapeError
from .tensor import Tensor

# Configure logging
logger = logging.getLogger(__name__)


def _probe(f: Callable[[Tensor], Tensor], values: np.ndarray, coordinate: int) -> float:
    try:
        out = f(Tensor(values, requires_grad=False))
    except NonFiniteError as e:
        raise GradientCheckError(f"function is not finite when probing coordinate {coordinate}: {str(e)}", coordinate)
    value = float(np.asarray(out.data).reshape(-1)[0])
    if not np.isfinite(value):
        raise GradientCheckError(f"function is not finite when probing coordinate {coordinate}", coordinate)
    return value


def gradient_check(
    f: Callable[[Tensor], Tensor],
    x: Union[Tensor, np.ndarray],
    h: float = 1e-6,
) -> float:
    """Max relative error between backprop and central differences

    Runs in 64-bit regardless of the dtype of ``x``; ``f`` must map a tensor of
    x's shape to a scalar tensor.
    """
    base = np.array(x.data if isinstance(x, Tensor) else x, dtype=np.float64)
    probe = Tensor(base.copy(), requires_grad=True)
    try:
        out = f(probe)
    except NonFiniteError as e:
        raise GradientCheckError(f"function is not finite at the base point: {str(e)}", -1)
    if out.size != 1:
        raise ShapeError(f"gradient_check needs a scalar function, got shape {out.shape}")
    out.backward()
    analytic = probe.grad if probe.grad is not None else np.zeros_like(base)

    flat = base.reshape(-1)
    numeric = np.zeros_like(flat)
    for i in range(flat.size):
        shifted = flat.copy()
        shifted[i] = flat[i] + h
        upper = _probe(f, shifted.reshape(base.shape), i)
        shifted[i] = flat[i] - h
        lower = _probe(f, shifted.reshape(base.shape), i)
        numeric[i] = (upper - lower) / (2.0 * h)

    analytic = analytic.reshape(-1)
    error = np.abs(analytic - numeric) / np.maximum(1e-8, np.abs(analytic) + np.abs(numeric))
    worst = float(error.max()) if error.size else 0.0
    logger.debug(f"gradient check over {flat.size} coordinates: max relative error {worst:.3e}")
    return worst
