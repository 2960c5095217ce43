"""Adam optimizer over named parameter arrays"""
import copy
import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..errors import ConfigurationError, NonFiniteError, ShapeError
from .tensor import Tensor

# Configure logging
logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Step count and moment accumulators, keyed by parameter name"""

    lr: float = 0.0005
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def create(cls, params: Mapping[str, np.ndarray], lr: float = 0.0005, **kwargs) -> "AdamState":
        state = cls(lr=lr, **kwargs)
        for name, value in params.items():
            state.m[name] = np.zeros_like(value)
            state.v[name] = np.zeros_like(value)
        return state


def adam_update(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, Optional[np.ndarray]],
    state: AdamState,
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam step; returns new arrays and a new state

    A parameter without a gradient is treated as having a zero gradient.
    """
    if state.step < 0:
        raise ConfigurationError(f"Adam step count must be non-negative, got {state.step}")
    new_state = AdamState(lr=state.lr, beta1=state.beta1, beta2=state.beta2, eps=state.eps, step=state.step + 1)
    t = new_state.step
    b1, b2 = state.beta1, state.beta2
    updated = {}
    for name, value in params.items():
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(value)
        if grad.shape != value.shape:
            raise ShapeError(f"gradient for {name} has shape {grad.shape}, parameter has {value.shape}")
        if not np.all(np.isfinite(grad)):
            raise NonFiniteError(f"non-finite gradient for parameter {name}", op="adam_update")
        m_prev = state.m.get(name, np.zeros_like(value))
        v_prev = state.v.get(name, np.zeros_like(value))
        m = b1 * m_prev + (1.0 - b1) * grad
        v = b2 * v_prev + (1.0 - b2) * grad * grad
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        updated[name] = (value - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(value.dtype)
        new_state.m[name] = m.astype(value.dtype)
        new_state.v[name] = v.astype(value.dtype)
    return updated, new_state


class Adam:
    """Stateful wrapper that applies ``adam_update`` to a set of tensors in place"""

    def __init__(self, params: Mapping[str, Tensor], lr: float = 0.0005, **kwargs):
        self.params = dict(params)
        self.state = AdamState.create({n: p.data for n, p in self.params.items()}, lr=lr, **kwargs)

    @property
    def lr(self) -> float:
        return self.state.lr

    @lr.setter
    def lr(self, value: float) -> None:
        self.state.lr = value

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def step(self) -> None:
        values = {n: p.data for n, p in self.params.items()}
        grads = {n: p.grad for n, p in self.params.items()}
        updated, self.state = adam_update(values, grads, self.state)
        for name, value in updated.items():
            self.params[name].data = value

    def snapshot(self) -> AdamState:
        return copy.deepcopy(self.state)
