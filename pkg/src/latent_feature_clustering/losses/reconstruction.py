"""Reconstruction and KL terms"""
import logging
from typing import Union

import numpy as np

from ..errors import ShapeError
from ..models import GaussianParams
from ..ndmath import Tensor, as_tensor

# Configure logging
logger = logging.getLogger(__name__)

ArrayLike = Union[Tensor, np.ndarray]


def mse_loss(x: ArrayLike, x_hat: ArrayLike) -> Tensor:
    """Mean over all elements of (x_hat - x)^2"""
    x, x_hat = as_tensor(x), as_tensor(x_hat)
    if x.shape != x_hat.shape:
        raise ShapeError(f"mse_loss got shapes {x.shape} and {x_hat.shape}")
    return ((x_hat - x) ** 2).mean()


def kl_scale(beta: float, latent_dim: int, height: int, width: int) -> float:
    return beta * latent_dim / float(height * width)


def kl_loss(g: GaussianParams, beta: float, latent_dim: int, height: int, width: int) -> Tensor:
    """KL divergence to the unit Gaussian, scaled by beta * latent_dim / (H * W)

    The raw term is the batch mean of 0.5 * sum_d (mu^2 + exp(log_var) - 1 - log_var).
    """
    per_dim = g.mu ** 2 + g.log_var.exp() - 1.0 - g.log_var
    raw = (per_dim.sum(axis=1) * 0.5).mean()
    return raw * kl_scale(beta, latent_dim, height, width)
