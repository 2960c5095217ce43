"""Margin-based contrastive loss over every in-batch pair"""
import logging
from typing import Union

import numpy as np

from ..errors import ClusteringLossError, ShapeError
from ..ndmath import Tensor, as_tensor, pairwise_distances

# Configure logging
logger = logging.getLogger(__name__)


def contrastive_loss(z: Union[Tensor, np.ndarray], labels: np.ndarray, margin: float = 1.0) -> Tensor:
    """Mean over unordered pairs of y * D^2 + (1 - y) * max(0, margin - D)^2"""
    z = as_tensor(z)
    labels = np.asarray(labels)
    if z.ndim != 2 or z.shape[0] != labels.shape[0]:
        raise ShapeError(f"latent batch {z.shape} does not match {labels.shape[0]} labels")
    n = z.shape[0]
    if n < 2:
        raise ClusteringLossError(f"contrastive loss needs at least 2 points, got {n}")

    distances = pairwise_distances(z)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    same = (labels[:, None] == labels[None, :]) & upper
    different = ~(labels[:, None] == labels[None, :]) & upper

    positive = distances ** 2 * as_tensor(same.astype(z.dtype))
    negative = (margin - distances).relu() ** 2 * as_tensor(different.astype(z.dtype))
    pairs = n * (n - 1) // 2
    return (positive + negative).sum() * (1.0 / pairs)
