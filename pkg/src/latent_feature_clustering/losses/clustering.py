"""Differentiable in-batch silhouette used as the clustering objective"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import ClusteringLossError, ShapeError
from ..ndmath import Tensor, as_tensor, pairwise_distances

# Configure logging
logger = logging.getLogger(__name__)

SILHOUETTE_EPS = 1e-9
EXCLUDED = 1e12


@dataclass
class SilhouetteTerms:
    """Per-point silhouette pieces; ``valid`` marks points counted in the mean"""

    a: np.ndarray
    b: np.ndarray
    s: np.ndarray
    valid: np.ndarray

    @property
    def score(self) -> float:
        return float(self.s[self.valid].mean())


def one_hot(labels: np.ndarray, class_count: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise ShapeError(f"labels must be one-dimensional, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= class_count):
        raise ClusteringLossError(f"labels must lie in [0, {class_count}), got range "
                                  f"[{labels.min()}, {labels.max()}]")
    memberships = np.zeros((labels.size, class_count))
    memberships[np.arange(labels.size), labels] = 1.0
    return memberships


def soft_silhouette_loss(
    z: Union[Tensor, np.ndarray],
    labels: np.ndarray,
    class_count: int,
    memberships: Optional[np.ndarray] = None,
) -> Tuple[Tensor, SilhouetteTerms]:
    """1 - mean silhouette of the batch, built from tensor ops so it stays differentiable

    ``memberships`` (N, K) replaces the one-hot matrix derived from ``labels``;
    a point's own cluster is its largest membership.
    """
    z = as_tensor(z)
    if z.ndim != 2:
        raise ShapeError(f"latent batch must be (N, D), got {z.shape}")
    if memberships is None:
        memberships = one_hot(labels, class_count)
    memberships = np.asarray(memberships, dtype=z.dtype)
    n = z.shape[0]
    if memberships.shape != (n, class_count):
        raise ShapeError(f"memberships must be ({n}, {class_count}), got {memberships.shape}")

    own = memberships.argmax(axis=1)
    counts = memberships.sum(axis=0)
    represented = counts > 0
    if int(represented.sum()) < 2:
        raise ClusteringLossError("clustering loss undefined for single-cluster batch")
    valid = counts[own] >= 2
    if int(valid.sum()) < 2:
        raise ClusteringLossError(f"clustering loss needs two points in populated clusters, got {int(valid.sum())}")

    distances = pairwise_distances(z)
    totals = distances @ as_tensor(memberships)
    denominators = np.maximum(counts[None, :] - memberships, 1.0).astype(z.dtype)
    mean_distance = totals / as_tensor(denominators)

    a = (mean_distance * as_tensor(memberships)).sum(axis=1)
    excluded = np.zeros((n, class_count), dtype=z.dtype)
    excluded[np.arange(n), own] = EXCLUDED
    excluded[:, ~represented] = EXCLUDED
    b = (mean_distance + as_tensor(excluded)).min(axis=1)

    s = (b - a) / (a.maximum(b) + SILHOUETTE_EPS)
    weights = valid.astype(z.dtype) / float(valid.sum())
    score = (s * as_tensor(weights)).sum()
    loss = 1.0 - score

    terms = SilhouetteTerms(a=a.data.copy(), b=b.data.copy(), s=s.data.copy(), valid=valid)
    logger.debug(f"Soft silhouette {score.item():.4f} over {int(valid.sum())} of {n} points")
    return loss, terms
