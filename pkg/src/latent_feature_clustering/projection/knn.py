"""Exact k-nearest-neighbour search"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ProjectionError, ShapeError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass
class KnnResult:
    """Neighbour indices and distances, both (N, k), sorted by distance then index"""

    indices: np.ndarray
    distances: np.ndarray

    @property
    def k(self) -> int:
        return self.indices.shape[1]

    def __len__(self) -> int:
        return self.indices.shape[0]


def knn_graph(z: np.ndarray, k: int) -> KnnResult:
    """Brute-force Euclidean kNN; a point is never its own neighbour"""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2:
        raise ShapeError(f"knn_graph expects (N, D) points, got {z.shape}")
    n = z.shape[0]
    if not 1 <= k < n:
        raise ProjectionError(f"k must satisfy 1 <= k < N, got k={k} for N={n}")
    distances = cdist(z, z, metric="euclidean")
    np.fill_diagonal(distances, np.inf)
    # stable sort keeps equal distances in index order
    order = np.argsort(distances, axis=1, kind="stable")[:, :k]
    nearest = np.take_along_axis(distances, order, axis=1)
    logger.debug(f"Computed {k}-NN graph over {n} points")
    return KnnResult(indices=order.astype(np.int64), distances=nearest)
