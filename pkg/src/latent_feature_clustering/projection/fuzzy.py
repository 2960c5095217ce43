"""Fuzzy simplicial set: per-point bandwidth calibration and fuzzy union of the kNN graph"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse

from ..errors import ProjectionError
from .knn import KnnResult

# Configure logging
logger = logging.getLogger(__name__)

SMOOTH_K_TOLERANCE = 1e-5
MIN_K_DIST_SCALE = 1e-3
BISECTION_STEPS = 64


@dataclass
class FuzzyGraph:
    """Symmetric weighted edge list with the per-point rho and sigma it was built from"""

    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    rho: np.ndarray
    sigma: np.ndarray
    n_points: int

    def __post_init__(self):
        if self.weights.size and not (np.all(self.weights > 0) and np.all(self.weights <= 1)):
            raise ProjectionError("fuzzy edge weights must lie in (0, 1]")
        if np.any(self.rows == self.cols):
            raise ProjectionError("fuzzy graph contains a self-edge")

    @property
    def n_edges(self) -> int:
        return int(self.weights.size)

    def to_sparse(self) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix(
            (self.weights, (self.rows, self.cols)), shape=(self.n_points, self.n_points)
        )


def fuzzy_union(a, b):
    """Probabilistic t-conorm a + b - a*b; works on scalars, arrays and sparse matrices"""
    if scipy.sparse.issparse(a):
        return a + b - a.multiply(b)
    return a + b - a * b


def smooth_knn_dist(distances: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Bisect sigma per point so that sum_j exp(-max(0, d_j - rho) / sigma) = log2(k)

    Returns (sigma, rho). rho is the nearest non-zero neighbour distance. Points that
    do not converge within BISECTION_STEPS keep the midpoint of their last bracket.
    """
    distances = np.asarray(distances, dtype=np.float64)
    n = distances.shape[0]
    target = np.log2(k)

    positive = np.where(distances > 0.0, distances, np.inf)
    rho = positive.min(axis=1)
    rho[~np.isfinite(rho)] = 0.0

    excess = np.maximum(distances - rho[:, None], 0.0)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    mid = np.ones(n)
    done = np.zeros(n, dtype=bool)
    for _ in range(BISECTION_STEPS):
        psum = np.exp(-excess / mid[:, None]).sum(axis=1)
        done |= np.abs(psum - target) < SMOOTH_K_TOLERANCE
        if done.all():
            break
        active = ~done
        above = active & (psum > target)
        below = active & ~(psum > target)
        hi[above] = mid[above]
        mid[above] = (lo[above] + hi[above]) / 2.0
        lo[below] = mid[below]
        unbounded = below & np.isinf(hi)
        mid[unbounded] *= 2.0
        bounded = below & ~np.isinf(hi)
        mid[bounded] = (lo[bounded] + hi[bounded]) / 2.0

    sigma = mid.copy()
    stuck = ~done
    if stuck.any():
        bracketed = stuck & np.isfinite(hi)
        sigma[bracketed] = (lo[bracketed] + hi[bracketed]) / 2.0
        logger.warning(f"sigma search did not converge for {int(stuck.sum())} points; "
                       f"using the bracket midpoint")

    floor = MIN_K_DIST_SCALE * np.where(rho > 0.0, distances.mean(axis=1), distances.mean())
    sigma = np.maximum(sigma, floor)
    return sigma, rho


def fuzzy_simplicial_set(knn: KnnResult, k: int) -> FuzzyGraph:
    """Directed membership strengths from the kNN graph, symmetrized by fuzzy union"""
    if knn.k < k:
        raise ProjectionError(f"kNN result holds {knn.k} neighbours, {k} requested")
    indices = knn.indices[:, :k]
    distances = knn.distances[:, :k]
    n = indices.shape[0]
    sigma, rho = smooth_knn_dist(distances, k)
    directed = np.exp(-np.maximum(distances - rho[:, None], 0.0) / sigma[:, None])

    rows = np.repeat(np.arange(n), k)
    p = scipy.sparse.csr_matrix((directed.ravel(), (rows, indices.ravel())), shape=(n, n))
    p.sum_duplicates()
    union = fuzzy_union(p, p.T.tocsr()).tocsr()
    union.eliminate_zeros()
    union = union.tocoo()
    keep = union.data > 0.0
    # canonical row-major edge order keeps the layout deterministic
    order = np.lexsort((union.col[keep], union.row[keep]))
    graph = FuzzyGraph(
        rows=union.row[keep][order].astype(np.int64),
        cols=union.col[keep][order].astype(np.int64),
        weights=np.minimum(union.data[keep][order], 1.0),
        rho=rho,
        sigma=sigma,
        n_points=n,
    )
    logger.debug(f"Fuzzy simplicial set with {graph.n_edges} directed edges over {n} points")
    return graph
