"""Low-dimensional curve calibration and the negative-sampling SGD layout"""
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numba
import numpy as np
from scipy.optimize import curve_fit

from ..errors import ConfigurationError, CurveFitError, ProjectionError
from .fuzzy import FuzzyGraph

# Configure logging
logger = logging.getLogger(__name__)

CURVE_POINTS = 300
CURVE_ITERATIONS = 300
REPULSION_OFFSET = 0.001


@dataclass
class ProjectionConfig:
    """Graph and layout settings for the 2-D projection"""

    n_neighbors: int = 15
    min_dist: float = 0.1
    spread: float = 1.0
    epochs: int = 200
    negative_samples: int = 5
    learning_rate: float = 1.0
    init_scale: float = 1e-3
    gradient_clip: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.n_neighbors < 2:
            raise ConfigurationError(f"n_neighbors must be >= 2, got {self.n_neighbors}")
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")
        if self.negative_samples < 0:
            raise ConfigurationError(f"negative_samples must be >= 0, got {self.negative_samples}")
        if self.learning_rate < 0:
            raise ConfigurationError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not 0.0 < self.min_dist < self.spread:
            raise ConfigurationError(f"need 0 < min_dist < spread, got {self.min_dist} and {self.spread}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class Embedding2D:
    """2-D coordinates with the labels of the points they represent"""

    coords: np.ndarray
    labels: np.ndarray
    class_names: Optional[List[str]] = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.coords.ndim != 2 or self.coords.shape[1] != 2:
            raise ProjectionError(f"embedding coordinates must be (N, 2), got {self.coords.shape}")
        if self.labels.shape != (self.coords.shape[0],):
            raise ProjectionError(f"{self.coords.shape[0]} points but {self.labels.shape[0]} labels")
        if not np.all(np.isfinite(self.coords)):
            raise ProjectionError("embedding contains non-finite coordinates")

    def __len__(self) -> int:
        return self.coords.shape[0]


def low_dim_curve(d: np.ndarray, a: float, b: float) -> np.ndarray:
    return 1.0 / (1.0 + a * d ** (2 * b))


def fit_ab(min_dist: float, spread: float) -> Tuple[float, float]:
    """Least-squares fit of 1 / (1 + a d^(2b)) to the offset exponential decay"""
    if not 0.0 < min_dist < spread:
        raise ConfigurationError(f"need 0 < min_dist < spread, got {min_dist} and {spread}")
    xv = np.linspace(0, spread * 3, CURVE_POINTS)
    yv = np.zeros(xv.shape)
    yv[xv < min_dist] = 1.0
    yv[xv >= min_dist] = np.exp(-(xv[xv >= min_dist] - min_dist) / spread)

    last = {"params": (1.0, 1.0)}

    def curve(x, a, b):
        last["params"] = (a, b)
        return low_dim_curve(x, a, b)

    try:
        params, _ = curve_fit(curve, xv, yv, p0=(1.0, 1.0), maxfev=CURVE_ITERATIONS * 3)
    except RuntimeError as e:
        residual = float(np.sqrt(np.mean((low_dim_curve(xv, *last["params"]) - yv) ** 2)))
        raise CurveFitError(f"curve fit did not converge: {str(e)}", residual)
    a, b = float(params[0]), float(params[1])
    if not (np.isfinite(a) and np.isfinite(b) and a > 0 and b > 0):
        residual = float(np.sqrt(np.mean((low_dim_curve(xv, a, b) - yv) ** 2)))
        raise CurveFitError(f"curve fit produced invalid parameters a={a}, b={b}", residual)
    logger.debug(f"Fitted curve parameters a={a:.4f}, b={b:.4f} for min_dist={min_dist}, spread={spread}")
    return a, b


@numba.njit()
def _clip(value, limit):
    if value > limit:
        return limit
    if value < -limit:
        return -limit
    return value


@numba.njit()
def _layout_epoch(coords, heads, tails, active, negatives, a, b, alpha, limit):
    """One pass over the sampled edges; updates ``coords`` in place"""
    dim = coords.shape[1]
    for e in range(heads.shape[0]):
        if not active[e]:
            continue
        j = heads[e]
        k = tails[e]

        dist_sq = 0.0
        for d in range(dim):
            diff = coords[j, d] - coords[k, d]
            dist_sq += diff * diff
        if dist_sq > 0.0:
            coeff = -2.0 * a * b * dist_sq ** (b - 1.0) / (a * dist_sq ** b + 1.0)
        else:
            coeff = 0.0
        for d in range(dim):
            grad = _clip(coeff * (coords[j, d] - coords[k, d]), limit)
            coords[j, d] += grad * alpha
            coords[k, d] -= grad * alpha

        for p in range(negatives.shape[1]):
            k = negatives[e, p]
            if k == j:
                continue
            dist_sq = 0.0
            for d in range(dim):
                diff = coords[j, d] - coords[k, d]
                dist_sq += diff * diff
            if dist_sq > 0.0:
                coeff = 2.0 * b / ((REPULSION_OFFSET + dist_sq) * (a * dist_sq ** b + 1.0))
            else:
                coeff = 0.0
            for d in range(dim):
                if coeff > 0.0:
                    grad = _clip(coeff * (coords[j, d] - coords[k, d]), limit)
                else:
                    grad = limit
                coords[j, d] += grad * alpha


def initial_layout(n_points: int, config: ProjectionConfig, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-10.0, 10.0, size=(n_points, 2)) * config.init_scale


def optimize_embedding(
    graph: FuzzyGraph,
    config: ProjectionConfig,
    labels: Optional[np.ndarray] = None,
    class_names: Optional[List[str]] = None,
    a: Optional[float] = None,
    b: Optional[float] = None,
) -> Embedding2D:
    """Cross-entropy SGD over the fuzzy graph with negative sampling

    Each epoch keeps an edge with probability weight / max weight; the learning
    rate falls linearly from ``config.learning_rate`` towards 0.
    """
    if graph.n_edges == 0:
        raise ProjectionError("cannot lay out an empty fuzzy graph")
    if a is None or b is None:
        a, b = fit_ab(config.min_dist, config.spread)
    n = graph.n_points
    rng = np.random.default_rng(config.seed)
    coords = initial_layout(n, config, rng)
    probability = graph.weights / graph.weights.max()
    heads = graph.rows.astype(np.int64)
    tails = graph.cols.astype(np.int64)

    for epoch in range(config.epochs):
        active = rng.random(graph.n_edges) < probability
        negatives = rng.integers(0, n, size=(graph.n_edges, config.negative_samples), dtype=np.int64)
        alpha = config.learning_rate * (1.0 - epoch / config.epochs)
        _layout_epoch(coords, heads, tails, active, negatives, float(a), float(b), alpha, config.gradient_clip)
        finite = np.isfinite(coords).all(axis=1)
        if not finite.all():
            point = int(np.flatnonzero(~finite)[0])
            raise ProjectionError(f"non-finite coordinate at epoch {epoch}, point {point}")

    if labels is None:
        labels = np.zeros(n, dtype=np.int64)
    logger.debug(f"Optimized {n}-point layout over {config.epochs} epochs")
    return Embedding2D(coords=coords, labels=labels, class_names=class_names)
