"""Brute-force silhouette score used to evaluate projections"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import MetricError
from ..projection import Embedding2D

# Configure logging
logger = logging.getLogger(__name__)


@dataclass
class EvaluationReport:
    """Mean silhouette plus the per-class means behind it"""

    silhouette: float
    per_class: Dict[int, float] = field(default_factory=dict)
    n: int = 0
    k: int = 0

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["per_class"] = {str(label): value for label, value in self.per_class.items()}
        return payload


def silhouette_samples(points: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-point s = (b - a) / max(a, b); singleton clusters and a = b = 0 score 0"""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    if points.ndim != 2 or labels.shape != (points.shape[0],):
        raise MetricError(f"silhouette needs (N, D) points and N labels, got {points.shape} and {labels.shape}")
    n = points.shape[0]
    if n < 3:
        raise MetricError(f"silhouette needs at least 3 points, got {n}")
    classes, codes = np.unique(labels, return_inverse=True)
    if classes.size < 2:
        raise MetricError("silhouette is undefined for a single cluster")

    distances = cdist(points, points)
    memberships = np.zeros((n, classes.size))
    memberships[np.arange(n), codes] = 1.0
    counts = memberships.sum(axis=0)
    totals = distances @ memberships

    own_counts = counts[codes]
    a = np.zeros(n)
    has_peers = own_counts > 1
    a[has_peers] = totals[has_peers, codes[has_peers]] / (own_counts[has_peers] - 1)

    means = totals / counts[None, :]
    means[np.arange(n), codes] = np.inf
    b = means.min(axis=1)

    scale = np.maximum(a, b)
    s = np.zeros(n)
    defined = has_peers & (scale > 0)
    s[defined] = (b[defined] - a[defined]) / scale[defined]
    return s


def silhouette_score(points: np.ndarray, labels: np.ndarray) -> EvaluationReport:
    """Exact silhouette over all pairwise Euclidean distances"""
    labels = np.asarray(labels)
    s = silhouette_samples(points, labels)
    classes = np.unique(labels)
    per_class = {int(c): float(s[labels == c].mean()) for c in classes}
    return EvaluationReport(silhouette=float(s.mean()), per_class=per_class, n=int(s.size), k=int(classes.size))


def evaluate_projection(embedding: Embedding2D) -> EvaluationReport:
    report = silhouette_score(embedding.coords, embedding.labels)
    logger.info(f"Projection silhouette {report.silhouette:.4f} over {report.n} points, {report.k} classes")
    return report
