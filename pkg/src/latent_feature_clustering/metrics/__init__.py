"""Metrics module: reference silhouette score"""

from .silhouette import EvaluationReport, evaluate_projection, silhouette_samples, silhouette_score

__all__ = [
    'EvaluationReport',
    'evaluate_projection',
    'silhouette_samples',
    'silhouette_score',
]
