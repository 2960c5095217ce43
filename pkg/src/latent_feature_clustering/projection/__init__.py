"""Projection module: kNN graph, fuzzy simplicial set and SGD layout to 2-D"""

from .knn import KnnResult, knn_graph
from .fuzzy import FuzzyGraph, fuzzy_simplicial_set, fuzzy_union, smooth_knn_dist
from .layout import Embedding2D, ProjectionConfig, fit_ab, low_dim_curve, optimize_embedding
from .umap import embedding_frame, export_embedding_csv, load_embedding_csv, project

__all__ = [
    'KnnResult',
    'knn_graph',
    'FuzzyGraph',
    'fuzzy_simplicial_set',
    'fuzzy_union',
    'smooth_knn_dist',
    'Embedding2D',
    'ProjectionConfig',
    'fit_ab',
    'low_dim_curve',
    'optimize_embedding',
    'embedding_frame',
    'export_embedding_csv',
    'load_embedding_csv',
    'project',
]
