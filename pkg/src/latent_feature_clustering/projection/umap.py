"""Latent-to-2D projection pipeline and embedding export"""
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from ..errors import ProjectionError, ShapeError
from .fuzzy import fuzzy_simplicial_set
from .knn import knn_graph
from .layout import Embedding2D, ProjectionConfig, fit_ab, optimize_embedding

# Configure logging
logger = logging.getLogger(__name__)

EMBEDDING_COLUMNS = ["index", "x", "y", "label"]


def project(
    z: np.ndarray,
    labels: np.ndarray,
    config: ProjectionConfig,
    class_names: Optional[List[str]] = None,
) -> Embedding2D:
    """kNN graph, fuzzy simplicial set, curve fit and layout; labels pass through untouched"""
    z = np.asarray(z)
    labels = np.asarray(labels)
    if z.ndim != 2 or labels.shape != (z.shape[0],):
        raise ShapeError(f"project expects (N, D) latents with N labels, got {z.shape} and {labels.shape}")
    if z.shape[0] < config.n_neighbors + 1:
        raise ProjectionError(f"projection needs at least {config.n_neighbors + 1} points, got {z.shape[0]}")
    knn = knn_graph(z, config.n_neighbors)
    graph = fuzzy_simplicial_set(knn, config.n_neighbors)
    a, b = fit_ab(config.min_dist, config.spread)
    embedding = optimize_embedding(graph, config, labels=labels, class_names=class_names, a=a, b=b)
    logger.info(f"Projected {z.shape[0]} latent vectors of width {z.shape[1]} to 2-D")
    return embedding


def embedding_frame(embedding: Embedding2D) -> pd.DataFrame:
    return pd.DataFrame({
        "index": np.arange(len(embedding)),
        "x": embedding.coords[:, 0],
        "y": embedding.coords[:, 1],
        "label": embedding.labels,
    }, columns=EMBEDDING_COLUMNS)


def export_embedding_csv(embedding: Embedding2D, path: Union[str, Path]) -> Path:
    """Write ``index,x,y,label`` rows"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    embedding_frame(embedding).to_csv(path, index=False, float_format="%.9g")
    logger.info(f"Embedding saved to {path}")
    return path


def load_embedding_csv(path: Union[str, Path], class_names: Optional[List[str]] = None) -> Embedding2D:
    frame = pd.read_csv(path)
    missing = [c for c in EMBEDDING_COLUMNS if c not in frame.columns]
    if missing:
        raise ProjectionError(f"{path} is missing columns {missing}")
    frame = frame.sort_values("index")
    return Embedding2D(
        coords=frame[["x", "y"]].to_numpy(dtype=np.float64),
        labels=frame["label"].to_numpy(dtype=np.int64),
        class_names=class_names,
    )
