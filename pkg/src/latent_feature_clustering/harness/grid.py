"""Grid search over experiment hyperparameters and the silhouette summary table"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import pandas as pd
from sklearn.model_selection import ParameterGrid

from ..config import ExperimentConfig, resolve_key
from ..errors import ConfigurationError
from ..losses import AUX_MODES
from .experiment import RunResult, run_experiment

# Configure logging
logger = logging.getLogger(__name__)

PRETRAIN_EPOCHS = 10
COEFFICIENTS = [0.01, 0.1, 0.2, 0.3]

# value sets searched on the AE and the VAE
SEARCH_SPACE: Dict[str, List[Any]] = {
    "latent": [32, 64, 128, 256],
    "dropout": [0.2, 0.3, 0.4],
    "beta": [0.25, 0.5, 0.75, 1, 1.5, 2, 2.5, 30, 50, 75, 100],
    "lr_scheduler": ["none", "step"],
    "adaptive": [False, True],
    "pretrain": [0, PRETRAIN_EPOCHS],
}

DISPLAY_NAMES = {
    "latent": "Latent space",
    "model.latent_dim": "Latent space",
    "dropout": "Dropout",
    "model.dropout_p": "Dropout",
    "beta": "β",
    "model.beta": "β",
    "kind": "Model",
    "model.kind": "Model",
    "lr_scheduler": "Scheduler",
    "lr": "Learning rate",
    "epochs": "Epochs",
    "lambda_cl": "λ_cl",
    "loss.lambda_cl": "λ_cl",
    "lambda_con": "λ_con",
    "loss.lambda_con": "λ_con",
    "adaptive": "Adaptive weights",
    "loss.adaptive": "Adaptive weights",
    "pretrain": "Pretrained",
    "loss.pretrain_epochs": "Pretrained",
}

SUMMARY_COLUMNS = ["hyperparameter", "baseline", "clustering", "contrastive"]
AUX_COLUMNS = {"none": "baseline", "clustering": "clustering", "contrastive": "contrastive"}


def coefficient_grid(aux: str = "clustering") -> Dict[str, List[Any]]:
    """Pre-search over the auxiliary coefficient before the main grid"""
    if aux == "clustering":
        return {"aux": ["clustering"], "lambda_cl": list(COEFFICIENTS)}
    if aux == "contrastive":
        return {"aux": ["contrastive"], "lambda_con": list(COEFFICIENTS)}
    raise ConfigurationError(f"coefficient search needs aux clustering or contrastive, got {aux!r}")


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def row_label(point: Mapping[str, Any]) -> str:
    """Human-readable row name such as ``Latent space=32`` or ``β=0.25, Dropout=0.4``"""
    parts = []
    for key, value in point.items():
        name = DISPLAY_NAMES.get(key, key)
        if key in ("pretrain", "loss.pretrain_epochs"):
            parts.append("Pretrained" if value else "Not pretrained")
        elif key in ("adaptive", "loss.adaptive"):
            parts.append(name if value else f"No {name.lower()}")
        else:
            parts.append(f"{name}={_format_value(value)}")
    return ", ".join(parts) if parts else "Default"


def _is_aux_key(key: str) -> bool:
    return "loss.aux" in resolve_key(key)


def summarize(
    points: Sequence[Mapping[str, Any]], results: Sequence[RunResult], base: ExperimentConfig
) -> pd.DataFrame:
    """One row per non-aux grid point; each run's silhouette lands in its aux column"""
    rows: Dict[Tuple, Dict[str, Any]] = {}
    for point, result in zip(points, results):
        key_items = [(k, v) for k, v in point.items() if not _is_aux_key(k)]
        row_key = tuple((k, _format_value(v)) for k, v in key_items)
        aux = next((v for k, v in point.items() if _is_aux_key(k)), base.aux)
        row = rows.setdefault(row_key, {"hyperparameter": row_label(dict(key_items))})
        row[AUX_COLUMNS[aux]] = result.silhouette
    return pd.DataFrame(list(rows.values()), columns=SUMMARY_COLUMNS)


@dataclass
class GridResult:
    """All runs of a grid with the summary table written next to them"""

    runs: List[RunResult]
    summary: pd.DataFrame
    points: List[Dict[str, Any]] = field(default_factory=list)
    summary_path: Optional[Path] = None


def expand_grid(
    base: ExperimentConfig, grid: Mapping[str, Sequence[Any]]
) -> Tuple[List[Dict[str, Any]], List[ExperimentConfig]]:
    """Validate every key and value, then build one config per grid point"""
    for key, values in grid.items():
        resolve_key(key)
        if _is_aux_key(key) and any(v not in AUX_MODES for v in values):
            raise ConfigurationError(f"aux values must be drawn from {AUX_MODES}")
        if len(values) == 0:
            raise ConfigurationError(f"grid key {key} has no values")
    # keep the caller's key order for row labels; ParameterGrid sorts keys
    points = [{k: p[k] for k in grid} for p in ParameterGrid({k: list(v) for k, v in grid.items()})]
    root = base.resolve_output_dir()
    configs = []
    for index, point in enumerate(points):
        config = base.with_overrides(point)
        config.name = f"{base.name}-{index:03d}"
        config.output_dir = str(root / f"run-{index:03d}")
        configs.append(config)
    return points, configs


def grid_search(
    base: ExperimentConfig,
    grid: Mapping[str, Sequence[Any]],
    workers: int = 1,
) -> GridResult:
    """Cartesian product of ``grid`` over ``base``, one run per point

    With ``workers > 1`` runs execute in separate processes; each run owns its
    seed-derived generators and its output directory.
    """
    points, configs = expand_grid(base, grid)
    logger.info(f"Grid search over {list(grid)}: {len(configs)} runs")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_experiment, configs))
    else:
        results = [run_experiment(config) for config in configs]

    summary = summarize(points, results, base)
    root = base.resolve_output_dir()
    root.mkdir(parents=True, exist_ok=True)
    summary_path = root / "grid_summary.csv"
    summary.to_csv(summary_path, index=False, float_format="%.4f")
    logger.info(f"Grid summary saved to {summary_path}")
    return GridResult(runs=results, summary=summary, points=points, summary_path=summary_path)
