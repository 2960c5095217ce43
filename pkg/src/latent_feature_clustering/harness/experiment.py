"""End-to-end experiment: labels, pseudo-labels, training, projection and evaluation"""
import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..config import ExperimentConfig, save_config
from ..datasets import (
    DatasetCollector,
    LabeledImageSet,
    SplitSpec,
    apply_normalization,
    denormalize,
    normalize,
    partition_labels,
    split,
)
from ..losses import LossReport
from ..metrics import EvaluationReport, evaluate_projection
from ..models import ModelParams, build_model, latent_codes, reconstruct
from ..projection import Embedding2D, export_embedding_csv, project
from ..pseudolabel import predict_labels, train_classifier
from ..reporting import emit_plots
from .checkpoint import save_checkpoint
from .trainer import batches, train_model

# Configure logging
logger = logging.getLogger(__name__)

RECONSTRUCTION_SAMPLES = 8


@dataclass
class RunResult:
    """Outcome of one run; the array fields feed the report files and are not serialized"""

    config: Dict[str, Any]
    train_history: List[LossReport]
    val_history: List[LossReport]
    silhouette: float
    evaluation: EvaluationReport
    wall_time: float
    checkpoint_path: Optional[str] = None
    output_dir: Optional[str] = None
    aux_calls: int = 0
    aux_skips: int = 0
    classifier_accuracy: Optional[float] = None
    embedding: Optional[Embedding2D] = field(default=None, repr=False)
    originals: Optional[np.ndarray] = field(default=None, repr=False)
    reconstructions: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def epochs(self) -> int:
        return len(self.train_history)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "train_history": [r.to_dict() for r in self.train_history],
            "val_history": [r.to_dict() for r in self.val_history],
            "silhouette": self.silhouette,
            "evaluation": self.evaluation.to_dict(),
            "wall_time": self.wall_time,
            "checkpoint_path": self.checkpoint_path,
            "output_dir": self.output_dir,
            "aux_calls": self.aux_calls,
            "aux_skips": self.aux_skips,
            "classifier_accuracy": self.classifier_accuracy,
        }


def encode_dataset(params: ModelParams, image_set: LabeledImageSet, batch_size: int = 256) -> np.ndarray:
    """Eval-mode latent vectors (mu for the VAE) for every image"""
    parts = [latent_codes(params, image_set.images[b]) for b in batches(len(image_set), batch_size)]
    return np.concatenate(parts).astype(np.float32)


def build_training_pool(config: ExperimentConfig, full: LabeledImageSet):
    """Manual subset plus the labelled pool the autoencoder trains on"""
    manual, unlabeled = partition_labels(full, config.dataset.manual_fraction, config.seed)
    if not config.dataset.use_pseudo_labels:
        logger.info("Pseudo-labelling disabled; training on ground-truth labels")
        return manual, full, None
    classifier_config = dataclasses.replace(config.classifier, class_count=full.class_count, seed=config.seed)
    classifier, accuracy = train_classifier(manual, classifier_config)
    pseudo = predict_labels(classifier, unlabeled)
    return manual, LabeledImageSet.concatenate([manual, pseudo]), accuracy


def save_latents(path: Union[str, Path], z: np.ndarray, labels: np.ndarray) -> Path:
    path = Path(path)
    np.savez(path, z=z, labels=labels)
    return path


def load_latents(path: Union[str, Path]):
    with np.load(path) as data:
        return data["z"], data["labels"]


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Run the full pipeline and write its artifacts to the run directory"""
    start = time.perf_counter()
    output_dir = config.resolve_output_dir()
    output_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Starting run {config.name!r} ({config.model.kind}, aux={config.aux}) in {output_dir}")

    full = DatasetCollector().collect_from_source(config.dataset.name, config.dataset.source_params(config.seed))
    if config.dataset.class_names and not full.class_names:
        full.class_names = list(config.dataset.class_names)
    config = dataclasses.replace(
        config,
        model=dataclasses.replace(config.model, height=full.height, width=full.width),
        projection=dataclasses.replace(config.projection, seed=config.seed),
    )
    save_config(config, output_dir / "config.json")

    manual, pool, accuracy = build_training_pool(config, full)
    pool, mean, std = normalize(pool)
    train_set, val_set = split(pool, SplitSpec(train_fraction=0.8, seed=config.seed))

    params = build_model(config.model, seed=config.seed)
    history = train_model(params, train_set, val_set, config)
    checkpoint_path = save_checkpoint(params, output_dir / "checkpoint.lfck")

    manual_norm = apply_normalization(manual, mean, std)
    z = encode_dataset(params, manual_norm)
    save_latents(output_dir / "latents.npz", z, manual.labels)
    embedding = project(z, manual.labels, config.projection, class_names=full.class_names)
    export_embedding_csv(embedding, output_dir / "embedding.csv")
    evaluation = evaluate_projection(embedding)

    sample = manual_norm.images[:RECONSTRUCTION_SAMPLES]
    result = RunResult(
        config=config.to_dict(),
        train_history=history.train,
        val_history=history.val,
        silhouette=evaluation.silhouette,
        evaluation=evaluation,
        wall_time=time.perf_counter() - start,
        checkpoint_path=str(checkpoint_path),
        output_dir=str(output_dir),
        aux_calls=history.aux_calls,
        aux_skips=history.aux_skips,
        classifier_accuracy=accuracy,
        embedding=embedding,
        originals=denormalize(sample, mean, std),
        reconstructions=denormalize(reconstruct(params, sample), mean, std),
    )
    emit_plots(result, output_dir)
    with open(output_dir / "result.json", "w", encoding="utf-8") as f:
        json.dump(result.to_dict(), f, indent=2, sort_keys=True)
    logger.info(f"Run {config.name!r} finished in {result.wall_time:.1f}s with silhouette {result.silhouette:.4f}")
    return result
