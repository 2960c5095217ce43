"""Experiment configuration: dataclasses, JSON files, overrides and environment"""
import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from dotenv import load_dotenv

from .errors import ConfigurationError
from .losses import LossConfig
from .models import ModelConfig
from .projection import ProjectionConfig
from .pseudolabel import ClassifierConfig

# Configure logging
logger = logging.getLogger(__name__)

DATASET_NAMES = ("channels", "splash", "idx")
LR_SCHEDULERS = ("none", "step")
STEP_SIZE = 30
STEP_GAMMA = 0.5

DEFAULT_OUTPUT_ROOT = "outputs"

# short grid keys accepted next to dotted paths
ALIASES: Dict[str, List[str]] = {
    "latent": ["model.latent_dim"],
    "dropout": ["model.dropout_p"],
    "beta": ["model.beta"],
    "kind": ["model.kind"],
    "aux": ["loss.aux"],
    "adaptive": ["loss.adaptive"],
    "pretrain": ["loss.pretrain_epochs"],
    "lambda_cl": ["loss.lambda_cl"],
    "lambda_con": ["loss.lambda_con"],
    "lr_scheduler": ["lr_scheduler"],
    "lr": ["lr"],
    "epochs": ["epochs"],
}


@dataclass
class DatasetConfig:
    """Which ensemble to load and how much of it is manually labelled"""

    name: str = "channels"
    n_samples: Optional[int] = 3000
    images_path: Optional[str] = None
    labels_path: Optional[str] = None
    manual_fraction: float = 0.25
    use_pseudo_labels: bool = True
    class_names: Optional[List[str]] = None

    def __post_init__(self):
        if self.name not in DATASET_NAMES:
            raise ConfigurationError(f"dataset name must be one of {DATASET_NAMES}, got {self.name!r}")
        if self.name == "idx" and not (self.images_path and self.labels_path):
            raise ConfigurationError("the idx dataset needs images_path and labels_path")
        if not 0.0 < self.manual_fraction < 1.0:
            raise ConfigurationError(f"manual_fraction must lie in (0, 1), got {self.manual_fraction}")

    def source_params(self, seed: int) -> Dict[str, Any]:
        return {
            "n_samples": self.n_samples,
            "seed": seed,
            "images_path": self.images_path,
            "labels_path": self.labels_path,
            "class_names": self.class_names,
        }


@dataclass
class ExperimentConfig:
    """Everything one training run depends on"""

    name: str = "run"
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    projection: ProjectionConfig = field(default_factory=ProjectionConfig)
    epochs: int = 100
    batch_size: int = 128
    lr: float = 0.0005
    lr_scheduler: str = "none"
    seed: int = 0
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 2:
            raise ConfigurationError(f"batch_size must be >= 2, got {self.batch_size}")
        if not self.lr > 0:
            raise ConfigurationError(f"lr must be positive, got {self.lr}")
        if self.lr_scheduler not in LR_SCHEDULERS:
            raise ConfigurationError(f"lr_scheduler must be one of {LR_SCHEDULERS}, got {self.lr_scheduler!r}")

    @property
    def aux(self) -> str:
        return self.loss.aux

    def learning_rate(self, epoch: int) -> float:
        """Step decay halves the rate every 30 epochs"""
        if self.lr_scheduler == "step":
            return self.lr * STEP_GAMMA ** (epoch // STEP_SIZE)
        return self.lr

    def resolve_output_dir(self) -> Path:
        if self.output_dir:
            return Path(self.output_dir)
        return output_root() / self.name

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        return _build(cls, data, "")

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ExperimentConfig":
        """New config with dotted keys (or their short aliases) replaced"""
        data = self.to_dict()
        for key, value in overrides.items():
            for path in resolve_key(key):
                _assign(data, path, value)
        return ExperimentConfig.from_dict(data)


NESTED = {
    "dataset": DatasetConfig,
    "model": ModelConfig,
    "loss": LossConfig,
    "classifier": ClassifierConfig,
    "projection": ProjectionConfig,
}


def _build(cls, data: Mapping[str, Any], prefix: str):
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"expected a mapping at {prefix.rstrip('.') or 'top level'}")
    known = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(f"unknown configuration key {prefix}{unknown[0]}")
    kwargs = {}
    for key, value in data.items():
        if cls is ExperimentConfig and key in NESTED:
            value = _build(NESTED[key], value, f"{prefix}{key}.")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigurationError(f"invalid configuration at {prefix or 'top level'}: {str(e)}")


def settable_keys() -> List[str]:
    keys = [f.name for f in dataclasses.fields(ExperimentConfig) if f.name not in NESTED]
    for section, cls in NESTED.items():
        keys.extend(f"{section}.{f.name}" for f in dataclasses.fields(cls) if f.init)
    return keys


def resolve_key(key: str) -> List[str]:
    """Dotted paths a grid or override key stands for"""
    if key in ALIASES:
        return list(ALIASES[key])
    if key in settable_keys():
        return [key]
    raise ConfigurationError(f"unknown configuration key {key}")


def _assign(data: Dict[str, Any], path: str, value: Any) -> None:
    node = data
    parts = path.split(".")
    for part in parts[:-1]:
        node = node[part]
    node[parts[-1]] = value


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON file mirroring its field names"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path} is not valid JSON: {str(e)}")
    config = ExperimentConfig.from_dict(data)
    logger.info(f"Loaded configuration {config.name!r} from {path}")
    return config


def save_config(config: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config.to_dict(), f, indent=2, sort_keys=True)
    return path


def output_root() -> Path:
    """Output root from LFC_OUTPUT_ROOT (``.env`` honoured), else ./outputs"""
    load_dotenv()
    return Path(os.getenv("LFC_OUTPUT_ROOT", DEFAULT_OUTPUT_ROOT))


def mnist_dir() -> Optional[Path]:
    load_dotenv()
    value = os.getenv("LFC_MNIST_DIR")
    return Path(value) if value else None
