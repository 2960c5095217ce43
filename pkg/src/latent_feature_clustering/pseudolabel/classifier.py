"""Small convolutional classifier that turns a manually labelled subset into pseudo-labels"""
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Tuple

import numpy as np
from sklearn.metrics import accuracy_score

from ..datasets import LabeledImageSet, Provenance, SplitSpec, split
from ..errors import ClassifierGateError, ConfigurationError, DatasetError, ShapeError
from ..ndmath import Adam, Tensor, as_tensor, conv2d, cross_entropy, init_parameter, linear

# Configure logging
logger = logging.getLogger(__name__)

FILTERS = 32
DEPTH = 3


@dataclass
class ClassifierConfig:
    """Training settings for the pseudo-label classifier"""

    class_count: int = 5
    epochs: int = 15
    lr: float = 0.001
    batch_size: int = 64
    accuracy_gate: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.accuracy_gate <= 1.0:
            raise ConfigurationError(f"accuracy_gate must lie in (0, 1], got {self.accuracy_gate}")
        if self.class_count < 2:
            raise ConfigurationError(f"a classifier needs at least 2 classes, got {self.class_count}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError("epochs and batch_size must be positive")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ClassifierParams:
    """Trained weights, the input statistics they expect and the gate outcome"""

    config: ClassifierConfig
    tensors: Dict[str, Tensor]
    height: int
    width: int
    mean: float = 0.0
    std: float = 1.0
    accuracy: float = 0.0
    passed_gate: bool = False


def _init_classifier(config: ClassifierConfig, height: int, width: int) -> Dict[str, Tensor]:
    rng = np.random.default_rng(config.seed)
    tensors = {}
    in_channels = 1
    for layer in range(DEPTH):
        fan_in = in_channels * 9
        tensors[f"conv.{layer}.weight"] = init_parameter((FILTERS, in_channels, 3, 3), fan_in, rng)
        tensors[f"conv.{layer}.bias"] = init_parameter((FILTERS,), fan_in, rng)
        in_channels = FILTERS
    tensors["head.weight"] = init_parameter((FILTERS, config.class_count), FILTERS, rng)
    tensors["head.bias"] = init_parameter((config.class_count,), FILTERS, rng)
    return tensors


def _logits(tensors: Dict[str, Tensor], images: np.ndarray) -> Tensor:
    x = as_tensor(images)
    for layer in range(DEPTH):
        x = conv2d(x, tensors[f"conv.{layer}.weight"], tensors[f"conv.{layer}.bias"]).relu()
    batch, channels, h, w = x.shape
    pooled = x.reshape(batch, channels, h * w).mean(axis=2)
    return linear(pooled, tensors["head.weight"], tensors["head.bias"])


def _predict(params: ClassifierParams, images: np.ndarray, batch_size: int = 256) -> np.ndarray:
    scaled = ((images - params.mean) / params.std).astype(np.float32)
    predictions = []
    for start in range(0, len(scaled), batch_size):
        logits = _logits(params.tensors, scaled[start:start + batch_size]).data
        predictions.append(np.argmax(logits, axis=1))
    return np.concatenate(predictions).astype(np.int64)


def train_classifier(image_set: LabeledImageSet, config: ClassifierConfig) -> Tuple[ClassifierParams, float]:
    """Train on an internal 80/20 split and return the held-out accuracy

    Raises ClassifierGateError when the accuracy stays below ``config.accuracy_gate``.
    """
    if image_set.count(Provenance.MANUAL) != len(image_set):
        raise DatasetError("the classifier trains on manually labelled images only")
    if image_set.class_count != config.class_count:
        raise ConfigurationError(f"classifier configured for {config.class_count} classes, "
                                 f"set has {image_set.class_count}")
    missing = np.flatnonzero(image_set.class_counts() == 0)
    if missing.size:
        raise DatasetError(f"classes {missing.tolist()} have no manually labelled images")

    train_set, val_set = split(image_set, SplitSpec(train_fraction=0.8, seed=config.seed))
    mean = float(train_set.images.mean())
    std = float(train_set.images.std()) or 1.0
    tensors = _init_classifier(config, image_set.height, image_set.width)
    params = ClassifierParams(config, tensors, image_set.height, image_set.width, mean, std)

    optimizer = Adam(tensors, lr=config.lr)
    rng = np.random.default_rng(config.seed)
    images = ((train_set.images - mean) / std).astype(np.float32)
    for epoch in range(config.epochs):
        order = rng.permutation(len(train_set))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            optimizer.zero_grad()
            loss = cross_entropy(_logits(tensors, images[batch]), train_set.labels[batch])
            loss.backward()
            optimizer.step()
            epoch_loss += loss.item() * len(batch)
        logger.debug(f"Classifier epoch {epoch}: cross-entropy {epoch_loss / len(order):.4f}")

    accuracy = float(accuracy_score(val_set.labels, _predict(params, val_set.images)))
    params.accuracy = accuracy
    logger.info(f"Classifier validation accuracy {accuracy:.4f} (gate {config.accuracy_gate:.2f})")
    if accuracy < config.accuracy_gate:
        raise ClassifierGateError(accuracy, config.accuracy_gate)
    params.passed_gate = True
    return params, accuracy


def predict_labels(classifier: ClassifierParams, image_set: LabeledImageSet) -> LabeledImageSet:
    """Argmax pseudo-label for every image; ties go to the lower class index"""
    if not classifier.passed_gate:
        raise ClassifierGateError(classifier.accuracy, classifier.config.accuracy_gate)
    if (image_set.height, image_set.width) != (classifier.height, classifier.width):
        raise ShapeError(f"classifier expects {classifier.height}x{classifier.width} images, "
                         f"got {image_set.height}x{image_set.width}")
    labels = _predict(classifier, image_set.images)
    counts = np.bincount(labels, minlength=classifier.config.class_count)
    logger.info(f"Pseudo-labelled {len(image_set)} images; class counts {counts.tolist()}")
    return image_set.with_labels(labels, Provenance.PSEUDO)
