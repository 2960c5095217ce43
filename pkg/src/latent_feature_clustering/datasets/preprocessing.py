"""Normalization, labelled/unlabelled partition and stratified train/validation split"""
import logging
from typing import Tuple

import numpy as np

from ..errors import DatasetError
from .image_set import UNLABELED, LabeledImageSet, SplitSpec

# Configure logging
logger = logging.getLogger(__name__)


def normalize(image_set: LabeledImageSet) -> Tuple[LabeledImageSet, float, float]:
    """Scale the whole set to zero mean and unit standard deviation with one scalar pair"""
    pixels = image_set.images.astype(np.float64)
    mean = float(pixels.mean())
    std = float(pixels.std())
    if not std > 0.0:
        raise DatasetError("cannot normalize a constant dataset (pixel std is 0)")
    logger.debug(f"Normalizing {len(image_set)} images with mean {mean:.6f}, std {std:.6f}")
    return apply_normalization(image_set, mean, std), mean, std


def apply_normalization(image_set: LabeledImageSet, mean: float, std: float) -> LabeledImageSet:
    """Normalize with statistics computed elsewhere"""
    if not std > 0.0:
        raise DatasetError(f"normalization std must be positive, got {std}")
    images = ((image_set.images.astype(np.float64) - mean) / std).astype(np.float32)
    return image_set.with_images(images)


def denormalize(images: np.ndarray, mean: float, std: float) -> np.ndarray:
    return (np.asarray(images, dtype=np.float64) * std + mean).astype(np.float32)


def _strata(image_set: LabeledImageSet):
    for label in np.unique(image_set.labels):
        yield int(label), np.flatnonzero(image_set.labels == label)


def split(image_set: LabeledImageSet, spec: SplitSpec) -> Tuple[LabeledImageSet, LabeledImageSet]:
    """Seeded, stratified partition into train and validation parts"""
    if len(image_set) < 2:
        raise DatasetError(f"need at least 2 images to split, got {len(image_set)}")
    rng = np.random.default_rng(spec.seed)
    train_idx, val_idx = [], []
    for label, members in _strata(image_set):
        members = rng.permutation(members)
        if members.size == 1:
            name = "unlabeled" if label == UNLABELED else f"class {label}"
            logger.warning(f"{name} has a single member; it goes to the training part")
            train_idx.append(members)
            continue
        n_train = int(round(spec.train_fraction * members.size))
        n_train = min(max(n_train, 1), members.size - 1)
        train_idx.append(members[:n_train])
        val_idx.append(members[n_train:])
    train = rng.permutation(np.concatenate(train_idx))
    val = rng.permutation(np.concatenate(val_idx)) if val_idx else np.empty(0, dtype=np.int64)
    if val.size == 0:
        raise DatasetError("validation part is empty; every class has a single member")
    logger.info(f"Split {len(image_set)} images into {train.size} train / {val.size} validation")
    return image_set.subset(train), image_set.subset(val)


def partition_labels(
    image_set: LabeledImageSet, manual_fraction: float, seed: int
) -> Tuple[LabeledImageSet, LabeledImageSet]:
    """Keep labels on a stratified ``manual_fraction`` of the set and hide the rest"""
    if not 0.0 < manual_fraction < 1.0:
        raise DatasetError(f"manual fraction must lie in (0, 1), got {manual_fraction}")
    manual, rest = split(image_set, SplitSpec(train_fraction=manual_fraction, seed=seed))
    logger.info(f"Kept {len(manual)} manual labels, hid {len(rest)}")
    return manual, rest.hide_labels()
