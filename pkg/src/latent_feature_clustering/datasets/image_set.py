"""Labelled monochrome image sets with per-image label provenance"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from ..errors import DatasetError

# Configure logging
logger = logging.getLogger(__name__)

UNLABELED = -1


class Provenance(str, Enum):
    """Where an image's label came from"""

    MANUAL = "manual"
    PSEUDO = "pseudo"
    UNLABELED = "unlabeled"


@dataclass
class LabeledImageSet:
    """Images (N, 1, H, W) with labels in [0, C) or -1 and a provenance flag per image"""

    images: np.ndarray
    labels: np.ndarray
    provenance: np.ndarray
    class_count: int
    class_names: Optional[List[str]] = None

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.provenance = np.asarray(self.provenance, dtype=object)
        if self.images.ndim != 4 or self.images.shape[1] != 1:
            raise DatasetError(f"images must have shape (N, 1, H, W), got {self.images.shape}")
        n = self.images.shape[0]
        if n == 0:
            raise DatasetError("an image set needs at least one image")
        if self.labels.shape != (n,) or self.provenance.shape != (n,):
            raise DatasetError(f"{n} images but {self.labels.shape[0]} labels and {self.provenance.shape[0]} flags")
        unlabeled = self.provenance == Provenance.UNLABELED
        if np.any(self.labels[unlabeled] != UNLABELED) or np.any(self.labels[~unlabeled] == UNLABELED):
            raise DatasetError("label -1 must coincide exactly with unlabeled provenance")
        labelled = self.labels[~unlabeled]
        if labelled.size and (labelled.min() < 0 or labelled.max() >= self.class_count):
            raise DatasetError(f"labels must lie in [0, {self.class_count})")
        if self.class_names is not None and len(self.class_names) != self.class_count:
            raise DatasetError(f"{len(self.class_names)} class names for {self.class_count} classes")

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def height(self) -> int:
        return self.images.shape[2]

    @property
    def width(self) -> int:
        return self.images.shape[3]

    @classmethod
    def manual(
        cls, images: np.ndarray, labels: Sequence[int], class_count: int, class_names: Optional[List[str]] = None
    ) -> "LabeledImageSet":
        """Fully, manually labelled set"""
        n = len(labels)
        return cls(images, labels, np.full(n, Provenance.MANUAL, dtype=object), class_count, class_names)

    def subset(self, indices: Sequence[int]) -> "LabeledImageSet":
        indices = np.asarray(indices, dtype=np.int64)
        return replace(
            self,
            images=self.images[indices],
            labels=self.labels[indices],
            provenance=self.provenance[indices],
        )

    def with_images(self, images: np.ndarray) -> "LabeledImageSet":
        return replace(self, images=images)

    def with_labels(self, labels: np.ndarray, provenance: Provenance) -> "LabeledImageSet":
        n = len(self)
        return replace(self, labels=labels, provenance=np.full(n, provenance, dtype=object))

    def hide_labels(self) -> "LabeledImageSet":
        """Same images with labels removed"""
        return self.with_labels(np.full(len(self), UNLABELED, dtype=np.int64), Provenance.UNLABELED)

    def where(self, provenance: Provenance) -> "LabeledImageSet":
        return self.subset(np.flatnonzero(self.provenance == provenance))

    def count(self, provenance: Provenance) -> int:
        return int(np.sum(self.provenance == provenance))

    def class_counts(self) -> np.ndarray:
        labelled = self.labels[self.labels != UNLABELED]
        return np.bincount(labelled, minlength=self.class_count)

    @staticmethod
    def concatenate(parts: Sequence["LabeledImageSet"]) -> "LabeledImageSet":
        first = parts[0]
        return LabeledImageSet(
            images=np.concatenate([p.images for p in parts]),
            labels=np.concatenate([p.labels for p in parts]),
            provenance=np.concatenate([p.provenance for p in parts]),
            class_count=first.class_count,
            class_names=first.class_names,
        )


@dataclass(frozen=True)
class SplitSpec:
    """Train/validation fractions and the shuffle seed"""

    train_fraction: float = 0.8
    seed: int = 0
    val_fraction: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DatasetError(f"train fraction must lie in (0, 1), got {self.train_fraction}")
        object.__setattr__(self, "val_fraction", 1.0 - self.train_fraction)
