"""Dataset sources and the registry that resolves a configured dataset name"""
import abc
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ..errors import DatasetError
from .generators import generate_channels, generate_splash
from .idx import load_idx, write_idx
from .image_set import LabeledImageSet

# Configure logging
logger = logging.getLogger(__name__)


class DataSource(abc.ABC):
    """Abstract base class for data sources"""

    @abc.abstractmethod
    def collect_data(self, params: Optional[Dict[str, Any]] = None) -> LabeledImageSet:
        """Produce the full, manually labelled set"""


class ChannelsSource(DataSource):
    """Synthetic soil-channel ensemble"""

    def collect_data(self, params: Optional[Dict[str, Any]] = None) -> LabeledImageSet:
        params = params or {}
        return generate_channels(int(params.get("n_samples") or 3000), int(params.get("seed") or 0))


class SplashSource(DataSource):
    """Synthetic droplet-impact ensemble"""

    def collect_data(self, params: Optional[Dict[str, Any]] = None) -> LabeledImageSet:
        params = params or {}
        return generate_splash(int(params.get("n_samples") or 3000), int(params.get("seed") or 0))


class IdxSource(DataSource):
    """IDX image/label file pair, optionally truncated to the first ``n_samples``"""

    def collect_data(self, params: Optional[Dict[str, Any]] = None) -> LabeledImageSet:
        params = params or {}
        images_path = params.get("images_path")
        labels_path = params.get("labels_path")
        if not images_path or not labels_path:
            raise DatasetError("the idx dataset needs images_path and labels_path")
        image_set = load_idx(images_path, labels_path)
        n = params.get("n_samples")
        if n is not None and int(n) < len(image_set):
            image_set = image_set.subset(range(int(n)))
        names = params.get("class_names")
        if names:
            image_set.class_names = list(names)
        return image_set


class DatasetCollector:
    """Registry of dataset sources keyed by name"""

    def __init__(self):
        self.sources: Dict[str, DataSource] = {
            "channels": ChannelsSource(),
            "splash": SplashSource(),
            "idx": IdxSource(),
        }

    def register_source(self, name: str, source: DataSource):
        """Register a new data source"""
        self.sources[name] = source
        logger.info(f"Registered new data source: {name}")

    def source_names(self) -> List[str]:
        return sorted(self.sources)

    def collect_from_source(self, source_name: str, params: Optional[Dict[str, Any]] = None) -> LabeledImageSet:
        """Collect data from a specific source"""
        if source_name not in self.sources:
            raise DatasetError(f"unknown dataset {source_name!r}; choose from {self.source_names()}")
        logger.info(f"Collecting data from {source_name}")
        image_set = self.sources[source_name].collect_data(params)
        logger.info(f"Collected {len(image_set)} images ({image_set.height}x{image_set.width}, "
                    f"{image_set.class_count} classes) from {source_name}")
        return image_set

    def save_data(self, image_set: LabeledImageSet, directory: str, prefix: str) -> Tuple[Path, Path]:
        """Export a set as an IDX pair named <prefix>-images.idx3-ubyte / <prefix>-labels.idx1-ubyte"""
        directory = Path(directory)
        return write_idx(
            image_set,
            directory / f"{prefix}-images.idx3-ubyte",
            directory / f"{prefix}-labels.idx1-ubyte",
        )
