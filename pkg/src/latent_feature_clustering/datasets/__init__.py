"""Dataset module: synthetic ensembles, IDX ingestion, normalization and splits"""

from .image_set import UNLABELED, LabeledImageSet, Provenance, SplitSpec
from .generators import CHANNEL_CLASSES, SPLASH_CLASSES, generate_channels, generate_splash
from .idx import load_idx, write_idx
from .preprocessing import apply_normalization, denormalize, normalize, partition_labels, split
from .data_collector import DataSource, DatasetCollector

__all__ = [
    'UNLABELED',
    'LabeledImageSet',
    'Provenance',
    'SplitSpec',
    'CHANNEL_CLASSES',
    'SPLASH_CLASSES',
    'generate_channels',
    'generate_splash',
    'load_idx',
    'write_idx',
    'apply_normalization',
    'denormalize',
    'normalize',
    'partition_labels',
    'split',
    'DataSource',
    'DatasetCollector',
]
