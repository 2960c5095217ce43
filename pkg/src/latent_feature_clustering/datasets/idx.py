"""IDX (MNIST) image and label file codec"""
import gzip
import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import DatasetError, IdxFormatError
from .image_set import UNLABELED, LabeledImageSet

# Configure logging
logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"IDX file not found: {path}")
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def _write_bytes(path: PathLike, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".gz":
        with open(path, "wb") as raw:
            with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as f:
                f.write(payload)
    else:
        path.write_bytes(payload)


def _parse(payload: bytes, expected_magic: int, name: str) -> np.ndarray:
    """Decode one IDX tensor of unsigned bytes"""
    if len(payload) < 4:
        raise IdxFormatError(f"{name}: file shorter than the magic number", len(payload))
    magic = int.from_bytes(payload[0:4], "big")
    if magic != expected_magic:
        raise IdxFormatError(f"{name}: bad magic 0x{magic:08x}, expected 0x{expected_magic:08x}", 0)
    rank = payload[3]
    header_end = 4 + 4 * rank
    if len(payload) < header_end:
        raise IdxFormatError(f"{name}: truncated dimension table", len(payload))
    dims = tuple(int.from_bytes(payload[4 + 4 * i:8 + 4 * i], "big") for i in range(rank))
    expected = int(np.prod(dims))
    body = len(payload) - header_end
    if body < expected:
        raise IdxFormatError(f"{name}: truncated payload, {body} of {expected} bytes present", len(payload))
    if body > expected:
        raise IdxFormatError(f"{name}: {body - expected} trailing bytes after payload", header_end + expected)
    return np.frombuffer(payload, dtype=np.uint8, count=expected, offset=header_end).reshape(dims)


def _encode(array: np.ndarray, magic: int) -> bytes:
    header = magic.to_bytes(4, "big") + b"".join(int(d).to_bytes(4, "big") for d in array.shape)
    return header + np.ascontiguousarray(array, dtype=np.uint8).tobytes()


def load_idx(images_path: PathLike, labels_path: PathLike, class_count: Optional[int] = None) -> LabeledImageSet:
    """Read an IDX image/label pair; pixels scaled to [0, 1], provenance manual"""
    images = _parse(_read_bytes(images_path), IMAGES_MAGIC, str(images_path))
    labels = _parse(_read_bytes(labels_path), LABELS_MAGIC, str(labels_path))
    if images.ndim != 3:
        raise IdxFormatError(f"{images_path}: expected 3 image dimensions, got {images.ndim}", 3)
    if images.shape[0] != labels.shape[0]:
        raise IdxFormatError(
            f"{images.shape[0]} images but {labels.shape[0]} labels", 4
        )
    classes = class_count if class_count is not None else int(labels.max()) + 1
    pixels = images[:, None, :, :].astype(np.float32) / np.float32(255.0)
    logger.info(f"Loaded {images.shape[0]} IDX images of size {images.shape[1]}x{images.shape[2]}")
    return LabeledImageSet.manual(pixels, labels.astype(np.int64), classes)


def write_idx(image_set: LabeledImageSet, images_path: PathLike, labels_path: PathLike) -> Tuple[Path, Path]:
    """Export a labelled set; pixels in [0, 1] are quantized back to bytes"""
    if np.any(image_set.labels == UNLABELED):
        raise DatasetError("cannot write unlabeled images to an IDX label file")
    if image_set.class_count > 256:
        raise DatasetError("IDX label files hold at most 256 classes")
    pixels = np.rint(np.clip(image_set.images[:, 0], 0.0, 1.0) * 255.0).astype(np.uint8)
    _write_bytes(images_path, _encode(pixels, IMAGES_MAGIC))
    _write_bytes(labels_path, _encode(image_set.labels.astype(np.uint8), LABELS_MAGIC))
    logger.info(f"Wrote {len(image_set)} images to {images_path}")
    return Path(images_path), Path(labels_path)
