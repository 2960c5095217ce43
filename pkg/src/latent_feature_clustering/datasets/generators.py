"""Deterministic synthetic stand-ins for the soil-channel and droplet-impact ensembles"""
import logging
from typing import Tuple

import numpy as np

from ..errors import DatasetError
from .image_set import LabeledImageSet

# Configure logging
logger = logging.getLogger(__name__)

CHANNEL_CLASSES = ["horizontal", "vertical", "diagonal", "anti-diagonal", "lens"]
SPLASH_CLASSES = ["bubble", "bubble-splash", "column", "crown", "crown-splash", "splash", "drop"]

CHANNEL_SHAPE = (50, 50)
SPLASH_SHAPE = (80, 112)

EDGE = 1.5


def _soft(distance: np.ndarray, half_width: float) -> np.ndarray:
    """1 inside the structure, linear falloff over EDGE pixels, 0 outside"""
    return np.clip((half_width + EDGE - distance) / EDGE, 0.0, 1.0)


def _grid(shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    return np.mgrid[0:shape[0], 0:shape[1]].astype(np.float64)


def _line_distance(
    yy: np.ndarray, xx: np.ndarray, angle: float, offset: float, center: Tuple[float, float]
) -> np.ndarray:
    """Distance of every pixel to the line at ``angle`` from the x axis, shifted ``offset`` along its normal"""
    cy, cx = center
    ny, nx = np.cos(angle), -np.sin(angle)
    return np.abs((yy - cy) * ny + (xx - cx) * nx - offset)


def _segment_distance(yy, xx, p0: Tuple[float, float], p1: Tuple[float, float]) -> np.ndarray:
    (y0, x0), (y1, x1) = p0, p1
    dy, dx = y1 - y0, x1 - x0
    length_sq = max(dy * dy + dx * dx, 1e-12)
    t = np.clip(((yy - y0) * dy + (xx - x0) * dx) / length_sq, 0.0, 1.0)
    return np.hypot(yy - (y0 + t * dy), xx - (x0 + t * dx))


def _balanced_labels(n: int, class_count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(np.arange(n) % class_count)


def _finish(canvas: np.ndarray, rng: np.random.Generator, noise: float) -> np.ndarray:
    canvas = canvas + rng.normal(0.0, noise, size=canvas.shape)
    return np.clip(canvas, 0.0, 1.0)


# Channel family


def _draw_channel(label: int, rng: np.random.Generator) -> np.ndarray:
    yy, xx = _grid(CHANNEL_SHAPE)
    center = (24.5, 24.5)
    half_width = rng.uniform(2.0, 3.0)
    offset = rng.uniform(-4.0, 4.0)
    tilt = rng.uniform(-0.08, 0.08)
    amplitude = rng.uniform(0.75, 1.0)
    if label == 0:
        distance = _line_distance(yy, xx, tilt, offset, center)
    elif label == 1:
        distance = _line_distance(yy, xx, np.pi / 2 + tilt, offset, center)
    elif label == 2:
        distance = _line_distance(yy, xx, np.pi / 4 + tilt, offset, center)
    elif label == 3:
        distance = _line_distance(yy, xx, -np.pi / 4 + tilt, offset, center)
    else:
        cy = center[0] + rng.uniform(-4.0, 4.0)
        cx = center[1] + rng.uniform(-4.0, 4.0)
        stretch = rng.uniform(1.0, 1.6)
        distance = np.hypot((yy - cy) * stretch, xx - cx)
        half_width = rng.uniform(6.0, 9.0)
    background = rng.uniform(0.05, 0.15)
    return background + amplitude * _soft(distance, half_width)


def generate_channels(n: int, seed: int) -> LabeledImageSet:
    """Five-class 50x50 soil-channel family; a pure function of (n, seed)"""
    class_count = len(CHANNEL_CLASSES)
    if n < class_count:
        raise DatasetError(f"generate_channels needs n >= {class_count} to cover every class, got {n}")
    rng = np.random.default_rng(seed)
    labels = _balanced_labels(n, class_count, rng)
    images = np.empty((n, 1) + CHANNEL_SHAPE, dtype=np.float32)
    for i, label in enumerate(labels):
        images[i, 0] = _finish(_draw_channel(int(label), rng), rng, noise=0.04)
    logger.info(f"Generated {n} channel images with seed {seed}")
    return LabeledImageSet.manual(images, labels, class_count, list(CHANNEL_CLASSES))


# Splash family


def _droplets(yy, xx, rng, count: int, rows: Tuple[float, float], cols: Tuple[float, float]) -> np.ndarray:
    layer = np.zeros_like(yy)
    for _ in range(count):
        cy = rng.uniform(*rows)
        cx = rng.uniform(*cols)
        radius = rng.uniform(1.2, 2.4)
        layer = np.maximum(layer, _soft(np.hypot(yy - cy, xx - cx), radius))
    return layer


def _dome(yy, xx, surface: float, cx: float, radius: float) -> np.ndarray:
    ring = _soft(np.abs(np.hypot(yy - surface, xx - cx) - radius), 1.0)
    return ring * (yy <= surface)


def _crown(yy, xx, rng, surface: float, cx: float) -> np.ndarray:
    spread = rng.uniform(10.0, 14.0)
    height = rng.uniform(12.0, 18.0)
    flare = rng.uniform(3.0, 6.0)
    left = _segment_distance(yy, xx, (surface, cx - spread), (surface - height, cx - spread - flare))
    right = _segment_distance(yy, xx, (surface, cx + spread), (surface - height, cx + spread + flare))
    return _soft(np.minimum(left, right), 1.0)


def _draw_splash(label: int, rng: np.random.Generator) -> np.ndarray:
    yy, xx = _grid(SPLASH_SHAPE)
    surface = rng.uniform(54.0, 58.0)
    cx = 55.5 + rng.uniform(-6.0, 6.0)
    liquid = 0.55 * (yy > surface)
    features = np.zeros_like(yy)
    if label == 0:
        features = _dome(yy, xx, surface, cx, rng.uniform(10.0, 14.0))
    elif label == 1:
        features = np.maximum(
            _dome(yy, xx, surface, cx, rng.uniform(10.0, 14.0)),
            _droplets(yy, xx, rng, int(rng.integers(4, 7)), (surface - 30.0, surface - 16.0), (cx - 14.0, cx + 14.0)),
        )
    elif label == 2:
        height = rng.uniform(18.0, 28.0)
        jet = _segment_distance(yy, xx, (surface, cx), (surface - height, cx))
        bulb = np.hypot(yy - (surface - height), xx - cx)
        features = np.maximum(_soft(jet, rng.uniform(2.0, 3.0)), _soft(bulb, rng.uniform(3.0, 4.0)))
    elif label == 3:
        features = _crown(yy, xx, rng, surface, cx)
    elif label == 4:
        features = np.maximum(
            _crown(yy, xx, rng, surface, cx),
            _droplets(yy, xx, rng, int(rng.integers(4, 7)), (surface - 30.0, surface - 20.0), (cx - 24.0, cx + 24.0)),
        )
    elif label == 5:
        features = _droplets(yy, xx, rng, int(rng.integers(10, 17)),
                             (surface - 25.0, surface - 2.0), (cx - 25.0, cx + 25.0))
    else:
        height = rng.uniform(15.0, 25.0)
        features = _soft(np.hypot(yy - (surface - height), xx - cx), rng.uniform(5.0, 7.0))
    background = rng.uniform(0.02, 0.08)
    return np.maximum(background + liquid, features * rng.uniform(0.8, 1.0))


def generate_splash(n: int, seed: int) -> LabeledImageSet:
    """Seven-class 80x112 droplet-impact family at half the measured resolution"""
    class_count = len(SPLASH_CLASSES)
    if n < class_count:
        raise DatasetError(f"generate_splash needs n >= {class_count} to cover every class, got {n}")
    rng = np.random.default_rng(seed)
    labels = _balanced_labels(n, class_count, rng)
    images = np.empty((n, 1) + SPLASH_SHAPE, dtype=np.float32)
    for i, label in enumerate(labels):
        images[i, 0] = _finish(_draw_splash(int(label), rng), rng, noise=0.03)
    logger.info(f"Generated {n} splash images with seed {seed}")
    return LabeledImageSet.manual(images, labels, class_count, list(SPLASH_CLASSES))

