"""Shared fixtures and markers for the test suite"""
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pytest

from latent_feature_clustering.config import DatasetConfig, ExperimentConfig, mnist_dir
from latent_feature_clustering.datasets import LabeledImageSet
from latent_feature_clustering.losses import LossConfig
from latent_feature_clustering.models import ModelConfig
from latent_feature_clustering.projection import ProjectionConfig

MNIST_IMAGES = "train-images-idx3-ubyte"
MNIST_LABELS = "train-labels-idx1-ubyte"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the multi-minute desk runs marked slow")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: multi-minute desk runs (classifier gate, overfit, end-to-end runs)")
    config.addinivalue_line("markers", "mnist: needs the MNIST IDX files under LFC_MNIST_DIR")


def find_mnist() -> Optional[Tuple[Path, Path]]:
    root = mnist_dir()
    if root is None:
        return None
    for suffix in ("", ".gz"):
        images, labels = root / (MNIST_IMAGES + suffix), root / (MNIST_LABELS + suffix)
        if images.exists() and labels.exists():
            return images, labels
    return None


def pytest_collection_modifyitems(config, items):
    run_slow = config.getoption("--runslow")
    have_mnist = find_mnist() is not None
    skip_slow = pytest.mark.skip(reason="slow desk run; pass --runslow")
    skip_mnist = pytest.mark.skip(reason="LFC_MNIST_DIR does not hold the MNIST IDX files")
    for item in items:
        if "slow" in item.keywords and not run_slow:
            item.add_marker(skip_slow)
        if "mnist" in item.keywords and not have_mnist:
            item.add_marker(skip_mnist)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def mnist_paths():
    paths = find_mnist()
    if paths is None:
        pytest.skip("LFC_MNIST_DIR does not hold the MNIST IDX files")
    return paths


@pytest.fixture
def two_clusters():
    """Two tight pairs ten units apart"""
    points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    labels = np.array([0, 0, 1, 1])
    return points, labels


@pytest.fixture
def interleaved():
    """Same sites as ``two_clusters`` with labels alternating across them"""
    points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    labels = np.array([0, 1, 0, 1])
    return points, labels


@pytest.fixture
def blobs():
    """Two well separated 50-point Gaussian blobs in 32 dimensions"""
    generator = np.random.default_rng(11)
    centers = np.zeros((2, 32))
    centers[1, 0] = 20.0
    points = np.concatenate([c + generator.normal(size=(50, 32)) for c in centers])
    labels = np.repeat([0, 1], 50)
    return points, labels


@pytest.fixture
def tiny_images():
    """Sixteen random 28x28 images, two balanced classes"""
    generator = np.random.default_rng(5)
    images = generator.random((16, 1, 28, 28)).astype(np.float32)
    labels = np.tile([0, 1], 8)
    return LabeledImageSet.manual(images, labels, class_count=2)


@pytest.fixture
def output_root(tmp_path, monkeypatch):
    root = tmp_path / "outputs"
    monkeypatch.setenv("LFC_OUTPUT_ROOT", str(root))
    return root


def quick_config(output_dir: Path, aux: str = "none", kind: str = "AE") -> ExperimentConfig:
    """A run small enough for the default test pass"""
    return ExperimentConfig(
        name="quick",
        dataset=DatasetConfig(name="channels", n_samples=100, use_pseudo_labels=False),
        model=ModelConfig(kind=kind, latent_dim=32),
        loss=LossConfig(aux=aux),
        projection=ProjectionConfig(n_neighbors=5, epochs=30),
        epochs=2,
        batch_size=32,
        output_dir=str(output_dir),
    )
