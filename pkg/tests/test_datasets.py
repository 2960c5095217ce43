"""Tests for image sets, generators, IDX files and preprocessing"""
import numpy as np
import pytest

from latent_feature_clustering.datasets import (
    UNLABELED,
    DatasetCollector,
    LabeledImageSet,
    Provenance,
    SplitSpec,
    denormalize,
    generate_channels,
    generate_splash,
    load_idx,
    normalize,
    partition_labels,
    split,
    write_idx,
)
from latent_feature_clustering.errors import DatasetError, IdxFormatError


def _idx_header(magic: int, *dims: int) -> bytes:
    return magic.to_bytes(4, "big") + b"".join(d.to_bytes(4, "big") for d in dims)


class TestGenerators:
    def test_channels_are_a_pure_function_of_n_and_seed(self):
        first = generate_channels(100, seed=7)
        second = generate_channels(100, seed=7)
        np.testing.assert_array_equal(first.images, second.images)
        np.testing.assert_array_equal(first.labels, second.labels)

    def test_channels_cover_five_classes_in_unit_range(self):
        image_set = generate_channels(100, seed=7)
        assert np.unique(image_set.labels).size == 5
        assert image_set.images.shape == (100, 1, 50, 50)
        assert image_set.images.min() >= 0.0 and image_set.images.max() <= 1.0
        assert image_set.count(Provenance.MANUAL) == 100

    def test_splash_covers_seven_classes(self):
        image_set = generate_splash(700, seed=0)
        assert np.unique(image_set.labels).size == 7
        assert image_set.images.shape[1:] == (1, 80, 112)
        assert image_set.class_names[0] == "bubble"

    def test_splash_is_deterministic(self):
        np.testing.assert_array_equal(generate_splash(14, seed=3).images, generate_splash(14, seed=3).images)

    def test_seed_changes_output(self):
        assert not np.array_equal(generate_channels(10, seed=1).images, generate_channels(10, seed=2).images)

    def test_too_few_samples(self):
        with pytest.raises(DatasetError):
            generate_splash(6, seed=0)


class TestIdx:
    def test_reads_standard_header(self, tmp_path):
        n = 10000
        pixels = np.zeros((n, 28, 28), dtype=np.uint8)
        pixels[3, 4, 5] = 255
        (tmp_path / "images").write_bytes(_idx_header(0x803, n, 28, 28) + pixels.tobytes())
        labels = (np.arange(n) % 10).astype(np.uint8)
        (tmp_path / "labels").write_bytes(_idx_header(0x801, n) + labels.tobytes())

        image_set = load_idx(tmp_path / "images", tmp_path / "labels")
        assert len(image_set) == n
        assert (image_set.height, image_set.width) == (28, 28)
        assert image_set.class_count == 10
        assert image_set.images.max() == 1.0
        assert image_set.images[3, 0, 4, 5] == 1.0

    def test_count_mismatch(self, tmp_path):
        (tmp_path / "images").write_bytes(_idx_header(0x803, 3, 2, 2) + bytes(12))
        (tmp_path / "labels").write_bytes(_idx_header(0x801, 2) + bytes(2))
        with pytest.raises(IdxFormatError):
            load_idx(tmp_path / "images", tmp_path / "labels")

    def test_bad_magic_reports_offset_zero(self, tmp_path):
        (tmp_path / "images").write_bytes(_idx_header(0x802, 1, 2, 2) + bytes(4))
        (tmp_path / "labels").write_bytes(_idx_header(0x801, 1) + bytes(1))
        with pytest.raises(IdxFormatError) as info:
            load_idx(tmp_path / "images", tmp_path / "labels")
        assert info.value.offset == 0

    def test_truncated_payload(self, tmp_path):
        (tmp_path / "images").write_bytes(_idx_header(0x803, 2, 2, 2) + bytes(5))
        (tmp_path / "labels").write_bytes(_idx_header(0x801, 2) + bytes(2))
        with pytest.raises(IdxFormatError):
            load_idx(tmp_path / "images", tmp_path / "labels")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetError):
            load_idx(tmp_path / "nope", tmp_path / "nope-either")

    def test_gzip_export_reloads(self, tmp_path):
        original = generate_channels(10, seed=4)
        images_path, labels_path = write_idx(original, tmp_path / "x.idx3.gz", tmp_path / "y.idx1.gz")
        reloaded = load_idx(images_path, labels_path, class_count=original.class_count)
        np.testing.assert_array_equal(reloaded.labels, original.labels)
        np.testing.assert_allclose(reloaded.images, original.images, atol=0.5 / 255 + 1e-7)

    def test_unlabeled_sets_cannot_be_written(self, tmp_path):
        hidden = generate_channels(5, seed=0).hide_labels()
        with pytest.raises(DatasetError):
            write_idx(hidden, tmp_path / "a", tmp_path / "b")


class TestNormalization:
    def test_zero_mean_unit_std(self):
        normalized, mean, std = normalize(generate_channels(50, seed=1))
        assert abs(float(normalized.images.astype(np.float64).mean())) < 1e-5
        assert abs(float(normalized.images.astype(np.float64).std()) - 1.0) < 1e-4
        assert std > 0

    def test_statistics_of_normalized_set(self):
        normalized, _, _ = normalize(generate_channels(50, seed=1))
        _, mean, std = normalize(normalized)
        assert mean == pytest.approx(0.0, abs=1e-5)
        assert std == pytest.approx(1.0, abs=1e-4)

    def test_denormalize_inverts(self):
        original = generate_channels(20, seed=2)
        normalized, mean, std = normalize(original)
        np.testing.assert_allclose(denormalize(normalized.images, mean, std), original.images, atol=1e-6)

    def test_constant_set_is_rejected(self):
        flat = LabeledImageSet.manual(np.full((4, 1, 8, 8), 0.5), [0, 1, 0, 1], class_count=2)
        with pytest.raises(DatasetError):
            normalize(flat)


class TestSplit:
    def test_eighty_twenty(self):
        train, val = split(generate_channels(100, seed=0), SplitSpec(train_fraction=0.8, seed=0))
        assert (len(train), len(val)) == (80, 20)

    def test_parts_partition_the_set(self):
        image_set = generate_channels(100, seed=0)
        train, val = split(image_set, SplitSpec(seed=3))
        fingerprint = lambda s: np.sort(s.images.reshape(len(s), -1).sum(axis=1))  # noqa: E731
        np.testing.assert_allclose(
            np.sort(np.concatenate([fingerprint(train), fingerprint(val)])), fingerprint(image_set)
        )
        np.testing.assert_array_equal(np.bincount(np.concatenate([train.labels, val.labels])),
                                      np.bincount(image_set.labels))

    def test_same_seed_same_split(self):
        image_set = generate_channels(60, seed=0)
        first, _ = split(image_set, SplitSpec(seed=9))
        second, _ = split(image_set, SplitSpec(seed=9))
        np.testing.assert_array_equal(first.images, second.images)

    def test_split_is_stratified(self):
        train, val = split(generate_channels(100, seed=0), SplitSpec(seed=1))
        np.testing.assert_array_equal(np.bincount(train.labels), [16] * 5)
        np.testing.assert_array_equal(np.bincount(val.labels), [4] * 5)

    def test_fraction_bounds(self):
        with pytest.raises(DatasetError):
            SplitSpec(train_fraction=1.0)

    def test_partition_hides_labels(self):
        manual, unlabeled = partition_labels(generate_channels(100, seed=0), 0.25, seed=0)
        assert len(manual) == 25
        assert len(unlabeled) == 75
        assert np.all(unlabeled.labels == UNLABELED)
        assert unlabeled.count(Provenance.UNLABELED) == 75
        assert manual.count(Provenance.MANUAL) == 25


class TestImageSet:
    def test_unlabeled_marker_must_match_provenance(self):
        with pytest.raises(DatasetError):
            LabeledImageSet.manual(np.zeros((2, 1, 4, 4)), [0, UNLABELED], class_count=2)

    def test_label_range(self):
        with pytest.raises(DatasetError):
            LabeledImageSet.manual(np.zeros((2, 1, 4, 4)), [0, 2], class_count=2)

    def test_concatenate_keeps_provenance(self):
        image_set = generate_channels(10, seed=0)
        merged = LabeledImageSet.concatenate([image_set, image_set.hide_labels()])
        assert merged.count(Provenance.MANUAL) == 10
        assert merged.count(Provenance.UNLABELED) == 10


class TestCollector:
    def test_unknown_source(self):
        with pytest.raises(DatasetError):
            DatasetCollector().collect_from_source("cifar")

    def test_save_data_writes_idx_pair(self, tmp_path):
        collector = DatasetCollector()
        image_set = collector.collect_from_source("channels", {"n_samples": 15, "seed": 2})
        images_path, labels_path = collector.save_data(image_set, str(tmp_path / "data"), "channels")
        assert images_path.name == "channels-images.idx3-ubyte"
        reloaded = collector.collect_from_source(
            "idx", {"images_path": images_path, "labels_path": labels_path, "n_samples": 10}
        )
        assert len(reloaded) == 10
        np.testing.assert_array_equal(reloaded.labels, image_set.labels[:10])
