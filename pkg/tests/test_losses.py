"""Tests for reconstruction, KL, soft silhouette and contrastive objectives"""
import numpy as np
import pytest
from sklearn.metrics import silhouette_score as sklearn_silhouette

from latent_feature_clustering.errors import ClusteringLossError, ConfigurationError, ShapeError
from latent_feature_clustering.losses import (
    LossConfig,
    LossReport,
    adaptive_weights,
    contrastive_loss,
    kl_loss,
    loss_weights,
    mse_loss,
    soft_silhouette_loss,
    total_loss,
)
from latent_feature_clustering.models import GaussianParams
from latent_feature_clustering.ndmath import Tensor, gradient_check

SEEDS = list(range(10))


def _gaussian(mu, log_var):
    return GaussianParams(Tensor(np.asarray(mu, dtype=np.float64)), Tensor(np.asarray(log_var, dtype=np.float64)))


class TestReconstruction:
    def test_identical_inputs(self):
        x = np.random.default_rng(0).random((2, 1, 4, 4))
        assert mse_loss(x, x).item() == 0.0

    def test_unit_offset(self):
        assert mse_loss(np.array([0.0, 0.0]), np.array([1.0, 1.0])).item() == pytest.approx(1.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mse_loss(np.zeros(3), np.zeros(4))

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient(self, seed):
        rng = np.random.default_rng(seed)
        target = rng.normal(size=(2, 1, 4, 4))
        assert gradient_check(lambda t: mse_loss(target, t), rng.normal(size=(2, 1, 4, 4))) <= 1e-4


class TestKL:
    def test_prior_equals_posterior(self):
        assert kl_loss(_gaussian(np.zeros((3, 4)), np.zeros((3, 4))), 1.0, 256, 50, 50).item() == 0.0

    def test_scaled_by_latent_over_pixels(self):
        value = kl_loss(_gaussian([[1.0]], [[0.0]]), 1.0, 256, 50, 50).item()
        assert value == pytest.approx(0.0512, abs=1e-12)

    def test_linear_in_beta(self):
        g = _gaussian([[0.3, -1.2]], [[0.5, -0.4]])
        one = kl_loss(g, 1.0, 256, 50, 50).item()
        assert kl_loss(g, 2.0, 256, 50, 50).item() == pytest.approx(2.0 * one, rel=1e-12)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradients(self, seed):
        rng = np.random.default_rng(seed)
        mu = rng.normal(size=(3, 4))
        log_var = rng.normal(scale=0.5, size=(3, 4))
        f = lambda t: kl_loss(GaussianParams(t, Tensor(log_var)), 1.5, 64, 28, 28)  # noqa: E731
        assert gradient_check(f, mu) <= 1e-4
        g = lambda t: kl_loss(GaussianParams(Tensor(mu), t), 1.5, 64, 28, 28)  # noqa: E731
        assert gradient_check(g, log_var) <= 1e-4


class TestSoftSilhouette:
    def test_two_tight_pairs(self, two_clusters):
        points, labels = two_clusters
        loss, terms = soft_silhouette_loss(points, labels, 2)
        assert loss.item() == pytest.approx(0.09975, abs=1e-5)
        assert terms.score == pytest.approx(0.90025, abs=1e-5)
        np.testing.assert_allclose(terms.a, 1.0)
        np.testing.assert_allclose(terms.b, (10.0 + np.sqrt(101.0)) / 2.0)

    def test_interleaved_labels_score_negative(self, interleaved):
        points, labels = interleaved
        loss, terms = soft_silhouette_loss(points, labels, 2)
        assert np.all(terms.s < 0)
        assert terms.s[0] == pytest.approx(-0.4475, abs=1e-4)
        assert 0.0 <= loss.item() <= 2.0

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient(self, seed):
        rng = np.random.default_rng(12 + seed)
        labels = np.repeat([0, 1], 6)
        z = rng.normal(size=(12, 3)) + labels[:, None] * 2.0
        f = lambda t: soft_silhouette_loss(t, labels, 2)[0]  # noqa: E731
        assert gradient_check(f, z) <= 1e-4

    def test_agrees_with_exact_silhouette(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            k = int(rng.integers(2, 8))
            n = int(rng.integers(2 * k, 65))
            labels = rng.permutation(np.concatenate([np.repeat(np.arange(k), 2), rng.integers(0, k, n - 2 * k)]))
            z = rng.normal(size=(n, int(rng.integers(2, 33)))) + labels[:, None]
            loss, _ = soft_silhouette_loss(z, labels, k)
            assert 1.0 - loss.item() == pytest.approx(sklearn_silhouette(z, labels), abs=1e-5)

    def test_translation_invariant(self):
        rng = np.random.default_rng(9)
        labels = rng.permutation(np.repeat([0, 1, 2], 5))
        z = rng.normal(size=(15, 4))
        loss, _ = soft_silhouette_loss(z, labels, 3)
        moved, _ = soft_silhouette_loss(z + rng.normal(scale=3.0, size=4), labels, 3)
        assert moved.item() == pytest.approx(loss.item(), abs=1e-9)

    def test_loss_stays_in_range(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            labels = rng.permutation(np.repeat([0, 1, 2], 4))
            loss, _ = soft_silhouette_loss(rng.normal(size=(12, 5)), labels, 3)
            assert 0.0 <= loss.item() <= 2.0

    def test_singleton_cluster_is_masked(self):
        points = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [5.0, 5.0]])
        _, terms = soft_silhouette_loss(points, np.array([0, 0, 0, 1]), 2)
        np.testing.assert_array_equal(terms.valid, [True, True, True, False])

    def test_single_cluster_batch(self):
        with pytest.raises(ClusteringLossError, match="single-cluster"):
            soft_silhouette_loss(np.random.default_rng(0).normal(size=(5, 2)), np.zeros(5, dtype=int), 3)

    def test_too_few_valid_points(self):
        with pytest.raises(ClusteringLossError):
            soft_silhouette_loss(np.eye(3), np.array([0, 1, 2]), 3)

    def test_soft_memberships(self, two_clusters):
        points, labels = two_clusters
        memberships = np.array([[1.0, 0.1], [1.0, 0.1], [0.1, 1.0], [0.1, 1.0]])
        loss, terms = soft_silhouette_loss(points, labels, 2, memberships=memberships)
        assert np.isfinite(loss.item())
        assert terms.valid.all()


class TestContrastive:
    def test_identical_points_same_label(self):
        assert contrastive_loss(np.zeros((2, 3)), np.array([1, 1])).item() == 0.0

    def test_far_apart_different_labels(self):
        assert contrastive_loss(np.array([[0.0, 0.0], [2.0, 0.0]]), np.array([0, 1]), margin=1.0).item() == 0.0

    def test_inside_margin(self):
        loss = contrastive_loss(np.array([[0.0, 0.0], [0.5, 0.0]]), np.array([0, 1]), margin=1.0)
        assert loss.item() == pytest.approx(0.25)

    def test_mean_over_pairs(self):
        z = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.5]])
        # pairs: (0,1) same -> 1, (0,2) different -> 0.25, (1,2) different -> 0
        loss = contrastive_loss(z, np.array([0, 0, 1]), margin=1.0)
        assert loss.item() == pytest.approx(1.25 / 3.0)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient(self, seed):
        rng = np.random.default_rng(6 + seed)
        labels = np.array([0, 0, 1, 1, 2, 2])
        f = lambda t: contrastive_loss(t, labels, margin=2.0)  # noqa: E731
        assert gradient_check(f, rng.normal(size=(6, 3))) <= 1e-4

    def test_translation_invariant(self):
        rng = np.random.default_rng(10)
        labels = np.array([0, 0, 1, 1, 2, 2, 0, 1])
        z = rng.normal(scale=0.6, size=(8, 3))
        moved = z + rng.normal(scale=3.0, size=3)
        assert contrastive_loss(moved, labels).item() == pytest.approx(contrastive_loss(z, labels).item(), abs=1e-9)

    def test_needs_two_points(self):
        with pytest.raises(ClusteringLossError):
            contrastive_loss(np.zeros((1, 2)), np.array([0]))

    def test_label_count_mismatch(self):
        with pytest.raises(ShapeError):
            contrastive_loss(np.zeros((3, 2)), np.array([0, 1]))


class TestWeights:
    @pytest.mark.parametrize("epoch, expected", [(0, (1.0, 0.0)), (50, (0.5, 0.5)), (150, (0.0, 1.0))])
    def test_adaptive_schedule(self, epoch, expected):
        assert adaptive_weights(epoch) == pytest.approx(expected)

    def test_negative_epoch(self):
        with pytest.raises(ConfigurationError):
            adaptive_weights(-1)

    def test_pretraining_silences_aux(self):
        config = LossConfig(aux="clustering", pretrain_epochs=10, adaptive=True)
        assert loss_weights(config, 3) == (1.0, 0.0)
        assert loss_weights(config, 20) == pytest.approx((0.8, 0.2))


class TestTotalLoss:
    def test_fixed_coefficient(self):
        config = LossConfig(aux="clustering", lambda_cl=0.2)
        assert total_loss({"l_rec": 0.5, "l_cl": 0.1}, config, epoch=0) == pytest.approx(0.52)

    def test_adaptive_contrastive(self):
        config = LossConfig(aux="contrastive", adaptive=True)
        assert total_loss({"l_rec": 0.5, "l_con": 0.1}, config, epoch=50) == pytest.approx(0.30)

    def test_pretrain_gates_aux(self):
        config = LossConfig(aux="clustering", pretrain_epochs=10)
        assert total_loss({"l_rec": 0.5, "l_cl": 0.1}, config, epoch=3) == pytest.approx(0.5)

    def test_kl_joins_reconstruction(self):
        config = LossConfig(aux="none")
        assert total_loss(LossReport(l_rec=0.5, l_kl=0.25), config, epoch=0) == pytest.approx(0.75)

    def test_works_on_tensors(self):
        l_rec = Tensor(np.array(0.5), requires_grad=True)
        total = total_loss({"l_rec": l_rec, "l_cl": Tensor(np.array(0.1))}, LossConfig(aux="clustering"), epoch=0)
        total.backward()
        assert total.item() == pytest.approx(0.52)
        assert l_rec.grad == pytest.approx(1.0)

    def test_both_aux_terms(self):
        with pytest.raises(ConfigurationError):
            total_loss({"l_rec": 0.5, "l_cl": 0.1, "l_con": 0.1}, LossConfig(aux="clustering"), 0)

    def test_term_must_match_mode(self):
        with pytest.raises(ConfigurationError):
            total_loss({"l_rec": 0.5, "l_con": 0.1}, LossConfig(aux="clustering"), 0)

    def test_report_average(self):
        merged = LossReport.average([LossReport(l_rec=1.0, total=1.0), LossReport(l_rec=3.0, l_cl=0.5, total=3.0)],
                                    [1, 3])
        assert merged.l_rec == pytest.approx(2.5)
        assert merged.l_cl == pytest.approx(0.5)
        assert merged.l_kl is None
