"""Tests for the differentiable array substrate"""
import numpy as np
import pytest

from latent_feature_clustering.errors import ConfigurationError, NonFiniteError, ShapeError
from latent_feature_clustering.losses import mse_loss
from latent_feature_clustering.ndmath import (
    AdamState,
    Tensor,
    adam_update,
    conv2d,
    conv2d_transpose,
    cross_entropy,
    dropout,
    gradient_check,
    init_parameter,
    linear,
    pairwise_distances,
    relu,
    transpose_output_padding,
)


def _kernels(shape, seed=0, dtype=np.float32):
    fan_in = shape[1] * 9
    return init_parameter(shape, fan_in, np.random.default_rng(seed), dtype=dtype)


class TestConvolution:
    @pytest.mark.parametrize("in_shape, out_shape", [
        ((1, 28, 28), (64, 14, 14)),
        ((64, 7, 7), (64, 4, 4)),
        ((1, 50, 50), (64, 25, 25)),
    ])
    def test_stride_two_halves_rounding_up(self, in_shape, out_shape):
        x = Tensor(np.random.default_rng(1).random(in_shape))
        out = conv2d(x, _kernels((64, in_shape[0], 3, 3)))
        assert out.shape == out_shape

    @pytest.mark.parametrize("size, target", [(14, 28), (4, 7), (25, 50)])
    def test_transpose_inverts_shape(self, size, target):
        x = Tensor(np.random.default_rng(2).random((64, size, size)))
        padding = transpose_output_padding(target, size)
        out = conv2d_transpose(x, _kernels((64, 8, 3, 3)), output_padding=padding)
        assert out.shape == (8, target, target)

    def test_transpose_accepts_per_axis_padding(self):
        x = Tensor(np.zeros((2, 64, 5, 7)))
        out = conv2d_transpose(x, _kernels((64, 1, 3, 3)), output_padding=(0, 1))
        assert out.shape == (2, 1, 9, 14)

    def test_unreachable_target_is_rejected(self):
        with pytest.raises(ConfigurationError):
            transpose_output_padding(30, 14)

    def test_channel_mismatch(self):
        with pytest.raises(ShapeError):
            conv2d(Tensor(np.zeros((1, 2, 8, 8))), _kernels((4, 3, 3, 3)))

    def test_conv_gradients(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(2, 2, 6, 6))
        w = _kernels((3, 2, 3, 3), dtype=np.float64)
        assert gradient_check(lambda t: (conv2d(t, w) ** 2).sum(), x) <= 1e-4
        assert gradient_check(lambda t: (conv2d(Tensor(x), t) ** 2).sum(), w.data) <= 1e-4

    def test_transpose_gradients(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(2, 3, 3, 3))
        w = _kernels((3, 2, 3, 3), dtype=np.float64)
        f = lambda t: (conv2d_transpose(t, w, output_padding=1) ** 2).sum()  # noqa: E731
        assert gradient_check(f, x) <= 1e-4
        g = lambda t: (conv2d_transpose(Tensor(x), t, output_padding=1) ** 2).sum()  # noqa: E731
        assert gradient_check(g, w.data) <= 1e-4


class TestAdam:
    def test_first_step_moves_by_learning_rate(self):
        params = {"theta": np.array([1.0])}
        updated, state = adam_update(params, {"theta": np.array([1.0])}, AdamState.create(params, lr=0.0005))
        np.testing.assert_allclose(updated["theta"], [0.9995], atol=1e-9)
        assert state.step == 1

    def test_zero_gradient_leaves_params(self):
        params = {"w": np.arange(6, dtype=np.float64).reshape(2, 3)}
        updated, _ = adam_update(params, {"w": np.zeros((2, 3))}, AdamState.create(params))
        np.testing.assert_array_equal(updated["w"], params["w"])

    def test_identical_states_give_identical_results(self):
        rng = np.random.default_rng(0)
        params = {"w": rng.normal(size=5)}
        grads = {"w": rng.normal(size=5)}
        first, _ = adam_update(params, grads, AdamState.create(params))
        second, _ = adam_update(params, grads, AdamState.create(params))
        np.testing.assert_array_equal(first["w"], second["w"])

    def test_input_state_is_not_mutated(self):
        params = {"w": np.ones(3)}
        state = AdamState.create(params)
        adam_update(params, {"w": np.ones(3)}, state)
        assert state.step == 0
        np.testing.assert_array_equal(state.m["w"], np.zeros(3))

    def test_negative_step_is_rejected(self):
        params = {"w": np.ones(1)}
        state = AdamState.create(params)
        state.step = -1
        with pytest.raises(ConfigurationError):
            adam_update(params, {"w": np.ones(1)}, state)

    def test_non_finite_gradient(self):
        params = {"w": np.ones(2)}
        with pytest.raises(NonFiniteError):
            adam_update(params, {"w": np.array([1.0, np.nan])}, AdamState.create(params))


class TestPairwiseDistances:
    def test_three_four_five(self):
        d = pairwise_distances(Tensor(np.array([[0.0, 0.0], [3.0, 4.0]]))).data
        np.testing.assert_allclose(d, [[0.0, 5.0], [5.0, 0.0]])

    def test_identical_points_have_zero_distance_and_finite_gradient(self):
        points = Tensor(np.ones((3, 2)), requires_grad=True)
        d = pairwise_distances(points)
        np.testing.assert_array_equal(d.data, np.zeros((3, 3)))
        d.sum().backward()
        assert np.all(np.isfinite(points.grad))

    def test_triangle(self):
        d = pairwise_distances(Tensor(np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0]]))).data
        assert d[0, 1] == pytest.approx(1.0)
        assert d[0, 2] == pytest.approx(10.0)
        assert d[1, 2] == pytest.approx(np.sqrt(101.0))
        np.testing.assert_allclose(d, d.T)

    def test_empty_input(self):
        assert pairwise_distances(Tensor(np.zeros((0, 3)))).shape == (0, 0)


SEEDS = list(range(10))


class TestOperatorGradients:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_linear(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(4, 5))
        w = Tensor(rng.normal(size=(5, 3)))
        b = Tensor(rng.normal(size=3))
        assert gradient_check(lambda t: (linear(t, w, b) ** 2).sum(), x) <= 1e-4
        assert gradient_check(lambda t: (linear(Tensor(x), t, b) ** 2).sum(), w.data) <= 1e-4

    @pytest.mark.parametrize("seed", SEEDS)
    def test_relu(self, seed):
        rng = np.random.default_rng(seed)
        coeff = Tensor(rng.normal(size=(4, 6)))
        assert gradient_check(lambda t: (relu(t) * coeff).sum(), rng.normal(size=(4, 6))) <= 1e-4

    @pytest.mark.parametrize("seed", SEEDS)
    def test_pairwise_distances(self, seed):
        rng = np.random.default_rng(seed)
        weights = Tensor(rng.random((6, 6)))
        f = lambda t: (pairwise_distances(t) * weights).sum()  # noqa: E731
        assert gradient_check(f, rng.normal(size=(6, 3))) <= 1e-4


class TestGradientCheck:
    def test_sum_of_squares(self):
        assert gradient_check(lambda t: (t ** 2).sum(), np.array([1.0, 2.0]), h=1e-4) <= 1e-6

    def test_constant_function(self):
        assert gradient_check(lambda t: t.sum() * 0.0 + 3.0, np.array([0.5, -1.5])) <= 1e-8

    def test_mse_against_fixed_target(self):
        rng = np.random.default_rng(8)
        target = rng.normal(size=(4, 5))
        assert gradient_check(lambda t: mse_loss(target, t), rng.normal(size=(4, 5))) <= 1e-4

    def test_non_scalar_function(self):
        with pytest.raises(ShapeError):
            gradient_check(lambda t: t * 2.0, np.ones(3))


class TestTensor:
    def test_gradients_accumulate_across_paths(self):
        x = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)
        (x * x + x).sum().backward()
        np.testing.assert_allclose(x.grad, [3.0, -3.0, 7.0])

    def test_non_finite_forward_raises(self):
        with np.errstate(divide="ignore"):
            with pytest.raises(NonFiniteError) as info:
                Tensor(np.array([0.0])).log()
        assert info.value.op == "Log"

    def test_min_routes_gradient_to_argmin(self):
        x = Tensor(np.array([[3.0, 1.0, 2.0]]), requires_grad=True)
        x.min(axis=1).sum().backward()
        np.testing.assert_array_equal(x.grad, [[0.0, 1.0, 0.0]])

    def test_cross_entropy_of_uniform_logits(self):
        loss = cross_entropy(Tensor(np.zeros((4, 5))), np.array([0, 1, 2, 3]))
        assert loss.item() == pytest.approx(np.log(5.0))


class TestDropout:
    def test_eval_mode_is_identity(self):
        x = Tensor(np.ones((4, 4)))
        assert dropout(x, 0.4, None, training=False) is x

    def test_training_scales_kept_units(self):
        x = Tensor(np.ones((200, 200)))
        out = dropout(x, 0.4, np.random.default_rng(0), training=True).data
        kept = out[out > 0]
        np.testing.assert_allclose(kept, 1.0 / 0.6, rtol=1e-6)
        assert out.mean() == pytest.approx(1.0, abs=0.02)

    def test_training_needs_generator(self):
        with pytest.raises(ConfigurationError):
            dropout(Tensor(np.ones(3)), 0.2, None, training=True)
