import math

import numpy as np
import pytest

from lungseg import (
    BnParams,
    ConfigError,
    ContractViolation,
    KernelBank,
    NumericError,
    argmax_channels,
    batch_norm,
    conv2d,
    relu,
    softmax_channels,
    tensor,
    upsample_nearest,
)

from oracles import conv2d_loops


def ones_kernel(c_out=1, c_in=1, k=3):
    return KernelBank(np.ones((c_out, c_in, k, k)), np.zeros(c_out))


class TestTensor:
    def test_coerces_to_float64(self):
        t = tensor([[[1, 2], [3, 4]]])
        assert t.dtype == np.float64
        assert t.shape == (1, 2, 2)

    def test_rejects_wrong_rank(self):
        with pytest.raises(ContractViolation):
            tensor(np.zeros((2, 2)))

    def test_rejects_nonfinite(self):
        bad = np.ones((1, 2, 2))
        bad[0, 0, 0] = np.nan
        with pytest.raises(NumericError):
            tensor(bad)


class TestKernelBank:
    def test_shape_properties(self):
        kb = KernelBank(np.zeros((4, 3, 3, 5)), np.zeros(4))
        assert (kb.out_channels, kb.in_channels, kb.k_h, kb.k_w) == (4, 3, 3, 5)

    def test_even_kernel_rejected(self):
        with pytest.raises(ConfigError):
            KernelBank(np.zeros((1, 1, 2, 3)), np.zeros(1))

    def test_bias_length_mismatch(self):
        with pytest.raises(ContractViolation):
            KernelBank(np.zeros((2, 1, 3, 3)), np.zeros(3))


class TestConv2d:
    def test_ones_kernel_counts_padded_neighborhood(self):
        # Each output = number of in-bounds pixels in the 3x3 window.
        out = conv2d(np.ones((1, 3, 3)), ones_kernel())
        expected = np.array([[[4.0, 6.0, 4.0], [6.0, 9.0, 6.0], [4.0, 6.0, 4.0]]])
        np.testing.assert_array_equal(out, expected)

    def test_1x1_identity(self):
        x = np.arange(12.0).reshape(1, 3, 4)
        kb = KernelBank(np.ones((1, 1, 1, 1)), np.zeros(1))
        np.testing.assert_array_equal(conv2d(x, kb), x)

    def test_bias_added_everywhere(self):
        kb = KernelBank(np.zeros((2, 1, 3, 3)), np.array([1.5, -2.0]))
        out = conv2d(np.ones((1, 4, 4)), kb)
        assert (out[0] == 1.5).all() and (out[1] == -2.0).all()

    def test_channel_mixing(self):
        x = np.stack([np.full((2, 2), 3.0), np.full((2, 2), 5.0)])
        kb = KernelBank(np.ones((1, 2, 1, 1)), np.zeros(1))
        np.testing.assert_array_equal(conv2d(x, kb), np.full((1, 2, 2), 8.0))

    def test_channel_mismatch_rejected(self):
        with pytest.raises(ContractViolation):
            conv2d(np.ones((2, 3, 3)), ones_kernel(c_in=3))

    def test_matches_nested_loop_reference(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            c_in, c_out = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            h, w = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            k = int(rng.choice([1, 3, 5]))
            x = rng.standard_normal((c_in, h, w))
            weights = rng.standard_normal((c_out, c_in, k, k))
            bias = rng.standard_normal(c_out)
            got = conv2d(x, KernelBank(weights, bias))
            np.testing.assert_allclose(got, conv2d_loops(x, weights, bias),
                                       rtol=1e-10, atol=1e-12)

    def test_nonfinite_input_rejected(self):
        x = np.ones((1, 2, 2))
        x[0, 0, 0] = np.inf
        with pytest.raises(NumericError):
            conv2d(x, ones_kernel())

    def test_linearity_with_zero_bias(self):
        rng = np.random.default_rng(8)
        kb = KernelBank(rng.standard_normal((2, 2, 3, 3)), np.zeros(2))
        x, y = rng.standard_normal((2, 2, 5, 5))
        combined = conv2d(3.0 * x - 0.5 * y, kb)
        separate = 3.0 * conv2d(x, kb) - 0.5 * conv2d(y, kb)
        np.testing.assert_allclose(combined, separate, rtol=1e-10, atol=1e-12)


class TestRelu:
    def test_clamps_negatives_only(self):
        x = np.array([[[-1.0, 0.0], [2.5, -0.1]]])
        np.testing.assert_array_equal(relu(x), [[[0.0, 0.0], [2.5, 0.0]]])

    def test_all_negative_saturates_to_zero(self):
        assert not relu(np.full((2, 3, 3), -4.0)).any()

    def test_idempotent(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((2, 4, 4))
        once = relu(x)
        np.testing.assert_array_equal(relu(once), once)


class TestBatchNorm:
    def test_scalar_case(self):
        # One channel, constant 2.0, checked against plain scalar arithmetic.
        p = BnParams(np.array([1.5]), np.array([0.25]), np.array([0.5]), np.array([4.0]))
        out = batch_norm(np.full((1, 2, 2), 2.0), p)
        expected = 1.5 * (2.0 - 0.5) / math.sqrt(4.0 + 1e-3) + 0.25
        assert expected == pytest.approx(1.3748594013616955, abs=0)
        np.testing.assert_allclose(out, expected, rtol=0, atol=0)

    def test_channels_independent(self):
        p = BnParams(np.array([1.0, 2.0]), np.zeros(2), np.zeros(2), np.array([1.0, 1.0]),
                     epsilon=0.0001)
        x = np.ones((2, 1, 1))
        out = batch_norm(x, p)
        assert out[1, 0, 0] == pytest.approx(2 * out[0, 0, 0])

    def test_negative_variance_rejected(self):
        with pytest.raises(ConfigError):
            BnParams(np.ones(1), np.zeros(1), np.zeros(1), np.array([-1.0]))

    def test_nonpositive_epsilon_rejected(self):
        with pytest.raises(ConfigError):
            BnParams(np.ones(1), np.zeros(1), np.zeros(1), np.ones(1), epsilon=0.0)

    def test_channel_count_mismatch(self):
        p = BnParams(np.ones(2), np.zeros(2), np.zeros(2), np.ones(2))
        with pytest.raises(ContractViolation):
            batch_norm(np.ones((3, 2, 2)), p)

    def test_zero_scale_gives_constant_beta(self):
        p = BnParams(np.zeros(1), np.array([7.0]), np.array([3.0]), np.array([2.0]))
        out = batch_norm(np.arange(4.0).reshape(1, 2, 2), p)
        np.testing.assert_array_equal(out, np.full((1, 2, 2), 7.0))

    def test_identity_parameters_near_identity(self):
        p = BnParams(np.ones(2), np.zeros(2), np.zeros(2), np.ones(2), epsilon=1e-12)
        x = np.random.default_rng(6).standard_normal((2, 3, 3))
        np.testing.assert_allclose(batch_norm(x, p), x, rtol=1e-9)


class TestUpsample:
    def test_factor_two_repeats_pixels(self):
        x = np.array([[[1.0, 2.0], [3.0, 4.0]]])
        out = upsample_nearest(x, 2)
        expected = np.array([[[1, 1, 2, 2], [1, 1, 2, 2], [3, 3, 4, 4], [3, 3, 4, 4]]], float)
        np.testing.assert_array_equal(out, expected)

    def test_factor_one_is_copy(self):
        x = np.ones((1, 2, 2))
        out = upsample_nearest(x, 1)
        np.testing.assert_array_equal(out, x)
        assert out is not x

    def test_invalid_factor(self):
        with pytest.raises(ConfigError):
            upsample_nearest(np.ones((1, 2, 2)), 0)

    def test_single_pixel_replication(self):
        out = upsample_nearest(np.full((1, 1, 1), 5.0), 3)
        np.testing.assert_array_equal(out, np.full((1, 3, 3), 5.0))

    def test_subsampling_block_origins_recovers_input(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((3, 4, 5))
        up = upsample_nearest(x, 3)
        np.testing.assert_array_equal(up[:, ::3, ::3], x)


class TestSoftmax:
    def test_known_two_channel_value(self):
        # logits (ln 2, 0) -> probabilities (2/3, 1/3)
        x = np.stack([np.full((2, 2), math.log(2.0)), np.zeros((2, 2))])
        out = softmax_channels(x)
        np.testing.assert_allclose(out[0], 2.0 / 3.0, rtol=1e-15)
        np.testing.assert_allclose(out[1], 1.0 / 3.0, rtol=1e-15)

    def test_sums_to_one(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((5, 6, 6)) * 10
        out = softmax_channels(x)
        np.testing.assert_allclose(out.sum(axis=0), 1.0, atol=1e-12)
        assert (out > 0).all()

    def test_stable_under_huge_logits(self):
        x = np.stack([np.full((2, 2), 10000.0), np.full((2, 2), 9999.0)])
        out = softmax_channels(x)
        assert np.isfinite(out).all()
        np.testing.assert_allclose(out.sum(axis=0), 1.0, atol=1e-12)

    def test_single_channel_rejected(self):
        with pytest.raises(ConfigError):
            softmax_channels(np.ones((1, 2, 2)))

    def test_equal_logits_split_evenly(self):
        out = softmax_channels(np.full((2, 3, 3), 4.2))
        np.testing.assert_array_equal(out, np.full((2, 3, 3), 0.5))

    def test_extreme_gap_saturates(self):
        x = np.zeros((2, 1, 1))
        x[0] = 1000.0
        out = softmax_channels(x)
        assert out[0, 0, 0] == pytest.approx(1.0, abs=1e-6)
        assert out[1, 0, 0] == pytest.approx(0.0, abs=1e-6)

    def test_invariant_under_per_pixel_shift(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((3, 4, 4))
        shift = rng.standard_normal((1, 4, 4)) * 50
        np.testing.assert_allclose(softmax_channels(x + shift), softmax_channels(x),
                                   atol=1e-6)


class TestArgmax:
    def test_ties_go_to_lowest_channel(self):
        x = np.stack([np.full((2, 2), 0.5), np.full((2, 2), 0.5)])
        np.testing.assert_array_equal(argmax_channels(x), np.zeros((2, 2), np.int32))

    def test_picks_largest(self):
        x = np.zeros((3, 1, 2))
        x[2, 0, 0] = 1.0
        x[1, 0, 1] = 1.0
        np.testing.assert_array_equal(argmax_channels(x), [[2, 1]])
        assert argmax_channels(x).dtype == np.int32

    def test_commutes_with_softmax(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal((4, 6, 6)) * 3
        np.testing.assert_array_equal(argmax_channels(softmax_channels(x)),
                                      argmax_channels(x))
