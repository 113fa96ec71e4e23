import numpy as np
import pytest

from oracles import direct_bilateral, gaussian_blur, oracle_signature_map
from sigsal.errors import DegenerateInput, InvalidShape, InvalidValue
from sigsal.numutil import minmax_normalize
from sigsal.saliency import (
    BilateralParams,
    SaliencyMap,
    bilateral_filter,
    eigen_cam_map,
    render_overlay,
    signature_activation_map,
    suppress_background,
)
from sigsal.theorem import sample_mixture_2d


class TestBilateralParams:
    def test_defaults(self):
        p = BilateralParams()
        assert (p.sigma_spatial, p.sigma_range, p.radius) == (3.0, 0.1, 6)

    def test_validation(self):
        with pytest.raises(InvalidValue):
            BilateralParams(sigma_spatial=0.0)
        with pytest.raises(InvalidValue):
            BilateralParams(radius=0)


class TestBilateralFilter:
    def test_constant_unchanged(self):
        out = bilateral_filter(np.full((9, 9), 0.37))
        np.testing.assert_allclose(out, 0.37, atol=1e-15)

    def test_huge_sigma_range_equals_gaussian(self):
        img = np.random.default_rng(0).random((12, 15))
        params = BilateralParams(sigma_spatial=2.0, sigma_range=1e9, radius=4)
        blur = gaussian_blur(img, 2.0, 4)
        assert np.abs(bilateral_filter(img, params) - blur).max() < 1e-6

    def test_single_spike_matches_direct_oracle(self):
        img = np.zeros((5, 5))
        img[2, 2] = 1.0
        params = BilateralParams(sigma_spatial=1.0, sigma_range=0.1, radius=2)
        out = bilateral_filter(img, params)
        assert np.abs(out - direct_bilateral(img, 1.0, 0.1, 2)).max() < 1e-12

    def test_random_matches_direct_oracle(self):
        img = np.random.default_rng(1).random((8, 11))
        params = BilateralParams(sigma_spatial=1.5, sigma_range=0.25, radius=3)
        out = bilateral_filter(img, params)
        assert np.abs(out - direct_bilateral(img, 1.5, 0.25, 3)).max() < 1e-12

    def test_preserves_value_range(self):
        img = np.random.default_rng(2).normal(size=(20, 20))
        out = bilateral_filter(img)
        assert out.min() >= img.min() - 1e-12 and out.max() <= img.max() + 1e-12


class TestSuppressBackground:
    def test_constant_image_goes_to_zero(self):
        assert (suppress_background(np.full((16, 16), 0.5)) == 0).all()

    def test_output_in_unit_interval(self):
        img = np.random.default_rng(3).random((24, 24))
        out = suppress_background(img)
        assert out.shape == img.shape
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_energy_concentrates_on_foreground_support(self):
        ratios = []
        for trial in range(20):
            f, _, mixture = sample_mixture_2d(48, 48, 30, 150, seed=500 + trial)
            out = suppress_background(minmax_normalize(mixture))
            on = out[f != 0].mean()
            off = out[f == 0].mean()
            ratios.append(on / off)
        assert np.mean(ratios) > 2.0


class TestSignatureActivationMap:
    def test_constant_channel_gives_zero_map(self):
        stack = np.full((1, 8, 8), 2.5)
        out = signature_activation_map(stack, 16, 16)
        assert (out.values == 0).all()
        assert (out.height, out.width) == (16, 16)

    def test_positive_rescale_bitwise_identical(self):
        stack = np.random.default_rng(4).normal(size=(4, 8, 8))
        base = signature_activation_map(stack, 20, 20)
        for alpha in (0.5, 3.7, 1e6):
            scaled = signature_activation_map(alpha * stack, 20, 20)
            assert (scaled.values == base.values).all()

    def test_matches_composed_oracle_pipeline(self):
        stack = np.random.default_rng(5).normal(size=(4, 8, 8))
        params = BilateralParams(sigma_spatial=1.5, sigma_range=0.2, radius=2)
        ours = signature_activation_map(stack, 12, 12, params)
        ref = oracle_signature_map(stack, 12, 12, 1.5, 0.2, 2)
        assert np.abs(ours.values - ref).max() < 1e-9

    def test_channel_permutation_invariance(self):
        stack = np.random.default_rng(6).normal(size=(6, 8, 8))
        base = signature_activation_map(stack, 8, 8)
        permuted = signature_activation_map(stack[[3, 1, 5, 0, 4, 2]], 8, 8)
        assert np.abs(base.values - permuted.values).max() < 1e-12

    def test_output_dims_and_range(self):
        stack = np.random.default_rng(7).normal(size=(3, 10, 14))
        out = signature_activation_map(stack, 37, 11)
        assert out.values.shape == (37, 11)
        assert out.values.min() >= 0.0 and out.values.max() <= 1.0


class TestEigenCam:
    def test_single_channel_is_normalized_abs(self):
        channel = np.random.default_rng(8).normal(size=(7, 9))
        out = eigen_cam_map(channel[None], 7, 9)
        np.testing.assert_allclose(
            out.values, minmax_normalize(np.abs(channel)), atol=1e-12
        )

    def test_scale_invariance(self):
        stack = np.random.default_rng(9).normal(size=(5, 6, 6))
        base = eigen_cam_map(stack, 12, 12)
        scaled = eigen_cam_map(100.0 * stack, 12, 12)
        assert np.abs(base.values - scaled.values).max() < 1e-10

    def test_matches_dense_eigensolver(self):
        stack = np.random.default_rng(10).normal(size=(3, 6, 6))
        v_mat = stack.reshape(3, 36).T
        evals, evecs = np.linalg.eigh(v_mat.T @ v_mat)
        u_ref = evecs[:, np.argmax(evals)]
        ref = np.abs(v_mat @ u_ref).reshape(6, 6)
        out = eigen_cam_map(stack, 6, 6)
        np.testing.assert_allclose(out.values, minmax_normalize(ref), atol=1e-8)

    def test_zero_stack_rejected(self):
        with pytest.raises(DegenerateInput):
            eigen_cam_map(np.zeros((2, 4, 4)), 4, 4)


class TestRenderOverlay:
    def test_alpha_zero_is_grayscale(self):
        img = np.random.default_rng(11).random((5, 5))
        saliency = SaliencyMap(np.random.default_rng(12).random((5, 5)))
        out = render_overlay(img, saliency, alpha=0.0)
        for c in range(3):
            np.testing.assert_allclose(out[..., c], img, atol=1e-15)

    def test_alpha_one_zero_map_is_uniform_low_color(self):
        out = render_overlay(np.zeros((4, 4)), SaliencyMap(np.zeros((4, 4))), alpha=1.0)
        assert (out == out[0, 0]).all()
        assert out[0, 0, 2] > 0.0  # cold end of the ramp is blue-ish
        assert out[0, 0, 0] == 0.0

    def test_range_and_shape(self):
        img = np.random.default_rng(13).random((6, 7))
        saliency = SaliencyMap(np.random.default_rng(14).random((6, 7)))
        out = render_overlay(img, saliency, alpha=0.6)
        assert out.shape == (6, 7, 3)
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_shape_mismatch(self):
        with pytest.raises(InvalidShape):
            render_overlay(np.zeros((4, 4)), SaliencyMap(np.zeros((5, 5))))


class TestSaliencyMapType:
    def test_range_validation(self):
        with pytest.raises(InvalidValue):
            SaliencyMap(np.array([[0.0, 1.5]]))

    def test_dims(self):
        m = SaliencyMap(np.zeros((3, 7)))
        assert (m.height, m.width) == (3, 7)
