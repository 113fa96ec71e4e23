import numpy as np
import pytest

from oracles import naive_dct1, naive_idct1, signature_signs
from sigsal.errors import InvalidSpec
from sigsal.spectral import dct1
from sigsal.theorem import (
    SparseMixSpec,
    estimate_bound,
    sample_mixture,
    sample_mixture_2d,
    trial_similarity,
)


class TestSampleMixture:
    def test_zero_background_gives_pure_foreground(self):
        f, b, mixture = sample_mixture(SparseMixSpec(64, 5, 0, seed=1))
        assert (b == 0).all()
        assert (mixture == f).all()

    def test_dense_rademacher_foreground(self):
        f, _, _ = sample_mixture(SparseMixSpec(32, 32, 0, seed=2))
        assert np.isin(f, (-1.0, 1.0)).all()

    def test_foreground_support_size(self):
        f, _, _ = sample_mixture(SparseMixSpec(128, 11, 20, seed=3))
        assert np.count_nonzero(f) == 11
        assert np.isin(f[f != 0], (-1.0, 1.0)).all()

    def test_background_sparse_in_dct_basis(self):
        spec = SparseMixSpec(128, 4, 17, seed=4)
        _, b, _ = sample_mixture(spec)
        coefs = dct1(b).coefficients
        assert np.count_nonzero(np.abs(coefs) > 1e-12) == 17

    def test_deterministic_per_seed(self):
        a = sample_mixture(SparseMixSpec(64, 6, 8, seed=5))
        b = sample_mixture(SparseMixSpec(64, 6, 8, seed=5))
        for x, y in zip(a, b):
            assert (x == y).all()

    def test_support_bounds_enforced(self):
        with pytest.raises(InvalidSpec):
            SparseMixSpec(16, 17, 0)
        with pytest.raises(InvalidSpec):
            SparseMixSpec(16, 1, 17)
        with pytest.raises(InvalidSpec):
            SparseMixSpec(16, 0, 4)

    def test_in_theorem_flag(self):
        assert SparseMixSpec(1024, 20, 170).in_theorem
        assert not SparseMixSpec(1024, 20, 171).in_theorem

    def test_2d_variant_shapes(self):
        f, b, mixture = sample_mixture_2d(8, 12, 5, 10, seed=6)
        assert f.shape == b.shape == mixture.shape == (8, 12)
        assert np.count_nonzero(f) == 5


class TestTrialSimilarity:
    def test_no_background_is_one(self):
        f, _, mixture = sample_mixture(SparseMixSpec(64, 4, 0, seed=7))
        assert trial_similarity(f, mixture) == pytest.approx(1.0, abs=1e-12)

    def test_negated_signal_is_minus_one(self):
        f, _, _ = sample_mixture(SparseMixSpec(64, 4, 0, seed=8))
        assert trial_similarity(f, -f) == pytest.approx(-1.0, abs=1e-12)

    def test_pinned_value_from_oracle_pipeline(self):
        # Frozen from the naive-DCT oracle pipeline: 9 of 256 signs flip,
        # and the orthonormal inverse preserves the sign-vector cosine,
        # giving (256 - 2*9) / 256 exactly.
        spec = SparseMixSpec(n=256, fg_support=8, bg_support=16, seed=424242)
        f, _, mixture = sample_mixture(spec)
        assert trial_similarity(f, mixture) == pytest.approx(0.9296875, abs=1e-9)

    def test_oracle_pipeline_agreement(self):
        spec = SparseMixSpec(n=96, fg_support=6, bg_support=12, seed=9)
        f, _, mixture = sample_mixture(spec)

        def oracle(v):
            return naive_idct1(signature_signs(naive_dct1(v)))

        rf, rm = oracle(f), oracle(mixture)
        ref = float(rf @ rm / (np.linalg.norm(rf) * np.linalg.norm(rm)))
        assert trial_similarity(f, mixture) == pytest.approx(ref, abs=1e-9)


class TestEstimateBound:
    def test_zero_background_mean_is_exactly_one(self):
        est = estimate_bound(SparseMixSpec(128, 10, 0, seed=10), trials=20)
        assert est.mean_similarity == pytest.approx(1.0, abs=1e-12)
        assert est.similarities.shape == (20,)

    def test_deterministic_per_seed(self):
        spec = SparseMixSpec(256, 8, 30, seed=11)
        a = estimate_bound(spec, trials=25)
        b = estimate_bound(spec, trials=25)
        assert (a.similarities == b.similarities).all()

    def test_values_bounded(self):
        est = estimate_bound(SparseMixSpec(128, 6, 21, seed=12), trials=50)
        assert (est.similarities >= -1.0).all() and (est.similarities <= 1.0).all()

    def test_sparser_background_is_no_worse(self):
        # paired trials via the shared trial-seed schedule
        base = 13
        sparse = estimate_bound(SparseMixSpec(1024, 20, 32, seed=base), trials=200)
        dense = estimate_bound(SparseMixSpec(1024, 20, 170, seed=base), trials=200)
        diff = sparse.similarities - dense.similarities
        margin = 3.0 * diff.std(ddof=1) / np.sqrt(diff.shape[0])
        assert diff.mean() >= -margin

    def test_trials_validated(self):
        with pytest.raises(InvalidSpec):
            estimate_bound(SparseMixSpec(16, 2, 2, seed=0), trials=0)
