import numpy as np
import pytest

from oracles import naive_dct1, naive_dct2, naive_idct1, naive_idct2
from sigsal.errors import InvalidBasis, InvalidShape, InvalidValue
from sigsal.rng import Xoshiro256
from sigsal.spectral import (
    SpectralTensor,
    dct1,
    dct2,
    idct1,
    idct2,
    reconstruct,
    signature,
)


class TestDct1:
    def test_all_ones_is_dc_only(self):
        coefs = dct1(np.ones(4)).coefficients
        assert coefs[0] == pytest.approx(2.0, abs=1e-12)
        np.testing.assert_allclose(coefs[1:], 0.0, atol=1e-12)

    def test_unit_impulse_length_two(self):
        coefs = dct1(np.array([1.0, 0.0])).coefficients
        np.testing.assert_allclose(coefs, [0.70710678, 0.70710678], atol=1e-8)

    def test_against_naive_oracle(self):
        x = np.random.default_rng(0).normal(size=16)
        np.testing.assert_allclose(dct1(x).coefficients, naive_dct1(x), atol=1e-10)

    def test_empty_rejected(self):
        with pytest.raises(InvalidShape):
            dct1(np.zeros(0))


class TestIdct1:
    def test_inverse_pair(self):
        x = np.random.default_rng(1).normal(size=64)
        assert np.abs(idct1(dct1(x)) - x).max() < 1e-10

    def test_dc_coefficient_gives_constant(self):
        out = idct1(np.array([3.0, 0.0, 0.0, 0.0]))
        np.testing.assert_allclose(out, np.full(4, 1.5), atol=1e-12)

    def test_against_naive_oracle(self):
        coefs = np.random.default_rng(2).normal(size=16)
        np.testing.assert_allclose(idct1(coefs), naive_idct1(coefs), atol=1e-10)

    def test_basis_mismatch(self):
        with pytest.raises(InvalidBasis):
            idct1(SpectralTensor(np.zeros(4), basis="spatial"))
        with pytest.raises(InvalidBasis):
            idct1(SpectralTensor(np.zeros((4, 4))))


class TestDct2:
    def test_all_ones_dc(self):
        coefs = dct2(np.ones((4, 4))).coefficients
        assert coefs[0, 0] == pytest.approx(4.0, abs=1e-12)
        coefs = coefs.copy()
        coefs[0, 0] = 0.0
        assert np.abs(coefs).max() < 1e-12

    def test_parseval(self):
        x = np.random.default_rng(3).normal(size=(32, 32))
        assert abs(
            np.linalg.norm(x) - np.linalg.norm(dct2(x).coefficients)
        ) < 1e-10

    def test_against_quadruple_sum_oracle(self):
        x = np.random.default_rng(4).normal(size=(8, 8))
        np.testing.assert_allclose(dct2(x).coefficients, naive_dct2(x), atol=1e-9)
        np.testing.assert_allclose(idct2(naive_dct2(x)), naive_idct2(naive_dct2(x)), atol=1e-9)

    def test_rectangular_round_trip(self):
        x = np.random.default_rng(5).normal(size=(5, 11))
        assert np.abs(idct2(dct2(x)) - x).max() < 1e-10

    def test_linearity(self):
        rng = np.random.default_rng(6)
        x, y = rng.normal(size=(2, 12, 7))
        lhs = dct2(2.5 * x - 1.25 * y).coefficients
        rhs = 2.5 * dct2(x).coefficients - 1.25 * dct2(y).coefficients
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_large_round_trip(self):
        x = np.random.default_rng(7).normal(size=(512, 512))
        assert np.abs(idct2(dct2(x)) - x).max() < 1e-10


class TestSignature:
    def test_all_ones_grid(self):
        signs = signature(np.ones((4, 4))).signs
        assert signs[0, 0] == 1.0
        assert np.count_nonzero(signs) == 1

    def test_positive_scale_invariance_exact(self):
        x = np.random.default_rng(8).normal(size=(9, 9))
        assert (signature(3.7 * x).signs == signature(x).signs).all()

    def test_oddness(self):
        x = np.random.default_rng(9).normal(size=(6, 14))
        assert (signature(-x).signs == -signature(x).signs).all()

    def test_entries_are_signs(self):
        signs = signature(np.random.default_rng(10).normal(size=33)).signs
        assert np.isin(signs, (-1.0, 0.0, 1.0)).all()


class TestReconstruct:
    def test_zero_signature(self):
        assert (reconstruct(np.zeros((5, 5))) == 0).all()

    def test_dc_only_1d(self):
        signs = np.zeros(4)
        signs[0] = 1.0
        np.testing.assert_allclose(reconstruct(signs), np.full(4, 0.5), atol=1e-12)

    def test_rejects_non_sign_entries(self):
        with pytest.raises(InvalidValue):
            reconstruct(np.array([0.5, 1.0]))

    def test_sparse_spike_train_support_recovery(self):
        # 100 random sparse spike trains, n=256: the largest reconstructed
        # magnitudes should concentrate on the true support.
        n, support = 256, 8
        hits = 0
        for trial in range(100):
            stream = Xoshiro256(1000 + trial)
            f = np.zeros(n)
            idx = stream.sample_without_replacement(n, support)
            f[idx] = np.where(stream.uniform(support) < 0.5, -1.0, 1.0)
            recon = reconstruct(signature(f))
            top = np.argsort(np.abs(recon))[-support:]
            hits += len(set(top.tolist()) & set(idx.tolist()))
        assert hits / (100 * support) > 0.95


class TestOrthonormality:
    def test_parseval_1d_many(self):
        rng = np.random.default_rng(11)
        for n in (1, 2, 3, 16, 101):
            x = rng.normal(size=n)
            assert abs(np.linalg.norm(x) - np.linalg.norm(dct1(x).coefficients)) < 1e-10

    def test_basis_rows_orthonormal(self):
        from sigsal.spectral import _basis

        mat = _basis(24)
        np.testing.assert_allclose(mat @ mat.T, np.eye(24), atol=1e-12)
