import numpy as np
import pytest

from sefdm import (
    SefdmConfig,
    carrier_matrix,
    default_config,
    fast_transform_length,
    gram_entry,
    make_constellation,
)


class TestConfig:
    def test_valid(self):
        cfg = default_config(8, 0.8)
        assert cfg.n_carriers == 8
        assert cfg.bits_per_block == 16
        assert cfg.subcarrier_spacing == 0.8

    def test_alpha_bounds(self):
        for bad in (0.0, -0.1, 1.2):
            with pytest.raises(ValueError, match="alpha"):
                default_config(8, bad)

    def test_n_carriers_bounds(self):
        with pytest.raises(ValueError, match="n_carriers"):
            default_config(1, 0.9)

    def test_symbol_period_fixed(self):
        with pytest.raises(ValueError, match="symbol_period"):
            SefdmConfig(4, 0.9, make_constellation("qam4"), symbol_period=2.0)

    def test_frozen(self):
        cfg = default_config(4, 0.9)
        with pytest.raises(AttributeError):
            cfg.alpha = 0.5


class TestCarrierMatrix:
    def test_entries_match_definition(self):
        cfg = default_config(5, 0.77)
        f = carrier_matrix(cfg).f_matrix
        n = 5
        for k in range(n):
            for m in range(n):
                expected = np.exp(2j * np.pi * 0.77 * m * k / n) / np.sqrt(n)
                assert abs(f[k, m] - expected) < 1e-14

    def test_orthogonal_at_alpha_one(self):
        for n in (2, 4, 8, 16):
            gram = carrier_matrix(default_config(n, 1.0)).gram
            np.testing.assert_allclose(gram, np.eye(n), atol=1e-12)

    def test_gram_closed_form(self):
        # Off-diagonal entries follow the finite geometric series sum.
        for n, alpha in [(4, 0.8), (8, 0.85), (8, 0.5), (16, 0.9), (3, 0.61)]:
            gram = carrier_matrix(default_config(n, alpha)).gram
            for i in range(n):
                for m in range(n):
                    expected = gram_entry(n, alpha, i, m)
                    assert abs(gram[i, m] - expected) < 1e-12, (n, alpha, i, m)

    def test_gram_hermitian_toeplitz_unit_diagonal(self):
        gram = carrier_matrix(default_config(8, 0.8)).gram
        np.testing.assert_allclose(gram, gram.conj().T, atol=1e-14)
        np.testing.assert_allclose(np.diag(gram), np.ones(8), atol=1e-14)
        for d in range(-7, 8):
            diag = np.diagonal(gram, offset=d)
            assert np.max(np.abs(diag - diag[0])) < 1e-13

    def test_gram_norm_identity(self):
        # ||F s||^2 == s^H M s for random symbol vectors.
        rng = np.random.default_rng(11)
        cfg = default_config(8, 0.8)
        mats = carrier_matrix(cfg)
        for _ in range(50):
            s = rng.normal(size=8) + 1j * rng.normal(size=8)
            lhs = np.linalg.norm(mats.f_matrix @ s) ** 2
            rhs = (s.conj() @ mats.gram @ s).real
            assert abs(lhs - rhs) <= 1e-10 * max(lhs, 1.0)

    def test_condition_estimate(self):
        mats = carrier_matrix(default_config(2, 0.5))
        # Eigenvalues 1 +- sqrt(1/2) give condition 3 + 2 sqrt(2).
        assert abs(mats.condition_estimate - (3 + 2 * np.sqrt(2))) < 1e-9
        assert carrier_matrix(default_config(8, 1.0)).condition_estimate == pytest.approx(1.0)

    def test_condition_monotone_in_alpha(self):
        for n in (4, 8, 16):
            conds = [
                carrier_matrix(default_config(n, a)).condition_estimate
                for a in (1.0, 0.95, 0.9, 0.85, 0.8)
            ]
            assert all(b >= a - 1e-9 for a, b in zip(conds, conds[1:])), (n, conds)

    def test_matrices_cached_and_immutable(self):
        a = carrier_matrix(default_config(8, 0.8))
        b = carrier_matrix(default_config(8, 0.8))
        assert a.f_matrix is b.f_matrix
        with pytest.raises(ValueError):
            a.gram[0, 0] = 0.0


class TestFastTransformLength:
    def test_integer_cases(self):
        assert fast_transform_length(8, 1.0) == 8
        assert fast_transform_length(8, 0.5) == 16
        assert fast_transform_length(8, 0.8) == 10
        assert fast_transform_length(4, 0.25) == 16

    def test_non_integer_cases(self):
        assert fast_transform_length(8, 0.85) is None
        assert fast_transform_length(4, 0.9) is None
