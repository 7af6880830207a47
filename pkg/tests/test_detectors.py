import itertools

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sefdm import (
    IllConditionedError,
    IterativeDetector,
    MLDetector,
    NoiseModel,
    SearchSpaceTooLargeError,
    SphereDetector,
    ZeroForcingDetector,
    add_awgn,
    carrier_matrix,
    correlate,
    default_config,
    initial_estimate,
    make_constellation,
    modulate,
    transmit,
)
from sefdm.errors import FactorizationFailedError

QAM4 = make_constellation("qam4")


def random_blocks(rng, n_blocks, cfg):
    bits = rng.integers(0, 2, (n_blocks, cfg.bits_per_block), dtype=np.uint8)
    return bits, cfg.constellation.map_bits(bits)


class TestInitialEstimate:
    def test_identity_at_alpha_one(self):
        rng = np.random.default_rng(30)
        cfg = default_config(8, 1.0)
        _, s = random_blocks(rng, 20, cfg)
        r = correlate(modulate(s, cfg), cfg)
        np.testing.assert_allclose(initial_estimate(r, cfg), s, atol=1e-10)

    def test_two_carrier_value(self):
        cfg = default_config(2, 0.5)
        r = np.array([1.0, (1.0 - 1.0j) / 2.0])
        np.testing.assert_allclose(initial_estimate(r, cfg), [1.0, 0.0], atol=1e-12)

    def test_matches_dense_solve(self):
        rng = np.random.default_rng(31)
        cfg = default_config(8, 0.9)
        mats = carrier_matrix(cfg)
        _, s = random_blocks(rng, 10, cfg)
        r = correlate(modulate(s, cfg), cfg)
        oracle = np.linalg.solve(mats.gram, r.r.T).T
        np.testing.assert_allclose(initial_estimate(r, cfg), oracle, atol=1e-8)

    def test_noiseless_recovery(self):
        rng = np.random.default_rng(32)
        for n, alpha in [(4, 0.8), (8, 0.85), (8, 0.75)]:
            cfg = default_config(n, alpha)
            _, s = random_blocks(rng, 10, cfg)
            r = correlate(modulate(s, cfg), cfg)
            np.testing.assert_allclose(initial_estimate(r, cfg), s, atol=1e-7)

    def test_ill_conditioned_raises_with_context(self):
        cfg = default_config(16, 0.2)
        with pytest.raises(IllConditionedError) as excinfo:
            initial_estimate(np.zeros(16, dtype=complex), cfg)
        assert "16" in str(excinfo.value)
        assert "0.2" in str(excinfo.value)

    def test_borderline_configuration_passes(self):
        cfg = default_config(16, 0.3)
        out = initial_estimate(np.zeros(16, dtype=complex), cfg)
        assert out.shape == (16,)

    def test_noise_enhancement_follows_inverse_gram(self):
        # The estimate's error covariance is sigma2 * M^{-1}; compressed
        # carriers pay for interference-free estimates with noise gain.
        rng = np.random.default_rng(33)
        cfg = default_config(4, 0.8)
        mats = carrier_matrix(cfg)
        sigma2 = 0.1
        trials = 30_000
        _, s = random_blocks(rng, trials, cfg)
        r = transmit(s, cfg, NoiseModel(10.0), rng)
        err = initial_estimate(r, cfg) - s
        var = np.mean(np.abs(err) ** 2, axis=0)
        expected = sigma2 * np.diag(np.linalg.inv(mats.gram)).real
        np.testing.assert_allclose(var, expected, rtol=0.05)
        assert np.all(expected > sigma2), "alpha < 1 must enhance the noise"


class TestZeroForcingDetector:
    def test_predicts_hard_mapped_estimate(self):
        rng = np.random.default_rng(34)
        cfg = default_config(8, 0.9)
        _, s = random_blocks(rng, 100, cfg)
        r = transmit(s, cfg, NoiseModel(12.0), rng)
        det = ZeroForcingDetector(alpha=0.9, n_carriers=8).fit()
        decided = det.predict(r)
        from sefdm import hard_map

        np.testing.assert_allclose(
            decided, hard_map(initial_estimate(r, cfg), QAM4), atol=1e-12
        )

    def test_requires_fit(self):
        det = ZeroForcingDetector(alpha=0.9, n_carriers=8)
        with pytest.raises(NotFittedError):
            det.predict(np.zeros((1, 8), dtype=complex))

    def test_infers_width_from_data(self):
        det = ZeroForcingDetector(alpha=1.0).fit(np.zeros((3, 4), dtype=complex))
        assert det.n_features_in_ == 4

    def test_width_conflict_rejected(self):
        det = ZeroForcingDetector(alpha=1.0, n_carriers=8)
        with pytest.raises(ValueError, match="carriers"):
            det.fit(np.zeros((3, 4), dtype=complex))

    def test_score_on_noiseless_blocks(self):
        rng = np.random.default_rng(35)
        cfg = default_config(4, 0.9)
        _, s = random_blocks(rng, 50, cfg)
        r = correlate(modulate(s, cfg), cfg)
        det = ZeroForcingDetector(alpha=0.9, n_carriers=4).fit()
        assert det.score(r, s) == 1.0


class TestIterativeDetector:
    def test_noiseless_recovery_grid(self):
        rng = np.random.default_rng(36)
        for n, alpha in itertools.product((4, 8), (0.85, 0.9, 1.0)):
            cfg = default_config(n, alpha)
            _, s = random_blocks(rng, 200, cfg)
            r = correlate(modulate(s, cfg), cfg)
            det = IterativeDetector(alpha=alpha, n_carriers=n).fit()
            decided = det.predict(r)
            assert np.allclose(decided, s, atol=1e-9), (n, alpha)

    def test_linear_mode_error_recursion(self):
        # With the mapper off, the update is plain Richardson iteration and
        # the error after k passes is exactly (I - lam M)^k times the
        # starting error, measured against the solution of M s = r.
        rng = np.random.default_rng(37)
        cfg = default_config(8, 0.85)
        mats = carrier_matrix(cfg)
        lam = 0.7
        k = 6
        r = rng.normal(size=8) + 1j * rng.normal(size=8)
        s_star = np.linalg.solve(mats.gram, r)
        det = IterativeDetector(
            alpha=0.85, n_carriers=8, relaxation=lam, n_iterations=k, mapping="none"
        ).fit()
        result = det.detect_block(r)
        contraction = np.linalg.matrix_power(np.eye(8) - lam * mats.gram, k)
        expected = s_star + contraction @ (r - s_star)
        np.testing.assert_allclose(result.raw, expected, atol=1e-9)

    def test_undecided_counts_recorded(self):
        rng = np.random.default_rng(38)
        cfg = default_config(8, 0.9)
        _, s = random_blocks(rng, 1, cfg)
        r = transmit(s, cfg, NoiseModel(10.0), rng)
        det = IterativeDetector(alpha=0.9, n_carriers=8, n_iterations=10).fit()
        result = det.detect_block(r.r[0])
        assert result.iterations_used == 10
        assert len(result.per_iteration_undecided) == 10
        assert result.per_iteration_undecided[-1] == 0, "d_end=0 decides everything"

    def test_detect_block_matches_predict(self):
        rng = np.random.default_rng(39)
        cfg = default_config(8, 0.85)
        _, s = random_blocks(rng, 5, cfg)
        r = transmit(s, cfg, NoiseModel(8.0), rng)
        det = IterativeDetector(alpha=0.85, n_carriers=8).fit()
        batch = det.predict(r)
        for b in range(5):
            np.testing.assert_array_equal(det.detect_block(r.r[b]).symbols, batch[b])

    def test_transform_paths_agree(self):
        rng = np.random.default_rng(40)
        cfg = default_config(8, 0.8)
        _, s = random_blocks(rng, 50, cfg)
        r = transmit(s, cfg, NoiseModel(9.0), rng)
        fast = IterativeDetector(alpha=0.8, n_carriers=8, transform_path="fast").fit()
        direct = IterativeDetector(alpha=0.8, n_carriers=8, transform_path="direct").fit()
        np.testing.assert_allclose(fast.predict(r), direct.predict(r), atol=1e-9)

    def test_zf_start_supported(self):
        rng = np.random.default_rng(41)
        cfg = default_config(8, 0.9)
        _, s = random_blocks(rng, 100, cfg)
        r = correlate(modulate(s, cfg), cfg)
        det = IterativeDetector(alpha=0.9, n_carriers=8, initial="zf").fit()
        np.testing.assert_allclose(det.predict(r), s, atol=1e-9)

    def test_zf_start_propagates_conditioning_error(self):
        with pytest.raises(IllConditionedError):
            IterativeDetector(alpha=0.2, n_carriers=16, initial="zf").fit()

    def test_freeze_flag_keeps_recovery(self):
        rng = np.random.default_rng(42)
        cfg = default_config(8, 0.9)
        _, s = random_blocks(rng, 100, cfg)
        r = correlate(modulate(s, cfg), cfg)
        det = IterativeDetector(alpha=0.9, n_carriers=8, freeze_decided=True).fit()
        np.testing.assert_allclose(det.predict(r), s, atol=1e-9)

    def test_mapping_mode_validated(self):
        with pytest.raises(ValueError, match="mapping"):
            IterativeDetector(alpha=0.9, n_carriers=8, mapping="fuzzy").fit()

    def test_decisions_are_constellation_points(self):
        rng = np.random.default_rng(43)
        cfg = default_config(8, 0.85)
        _, s = random_blocks(rng, 20, cfg)
        r = transmit(s, cfg, NoiseModel(0.0), rng)
        for mapping in ("soft", "hard", "none"):
            det = IterativeDetector(alpha=0.85, n_carriers=8, mapping=mapping).fit()
            decided = det.predict(r)
            d2 = np.abs(decided[..., None] - QAM4.points) ** 2
            assert np.min(d2, axis=-1).max() < 1e-18, mapping

    def test_sklearn_protocol(self):
        det = IterativeDetector(alpha=0.8, n_carriers=8, n_iterations=5)
        params = det.get_params()
        assert params["alpha"] == 0.8
        assert params["n_iterations"] == 5
        twin = clone(det)
        assert twin.get_params() == params
        det.set_params(relaxation=0.5)
        assert det.get_params()["relaxation"] == 0.5


def brute_force_ml(r, gram, points, n):
    best_metric = None
    best = None
    for cand in itertools.product(range(len(points)), repeat=n):
        s = points[list(cand)]
        metric = np.linalg.norm(r - gram @ s) ** 2
        if best_metric is None or metric < best_metric - 0.0:
            if best_metric is None or metric < best_metric:
                best_metric = metric
                best = s
    return best


class TestMLDetector:
    def test_matches_brute_force_small_system(self):
        rng = np.random.default_rng(44)
        cfg = default_config(2, 0.5)
        mats = carrier_matrix(cfg)
        det = MLDetector(alpha=0.5, n_carriers=2).fit()
        _, s = random_blocks(rng, 200, cfg)
        r = transmit(s, cfg, NoiseModel(6.0), rng)
        decided = det.predict(r)
        for b in range(200):
            oracle = brute_force_ml(r.r[b], mats.gram, QAM4.points, 2)
            np.testing.assert_allclose(decided[b], oracle, atol=1e-12)

    def test_noiseless_recovery(self):
        rng = np.random.default_rng(45)
        cfg = default_config(4, 0.75)
        _, s = random_blocks(rng, 100, cfg)
        r = correlate(modulate(s, cfg), cfg)
        det = MLDetector(alpha=0.75, n_carriers=4).fit()
        np.testing.assert_allclose(det.predict(r), s, atol=1e-12)

    def test_search_space_cap(self):
        with pytest.raises(SearchSpaceTooLargeError):
            MLDetector(alpha=0.9, n_carriers=16).fit()
        with pytest.raises(SearchSpaceTooLargeError):
            MLDetector(alpha=0.9, n_carriers=4, max_candidates=100).fit()

    def test_all_way_tie_takes_first_candidate(self):
        # At alpha = 1 with r = 0 every candidate has the same metric, so
        # the lexicographically first candidate (all index 0) must win.
        det = MLDetector(alpha=1.0, n_carriers=3).fit()
        decided = det.predict(np.zeros(3, dtype=complex))
        np.testing.assert_allclose(decided, np.full(3, QAM4.points[0]), atol=1e-15)


class TestSphereDetector:
    def test_matches_ml_with_and_without_regularisation(self):
        rng = np.random.default_rng(46)
        for alpha in (0.8, 0.9, 1.0):
            cfg = default_config(4, alpha)
            sigma2 = 10 ** (-0.8)
            _, s = random_blocks(rng, 300, cfg)
            r = transmit(s, cfg, NoiseModel(8.0), rng)
            ml = MLDetector(alpha=alpha, n_carriers=4).fit()
            reference = ml.predict(r)
            for eps in (0.0, sigma2):
                sd = SphereDetector(alpha=alpha, n_carriers=4, epsilon=eps).fit()
                mismatches = int(np.sum(np.any(sd.predict(r) != reference, axis=1)))
                assert mismatches == 0, (alpha, eps, mismatches)

    def test_noiseless_recovery(self):
        rng = np.random.default_rng(47)
        cfg = default_config(8, 0.8)
        _, s = random_blocks(rng, 100, cfg)
        r = correlate(modulate(s, cfg), cfg)
        sd = SphereDetector(alpha=0.8, n_carriers=8).fit()
        np.testing.assert_allclose(sd.predict(r), s, atol=1e-12)

    def test_visited_nodes_shrink_with_snr(self):
        rng = np.random.default_rng(48)
        cfg = default_config(8, 0.85)
        sd = SphereDetector(alpha=0.85, n_carriers=8, epsilon=0.0).fit()
        medians = {}
        for snr in (0.0, 20.0):
            _, s = random_blocks(rng, 200, cfg)
            r = transmit(s, cfg, NoiseModel(snr), rng)
            _, info = sd.detect_batch(r)
            medians[snr] = np.median(info["visited_nodes"])
        assert medians[20.0] <= medians[0.0], medians

    def test_factorization_failure_without_regularisation(self):
        with pytest.raises(FactorizationFailedError, match="alpha=0.2"):
            SphereDetector(alpha=0.2, n_carriers=16, epsilon=0.0).fit()
        # Diagonal loading rescues the same configuration.
        SphereDetector(alpha=0.2, n_carriers=16, epsilon=0.1).fit()

    def test_epsilon_validated(self):
        with pytest.raises(ValueError, match="epsilon"):
            SphereDetector(alpha=0.9, n_carriers=4, epsilon=-0.5).fit()

    def test_returns_valid_points_at_terrible_snr(self):
        rng = np.random.default_rng(49)
        cfg = default_config(8, 0.85)
        _, s = random_blocks(rng, 50, cfg)
        r = transmit(s, cfg, NoiseModel(-10.0), rng)
        sd = SphereDetector(alpha=0.85, n_carriers=8, epsilon=10.0).fit()
        decided = sd.predict(r)
        d2 = np.abs(decided[..., None] - QAM4.points) ** 2
        assert np.min(d2, axis=-1).max() < 1e-18

    def test_bpsk_supported(self):
        rng = np.random.default_rng(50)
        cfg = default_config(8, 0.8, "bpsk")
        bits = rng.integers(0, 2, (100, 8), dtype=np.uint8)
        s = cfg.constellation.map_bits(bits)
        r = correlate(modulate(s, cfg), cfg)
        sd = SphereDetector(alpha=0.8, constellation="bpsk", n_carriers=8).fit()
        np.testing.assert_allclose(sd.predict(r), s, atol=1e-12)

    def test_diagnostics_exposed(self):
        rng = np.random.default_rng(51)
        cfg = default_config(4, 0.9)
        _, s = random_blocks(rng, 1, cfg)
        r = transmit(s, cfg, NoiseModel(10.0), rng)
        sd = SphereDetector(alpha=0.9, n_carriers=4).fit()
        result = sd.detect_block(r.r[0])
        assert result.diagnostics["visited_nodes"][0] >= 1
        assert 0.0 <= result.diagnostics["gamma_estimate"] <= 1.0
        assert result.op_counts is not None
