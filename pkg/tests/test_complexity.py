import numpy as np
import pytest

from sefdm import (
    ComplexityReport,
    CountingDisabledError,
    IterativeDetector,
    OpCount,
    OpCounter,
    ZeroForcingDetector,
    measure_ops,
    predicted_ops,
    sd_gamma_estimate,
)


class TestPredictedOps:
    def test_iterative_reference_values(self):
        assert predicted_ops("iterative", 8, 0.5, 4).as_tuple() == (448.0, 144.0)
        assert predicted_ops("iterative", 8, 1.0, 4).as_tuple() == (208.0, 64.0)
        assert predicted_ops("iterative", 8, 0.5, 4, iterations=10).as_tuple() == (
            4480.0,
            1440.0,
        )

    def test_ml_reference_values(self):
        assert predicted_ops("ml", 4, 0.5, 4).as_tuple() == (40960.0, 14336.0)

    def test_sd_interpolates_ml(self):
        # gamma = 1 reproduces the exhaustive count; smaller gamma shrinks it.
        full = predicted_ops("ml", 4, 0.5, 4)
        assert predicted_ops("sd", 4, 0.5, 4, gamma=1.0).as_tuple() == full.as_tuple()
        half = predicted_ops("sd", 4, 0.5, 4, gamma=0.5)
        assert half.real_additions < full.real_additions

    def test_sd_requires_gamma(self):
        with pytest.raises(ValueError, match="gamma"):
            predicted_ops("sd", 4, 0.5, 4)

    def test_zf_has_no_closed_form(self):
        with pytest.raises(ValueError, match="zf"):
            predicted_ops("zf", 4, 0.5, 4)

    def test_argument_validation(self):
        with pytest.raises(ValueError, match="method"):
            predicted_ops("genie", 4, 0.5, 4)
        with pytest.raises(ValueError, match="iterations"):
            predicted_ops("iterative", 4, 0.5, 4, iterations=0)
        with pytest.raises(ValueError):
            predicted_ops("ml", 4, 1.5, 4)

    def test_ml_to_iterative_ratio_grows_like_search_space(self):
        ratios = []
        for n in (2, 4, 8):
            ml = predicted_ops("ml", n, 0.5, 4)
            it = predicted_ops("iterative", n, 0.5, 4)
            ratios.append(ml.real_additions / it.real_additions)
        assert ratios[0] < ratios[1] < ratios[2]
        # Growth tracks L^N / N within a small constant factor.
        for ratio, n in zip(ratios, (2, 4, 8)):
            scale = ratio / (4.0**n / n)
            assert 0.5 < scale < 8.0, (n, ratio, scale)


class TestMeasuredOps:
    def test_fast_path_measures_exactly_the_prediction(self):
        for n, alpha, iters in [(4, 0.5, 1), (8, 0.5, 3), (8, 1.0, 10), (16, 0.5, 2), (8, 0.25, 1)]:
            det = IterativeDetector(alpha=alpha, n_carriers=n, n_iterations=iters).fit()
            result = det.detect_block(np.zeros(n, dtype=complex))
            predicted = predicted_ops("iterative", n, alpha, 4, iterations=iters)
            assert result.op_counts.as_tuple() == predicted.as_tuple(), (n, alpha, iters)

    def test_direct_path_reference_values(self):
        # Dense application of the Gram matrix: N^2 complex products plus
        # N(N-1) complex sums, then the combination and the mapping pass.
        det = IterativeDetector(alpha=0.85, n_carriers=8, n_iterations=1).fit()
        result = det.detect_block(np.zeros(8, dtype=complex))
        assert result.op_counts.as_tuple() == (304.0, 272.0)

    def test_counts_constant_across_trials(self):
        rng = np.random.default_rng(60)
        det = IterativeDetector(alpha=0.8, n_carriers=8, n_iterations=5).fit()
        seen = set()
        for _ in range(5):
            r = rng.normal(size=8) + 1j * rng.normal(size=8)
            seen.add(det.detect_block(r).op_counts.as_tuple())
        assert len(seen) == 1, f"iterative counts must be trial-invariant, got {seen}"

    def test_measure_ops_roundtrip(self):
        det = ZeroForcingDetector(alpha=0.9, n_carriers=4).fit()
        result = det.detect_block(np.zeros(4, dtype=complex))
        counts = measure_ops(result)
        assert counts.real_additions > 0

    def test_measure_ops_requires_counting(self):
        det = IterativeDetector(alpha=0.9, n_carriers=4, count_ops=False).fit()
        result = det.detect_block(np.zeros(4, dtype=complex))
        assert result.op_counts is None
        with pytest.raises(CountingDisabledError):
            measure_ops(result)

    def test_disabled_counter_refuses_totals(self):
        counter = OpCounter(enabled=False)
        counter.complex_mul(10)
        with pytest.raises(CountingDisabledError):
            counter.total()


class TestOpCount:
    def test_arithmetic(self):
        a = OpCount(3.0, 4.0)
        b = OpCount(1.0, 2.0)
        assert (a + b).as_tuple() == (4.0, 6.0)
        assert a.scaled(2).as_tuple() == (6.0, 8.0)

    def test_counter_rates(self):
        c = OpCounter()
        c.complex_mul(1)
        assert c.total().as_tuple() == (2.0, 4.0)
        c = OpCounter()
        c.complex_add(1)
        assert c.total().as_tuple() == (2.0, 0.0)
        c = OpCounter()
        c.transform(8)
        assert c.total().as_tuple() == (72.0, 24.0)
        c = OpCounter()
        c.mapping(5, 4)
        assert c.total().as_tuple() == (20.0, 0.0)


class TestGammaEstimate:
    def test_limits(self):
        assert sd_gamma_estimate(4.0**8, 8, 4) == pytest.approx(1.0)
        assert sd_gamma_estimate(1.0, 8, 4) == 0.0
        assert sd_gamma_estimate(0.0, 8, 4) == 0.0

    def test_monotone_in_visits(self):
        lo = sd_gamma_estimate(10, 8, 4)
        hi = sd_gamma_estimate(1000, 8, 4)
        assert lo < hi < 1.0


class TestComplexityReport:
    def test_ratios(self):
        report = ComplexityReport(
            method="iterative",
            n_carriers=8,
            alpha=0.5,
            predicted=OpCount(448.0, 144.0),
            measured=OpCount(448.0, 144.0),
        )
        assert report.ra_ratio == 1.0
        assert report.rm_ratio == 1.0
