import math

import numpy as np
import pytest

from trackmc import (
    Bin,
    Direction,
    PointTrack,
    SegmentTrack,
    binomial_lower_pvalue,
    binomial_lower_strict,
    binomial_pvalue,
    binomial_upper_pvalue,
    count_points_in_segments,
    segment_indicator_weights,
    statistic_moments_under_stationarity,
    to_binary_sequence,
    weighted_sum_statistic,
)


def brute_force_count(points, segments):
    return sum(
        1
        for p in points.positions
        for s, e in segments.segments
        if s <= p < e
    )


class TestCountPointsInSegments:
    def test_direct(self, bin10):
        points = PointTrack(bin10, [1, 5, 9])
        segments = SegmentTrack(bin10, [(0, 2), (8, 10)])
        assert count_points_in_segments(points, segments) == 2

    def test_no_segments(self, bin10):
        points = PointTrack(bin10, [1, 5])
        assert count_points_in_segments(points, SegmentTrack(bin10, [])) == 0

    def test_full_cover(self, bin10):
        points = PointTrack(bin10, [0, 4, 9])
        assert count_points_in_segments(points, SegmentTrack(bin10, [(0, 10)])) == 3

    def test_bin_mismatch(self):
        points = PointTrack(Bin("a", 0, 10), [1])
        segments = SegmentTrack(Bin("b", 0, 10), [(0, 5)])
        with pytest.raises(ValueError, match="bin mismatch"):
            count_points_in_segments(points, segments)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            length = int(rng.integers(4, 120))
            b = Bin("b", 0, length)
            n = int(rng.integers(0, min(length, 50)))
            points = PointTrack(b, np.sort(rng.choice(length, n, replace=False)))
            n_seg = int(rng.integers(0, min(10, (length + 1) // 2)))
            bounds = np.sort(
                rng.choice(length + 1, size=2 * n_seg, replace=False)
            ).reshape(-1, 2)
            segments = SegmentTrack(b, bounds[bounds[:, 1] > bounds[:, 0]])
            assert count_points_in_segments(points, segments) == brute_force_count(
                points, segments
            )


class TestWeightedSumStatistic:
    def test_all_zero_indicators(self, bin10):
        seq = to_binary_sequence(PointTrack(bin10, []))
        assert weighted_sum_statistic(seq, np.ones(10)) == 0.0

    def test_unit_weights_give_density(self, bin10):
        seq = to_binary_sequence(PointTrack(bin10, [0, 3, 7]))
        assert weighted_sum_statistic(seq, np.ones(10)) == pytest.approx(0.3)

    def test_segment_weights_match_count(self, bin10):
        points = PointTrack(bin10, [1, 5, 9])
        segments = SegmentTrack(bin10, [(0, 2), (8, 10)])
        stat = weighted_sum_statistic(
            to_binary_sequence(points), segment_indicator_weights(segments)
        )
        assert stat == pytest.approx(count_points_in_segments(points, segments) / 10)

    def test_length_mismatch(self, bin10):
        seq = to_binary_sequence(PointTrack(bin10, [1]))
        with pytest.raises(ValueError, match="length mismatch"):
            weighted_sum_statistic(seq, np.ones(9))


def binomial_tail_oracle(t, n, p):
    # Independent direct summation over the upper tail.
    return sum(math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(t, n + 1))


class TestBinomialPvalues:
    def test_all_successes(self):
        assert binomial_upper_pvalue(5, 5, 0.5) == pytest.approx(0.03125)

    def test_t_zero_is_whole_mass(self):
        assert binomial_upper_pvalue(0, 10, 0.3) == 1.0

    def test_against_direct_summation(self):
        # Frozen from the oracle below: P(T >= 6), T ~ Binomial(10, 0.3).
        expected = 0.0473489874
        assert binomial_tail_oracle(6, 10, 0.3) == pytest.approx(expected, abs=1e-10)
        assert binomial_upper_pvalue(6, 10, 0.3) == pytest.approx(expected, abs=1e-10)

    def test_oracle_sweep(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            n = int(rng.integers(1, 40))
            t = int(rng.integers(0, n + 1))
            p = float(rng.uniform(0.05, 0.95))
            assert binomial_upper_pvalue(t, n, p) == pytest.approx(
                binomial_tail_oracle(t, n, p), rel=1e-10, abs=1e-12
            )

    def test_tail_complementarity(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            n = int(rng.integers(1, 2000))
            t = int(rng.integers(0, n + 1))
            p = float(rng.uniform(0.0, 1.0))
            total = binomial_upper_pvalue(t, n, p) + binomial_lower_strict(t, n, p)
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_stable_extreme_tails_at_large_n(self):
        # Term-wise pmf values underflow here; a log-space oracle still
        # agrees, so the implementation is not summing raw terms.
        from scipy.special import logsumexp

        def log_tail_oracle(t, n, p):
            ks = range(t, n + 1)
            logs = [
                math.lgamma(n + 1)
                - math.lgamma(k + 1)
                - math.lgamma(n - k + 1)
                + k * math.log(p)
                + (n - k) * math.log1p(-p)
                for k in ks
            ]
            return float(np.exp(logsumexp(logs)))

        for t, n, p in [(9000, 10_000, 0.8), (5300, 10_000, 0.5), (120, 10_000, 0.005)]:
            assert binomial_upper_pvalue(t, n, p) == pytest.approx(
                log_tail_oracle(t, n, p), rel=1e-8
            )

    def test_two_sided_doubles_smaller_tail(self):
        upper = binomial_upper_pvalue(8, 10, 0.5)
        lower = binomial_lower_pvalue(8, 10, 0.5)
        assert binomial_pvalue(8, 10, 0.5, Direction.TWO_SIDED) == pytest.approx(
            min(1.0, 2.0 * min(upper, lower))
        )
        assert binomial_pvalue(5, 10, 0.5, Direction.TWO_SIDED) == 1.0

    @pytest.mark.parametrize("t,n,p", [(-1, 5, 0.5), (6, 5, 0.5), (2, 5, -0.1), (2, 5, 1.5)])
    def test_domain_errors(self, t, n, p):
        with pytest.raises(ValueError):
            binomial_upper_pvalue(t, n, p)


def moments_oracle(lam, sigma2, rho, y):
    # Full O(n^2) double sum.
    n = len(y)
    mean = lam * sum(y) / n
    var = 0.0
    for i in range(n):
        for j in range(n):
            d = abs(i - j)
            r = rho[d] if d < len(rho) else 0.0
            var += y[i] * y[j] * sigma2 * r
    return mean, var / n**2


class TestStatisticMoments:
    def test_iid_case(self):
        mean, var = statistic_moments_under_stationarity(0.2, 0.16, [1.0], np.ones(8))
        assert mean == pytest.approx(0.2)
        assert var == pytest.approx(0.16 / 8)

    def test_worked_example(self):
        # Frozen from moments_oracle: lam=0.5, sigma2=0.25, rho(1)=0.5, y=1^4.
        mean, var = statistic_moments_under_stationarity(
            0.5, 0.25, [1.0, 0.5], np.ones(4)
        )
        assert mean == pytest.approx(0.5)
        assert var == pytest.approx(0.109375, abs=1e-12)
        assert moments_oracle(0.5, 0.25, [1.0, 0.5], [1.0] * 4) == pytest.approx(
            (0.5, 0.109375)
        )

    def test_matches_brute_force(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            n = int(rng.integers(2, 40))
            y = rng.uniform(0, 3, size=n)
            lam = float(rng.uniform(0.01, 0.9))
            sigma2 = float(rng.uniform(0.01, 0.5))
            d_max = int(rng.integers(0, 6))
            rho = np.concatenate(([1.0], np.sort(rng.uniform(0, 1, size=d_max))[::-1]))
            mean, var = statistic_moments_under_stationarity(lam, sigma2, rho, y)
            omean, ovar = moments_oracle(lam, sigma2, rho.tolist(), y.tolist())
            assert mean == pytest.approx(omean, rel=1e-10)
            assert var == pytest.approx(ovar, rel=1e-10, abs=1e-14)

    def test_variance_monotone_in_rho(self):
        # Pointwise-dominating correlation cannot decrease the variance.
        rng = np.random.default_rng(43)
        for _ in range(100):
            n = int(rng.integers(2, 30))
            y = rng.uniform(0, 2, size=n)
            d_max = int(rng.integers(1, 8))
            hi = np.concatenate(([1.0], np.cumprod(rng.uniform(0.3, 1.0, size=d_max))))
            lo = hi * np.concatenate(([1.0], np.cumprod(rng.uniform(0.5, 1.0, size=d_max))))
            _, v_hi = statistic_moments_under_stationarity(0.3, 0.21, hi, y)
            _, v_lo = statistic_moments_under_stationarity(0.3, 0.21, lo, y)
            assert v_hi >= v_lo - 1e-15

    def test_rejects_bad_rho(self):
        y = np.ones(4)
        with pytest.raises(ValueError, match="rho"):
            statistic_moments_under_stationarity(0.5, 0.25, [0.9, 0.5], y)
        with pytest.raises(ValueError, match="non-increasing"):
            statistic_moments_under_stationarity(0.5, 0.25, [1.0, 0.2, 0.4], y)
        with pytest.raises(ValueError, match="non-negative"):
            statistic_moments_under_stationarity(0.5, 0.25, [1.0, -0.1], y)
