import math

import numpy as np
import pytest
from scipy import stats

from ksdrift.distributions import STANDARD_NORMAL, UNIFORM01, ContinuousDist, SeededRng, derive_seed, dist_sample
from ksdrift.ecdf import build_ecdf, build_partition, merge_partitions
from ksdrift.errors import EmptySampleError, InvalidInputError
from ksdrift.kolmogorov import kolmogorov_quantile
from ksdrift.kstests import (
    ks_confidence_band,
    ks_one_sample,
    ks_one_sample_uniform,
    ks_transform_batch,
    ks_transform_test,
    ks_two_sample,
)


def brute_one_sample(sample, f0):
    xs = sorted(sample)
    n = len(xs)
    f = f0.cdf(np.array(xs)).tolist()
    return max(max(i / n - f[i - 1], f[i - 1] - (i - 1) / n) for i in range(1, n + 1))


def brute_two_sample(x, y):
    pooled = sorted(set(x) | set(y))
    return max(abs(sum(v <= p for v in x) / len(x) - sum(v <= p for v in y) / len(y)) for p in pooled)


class TestOneSample:
    def test_two_point_uniform(self):
        res = ks_one_sample(np.array([0.25, 0.75]), UNIFORM01)
        assert res.d_stat == 0.25
        assert res.t_stat == pytest.approx(math.sqrt(2) * 0.25)
        assert res.n_effective == 2
        assert not res.reject

    def test_midpoint_quantiles(self):
        n = 10
        sample = STANDARD_NORMAL.ppf((np.arange(1, n + 1) - 0.5) / n)
        assert ks_one_sample(sample, STANDARD_NORMAL).d_stat == pytest.approx(0.05, abs=1e-12)

    def test_uniform_examples(self):
        assert ks_one_sample_uniform([0.999] * 10).d_stat == pytest.approx(0.999)
        assert ks_one_sample_uniform([0.5]).d_stat == 0.5
        assert ks_one_sample_uniform(np.arange(1, 11) / 10).d_stat == pytest.approx(0.1)

    def test_uniform_rejects_values_outside_unit_interval(self):
        with pytest.raises(InvalidInputError):
            ks_one_sample_uniform([0.2, 1.5])
        with pytest.raises(InvalidInputError):
            ks_one_sample_uniform([-0.1, 0.5])

    def test_matches_brute_force_exactly(self, rng):
        families = [UNIFORM01, STANDARD_NORMAL, ContinuousDist.exponential(1.5)]
        for k in range(500):
            f0 = families[k % 3]
            n = int(rng.integers(1, 13))
            sample = rng.normal(size=n) if f0 is STANDARD_NORMAL else rng.uniform(0, 2, size=n)
            assert ks_one_sample(sample, f0).d_stat == brute_one_sample(sample.tolist(), f0)

    def test_agrees_with_scipy(self, rng):
        sample = rng.normal(0.1, 1.0, size=300)
        expected = stats.kstest(sample, "norm").statistic
        assert ks_one_sample(sample, STANDARD_NORMAL).d_stat == pytest.approx(expected, abs=1e-12)

    def test_far_sample_rejects(self):
        res = ks_one_sample([0.999] * 10, UNIFORM01, alpha=0.05)
        assert res.reject and res.p_value < 0.05
        assert res.critical_value == pytest.approx(1.3581, abs=1e-4)

    def test_probability_integral_transform_is_calibrated(self):
        rejections = 0
        for rep in range(1000):
            draws = dist_sample(STANDARD_NORMAL, 1000, SeededRng(17, rep))
            rejections += ks_one_sample_uniform(STANDARD_NORMAL.cdf(draws), alpha=0.05).reject
        # binomial stderr at 1000 replications is ~0.007
        assert abs(rejections / 1000 - 0.05) < 4 * 0.0069

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5, float("nan")])
    def test_alpha_domain(self, alpha):
        with pytest.raises(InvalidInputError):
            ks_one_sample([0.5], UNIFORM01, alpha=alpha)

    def test_empty(self):
        with pytest.raises(EmptySampleError):
            ks_one_sample([], UNIFORM01)


class TestTwoSample:
    def test_examples(self):
        res = ks_two_sample([1, 2], [1.5, 2.5, 3.5])
        assert res.d_stat == pytest.approx(2 / 3)
        assert res.n_effective == pytest.approx(6 / 5)
        same = ks_two_sample([3, 1, 2], [1, 2, 3])
        assert same.d_stat == 0.0 and not same.reject
        assert ks_two_sample([1, 2], [5, 6, 7]).d_stat == 1.0

    def test_matches_brute_force_exactly(self, rng):
        for _ in range(500):
            x = rng.integers(0, 8, size=int(rng.integers(1, 11))).astype(float).tolist()
            y = rng.integers(0, 8, size=int(rng.integers(1, 11))).astype(float).tolist()
            assert ks_two_sample(x, y).d_stat == brute_two_sample(x, y)

    def test_agrees_with_scipy(self, rng):
        x, y = rng.normal(size=400), rng.normal(0.2, 1.0, size=250)
        assert ks_two_sample(x, y).d_stat == pytest.approx(stats.ks_2samp(x, y).statistic, abs=1e-12)

    def test_statistic_invariant_under_monotone_map(self, rng):
        for _ in range(50):
            x = rng.normal(size=int(rng.integers(5, 300)))
            y = rng.normal(0.3, 1.2, size=int(rng.integers(5, 300)))
            assert ks_two_sample(np.exp(x), np.exp(y)).d_stat == ks_two_sample(x, y).d_stat

    def test_accepts_ecdfs(self, rng):
        x, y = rng.normal(size=50), rng.normal(size=70)
        assert ks_two_sample(build_ecdf(x), build_ecdf(y)) == ks_two_sample(x, y)

    def test_empty(self):
        with pytest.raises(EmptySampleError):
            ks_two_sample([1.0], [])


class TestTransform:
    def test_effective_size(self, rng):
        ref = build_ecdf(rng.normal(size=100))
        res, report = ks_transform_test(ref, rng.normal(size=100))
        assert res.method == "transform"
        assert res.n_effective == 100
        assert report.ratio_warning
        pooled, _ = ks_transform_test(ref, rng.normal(size=100), effective_size="pooled")
        assert pooled.n_effective == pytest.approx(50.0)
        with pytest.raises(InvalidInputError):
            ks_transform_test(ref, [0.0], effective_size="reference")

    def test_statistic_is_uniformity_of_transformed(self, rng):
        ref = build_ecdf(rng.normal(size=1000))
        res, report = ks_transform_test(ref, rng.normal(size=100), dither=True, seed=3)
        assert res.d_stat == ks_one_sample_uniform(report.transformed).d_stat
        assert report.seed_used == 3

    def test_deterministic_given_seed(self, rng):
        ref = build_ecdf(rng.normal(size=1000))
        ys = rng.normal(size=150)
        assert ks_transform_test(ref, ys, dither=True, seed=8)[0] == ks_transform_test(ref, ys, dither=True, seed=8)[0]

    def test_far_alternative_is_detected(self):
        rejections = 0
        for rep in range(200):
            gen = SeededRng(21, rep).generator()
            ref = build_ecdf(dist_sample(STANDARD_NORMAL, 10_000, gen))
            res, _ = ks_transform_test(ref, dist_sample(STANDARD_NORMAL.shifted(2.0), 200, gen))
            rejections += res.reject
        assert rejections / 200 > 0.99

    @pytest.mark.slow
    def test_dithered_transform_is_uniform_under_null(self):
        # reference and comparison share one continuous law
        failures = 0
        reps = 2000
        for rep in range(reps):
            gen = SeededRng(31, rep).generator()
            ref = build_ecdf(dist_sample(STANDARD_NORMAL, 10_000, gen))
            ys = dist_sample(STANDARD_NORMAL, 500, gen)
            report_seed = int(gen.integers(0, 2**63))
            res, _ = ks_transform_test(ref, ys, alpha=0.01, dither=True, seed=report_seed)
            failures += res.reject
        assert failures / reps <= 0.02


def test_batch_matches_single_runs(rng):
    ref = build_ecdf(rng.normal(size=2000))
    windows = [rng.normal(size=100), rng.normal(1.0, 1.0, size=120), rng.normal(size=80)]
    results, master = ks_transform_batch(ref, windows, dither=True, seed=42, max_workers=3)
    assert master == 42
    for w, (res, report) in enumerate(results):
        single, single_report = ks_transform_test(ref, windows[w], dither=True, seed=derive_seed(42, w))
        assert res == single
        np.testing.assert_array_equal(report.transformed, single_report.transformed)
    assert results[1][0].reject
    serial, _ = ks_transform_batch(ref, windows, dither=True, seed=42, max_workers=1)
    assert [r for r, _ in serial] == [r for r, _ in results]


def test_batch_needs_windows(rng):
    with pytest.raises(InvalidInputError):
        ks_transform_batch(build_ecdf(rng.normal(size=10)), [])


def test_batch_without_dither_has_no_seed(rng):
    results, master = ks_transform_batch(build_ecdf(rng.normal(size=300)), [rng.normal(size=20)])
    assert master is None and results[0][1].seed_used is None


class TestConfidenceBand:
    def test_half_width(self):
        band = ks_confidence_band(build_ecdf(np.arange(100.0)), 0.95)
        assert band.half_width == pytest.approx(0.13581, abs=1e-4)
        assert band.half_width == kolmogorov_quantile(0.95) / 10
        wider = ks_confidence_band(build_ecdf(np.arange(400.0)), 0.95)
        assert wider.half_width == pytest.approx(band.half_width / 2, rel=1e-12)

    def test_bounds_are_clipped(self):
        band = ks_confidence_band(build_ecdf(np.arange(10.0)), 0.9)
        lower, upper = band.bounds([-1.0, 4.0, 20.0])
        assert lower[0] == 0.0 and upper[2] == 1.0
        assert upper[1] - lower[1] == pytest.approx(2 * band.half_width)

    @pytest.mark.parametrize("level", [0.0, 1.0, 2.0])
    def test_level_domain(self, level):
        with pytest.raises(InvalidInputError):
            ks_confidence_band(build_ecdf([1.0]), level)

    def test_coverage(self):
        grid = np.linspace(-3, 3, 100)
        covered = 0
        sims = 400
        for rep in range(sims):
            ecdf = build_ecdf(dist_sample(STANDARD_NORMAL, 1000, SeededRng(41, rep)))
            covered += ks_confidence_band(ecdf, 0.95).covers(STANDARD_NORMAL.cdf, grid)
        assert covered >= 0.93 * sims


def test_partition_invariance_of_statistics(rng):
    data = rng.normal(size=100_000)
    comparison = rng.normal(0.05, 1.0, size=2000)
    whole = build_ecdf(data)
    one = ks_one_sample(whole, STANDARD_NORMAL)
    two = ks_two_sample(whole, comparison)
    trans = ks_transform_test(whole, comparison, dither=True, seed=9)[0]
    for _ in range(20):
        k = int(rng.integers(1, 17))
        cuts = np.sort(rng.choice(np.arange(1, data.size), size=k - 1, replace=False))
        merged = merge_partitions(build_partition(c) for c in np.split(data, cuts))
        assert merged == whole
        assert ks_one_sample(merged, STANDARD_NORMAL) == one
        assert ks_two_sample(merged, comparison) == two
        assert ks_transform_test(merged, comparison, dither=True, seed=9)[0] == trans


def test_verdict_agrees_with_p_value_and_critical_value(rng):
    reference = build_ecdf(rng.normal(size=3000))
    checked = 0
    for _ in range(300):
        alpha = float(rng.uniform(0.01, 0.2))
        shift = float(rng.uniform(-0.4, 0.4))
        size = int(rng.integers(10, 400))
        sample = rng.normal(shift, 1.0, size=size)
        results = [
            ks_one_sample(sample, STANDARD_NORMAL, alpha=alpha),
            ks_two_sample(reference, sample, alpha=alpha),
            ks_transform_test(reference, sample, alpha=alpha)[0],
        ]
        for res in results:
            assert res.reject == (res.p_value < alpha)
            # the critical value is a bisection result; skip statistics within its width
            if abs(res.t_stat - res.critical_value) > 1e-8:
                assert res.reject == (res.t_stat > res.critical_value)
                checked += 1
    assert checked > 850
