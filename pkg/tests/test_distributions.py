import math

import numpy as np
import pytest
from scipy import stats

from ksdrift.distributions import (
    STANDARD_NORMAL,
    UNIFORM01,
    ContinuousDist,
    SeededRng,
    derive_seed,
    dist_cdf,
    dist_ppf,
    dist_sample,
    fresh_seed,
    parse_dist,
)
from ksdrift.errors import InvalidInputError
from ksdrift.kstests import ks_one_sample


def test_closed_form_cdfs():
    assert dist_cdf(STANDARD_NORMAL, 0.0) == 0.5
    assert dist_cdf(ContinuousDist.exponential(2.0), 1.0) == pytest.approx(1 - math.exp(-2), abs=1e-12)
    assert dist_cdf(ContinuousDist.exponential(2.0), 1.0) == pytest.approx(0.864665, abs=1e-6)
    assert dist_cdf(ContinuousDist.exponential(1.0), -1.0) == 0.0
    assert dist_cdf(UNIFORM01, -0.5) == 0.0
    assert dist_cdf(UNIFORM01, 0.3) == 0.3
    assert dist_cdf(UNIFORM01, 4.0) == 1.0


def test_normal_cdf_matches_scipy():
    d = ContinuousDist.normal(1.5, 2.0)
    xs = np.linspace(-6, 9, 31)
    np.testing.assert_allclose(d.cdf(xs), stats.norm(1.5, 2.0).cdf(xs), rtol=1e-12, atol=1e-15)


def test_ppf_inverts_cdf():
    u = np.linspace(0.001, 0.999, 50)
    for d in (STANDARD_NORMAL, ContinuousDist.normal(-1, 0.5), ContinuousDist.exponential(3.0), UNIFORM01):
        np.testing.assert_allclose(d.cdf(dist_ppf(d, u)), u, atol=1e-12)


def test_ppf_domain():
    with pytest.raises(InvalidInputError):
        dist_ppf(STANDARD_NORMAL, [0.5, 1.2])


def test_cdf_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        dist_cdf(STANDARD_NORMAL, float("nan"))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"family": "normal", "sigma": 0.0},
        {"family": "normal", "mu": float("inf")},
        {"family": "exponential", "rate": -1.0},
        {"family": "gamma"},
    ],
)
def test_invalid_parameters(kwargs):
    with pytest.raises(InvalidInputError):
        ContinuousDist(**kwargs)


def test_alternatives():
    assert STANDARD_NORMAL.shifted(0.3) == ContinuousDist.normal(0.3, 1.0)
    assert ContinuousDist.exponential(2.0).rate_scaled(1.5) == ContinuousDist.exponential(3.0)
    with pytest.raises(InvalidInputError):
        ContinuousDist.exponential().shifted(1.0)
    with pytest.raises(InvalidInputError):
        STANDARD_NORMAL.rate_scaled(2.0)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("uniform", UNIFORM01),
        ("normal", STANDARD_NORMAL),
        ("normal:1,2", ContinuousDist.normal(1.0, 2.0)),
        ("exponential", ContinuousDist.exponential(1.0)),
        ("exponential:0.5", ContinuousDist.exponential(0.5)),
        ("  Normal : -1 , 0.5 ", ContinuousDist.normal(-1.0, 0.5)),
    ],
)
def test_parse_dist(text, expected):
    assert parse_dist(text) == expected


@pytest.mark.parametrize("text", ["cauchy", "normal:1", "exponential:a", "uniform:0,1", "normal:0,-1"])
def test_parse_dist_rejects(text):
    with pytest.raises(InvalidInputError):
        parse_dist(text)


def test_describe():
    assert STANDARD_NORMAL.describe() == "normal(mu=0, sigma=1)"
    assert ContinuousDist.exponential(2.0).describe() == "exponential(rate=2)"


def test_normal_sample_mean():
    draws = dist_sample(STANDARD_NORMAL, 100_000, SeededRng(7))
    assert abs(draws.mean()) < 0.02
    assert draws.std() == pytest.approx(1.0, abs=0.02)


def test_exponential_sample_mean():
    draws = dist_sample(ContinuousDist.exponential(2.0), 100_000, SeededRng(8))
    assert draws.min() >= 0.0
    assert draws.mean() == pytest.approx(0.5, abs=0.01)


def test_one_uniform_per_draw():
    rng = SeededRng(3, 4)
    np.testing.assert_array_equal(dist_sample(UNIFORM01, 5, rng), rng.uniforms(5))
    gen = rng.generator()
    first = dist_sample(STANDARD_NORMAL, 3, gen)
    second = dist_sample(STANDARD_NORMAL, 2, gen)
    np.testing.assert_array_equal(np.concatenate([first, second]), dist_sample(STANDARD_NORMAL, 5, rng))


def test_sample_count_validated():
    with pytest.raises(InvalidInputError):
        dist_sample(STANDARD_NORMAL, 0, SeededRng(1))


def test_streams_are_reproducible_and_distinct():
    a = SeededRng(11).child(2).child(5)
    b = SeededRng(11).child(2).child(5)
    assert a.path == (0, 2, 5)
    np.testing.assert_array_equal(a.uniforms(8), b.uniforms(8))
    assert not np.array_equal(a.uniforms(8), SeededRng(11).child(2).child(6).uniforms(8))
    assert not np.array_equal(a.uniforms(8), SeededRng(12).child(2).child(5).uniforms(8))


def test_seeded_rng_validation():
    with pytest.raises(InvalidInputError):
        SeededRng(-1)
    with pytest.raises(InvalidInputError):
        SeededRng(1, -2)


def test_derive_seed():
    assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)
    assert derive_seed(5, 1, 2) != derive_seed(5, 2, 1)
    seeds = {derive_seed(5, w) for w in range(200)}
    assert len(seeds) == 200
    assert all(0 <= s < 2**63 for s in seeds)


def test_fresh_seed_range():
    for _ in range(20):
        assert 0 <= fresh_seed() < 2**63


@pytest.mark.slow
@pytest.mark.parametrize(
    "dist", [UNIFORM01, ContinuousDist.normal(1.0, 2.0), ContinuousDist.exponential(0.5)], ids=["uniform", "normal", "exponential"]
)
def test_sampler_agrees_with_cdf(dist):
    replications = 3000
    rejections = sum(
        ks_one_sample(dist_sample(dist, 10_000, SeededRng(41, rep)), dist, alpha=0.05).reject
        for rep in range(replications)
    )
    assert 0.035 <= rejections / replications <= 0.065
