import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from anonroute.world import (ConfigError, WorldConfig, broadcast_radius, distance_from_power,
                             mix_seed, n_star_from_ratio, perceived_power, sample_deployment,
                             sink_deadline, splitmix64, timer_duration)

pos = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("n_r, expected", [(9, 0.067), (11, 0.074), (13, 0.081), (15, 0.087)])
def test_broadcast_radius_matches_reported_values(n_r, expected):
    # reported to three decimals for n = 2000
    assert round(broadcast_radius(n_r, 2000, 1.0), 3) == expected


def test_broadcast_radius_values():
    assert broadcast_radius(9, 2000, 1.0) == pytest.approx(0.0670820393, rel=1e-9)
    assert broadcast_radius(15, 2000, 1.0) == pytest.approx(0.0866025404, rel=1e-9)
    assert broadcast_radius(37, 37, 2.5) == pytest.approx(2.5, rel=1e-15)


@pytest.mark.parametrize("args", [(0, 10, 1.0), (5, 0, 1.0), (5, 10, 0.0), (-1, 10, 1.0)])
def test_broadcast_radius_domain(args):
    with pytest.raises(ValueError):
        broadcast_radius(*args)


@given(n_r=st.floats(0.1, 100), n=st.integers(1, 10_000), R=pos,
       dn_r=st.floats(0.01, 10), dR=st.floats(0.01, 10))
def test_broadcast_radius_monotone(n_r, n, R, dn_r, dR):
    base = broadcast_radius(n_r, n, R)
    assert broadcast_radius(n_r + dn_r, n, R) > base
    assert broadcast_radius(n_r, n, R * (1 + dR)) > base
    assert broadcast_radius(n_r, n + 1, R) < base


def test_perceived_power_examples():
    assert perceived_power(1.0, 1.0) == 1.0
    assert perceived_power(1.0, 0.5) == 4.0
    assert perceived_power(2.0, 0.8) == pytest.approx(3.125, rel=1e-15)


@pytest.mark.parametrize("d", [0.0, -0.1])
def test_perceived_power_domain(d):
    with pytest.raises(ValueError):
        perceived_power(1.0, d)


def test_distance_from_power_examples():
    assert distance_from_power(1.0, 1.0) == 1.0
    assert distance_from_power(1.0, 4.0) == 0.5
    with pytest.raises(ValueError):
        distance_from_power(1.0, 0.0)


@given(B0=pos, d=st.floats(1e-6, 1.0))
def test_power_round_trip(B0, d):
    assert distance_from_power(B0, perceived_power(B0, d)) == pytest.approx(d, rel=1e-12)


def test_timer_duration_examples():
    assert timer_duration(1.0, 1.0, 1.0) == 0.0
    assert timer_duration(1.0, 0.55, 1.0) == pytest.approx(0.9, rel=1e-15)
    assert sink_deadline(1.0, 1.0) == 2.0
    with pytest.raises(ValueError):
        timer_duration(1.0, 1.1, 1.0)


@given(a=st.floats(1e-6, 1.0), b=st.floats(1e-6, 1.0), v=st.floats(0.01, 100))
def test_timer_outskirts_first(a, b, v):
    lo, hi = sorted((a, b))
    assert timer_duration(1.0, hi, v) <= timer_duration(1.0, lo, v)


def test_config_validation():
    with pytest.raises(ConfigError):
        WorldConfig(n=10, n_star=11)
    with pytest.raises(ConfigError):
        WorldConfig(n=10, n_star=0)
    with pytest.raises(ConfigError):
        WorldConfig(f=1.5)
    with pytest.raises(ConfigError):
        WorldConfig(n=10, n_r=11)
    with pytest.raises(ConfigError):
        WorldConfig(seed=-1)


def test_n_star_from_ratio():
    assert n_star_from_ratio(0.001, 2000) == 2
    assert n_star_from_ratio(0.5, 2000) == 1000
    assert n_star_from_ratio(1e-6, 2000) == 1
    assert n_star_from_ratio(1.0, 7) == 7
    with pytest.raises(ConfigError):
        n_star_from_ratio(0.0, 10)


def test_splitmix64_reference_vector():
    # first output of the reference SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert mix_seed(1, 2, 3) != mix_seed(1, 3, 2)
    assert 0 <= mix_seed(2**64 - 1, 2**70) < 2**64


def test_single_sensor_deployment():
    dep = sample_deployment(WorldConfig(n=1, n_star=1, n_r=1, seed=5))
    (s,) = dep.sites
    assert s.is_source
    assert 0 < s.R_i <= 1.0


def test_deployment_is_deterministic():
    cfg = WorldConfig(n=500, n_star=20, seed=12345)
    a, b = sample_deployment(cfg), sample_deployment(cfg)
    assert a.sites == b.sites
    assert np.array_equal(a.xy, b.xy)
    assert sample_deployment(WorldConfig(n=500, n_star=20, seed=12346)).sites != a.sites


def test_deployment_invariants():
    cfg = WorldConfig(R=3.0, B0=7.0, n=2000, n_star=37, n_r=11, seed=99)
    dep = sample_deployment(cfg)
    assert sum(s.is_source for s in dep.sites) == 37
    assert dep.r == pytest.approx(math.sqrt(11 / 2000) * 3.0, rel=1e-12)
    for s in dep.sites:
        assert 0 < s.R_i <= 3.0
        assert s.R_i ** 2 == pytest.approx(s.x ** 2 + s.y ** 2, rel=1e-12)
        assert s.P_i == pytest.approx(7.0 / s.R_i ** 2, rel=1e-12)
        assert s.R_i >= 1e-6 * 3.0


def test_mean_radius_two_thirds():
    # E[R_i] = 2R/3 under the uniform disc measure; s.d. of the mean is ~0.0053 at n = 2000
    seeds = range(40)
    inside = sum(abs(np.mean([s.R_i for s in sample_deployment(
        WorldConfig(n=2000, n_star=1, seed=s)).sites]) - 2 / 3) <= 0.02 for s in seeds)
    assert inside / len(seeds) >= 0.95


def test_disc_uniformity_chi_square():
    dep = sample_deployment(WorldConfig(n=100_000, n_star=1, n_r=10, seed=2024))
    radii = np.array([s.R_i for s in dep.sites])
    edges = np.sqrt(np.linspace(0, 1, 11))  # ten equal-area annuli
    counts, _ = np.histogram(radii, bins=edges)
    p = stats.chisquare(counts).pvalue
    assert p > 0.001
