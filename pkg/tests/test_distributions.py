"""Distribution moments, truncation closed forms, and their oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from srdbounds.distributions import (
    Gaussian,
    PointMass,
    SlicedGaussian,
    Uniform,
    decay_rate,
    moments,
    q_function,
    q_inverse,
    sample_values,
    scale_to_power,
    truncate,
    truncate_oracle,
)

ALL_VARIANTS = [
    Gaussian(0.0, 1.0),
    Gaussian(0.0, 4.0),
    Uniform(2.0, 1.0),
    Uniform(0.5, 1.0),
    PointMass(0.2, 1.0, outer_mass=0.1),
    PointMass(0.2, 1.0, limit=True),
    SlicedGaussian(0.5, 0.4),
]

CONTINUOUS = [v for v in ALL_VARIANTS if not isinstance(v, PointMass)]


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        Gaussian(0.0, 0.0)
    with pytest.raises(ValueError):
        Gaussian(0.0, -1.0)
    with pytest.raises(ValueError):
        Uniform(-0.5, 1.0)
    with pytest.raises(ValueError):
        PointMass(0.0, 1.0, outer_mass=0.1)  # atom at zero forbidden
    with pytest.raises(ValueError):
        PointMass(1.5, 1.0, outer_mass=0.1)  # floor above the power
    with pytest.raises(ValueError):
        PointMass(0.2, 1.0, outer_mass=1.0)
    with pytest.raises(ValueError):
        SlicedGaussian(0.0, 1.0)
    with pytest.raises(ValueError):
        SlicedGaussian(1.0, 0.0)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def test_standard_normal_moments():
    m = moments(Gaussian(0.0, 1.0))
    assert m.mean == 0.0 and m.variance == 1.0
    assert m.diff_entropy == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-15)


def test_uniform_second_moment():
    m = moments(Uniform(2.0, 1.0))
    assert m.second_moment == pytest.approx(5.0, abs=1e-12)


def test_pointmass_limit_moments():
    m = moments(PointMass(0.2, 1.0, limit=True))
    assert m.mean == 0.0
    assert m.variance == pytest.approx(1.0)
    assert m.diff_entropy is None


def test_sliced_power_matches_montecarlo():
    dist = SlicedGaussian(0.5, 0.4)
    rng = np.random.Generator(np.random.Philox(key=5))
    draws = sample_values(dist, 2_000_000, rng)
    emp = float(np.mean(draws**2))
    se = float(np.std(draws**2) / math.sqrt(len(draws)))
    assert abs(emp - moments(dist).second_moment) <= 4 * se


@pytest.mark.parametrize("dist", ALL_VARIANTS)
def test_second_moment_identity(dist):
    m = moments(dist)
    assert m.second_moment == pytest.approx(m.mean**2 + m.variance, rel=1e-12)


# ---------------------------------------------------------------------------
# Gaussian tail function
# ---------------------------------------------------------------------------


def test_q_function_values():
    assert q_function(0.0) == pytest.approx(0.5, abs=1e-15)
    # oracle: scipy's survival function
    assert q_function(1.0) == pytest.approx(stats.norm.sf(1.0), abs=1e-15)
    assert q_function(1.0) == pytest.approx(0.15865525393145707, abs=1e-13)


def test_q_inverse_roundtrip():
    assert abs(q_inverse(0.5)) <= 1e-13
    for p in (1e-12, 1e-3, 0.25, 0.5, 0.75, 0.999, 1 - 1e-9):
        assert abs(q_function(q_inverse(p)) - p) <= 1e-13


def test_q_inverse_domain():
    for p in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValueError):
            q_inverse(p)


# ---------------------------------------------------------------------------
# Truncation closed forms
# ---------------------------------------------------------------------------


def test_truncate_rejects_zero_beta():
    with pytest.raises(ValueError):
        truncate(Gaussian(0.0, 1.0), 0.0)


def test_gaussian_beta_one_is_untruncated():
    tr = truncate(Gaussian(0.0, 2.5), 1.0)
    assert tr.variance == pytest.approx(2.5, abs=1e-15)
    assert tr.diff_entropy == pytest.approx(0.5 * math.log(2 * math.pi * math.e * 2.5))
    assert math.isinf(tr.threshold)


def test_gaussian_nonzero_mean_unsupported():
    with pytest.raises(ValueError):
        truncate(Gaussian(1.0, 1.0), 0.5)


def test_uniform_truncation_example():
    tr = truncate(Uniform(2.0, 1.0), 0.5)
    assert tr.mean == pytest.approx(2.0 - 0.5 * math.sqrt(3.0), abs=1e-12)
    assert tr.variance == pytest.approx(0.25, abs=1e-12)


def test_pointmass_floor_regime():
    tr = truncate(PointMass(0.2, 1.0, outer_mass=0.1), 0.05)
    assert tr.variance == pytest.approx(0.2, abs=0)
    assert tr.mean == 0.0 and tr.diff_entropy is None


def test_pointmass_mixture_regime_exact():
    dist = PointMass(0.2, 1.0, outer_mass=0.1)
    tr = truncate(dist, 0.95)
    # direct accounting: total power splits between kept and discarded mass
    kept = (0.9 * 0.2 + 0.05 * dist.outer_sq) / 0.95
    assert tr.variance == pytest.approx(kept, rel=1e-14)
    oracle = truncate_oracle(dist, 0.95, "quadrature")
    assert tr.variance == pytest.approx(oracle.result.variance, rel=1e-14)


def test_pointmass_limit_all_mass_at_floor():
    dist = PointMass(0.2, 1.0, limit=True)
    for beta in (0.01, 0.5, 0.999):
        assert truncate(dist, beta).variance == 0.2
    assert truncate(dist, 1.0).variance == 1.0


def test_gaussian_small_beta_quadratic_shrinkage():
    tr = truncate(Gaussian(0.0, 1.0), 1e-3)
    assert tr.variance / 1e-6 == pytest.approx(math.pi / 6.0, rel=1e-3)


@pytest.mark.parametrize("dist", CONTINUOUS)
@pytest.mark.parametrize("beta", [0.05, 0.3, 0.7, 1.0])
def test_truncate_matches_quadrature(dist, beta):
    closed = truncate(dist, beta)
    oracle = truncate_oracle(dist, beta, "quadrature")
    assert closed.mean == pytest.approx(oracle.result.mean, abs=1e-8)
    assert closed.variance == pytest.approx(oracle.result.variance, abs=1e-8)
    assert closed.diff_entropy == pytest.approx(oracle.result.diff_entropy, abs=1e-8)


def test_sliced_variance_matches_montecarlo():
    # adjudicates the sign convention in the shifted-magnitude cross term
    dist = SlicedGaussian(0.5, 0.4)
    closed = truncate(dist, 0.7)
    mc = truncate_oracle(dist, 0.7, "montecarlo", budget=10_000_000, seed=42)
    assert abs(closed.variance - mc.result.variance) <= 3 * mc.variance_err


def test_uniform_beta_one_matches_moments():
    m = moments(Uniform(0.0, 1.0))
    oracle = truncate_oracle(Uniform(0.0, 1.0), 1.0, "quadrature")
    assert oracle.result.mean == pytest.approx(m.mean, abs=1e-10)
    assert oracle.result.variance == pytest.approx(m.variance, abs=1e-10)


# ---------------------------------------------------------------------------
# Truncation invariants (property tests)
# ---------------------------------------------------------------------------


@given(beta=st.floats(min_value=1e-4, max_value=1.0))
@settings(max_examples=80, deadline=None)
def test_truncation_never_raises_power(beta):
    for dist in ALL_VARIANTS:
        tr = truncate(dist, beta)
        m = moments(dist)
        assert tr.second_moment <= m.second_moment * (1 + 1e-9)


@given(
    beta_lo=st.floats(min_value=1e-4, max_value=1.0),
    beta_hi=st.floats(min_value=1e-4, max_value=1.0),
)
@settings(max_examples=60, deadline=None)
def test_truncated_power_monotone_in_beta(beta_lo, beta_hi):
    if beta_lo > beta_hi:
        beta_lo, beta_hi = beta_hi, beta_lo
    for dist in ALL_VARIANTS:
        lo = truncate(dist, beta_lo).second_moment
        hi = truncate(dist, beta_hi).second_moment
        assert lo <= hi * (1 + 1e-9) + 1e-15


@given(beta=st.floats(min_value=1e-4, max_value=1.0))
@settings(max_examples=80, deadline=None)
def test_entropy_power_below_variance(beta):
    for dist in CONTINUOUS:
        tr = truncate(dist, beta)
        entropy_power = math.exp(2.0 * tr.diff_entropy) / (2 * math.pi * math.e)
        assert entropy_power <= tr.variance * (1 + 1e-9)


def test_entropy_power_equality_only_for_full_gaussian():
    tr = truncate(Gaussian(0.0, 2.0), 1.0)
    entropy_power = math.exp(2.0 * tr.diff_entropy) / (2 * math.pi * math.e)
    assert entropy_power == pytest.approx(tr.variance, rel=1e-12)


@pytest.mark.parametrize("dist", ALL_VARIANTS)
def test_beta_one_reproduces_untruncated_moments(dist):
    if isinstance(dist, Gaussian) and dist.mean != 0.0:
        return
    tr = truncate(dist, 1.0)
    m = moments(dist)
    assert tr.mean == pytest.approx(m.mean, abs=1e-14)
    assert tr.variance == pytest.approx(m.variance, rel=1e-12)
    if m.diff_entropy is None:
        assert tr.diff_entropy is None
    else:
        assert tr.diff_entropy == pytest.approx(m.diff_entropy, rel=1e-12)


def test_threshold_increasing_in_beta():
    betas = np.linspace(0.05, 0.999, 40)
    for dist in CONTINUOUS:
        thresholds = [truncate(dist, float(b)).threshold for b in betas]
        assert all(t2 > t1 for t1, t2 in zip(thresholds, thresholds[1:]))


# ---------------------------------------------------------------------------
# Decay rate and power scaling
# ---------------------------------------------------------------------------


def test_decay_rates():
    assert decay_rate(Gaussian(0.0, 1.0)) == 1.0
    assert decay_rate(Uniform(2.0, 1.0)) == 0.0  # ratio 4 > 3
    assert decay_rate(Uniform(math.sqrt(2.3), 1.0)) == 1.0
    assert decay_rate(PointMass(0.2, 1.0, limit=True)) == 0.0
    assert decay_rate(SlicedGaussian(0.5, 0.4)) == 0.0


def test_scale_to_power_gaussian():
    scaled = scale_to_power(Gaussian(0.0, 1.0), 0.1, 1.0)
    assert isinstance(scaled, Gaussian)
    assert scaled.variance == pytest.approx(10.0, rel=1e-12)


def test_scale_to_power_pointmass_preserves_shape():
    dist = PointMass(0.2, 1.0, limit=True)
    scaled = scale_to_power(dist, 1e-4, 1e-4 * 7.0)
    assert scaled.floor_sq / scaled.power == pytest.approx(0.2, rel=1e-12)


@pytest.mark.parametrize("dist", ALL_VARIANTS)
def test_scale_to_power_hits_target_and_keeps_decay(dist):
    scaled = scale_to_power(dist, 0.2, 3.0)
    assert 0.2 * moments(scaled).second_moment == pytest.approx(3.0, rel=1e-12)
    assert decay_rate(scaled) == decay_rate(dist)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("dist", ALL_VARIANTS)
def test_sampler_moments(dist):
    if isinstance(dist, PointMass) and dist.limit:
        return  # limit draws sit at the floor; power escapes to the outer atom
    rng = np.random.Generator(np.random.Philox(key=9))
    draws = sample_values(dist, 400_000, rng)
    emp = float(np.mean(draws**2))
    se = float(np.std(draws**2) / math.sqrt(len(draws)))
    assert abs(emp - moments(dist).second_moment) <= 4 * se + 1e-12
