from fractions import Fraction

import numpy as np
import pytest

from scipy import stats as sps
from scipy.special import ndtr

from edgeworth.engine import ONE_SAMPLE, BoundExpansion, evaluate_cdf
from edgeworth.errors import ComputeError, ConfigError
from edgeworth.estimators import ModeratedPrior, one_sample_spec
from edgeworth.oracle import (EmpiricalCdf, GeneratorSpec, empirical_cdf_at,
    sample_statistic, student_t_cdf)

def test_generator_tokens():
    gen = GeneratorSpec.parse('gamma:3:1:centered')
    assert gen.params == (Fraction(3), Fraction(1), True)
    assert gen.token() == 'gamma:3:1:centered'
    assert gen.mean() == 0
    assert GeneratorSpec.parse('gamma:2:1/2').mean() == 1

    gen = GeneratorSpec.parse('discrete:-1,0,2:1/2,1/4,1/4')
    assert gen.params[0] == (-1, 0, 2)
    assert gen.mean() == 0
    assert GeneratorSpec.parse(gen.token()) == gen

    assert GeneratorSpec.parse('normal:1:2').token() == 'normal:1:2'

@pytest.mark.parametrize('token', [
    'gamma:0:1',
    'gamma:3:1:shifted',
    'normal:0:-1',
    'normal:0',
    'discrete:1,2:1/2',
    'discrete:1,2:1/2,1/3',
    'weibull:1:1',
    'gamma:a:1',
])
def test_bad_generator(token):
    with pytest.raises(ConfigError):
        GeneratorSpec.parse(token)

def test_generator_moments():
    ms = GeneratorSpec.parse('gamma:3:1:centered').moments(5)
    assert ms.sigma2 == 3
    assert ms.mu[3] == 6
    assert ms.mu[4] == 45

    assert GeneratorSpec.parse('normal:5:2').moments(4).mu[4] == 48

    ms = GeneratorSpec.parse('discrete:0,3:2/3,1/3').moments(4)
    assert ms.sigma2 == 2
    assert ms.mu[3] == 2

def test_same_seed_same_draws_for_any_pool_size(config):
    first = sample_statistic('gamma:2:1', 'one-unbiased', (6,), 12000, 7,
        config, pool_size=1)
    second = sample_statistic('gamma:2:1', 'one-unbiased', (6,), 12000, 7,
        config, pool_size=3)
    assert np.array_equal(first.values, second.values)
    assert first.metadata == second.metadata
    assert first.metadata['n'] == 6

    other = sample_statistic('gamma:2:1', 'one-unbiased', (6,), 12000, 8,
        config, pool_size=2)
    assert not np.array_equal(first.values, other.values)

def test_values_sorted_and_counted(config):
    e = sample_statistic('normal:0:1', 'welch-unbiased', (4, 7), 7000, 1, config)
    assert len(e.values) == 7000
    assert np.all(np.diff(e.values) >= 0)
    assert e.metadata['n'] == [4, 7]
    assert e.degenerate == 0

def test_normal_unbiased_matches_student_t(config):
    e = sample_statistic('normal:0:1', 'one-unbiased', (5,), 40000, 3, config)
    for x in (-2.0, -0.5, 0.0, 1.0, 2.5):
        assert e.at(x) == pytest.approx(student_t_cdf(4, x), abs=0.01)

def test_student_t_cdf():
    assert student_t_cdf(9, 0.0) == pytest.approx(0.5)
    xs = np.linspace(-4, 4, 17)
    for df in (1, 3.5, 9, 40):
        assert np.allclose(student_t_cdf(df, xs), sps.t.cdf(xs, df),
            atol=1e-10)
    with pytest.raises(ConfigError):
        student_t_cdf(0, 1.0)

def test_empirical_cdf_at():
    e = EmpiricalCdf(np.array([1.0, 2.0, 3.0, 4.0]), 4, 0)
    assert empirical_cdf_at(e, 2.5) == 0.5
    assert empirical_cdf_at(e, 2.0) == 0.5
    assert list(e.at(np.array([0.0, 4.0]))) == [0.0, 1.0]

def test_degenerate_samples_redrawn(config):
    config.set('simulation', 'max_degenerate_rate', '10')
    e = sample_statistic('discrete:0,1:1/2,1/2', 'one-biased', (2,), 2000, 5,
        config)
    assert e.degenerate > 0
    assert np.all(np.isfinite(e.values))

    config.set('simulation', 'max_degenerate_rate', '0.01')
    with pytest.raises(ComputeError):
        sample_statistic('discrete:0,1:1/2,1/2', 'one-biased', (2,), 2000, 5,
            config)

def test_moderated_prior_keeps_constant_samples(config):
    prior = ModeratedPrior(Fraction(2), Fraction(1))
    e = sample_statistic('discrete:0,1:1/2,1/2', 'one-moderated', (2,), 1000,
        5, config, prior=prior)
    assert e.degenerate == 0
    assert e.metadata['prior'] == {'d0': '2', 's02': '1'}

def test_sampling_arguments(config):
    with pytest.raises(ConfigError):
        sample_statistic('normal:0:1', 'one-biased', (5,), 0, 1, config)
    with pytest.raises(ConfigError):
        sample_statistic('normal:0:1', 'one-biased', (5, 5), 10, 1, config)
    with pytest.raises(ConfigError):
        sample_statistic('normal:0:1', 'welch-biased', (1, 5), 10, 1, config)
    with pytest.raises(ConfigError):
        sample_statistic('normal:0:1', 'one-moderated', (5,), 10, 1, config)

def test_empirical_cdf_within_dkw_band(config):
    reps = 40000
    e = sample_statistic('normal:0:1', 'one-unbiased', (5,), reps, 19, config)
    xs = np.linspace(-5, 5, 401)
    gap = np.max(np.abs(e.at(xs) - student_t_cdf(4, xs)))
    # Dvoretzky-Kiefer-Wolfowitz band at alpha = 1e-4
    assert gap <= np.sqrt(np.log(2 / 1e-4) / (2 * reps))

def test_symmetric_generator_gives_symmetric_cdf(config):
    config.set('simulation', 'max_degenerate_rate', '1')
    reps = 40000
    e = sample_statistic('discrete:-1,0,1:1/4,1/2,1/4', 'one-unbiased', (6,),
        reps, 23, config)
    for x in (0.0, 0.5, 1.0, 1.5, 2.5):
        below = np.searchsorted(e.values, -x, side='left') / reps
        assert e.at(x) == pytest.approx(1 - below, abs=0.015)


@pytest.mark.slow
def test_skewed_expansion_tracks_simulation(config, derivation):
    gen = GeneratorSpec.parse('gamma:3:1:centered')
    e = sample_statistic(gen, 'one-biased', (10,), 1000000, 42, config)
    ms = gen.moments(8)
    spec = one_sample_spec('one-biased', 10, ms.sigma2)
    bound = BoundExpansion(derivation.run(ONE_SAMPLE, 3), spec.bindings(ms))

    # Frozen from seed 42: empirical 0.086968, deviations for k = 0..3 of
    # 0.0642, 0.0346, 0.00075 and 0.00394. The k = 3 term overshoots k = 2.
    empirical = e.at(-2.0)
    assert empirical == pytest.approx(0.086968, abs=5e-6)
    assert empirical >= 2 * ndtr(-2.0)

    deviation = {k: abs(empirical - evaluate_cdf(bound, 10, -2.0, k))
        for k in range(4)}
    assert deviation[0] > deviation[1] > deviation[2]
    assert deviation[3] < deviation[0]
    assert deviation[3] <= 0.01
