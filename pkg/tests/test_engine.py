import math
import random

from fractions import Fraction

import numpy as np
import pytest

from edgeworth.engine import (KINDS, ONE_SAMPLE, TWO_SAMPLE, BoundExpansion,
    Derivation, ExpansionSet, KTable, a_mk, build_q_polynomials,
    evaluate_cdf, extract_k_table, sampling_moment_one, sampling_moment_two,
    special_case_lambda_form, statistic_kind)
from edgeworth.errors import ComputeError, ConfigError
from edgeworth.estimators import MomentSet, one_sample_spec
from edgeworth.oracle import student_t_cdf
from edgeworth.polynomial import (A, B, BX, BY, R, SparsePoly, lam, mu,
    ratio)
from edgeworth.series import HalfPowerSeries, UniPoly, hermite

from .conftest import THREE_POINT, central_moment

def s(symbol, power=1):
    return SparsePoly.symbol(symbol, power)

def m(order, sample='x'):
    return s(mu(order, sample))

def shape(coefficient, factors, ascending):
    """
    coefficient * prod(factors) * (polynomial in y with the given ascending
    integer coefficients).
    """
    front = SparsePoly.monomial(coefficient, factors)
    return UniPoly([front * c for c in ascending], 'y')

def swap_samples():
    mapping = {BX: s(BY), BY: s(BX), ratio('x'): s(ratio('y')),
        ratio('y'): s(ratio('x'))}
    for j in range(2, 17):
        mapping[mu(j, 'x')] = m(j, 'y')
        mapping[mu(j, 'y')] = m(j, 'x')
    return mapping

def test_statistic_kinds():
    assert len(KINDS) == 7
    assert statistic_kind('one-unbiased').ordinary
    assert not statistic_kind('two-pooled').ordinary
    assert statistic_kind('two-moderated').arity == TWO_SAMPLE
    with pytest.raises(ConfigError):
        statistic_kind('three-sample')

def test_a_mk():
    assert a_mk(3, 0) == 1
    assert a_mk(1, 1) == Fraction(-1, 2)
    assert a_mk(2, 2) == 1
    assert a_mk(1, 2) == Fraction(3, 8)

def test_one_sample_moment_leading_terms():
    first = sampling_moment_one(1, 1)
    assert first.powers() == [1]
    assert first.get(1) == SparsePoly.monomial(Fraction(-1, 2),
        [(B, 1), (mu(3), 1), (A, Fraction(-3, 2))])

    second = sampling_moment_one(2, 0)
    assert second.powers() == [0]
    assert second.get(0) == m(2) * s(A, -1)

def test_one_sample_moment_without_variance_estimation():
    series = sampling_moment_one(3, 2).map(lambda c: c.substitute({B: 0}))
    # n^(3/2) A^(-3/2) rho(3, 0) = n^(-1/2) mu_3 A^(-3/2)
    assert series.powers() == [1]
    assert series.get(1) == m(3) * s(A, Fraction(-3, 2))

def test_two_sample_moment_leading_terms():
    first = sampling_moment_two(1, 1)
    expected = (s(BX) * s(ratio('x')) * m(3) - s(BY) * s(ratio('y')) * m(3, 'y')) \
        * s(A, Fraction(-3, 2)) * Fraction(-1, 2)
    assert first.get(1) == expected

    second = sampling_moment_two(2, 0)
    assert second.get(0) == (s(ratio('x')) * m(2) + s(ratio('y')) * m(2, 'y')) \
        * s(A, -1)

@pytest.mark.parametrize('order', [1, 2, 3])
def test_two_sample_moments_change_sign_under_exchange(order):
    series = sampling_moment_two(order, 2)
    swapped = series.map(lambda c: c.substitute(swap_samples()))
    assert swapped == series * (-1) ** order

def one_sample_golden():
    a, b = s(A), s(B)
    m2, m3, m4, m5 = m(2), m(3), m(4), m(5)
    golden = {}
    golden[1, 2] = b * m3 * s(A, Fraction(-3, 2)) * Fraction(-1, 2)
    golden[1, 3] = -(
        (8 * m2 * m3 - m5) * a * b ** 2 * 6
        - (m2 ** 2 * m3 - m3 * m4) * b ** 3 * 15
        - a ** 2 * b * m3 * 8) * s(A, Fraction(-7, 2)) / 16
    golden[2, 1] = m2 * s(A, -1)
    golden[2, 2] = ((4 * m2 ** 2 - m4) * a * b * 4
        - (4 * m2 ** 3 - 7 * m3 ** 2 - 4 * m2 * m4) * b ** 2) * s(A, -3) / 4
    golden[3, 1] = -(3 * b * m2 - a) * m3 * s(A, Fraction(-5, 2))
    golden[4, 1] = -((3 * m2 ** 2 - m4) * a ** 2
        - (3 * m2 ** 3 - m3 ** 2 - m2 * m4) * a * b * 6
        + (m2 ** 4 - 6 * m2 * m3 ** 2 - m2 ** 2 * m4) * b ** 2 * 3) * s(A, -4)
    return golden

def two_sample_golden():
    a = s(A)
    bx, by = s(ratio('x')), s(ratio('y'))
    big_x, big_y = s(BX), s(BY)
    golden = {}
    golden[1, 2] = -(big_x * bx * m(3) - big_y * by * m(3, 'y')) \
        * s(A, Fraction(-3, 2)) / 2
    golden[2, 1] = (bx * m(2) + by * m(2, 'y')) * s(A, -1)
    golden[3, 1] = -(
        (3 * big_x * bx ** 2 * m(2) + 3 * big_x * bx * by * m(2, 'y')
            - a * bx ** 2) * m(3)
        - (3 * big_y * bx * by * m(2) + 3 * big_y * by ** 2 * m(2, 'y')
            - a * by ** 2) * m(3, 'y')) * s(A, Fraction(-5, 2))
    return golden

def random_bindings(rng, arity):
    """
    Rational values for every symbol of a k-table. A is a square so its
    half powers stay rational.
    """

    def rational():
        return Fraction(rng.choice([-1, 1]) * rng.randint(1, 12),
            rng.randint(1, 12))

    bindings = {A: Fraction(rng.randint(1, 9), rng.randint(1, 9)) ** 2}
    if arity == ONE_SAMPLE:
        bindings[B] = rational()
        bindings.update({mu(j): rational() for j in range(2, 6)})
    else:
        for symbol in (BX, BY, ratio('x'), ratio('y')):
            bindings[symbol] = rational()
        for sample in ('x', 'y'):
            bindings.update({mu(j, sample): rational() for j in range(2, 6)})
    return bindings

def test_one_sample_k_table(derivation):
    kt = derivation.run(ONE_SAMPLE, 3).k_table()
    assert not kt.get(1, 1)
    assert kt.r2() == kt.get(2, 1)
    for key, expected in one_sample_golden().items():
        assert kt.get(*key) == expected, key

def test_two_sample_k_table(derivation):
    kt = derivation.run(TWO_SAMPLE, 2).k_table()
    assert not kt.get(1, 1)
    for key, expected in two_sample_golden().items():
        assert kt.get(*key) == expected, key

@pytest.mark.parametrize('arity, golden', [
    (ONE_SAMPLE, one_sample_golden),
    (TWO_SAMPLE, two_sample_golden),
])
def test_k_table_agrees_at_random_rationals(derivation, arity, golden):
    kt = derivation.run(arity, 3).k_table()
    rng = random.Random(2024)
    for _ in range(20):
        bindings = random_bindings(rng, arity)
        for key, expected in golden().items():
            derived = kt.get(*key).substitute(bindings)
            assert derived == expected.substitute(bindings), key
            assert derived.symbols() == set()

def test_two_sample_k_table_reduces_to_one_sample(derivation):
    one = derivation.run(ONE_SAMPLE, 3).k_table()
    two = derivation.run(TWO_SAMPLE, 3).k_table()
    reduce = {BY: 0, ratio('y'): 0, ratio('x'): 1, BX: s(B)}
    keys = {key for key, _ in one.items()} | {key for key, _ in two.items()}
    for j, l in keys:
        assert two.get(j, l).substitute(reduce) == one.get(j, l), (j, l)

def test_two_sample_k_table_exchange_symmetry(derivation):
    kt = derivation.run(TWO_SAMPLE, 3).k_table()
    for (j, l), value in kt.items():
        assert value.substitute(swap_samples()) == value * (-1) ** j, (j, l)

def test_general_q1_q2(derivation):
    es = derivation.run(ONE_SAMPLE, 2)
    kt = es.k_table()
    k12, k22, k31, k41 = kt.get(1, 2), kt.get(2, 2), kt.get(3, 1), kt.get(4, 1)

    q1 = hermite(2) * (-k31 * s(R, -3) / 6) + hermite(0) * (-k12 * s(R, -1))
    assert es.q(1) == q1

    q2 = hermite(5) * (-k31 * k31 * s(R, -6) / 72) \
        + hermite(3) * (-(4 * k12 * k31 + k41) * s(R, -4) / 24) \
        + hermite(1) * (-(k12 * k12 + k22) * s(R, -2) / 2)
    assert es.q(2) == q2

def test_only_variance_term_gives_zero_polynomials():
    kt = KTable({(2, 1): m(2) * s(A, -1)}, 4)
    es = build_q_polynomials(kt, 4)
    assert all(not es.q(k) for k in range(1, 5))

def test_structural_zero_check():
    one = SparsePoly.one()
    with pytest.raises(Derivation.StructureError):
        extract_k_table([HalfPowerSeries({0: one}, 2)], 2)
    with pytest.raises(Derivation.StructureError):
        extract_k_table([HalfPowerSeries({}, 2),
            HalfPowerSeries({1: one}, 2)], 2)

@pytest.mark.parametrize('arity', [ONE_SAMPLE, TWO_SAMPLE])
def test_derivation_is_structurally_clean(derivation, arity):
    es = derivation.run(arity, 3)
    assert es.order() == 3
    assert [k for k in range(1, 4) if not es.q(k)] == []

@pytest.mark.slow
@pytest.mark.parametrize('arity', [ONE_SAMPLE, TWO_SAMPLE])
def test_derivation_is_structurally_clean_at_order_five(derivation, arity):
    es = derivation.run(arity, 5)
    assert es.order() == 5

def test_lambda_form_golden(derivation):
    l3, l4, l5, l6 = lam(3), lam(4), lam(5), lam(6)
    es = special_case_lambda_form(derivation.run(ONE_SAMPLE, 4),
        KINDS['one-biased'])
    third = Fraction(1, 6)

    assert es.lambda_form()
    assert es.q(1) == shape(third, [(l3, 1)], [1, 0, 2])
    assert es.q(2) == shape(Fraction(1, 12), [(l4, 1)], [0, -3, 0, 1]) \
        + shape(Fraction(-1, 18), [(l3, 2)], [0, -3, 0, 2, 0, 1]) \
        + shape(Fraction(-1, 4), [], [0, 3, 0, 1])
    assert es.q(3) == shape(Fraction(-1, 40), [(l5, 1)], [1, 0, 8, 0, 2]) \
        + shape(Fraction(-1, 144), [(l3, 1), (l4, 1)],
            [-15, 0, -90, 0, -30, 0, 4]) \
        + shape(Fraction(1, 1296), [(l3, 3)],
            [-105, 0, -525, 0, -210, 0, 28, 0, 8]) \
        + shape(Fraction(1, 24), [(l3, 1)], [0, 0, -6, 0, -3, 0, 2])
    assert es.q(4) == shape(Fraction(-1, 90), [(l6, 1)], [0, -15, 0, -5, 0, 2]) \
        + shape(Fraction(1, 60), [(l3, 1), (l5, 1)],
            [0, -30, 0, -5, 0, 8, 0, 1]) \
        + shape(Fraction(-1, 288), [(l4, 2)], [0, 111, 0, 33, 0, -21, 0, 1]) \
        + shape(Fraction(1, 216), [(l3, 2), (l4, 1)],
            [0, 261, 0, 36, 0, -90, 0, -12, 0, 1]) \
        + shape(Fraction(-1, 1944), [(l3, 4)],
            [0, 945, 0, 45, 0, -450, 0, -90, 0, 5, 0, 1]) \
        + shape(Fraction(1, 48), [(l4, 1)], [0, 21, 0, 9, 0, -7, 0, 1]) \
        + shape(Fraction(-1, 72), [(l3, 2)], [0, -9, 0, -18, 0, -12, 0, -6, 0, 1]) \
        + shape(Fraction(-1, 96), [], [0, 21, 0, 7, 0, 5, 0, 3])

def test_lambda_form_rendering(derivation):
    es = special_case_lambda_form(derivation.run(ONE_SAMPLE, 2),
        KINDS['one-unbiased'])
    assert es.render_q(1) == '(1/6)*l3*(2*x^2 + 1)'
    assert '(1/12)*l4*(x^3 - 3*x)' in es.render_q(2)

def test_lambda_form_vanishes_for_symmetric_cumulants(derivation):
    es = special_case_lambda_form(derivation.run(ONE_SAMPLE, 3),
        KINDS['one-biased'])
    zero = es.substitute({lam(j): 0 for j in range(3, 6)})
    assert not zero.q(1)
    assert not zero.q(3)
    assert zero.q(2)

def test_lambda_form_needs_ordinary_statistic(derivation):
    with pytest.raises(ConfigError):
        special_case_lambda_form(derivation.run(ONE_SAMPLE, 1),
            KINDS['one-moderated'])

def test_odd_terms_vanish_without_odd_moments(derivation):
    es = derivation.run(ONE_SAMPLE, 3)
    even = es.substitute({mu(3): 0, mu(5): 0})
    assert not even.q(1)
    assert not even.q(3)

def test_degenerates_to_standardized_mean(derivation):
    es = derivation.run(ONE_SAMPLE, 1)
    q1 = es.q(1).map(lambda c: c.substitute(
        {B: 0, A: 1, mu(2): 1, R: 1, mu(3): s(lam(3))}))
    assert q1 == hermite(2) * (-s(lam(3)) / 6)

def test_symmetric_distribution_cdf_is_symmetric(derivation):
    ms = MomentSet.create({2: 1, 3: 0, 4: 2, 5: 0, 6: 7})
    spec = one_sample_spec('one-unbiased', 12, ms.sigma2)
    bound = BoundExpansion(derivation.run(ONE_SAMPLE, 4), spec.bindings(ms))
    xs = np.linspace(-4, 4, 81)
    values = bound.cumulative(12, xs)
    flipped = bound.cumulative(12, -xs)
    np.testing.assert_allclose(values + flipped, 1.0, atol=1e-12)

def test_evaluate_cdf_limits(derivation):
    ms = MomentSet.gamma(3, 1)
    spec = one_sample_spec('one-biased', 10, ms.sigma2)
    bound = BoundExpansion(derivation.run(ONE_SAMPLE, 2), spec.bindings(ms))
    assert bound.r() == pytest.approx(1.0)
    assert evaluate_cdf(bound, 10, 0.0, 0) == pytest.approx(0.5, abs=1e-15)
    assert evaluate_cdf(bound, 10, 40.0, 0) == pytest.approx(1.0, abs=1e-12)
    assert evaluate_cdf(bound, 10, 40.0, 2) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ConfigError):
        evaluate_cdf(bound, 10, 0.0, 3)

def test_normal_unbiased_matches_student_t(derivation):
    ms = MomentSet.normal(1)
    spec = one_sample_spec('one-unbiased', 10, ms.sigma2)
    bound = BoundExpansion(derivation.run(ONE_SAMPLE, 2), spec.bindings(ms))
    value = evaluate_cdf(bound, 10, -1.5, 2)
    assert abs(value - student_t_cdf(9, -1.5)) < 2e-3

def test_normal_unbiased_accuracy_over_grid(derivation):
    ms = MomentSet.normal(1)
    spec = one_sample_spec('one-unbiased', 10, ms.sigma2)
    es = derivation.run(ONE_SAMPLE, 3)
    bound = BoundExpansion(es, spec.bindings(ms))
    xs = np.round(np.arange(-2.0, 2.05, 0.1), 10)
    exact = np.array([student_t_cdf(9, x) for x in xs])
    values = bound.cumulative(10, xs)

    # Measured: 0.02766 without corrections, 0.003806 with two terms.
    err0 = np.max(np.abs(values[0] - exact))
    err2 = np.max(np.abs(values[2] - exact))
    assert err0 == pytest.approx(0.02766, abs=5e-5)
    assert err0 >= 5 * err2
    assert not np.any(bound.coefficients(1))
    assert not np.any(bound.coefficients(3))

def test_evaluate_cdf_at_infinity(derivation):
    ms = MomentSet.gamma(3, 1)
    spec = one_sample_spec('one-biased', 10, ms.sigma2)
    bound = BoundExpansion(derivation.run(ONE_SAMPLE, 3), spec.bindings(ms))
    for terms in range(4):
        assert evaluate_cdf(bound, 10, -np.inf, terms) == 0.0
        assert evaluate_cdf(bound, 10, np.inf, terms) == 1.0
    values = bound.cumulative(10, np.array([-np.inf, 0.0, np.inf]))
    assert not np.any(np.isnan(values))


def test_unbiased_equals_rescaled_lambda_form(derivation):
    generic = derivation.run(ONE_SAMPLE, 4)
    lambda_es = special_case_lambda_form(generic, KINDS['one-unbiased'])
    ms = MomentSet.gamma(3, 1)
    n = 10
    spec = one_sample_spec('one-unbiased', n, ms.sigma2)

    direct = BoundExpansion(generic, spec.bindings(ms))
    bindings = {A: float(spec.A), mu(2): float(ms.sigma2)}
    bindings.update({lam(j): float(v) for j, v in ms.lambdas.items()})
    rescaled = BoundExpansion(lambda_es, bindings)

    assert rescaled.r2() == pytest.approx((n - 1) / n)
    xs = np.linspace(-3, 3, 25)
    np.testing.assert_allclose(direct.cumulative(n, xs),
        rescaled.cumulative(n, xs), atol=1e-10)

def test_bound_expansion_rejects_nonpositive_r2(derivation):
    es = derivation.run(ONE_SAMPLE, 1)
    with pytest.raises(ComputeError, match=r"r\^2"):
        BoundExpansion(es, {A: 1.0, B: 1.0, mu(2): 0.0, mu(3): 0.0})

def exact_moment(n, power, a, b):
    """
    E[theta^power] for the three-point distribution by summing over the
    multinomial counts of each support point.
    """
    support = [float(v) for v in THREE_POINT[0]]
    probs = [float(p) for p in THREE_POINT[1]]
    variance = float(central_moment(THREE_POINT, 2))
    total = 0.0
    for c0 in range(n + 1):
        for c1 in range(n + 1 - c0):
            c2 = n - c0 - c1
            weight = math.comb(n, c0) * math.comb(n - c0, c1) * \
                probs[0] ** c0 * probs[1] ** c1 * probs[2] ** c2
            xbar = (c0 * support[0] + c1 * support[1] + c2 * support[2]) / n
            squares = (c0 * support[0] ** 2 + c1 * support[1] ** 2 +
                c2 * support[2] ** 2) / n
            scale = a + b * (squares - variance - xbar ** 2)
            total += weight * (math.sqrt(n) * xbar / math.sqrt(scale)) ** power
    return total

@pytest.mark.parametrize('power, order', [(1, 2), (2, 1), (2, 3)])
def test_sampling_moment_error_decay(power, order):
    # The first omitted power has the parity of the moment order
    a = float(central_moment(THREE_POINT, 2))
    b = 0.5
    bindings = {A: a, B: b}
    bindings.update({mu(j): float(central_moment(THREE_POINT, j))
        for j in range(2, 13)})
    series = sampling_moment_one(power, order)

    sizes = [8, 12, 16, 24, 32]
    errors = []
    for n in sizes:
        approx = sum(c.eval(bindings) * n ** (-p / 2) for p, c in series.items())
        errors.append(abs(exact_moment(n, power, a, b) - approx))

    slope = np.polyfit(np.log(sizes), np.log(errors), 1)[0]
    assert abs(slope + (order + 1) / 2) < 0.3

def test_expansion_json_round_trip(derivation):
    es = derivation.run(TWO_SAMPLE, 2)
    payload = es.to_json('(nx+ny-2)/(nx+ny)', with_k_table=True)
    assert payload['K'] == 2
    assert payload['r2'] == '(nx+ny-2)/(nx+ny)'
    assert [entry['k'] for entry in payload['q']] == [1, 2]
    assert all(entry['r'] < 0 for entry in payload['q'][0]['hermite'])

    loaded = ExpansionSet.from_json(payload)
    assert loaded.r2() == es.r2()
    assert loaded.q(1) == es.q(1)
    assert loaded.q(2) == es.q(2)
    assert loaded.k_table().get(3, 1) == es.k_table().get(3, 1)

def test_derivation_uses_cache(config):
    class Recording():
        def __init__(self):
            self.store = {}
            self.hits = 0
        def get(self, key):
            if key in self.store:
                self.hits += 1
            return self.store.get(key)
        def put(self, key, payload):
            self.store[key] = payload

    cache = Recording()
    derivation = Derivation(config, cache)
    first = derivation.run(ONE_SAMPLE, 1)
    assert list(cache.store) == ['aee:one:1']
    second = derivation.run(ONE_SAMPLE, 1)
    assert cache.hits == 1
    assert second.q(1) == first.q(1)

def test_derivation_rejects_orders_above_cap(config):
    derivation = Derivation(config)
    with pytest.raises(ConfigError):
        derivation.run(ONE_SAMPLE, 6)
    with pytest.raises(ConfigError):
        derivation.run('three', 1)
