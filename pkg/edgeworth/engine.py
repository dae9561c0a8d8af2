#
# Copyright 2020 Taylor Petrick
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
#

"""
Derivation and evaluation of adjusted Edgeworth expansions.

The sampling moments of the statistic are built as series in n^(-1/2) with
the estimator constants A, B (or Bx, By) and the size ratios bx, by kept as
opaque symbols. The moments are converted to cumulants, the cumulant
coefficients k_{j,l} are collected and the correction polynomials q_k are
read off the exponential of the cumulant series. Numbers are bound only when
an expansion is evaluated.
"""

import math

from fractions import Fraction
from typing import NamedTuple

import numpy as np

from numpy.polynomial import polynomial as npoly
from scipy.special import ndtr

from . import config as aee_config
from .cache import DerivationCache
from .errors import ComputeError, ConfigError
from .logging import Logging
from .moments import DEFAULT_CAP, STATS as PARTITION_STATS, MomentPolynomial, rho
from .polynomial import A, B, BX, BY, R, Kind, SparsePoly, lam, mu, ratio
from .series import (HalfPowerSeries, UniPoly, cumulants_to_moments, hermite,
    moments_to_cumulants, series_exp)
from .stats import Stats

log = Logging.get('engine')

ONE_SAMPLE = 'one'
TWO_SAMPLE = 'two'

class StatisticKind(NamedTuple):
    """
    Sample arity and variance estimator of a t-type statistic.
    """
    token: str
    arity: str
    estimator: str

    @property
    def ordinary(self):
        """
        Whether this is the one-sample biased or unbiased t-statistic.
        """
        return self.arity == ONE_SAMPLE and self.estimator in (
            'biased', 'unbiased')

KINDS = {
    'one-biased'        : StatisticKind('one-biased', ONE_SAMPLE, 'biased'),
    'one-unbiased'      : StatisticKind('one-unbiased', ONE_SAMPLE, 'unbiased'),
    'one-moderated'     : StatisticKind('one-moderated', ONE_SAMPLE, 'moderated'),
    'two-pooled'        : StatisticKind('two-pooled', TWO_SAMPLE, 'pooled'),
    'welch-biased'      : StatisticKind('welch-biased', TWO_SAMPLE, 'welch-biased'),
    'welch-unbiased'    : StatisticKind('welch-unbiased', TWO_SAMPLE,
        'welch-unbiased'),
    'two-moderated'     : StatisticKind('two-moderated', TWO_SAMPLE, 'moderated'),
}

def statistic_kind(token):
    """
    Looks up a statistic token such as `one-unbiased`.
    """
    try:
        return KINDS[token]
    except KeyError:
        raise ConfigError("unknown statistic {!r}, expected one of {}".format(
            token, ', '.join(KINDS)))

def a_mk(m, k):
    """
    Coefficient of the k'th term in the expansion of (1 + g)^(-m/2):
    (-1)^k / (k! 2^k) * prod_{j<k} (m + 2j).
    """
    product = 1
    for j in range(k):
        product *= m + 2 * j
    return Fraction((-1) ** k * product, math.factorial(k) * 2 ** k)

def _to_series(total, m, K):
    prefactor = SparsePoly.symbol(A, Fraction(-m, 2))
    return HalfPowerSeries(
        {2 * v - m: coeff * prefactor for v, coeff in total.items()}, K)

def sampling_moment_one(m, K, cap=DEFAULT_CAP):
    """
    E[theta^m] for the one-sample statistic sqrt(n) Xbar / s with
    s^2 = A + B (Xsbar - Xbar^2), as a series in n^(-1/2) truncated at
    n^(-K/2).

    Args:
        m: Moment order, 1 <= m <= K + 2.
        K: Truncation order.
        cap: Partition slot cap passed to rho.

    Returns:
        A HalfPowerSeries with cap K.
    """

    vmax = (K + m) // 2
    b_over_a = SparsePoly.symbol(B) * SparsePoly.symbol(A, -1)

    total = rho(m, 0, 'x', vmax, cap=cap)
    for k in range(1, K + 1):
        for i in range(k // 2 + 1):
            factor = a_mk(m, k - i) * (-1) ** i * math.comb(k - i, i)
            coeff = b_over_a ** (k - i) * factor
            total = total + rho(m + 2 * i, k - 2 * i, 'x', vmax, cap=cap) * coeff
    return _to_series(total, m, K)

def _in_pooled_size(poly, sample):
    """
    Rewrites powers of 1/n_x (or 1/n_y) as powers of b_x/n (b_y/n).
    """
    size = SparsePoly.symbol(ratio(sample))
    return MomentPolynomial({v: coeff * size ** v for v, coeff in poly.items()})

def _truncated_product(a, b, vmax):
    coeffs = {}
    for va, ca in a.items():
        for vb, cb in b.items():
            v = va + vb
            if v > vmax:
                continue
            term = ca * cb
            coeffs[v] = coeffs[v] + term if v in coeffs else term
    return MomentPolynomial(coeffs)

def sampling_moment_two(m, K, cap=DEFAULT_CAP):
    """
    E[theta^m] for the two-sample statistic sqrt(n) (Xbar - Ybar) / s with
    s^2 = A + Bx (Xsbar - Xbar^2) + By (Ysbar - Ybar^2) and n = (nx + ny)/2,
    as a series in n^(-1/2) truncated at n^(-K/2).
    """

    vmax = (K + m) // 2

    def x_part(i, j):
        return _in_pooled_size(rho(i, j, 'x', vmax, cap=cap), 'x')

    def y_part(i, j):
        return _in_pooled_size(rho(i, j, 'y', vmax, cap=cap), 'y')

    a_inv = SparsePoly.symbol(A, -1)
    bx = SparsePoly.symbol(BX)
    by = SparsePoly.symbol(BY)

    total = MomentPolynomial()
    for j in range(m + 1):
        inner = _truncated_product(x_part(m - j, 0), y_part(j, 0), vmax)
        for k in range(1, K + 1):
            for i in range(k // 2 + 1):
                outer = a_mk(m, k - i) * (-1) ** i * math.comb(k - i, i)
                outer = a_inv ** (k - i) * outer
                for u in range(k - 2 * i + 1):
                    for v in range(i + 1):
                        coeff = outer * math.comb(k - 2 * i, u) * math.comb(i, v)
                        coeff = coeff * bx ** (k - i - u - v) * by ** (u + v)
                        product = _truncated_product(
                            x_part(m - j + 2 * (i - v), k - 2 * i - u),
                            y_part(j + 2 * v, u), vmax)
                        if product:
                            inner = inner + product * coeff
        total = total + inner * ((-1) ** j * math.comb(m, j))
    return _to_series(total, m, K)

class KTable():
    """
    Cumulant coefficients k_{j,l}: the j'th cumulant of the statistic is
    n^(-(j-2)/2) (k_{j,1} + n^(-1) k_{j,2} + ...).
    """

    def __init__(self, entries, order):
        self.__entries = {key: value for key, value in entries.items() if value}
        self.__order = order

    def order(self):
        return self.__order

    def get(self, j, l):
        """
        Returns k_{j,l}, zero when absent.
        """
        return self.__entries.get((j, l), SparsePoly.zero())

    def r2(self):
        """
        The symbolic variance adjustment, k_{2,1}.
        """
        return self.get(2, 1)

    def items(self):
        for key in sorted(self.__entries):
            yield key, self.__entries[key]

    def substitute(self, mapping):
        return KTable({key: value.substitute(mapping)
            for key, value in self.__entries.items()}, self.__order)

    def to_json(self):
        return {'{},{}'.format(j, l): value.render()
            for (j, l), value in self.items()}

    @classmethod
    def from_json(cls, data, order):
        entries = {}
        for key, text in data.items():
            j, l = (int(part) for part in key.split(','))
            entries[(j, l)] = SparsePoly.parse(text)
        return cls(entries, order)

def extract_k_table(cumulants, K):
    """
    Collects k_{j,l} from cumulant series of orders 1..K+2, checking that
    every power below n^(-(j-2)/2) or off its parity is exactly zero.
    """

    entries = {}
    for j, series in enumerate(cumulants, start=1):
        for p, coeff in series.items():
            offset = p - (j - 2)
            if offset < 0 or offset % 2:
                raise Derivation.StructureError(
                    "cumulant {} has a nonzero coefficient at n^(-{}/2): {}".format(
                        j, p, coeff.render()))
            entries[(j, offset // 2 + 1)] = coeff
    return KTable(entries, K)

class ExpansionSet():
    """
    Variance adjustment r^2 and correction polynomials q_1..q_K in
    y = x / r. Coefficients of q_k are SparsePoly values that may contain
    powers of r; `hermite` holds the same q_k as (m, coefficient) pairs
    meaning coefficient * He_m(y).
    """

    def __init__(self, order, arity, r2, q, hermite_terms, lambda_form=False,
            k_table=None):
        self.__order = order
        self.__arity = arity
        self.__r2 = r2
        self.__q = list(q)
        self.__hermite = [list(terms) for terms in hermite_terms]
        self.__lambda_form = lambda_form
        self.__k_table = k_table

    def order(self):
        return self.__order

    def arity(self):
        return self.__arity

    def r2(self):
        return self.__r2

    def q(self, k):
        """
        Returns q_k as a UniPoly in y for 1 <= k <= K.
        """
        return self.__q[k - 1]

    def hermite_terms(self, k):
        return self.__hermite[k - 1]

    def lambda_form(self):
        return self.__lambda_form

    def k_table(self):
        return self.__k_table

    def substitute(self, mapping, lambda_form=None):
        """
        Applies a symbol substitution to r^2, every q_k and the k table.
        """
        return ExpansionSet(
            self.__order, self.__arity, self.__r2.substitute(mapping),
            [q.map(lambda c: c.substitute(mapping)) for q in self.__q],
            [[(m, c.substitute(mapping)) for m, c in terms]
                for terms in self.__hermite],
            self.__lambda_form if lambda_form is None else lambda_form,
            self.__k_table.substitute(mapping) if self.__k_table else None)

    def render_q(self, k):
        """
        Text form of q_k. The standardized-cumulant form is grouped by
        cumulant monomial and written in x.
        """
        if self.__lambda_form:
            return render_grouped(self.q(k), 'x')
        return self.q(k).render('y')

    def to_json(self, r2_form=None, with_k_table=False):
        """
        Canonical JSON rendering.

        Args:
            r2_form: Closed form of r^2 for the statistic, shown as "r2".
            with_k_table: Include the k_{j,l} table.
        """

        q_list = []
        for k in range(1, self.__order + 1):
            terms = []
            for power, coeff in self.q(k).terms():
                for r_power, part in sorted(coeff.collect(R).items()):
                    terms.append({'y': power, 'r': int(r_power),
                        'coef': part.render()})
            hermite_list = []
            for m, coeff in self.hermite_terms(k):
                for r_power, part in sorted(coeff.collect(R).items()):
                    hermite_list.append({'He': m, 'r': int(r_power),
                        'coef': part.render()})
            q_list.append({'k': k, 'text': self.render_q(k), 'terms': terms,
                'hermite': hermite_list})

        data = {
            'K'             : self.__order,
            'arity'         : self.__arity,
            'r2'            : r2_form if r2_form is not None
                else self.__r2.render(),
            'r2_symbolic'   : self.__r2.render(),
            'lambda_form'   : self.__lambda_form,
            'q'             : q_list,
        }
        if with_k_table and self.__k_table is not None:
            data['k_table'] = self.__k_table.to_json()
        return data

    @classmethod
    def from_json(cls, data):
        """
        Rebuilds an ExpansionSet from `to_json` output.
        """

        q_list = []
        hermite_list = []
        for entry in data['q']:
            coeffs = {}
            for term in entry['terms']:
                value = SparsePoly.parse(term['coef'])
                if term['r']:
                    value = value * SparsePoly.symbol(R, term['r'])
                coeffs[term['y']] = coeffs.get(term['y'], SparsePoly.zero()) + value
            size = max(coeffs) + 1 if coeffs else 0
            q_list.append(UniPoly([coeffs.get(i, 0) for i in range(size)], 'y'))

            terms = []
            for term in entry['hermite']:
                value = SparsePoly.parse(term['coef'])
                if term['r']:
                    value = value * SparsePoly.symbol(R, term['r'])
                terms.append((term['He'], value))
            hermite_list.append(terms)

        k_table = None
        if 'k_table' in data:
            k_table = KTable.from_json(data['k_table'], data['K'])
        return cls(data['K'], data['arity'], SparsePoly.parse(data['r2_symbolic']),
            q_list, hermite_list, data.get('lambda_form', False), k_table)

def build_q_polynomials(kt, K, arity=ONE_SAMPLE):
    """
    Builds q_1..q_K from a KTable.

    The cumulant series S(u) = sum k_{j,l} n^(-p/2) u^j / j! (without the
    leading r^2 u^2 / 2) is exponentiated; every term c u^m of the n^(-k/2)
    coefficient becomes -c r^(-m) He_{m-1}(y) in q_k.
    """

    one = UniPoly([1], 'u')
    cumulant_series = {}
    for (j, l), coeff in kt.items():
        if (j, l) == (2, 1):
            continue
        p = j - 2 + 2 * (l - 1)
        if p < 1 or p > K:
            continue
        term = UniPoly.monomial(j, coeff / math.factorial(j), 'u')
        cumulant_series[p] = cumulant_series[p] + term \
            if p in cumulant_series else term

    exponential = series_exp(HalfPowerSeries(cumulant_series, K), one)

    q_list = []
    hermite_list = []
    for k in range(1, K + 1):
        coefficient = exponential.get(k, UniPoly((), 'u'))
        q = UniPoly((), 'y')
        terms = []
        for m, c in coefficient.terms():
            if m == 0:
                raise Derivation.StructureError(
                    "term {} has a component free of u".format(k))
            value = -c * SparsePoly.symbol(R, -m)
            terms.append((m - 1, value))
            q = q + hermite(m - 1) * value
        q_list.append(q)
        hermite_list.append(sorted(terms))
    return ExpansionSet(K, arity, kt.r2(), q_list, hermite_list, k_table=kt)

def special_case_lambda_form(es, kind):
    """
    Rewrites the one-sample ordinary expansions over standardized cumulants
    l3, l4, ... with the scale fixed at sigma = 1. For the unbiased statistic
    q_k(x; r) = q_k(x/r; 1), so both estimators share these polynomials in y.
    """

    if not kind.ordinary:
        raise ConfigError("standardized cumulant form needs a one-sample "
            "biased or unbiased statistic, got {}".format(kind.token))

    orders = sorted({symbol.order for q_k in range(1, es.order() + 1)
        for _, coeff in es.q(q_k).terms()
        for symbol in coeff.symbols() if symbol.kind == Kind.MU_X})
    top = max(orders + [2])

    cumulants = [SparsePoly.zero(), SparsePoly.one()] + [
        SparsePoly.symbol(lam(j)) for j in range(3, top + 1)]
    raw = cumulants_to_moments(cumulants)

    mapping = {A: 1, B: 1, R: 1}
    for j in range(2, top + 1):
        mapping[mu(j)] = raw[j - 1]

    lambda_es = es.substitute(mapping, lambda_form=True)
    # r^2 stays symbolic so that binding recovers it from A and mu[2]
    return ExpansionSet(es.order(), es.arity(), es.r2(),
        [lambda_es.q(k) for k in range(1, es.order() + 1)],
        [lambda_es.hermite_terms(k) for k in range(1, es.order() + 1)],
        True, es.k_table())

def _content(values):
    numerators = [v.numerator for v in values]
    denominators = [v.denominator for v in values]
    return Fraction(math.gcd(*numerators), math.lcm(*denominators))

def render_grouped(poly, var='x'):
    """
    Renders a UniPoly with symbolic coefficients as a sum of
    `(content)*monomial*(integer polynomial in var)` groups, e.g.
    `(1/6)*l3*(2*x^2 + 1)`.
    """

    groups = {}
    for power, coeff in poly.terms():
        for factors, value in coeff.items():
            groups.setdefault(factors, {})[power] = value
    if not groups:
        return '0'

    parts = []
    for factors in sorted(groups, key=lambda f: (len(f), [
            (s.kind, s.order, e) for s, e in f])):
        powers = groups[factors]
        content = _content(list(powers.values()))
        if powers[max(powers)] < 0:
            content = -content

        inner = UniPoly([powers.get(i, 0) / content
            for i in range(max(powers) + 1)], var).render(var)
        monomial = SparsePoly.monomial(1, factors).render()

        pieces = []
        if abs(content) != 1:
            text = str(abs(content))
            pieces.append('({})'.format(text) if '/' in text else text)
        if monomial != '1':
            pieces.append(monomial)
        pieces.append('({})'.format(inner))
        body = '*'.join(pieces)

        if not parts:
            parts.append(body if content > 0 else '-' + body)
        else:
            parts.append(('+ ' if content > 0 else '- ') + body)
    return ' '.join(parts)

class BoundExpansion():
    """
    An ExpansionSet with every symbol bound to a float. Each q_k is held as
    a numpy coefficient array in y, so evaluation vectorises over x.
    """

    def __init__(self, es, bindings):
        r2 = es.r2().eval(bindings)
        if not r2 > 0:
            raise ComputeError("variance adjustment r^2 must be positive, "
                "got {}".format(r2))

        values = dict(bindings)
        values[R] = math.sqrt(r2)

        self.__order = es.order()
        self.__r2 = r2
        self.__r = values[R]
        self.__coeffs = []
        for k in range(1, es.order() + 1):
            q = es.q(k)
            self.__coeffs.append(np.array(
                [q.coefficient(i).eval(values) for i in range(q.degree() + 1)]
                or [0.0]))

    def order(self):
        return self.__order

    def r2(self):
        return self.__r2

    def r(self):
        return self.__r

    def coefficients(self, k):
        """
        Ascending coefficients of q_k in y.
        """
        return self.__coeffs[k - 1]

    def cumulative(self, n, x):
        """
        Returns F_0..F_K at x as an array of shape (K + 1,) + shape(x).
        """
        y = np.asarray(x, dtype=float) / self.__r
        finite = np.isfinite(y)
        y_finite = np.where(finite, y, 0.0)
        density = np.exp(-0.5 * y_finite * y_finite) / math.sqrt(2 * math.pi)
        values = [ndtr(y)]
        for k in range(1, self.__order + 1):
            # q_k(y) phi(y) vanishes at +-inf
            correction = npoly.polyval(y_finite, self.__coeffs[k - 1]) * density
            values.append(values[-1] + n ** (-k / 2) *
                np.where(finite, correction, 0.0))
        return np.array(values)

def evaluate_cdf(bound, n, x, terms):
    """
    Phi(x/r) + sum_{k<=terms} n^(-k/2) q_k(x; r) phi(x/r).

    Args:
        bound: A BoundExpansion.
        n: Sample size (may be fractional for two-sample statistics).
        x: Scalar or array.
        terms: Number of correction terms, 0..K.

    Returns:
        A float for scalar x, otherwise an array.
    """
    if terms < 0 or terms > bound.order():
        raise ConfigError("terms must be in [0, {}], got {}".format(
            bound.order(), terms))
    value = bound.cumulative(n, x)[terms]
    return float(value) if np.ndim(value) == 0 else value

def derive_symbolic(arity, K, cap=DEFAULT_CAP):
    """
    Runs the full symbolic pipeline: sampling moments 1..K+2, cumulants,
    k table and q polynomials.
    """

    moment = sampling_moment_one if arity == ONE_SAMPLE else sampling_moment_two
    moments = [moment(m, K, cap) for m in range(1, K + 3)]
    cumulants = moments_to_cumulants(moments)
    k_table = extract_k_table(cumulants, K)
    return build_q_polynomials(k_table, K, arity)

class Derivation():
    """
    Cached symbolic derivations, one per (arity, K).
    """

    class StructureError(ComputeError):
        """
        Thrown when a cumulant series carries a coefficient that must vanish
        """

    def __init__(self, config, cache=None):
        self.__config = config
        self.__cache = cache if cache is not None else \
            DerivationCache.instance(config)
        self.__cap = config.getint('combinatorics', 'cap')
        self.__stats = Stats()

    def stats(self):
        return self.__stats

    def run(self, arity, order):
        """
        Returns the ExpansionSet for the arity ('one' or 'two') and order,
        deriving it on a cache miss.
        """

        limit = aee_config.max_order(self.__config)
        if order < 0 or order > limit:
            raise ConfigError("order {} outside [0, {}]".format(order, limit))
        if arity not in (ONE_SAMPLE, TWO_SAMPLE):
            raise ConfigError("unknown arity {!r}".format(arity))

        key = 'aee:{}:{}'.format(arity, order)
        payload = self.__cache.get(key)
        if payload is not None:
            log.debug("derivation cache hit for %s", key)
            return ExpansionSet.from_json(payload)

        if order > 5:
            log.warning("order %d derivation is expensive; expect a long run",
                order)

        log.info("Deriving %s-sample expansion of order %d", arity, order)
        PARTITION_STATS.reset()
        with Stats.Timer() as timer:
            es = derive_symbolic(arity, order, self.__cap)
        self.__stats.update(Stats.SERIES, total=1, runtime=timer.elapsed())
        self.__stats += PARTITION_STATS
        log.info("Derivation of %s took %f s", key, timer.elapsed())
        self.__stats.dump(log)

        self.__cache.put(key, es.to_json(with_k_table=True))
        return es

def bind_expansion(payload, bindings):
    """
    Loads `expand` JSON output and binds it to numbers.
    """
    return BoundExpansion(ExpansionSet.from_json(payload), bindings)
