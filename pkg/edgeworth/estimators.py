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
Variance estimator constants for the supported statistics and moment
estimates from data.

Every estimator is written as s^2 = A + B (Xsbar - Xbar^2) (one sample) or
s^2 = A + Bx (Xsbar - Xbar^2) + By (Ysbar - Ybar^2) (two samples); the
classes here produce A, B, r^2 = sigma^2 / A and the size ratios, exactly
when the inputs are rational.
"""

import dataclasses
import math

from fractions import Fraction
from typing import Dict, Optional

import numpy as np

from .engine import ONE_SAMPLE, statistic_kind
from .errors import ComputeError, ConfigError
from .polynomial import A, B, BX, BY, lam, mu, ratio, sigma2
from .series import cumulants_to_moments, moments_to_cumulants

# Closed forms of r^2 by statistic
R2_FORMS = {
    'one-biased'        : '1',
    'one-unbiased'      : '(n-1)/n',
    'one-moderated'     : '(d0+n-1)/(d0*s02/sigma2+n)',
    'two-pooled'        : '(n-1)/n',
    'welch-biased'      : '1',
    'welch-unbiased'    : '(bx*sigma2x+by*sigma2y)/A',
    'two-moderated'     : '(d0+dg)/(d0*s02/sigma2+Cxy*dg)',
}

# Largest moment order estimated from data
MAX_DATA_ORDER = 8

@dataclasses.dataclass(frozen=True)
class ModeratedPrior():
    """
    Empirical Bayes prior of a moderated statistic, treated as known.
    """
    d0: Fraction
    s02: Fraction

    def __post_init__(self):
        if self.d0 < 0:
            raise ConfigError("prior degrees of freedom must be >= 0")
        if self.s02 <= 0:
            raise ConfigError("prior variance must be positive")

@dataclasses.dataclass(frozen=True)
class MomentSet():
    """
    Central moments mu_2..mu_M of one sample and the standardized cumulants
    l_3..l_M derived from them.
    """
    sigma2: object
    mu: Dict[int, object]
    lambdas: Dict[int, object]
    n_obs: int = 0

    def order(self):
        return max(self.mu) if self.mu else 1

    @classmethod
    def create(cls, mu_values, n_obs=0):
        """
        Builds a MomentSet from central moments {2: mu_2, 3: mu_3, ...}.
        """
        mu_values = dict(mu_values)
        if 2 not in mu_values:
            raise ConfigError("moment set needs at least mu_2")
        sigma = mu_values[2]
        lambdas = {}
        if sigma > 0:
            lambdas = standardized_cumulants_from(mu_values)
        return cls(sigma, mu_values, lambdas, n_obs)

    @classmethod
    def from_cumulants(cls, cumulants, n_obs=0):
        """
        Builds an exact MomentSet from cumulants {2: k_2, 3: k_3, ...} of a
        mean-zero distribution.
        """
        order = max(cumulants)
        values = [Fraction(0)] + [Fraction(cumulants.get(j, 0))
            for j in range(2, order + 1)]
        raw = cumulants_to_moments(values)
        return cls.create({j: raw[j - 1] for j in range(2, order + 1)}, n_obs)

    @classmethod
    def normal(cls, sigma2_value, order=8, n_obs=0):
        """
        Moments of a normal distribution with the given variance.
        """
        return cls.from_cumulants({2: Fraction(sigma2_value),
            order: Fraction(0)}, n_obs)

    @classmethod
    def gamma(cls, shape, scale, order=8, n_obs=0):
        """
        Moments of a centered gamma distribution, with cumulants
        k_j = shape (j-1)! scale^j.
        """
        shape = Fraction(shape)
        scale = Fraction(scale)
        return cls.from_cumulants({j: shape * math.factorial(j - 1) * scale ** j
            for j in range(2, order + 1)}, n_obs)

    def to_json(self, source='declared'):
        return {
            'n'         : self.n_obs,
            'sigma2'    : _number_json(self.sigma2),
            'mu'        : [_number_json(self.mu[j])
                for j in range(2, self.order() + 1)],
            'source'    : source,
        }

    @classmethod
    def from_json(cls, data):
        """
        Reads one sample of the moment-spec JSON. Numbers may be given as
        JSON numbers or as "p/q" strings, which stay exact.
        """
        try:
            values = [_number(v) for v in data['mu']]
            n_obs = int(data.get('n', 0))
        except (KeyError, TypeError, ValueError) as error:
            raise ConfigError("malformed moment spec: {}".format(error))
        mu_values = {j + 2: value for j, value in enumerate(values)}
        if 'sigma2' in data:
            mu_values.setdefault(2, _number(data['sigma2']))
            if mu_values[2] != _number(data['sigma2']):
                raise ConfigError("moment spec sigma2 differs from mu[2]")
        return cls.create(mu_values, n_obs)

    def pooled(self, other):
        """
        Size-weighted pooling of two moment sets about their own means.
        """
        weight_x = self.n_obs or 1
        weight_y = other.n_obs or 1
        total = weight_x + weight_y
        orders = range(2, min(self.order(), other.order()) + 1)
        return MomentSet.create({j: (self.mu[j] * weight_x +
            other.mu[j] * weight_y) / total for j in orders},
            self.n_obs + other.n_obs)

def _number(value):
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    return float(value)

def _number_json(value):
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    return float(value)

def load_moment_spec(data):
    """
    Reads a moment-spec JSON document.

    Returns:
        A MomentSet, or an (x, y) pair for the two-sample variant.
    """
    if 'x' in data or 'y' in data:
        try:
            return MomentSet.from_json(data['x']), MomentSet.from_json(data['y'])
        except KeyError as error:
            raise ConfigError("two-sample moment spec lacks {}".format(error))
    return MomentSet.from_json(data)

@dataclasses.dataclass(frozen=True)
class EstimatorSpec():
    """
    Constants of one statistic at given sample sizes. One-sample specs fill
    B; two-sample specs fill Bx, By, bx and by.
    """
    kind: object
    n: object
    A: object
    r2: object
    B: Optional[object] = None
    Bx: Optional[object] = None
    By: Optional[object] = None
    bx: Optional[object] = None
    by: Optional[object] = None

    class DegenerateError(ComputeError):
        """
        Thrown when the data leave no usable variance
        """

    def bindings(self, moments, moments_y=None):
        """
        Numeric symbol bindings for evaluating an expansion.

        Args:
            moments: MomentSet of the x sample.
            moments_y: MomentSet of the y sample for two-sample statistics.
                Pooled statistics bind the pooled moments to both samples.

        Returns:
            Dict of SymbolId -> float.
        """

        values = {A: float(self.A)}
        if self.kind.arity == ONE_SAMPLE:
            for j, value in moments.lambdas.items():
                values[lam(j)] = float(value)
            values[B] = float(self.B)
            values[sigma2('x')] = float(moments.sigma2)
            for j, value in moments.mu.items():
                values[mu(j, 'x')] = float(value)
            return values

        if moments_y is None:
            raise ConfigError("two-sample statistics need moments of both samples")
        if self.kind.estimator in ('pooled', 'moderated'):
            moments = moments_y = moments.pooled(moments_y)

        values.update({BX: float(self.Bx), BY: float(self.By),
            ratio('x'): float(self.bx), ratio('y'): float(self.by),
            sigma2('x'): float(moments.sigma2),
            sigma2('y'): float(moments_y.sigma2)})
        for j, value in moments.mu.items():
            values[mu(j, 'x')] = float(value)
        for j, value in moments_y.mu.items():
            values[mu(j, 'y')] = float(value)
        return values

def _check_variance(value, name='sigma2'):
    if not value > 0:
        raise EstimatorSpec.DegenerateError(
            "{} must be positive, got {}".format(name, value))

def one_sample_spec(kind, n, sigma2_value, prior=None):
    """
    Constants of a one-sample statistic.

    Args:
        kind: StatisticKind or token.
        n: Sample size, at least 2.
        sigma2_value: Variance sigma^2.
        prior: ModeratedPrior, required for the moderated statistic.

    Returns:
        An EstimatorSpec.
    """

    if isinstance(kind, str):
        kind = statistic_kind(kind)
    if kind.arity != ONE_SAMPLE:
        raise ConfigError("{} is not a one-sample statistic".format(kind.token))
    if n < 2:
        raise ConfigError("sample size must be at least 2, got {}".format(n))
    _check_variance(sigma2_value)

    n = Fraction(n)
    if kind.estimator == 'biased':
        return EstimatorSpec(kind, n, sigma2_value, Fraction(1), B=Fraction(1))

    if kind.estimator == 'unbiased':
        c = n / (n - 1)
        return EstimatorSpec(kind, n, c * sigma2_value, 1 / c, B=c)

    if prior is None:
        raise ConfigError("moderated statistic needs a prior (d0, s02)")
    d0, s02 = prior.d0, prior.s02
    return EstimatorSpec(kind, n,
        A=(d0 * s02 + n * sigma2_value) / (d0 + n - 1),
        B=n / (d0 + n - 1),
        r2=(d0 + n - 1) / (d0 * s02 / sigma2_value + n))

def two_sample_spec(kind, nx, ny, sigma2x, sigma2y, prior=None,
        equal_variance=False):
    """
    Constants of a two-sample statistic with n = (nx + ny) / 2,
    bx = n / nx and by = n / ny. Pooled and moderated statistics use the
    size-weighted pooled variance.
    """

    if isinstance(kind, str):
        kind = statistic_kind(kind)
    if kind.arity == ONE_SAMPLE:
        raise ConfigError("{} is not a two-sample statistic".format(kind.token))
    if nx < 2 or ny < 2:
        raise ConfigError("sample sizes must be at least 2, got {} and {}".format(
            nx, ny))
    _check_variance(sigma2x, 'sigma2x')
    _check_variance(sigma2y, 'sigma2y')

    nx = Fraction(nx)
    ny = Fraction(ny)
    n = (nx + ny) / 2
    bx = n / nx
    by = n / ny

    if kind.estimator == 'welch-biased':
        return EstimatorSpec(kind, n, bx * sigma2x + by * sigma2y, Fraction(1),
            Bx=bx, By=by, bx=bx, by=by)

    if kind.estimator == 'welch-unbiased':
        cx = nx / (nx - 1)
        cy = ny / (ny - 1)
        a = cx * bx * sigma2x + cy * by * sigma2y
        return EstimatorSpec(kind, n, a, (bx * sigma2x + by * sigma2y) / a,
            Bx=cx * bx, By=cy * by, bx=bx, by=by)

    pooled = (nx * sigma2x + ny * sigma2y) / (nx + ny)
    cxy = n / (n - 1)

    if kind.estimator == 'pooled':
        if not equal_variance:
            raise ConfigError("pooled statistic requires declaring equal variances")
        return EstimatorSpec(kind, n, cxy * (bx + by) * pooled, 1 / cxy,
            Bx=cxy * by, By=cxy * bx, bx=bx, by=by)

    if prior is None:
        raise ConfigError("moderated statistic needs a prior (d0, s02)")
    d0, s02 = prior.d0, prior.s02
    dg = nx + ny - 2
    return EstimatorSpec(kind, n,
        A=(bx + by) * (d0 * s02 + cxy * dg * pooled) / (d0 + dg),
        r2=(d0 + dg) / (d0 * s02 / pooled + cxy * dg),
        Bx=cxy * dg * by / (d0 + dg), By=cxy * dg * bx / (d0 + dg),
        bx=bx, by=by)

def central_moments_from_data(data, M):
    """
    Plug-in central moments: mean centred power sums divided by the number
    of observations.

    Args:
        data: Sequence of reals.
        M: Highest moment order, at most 8.

    Returns:
        A MomentSet with float values.
    """

    values = np.asarray(data, dtype=float)
    if values.ndim != 1 or len(values) < 2:
        raise ConfigError("need at least two observations")
    if not np.all(np.isfinite(values)):
        raise ConfigError("data contain non-finite values")
    if M < 2 or M > MAX_DATA_ORDER:
        raise ConfigError("moment order must be in [2, {}]".format(MAX_DATA_ORDER))

    centered = values - values.mean()
    mu_values = {j: float(np.mean(centered ** j)) for j in range(2, M + 1)}
    return MomentSet.create(mu_values, len(values))

def standardized_cumulants_from(mu_values):
    """
    Standardized cumulants l_j = k_j / sigma^j for j >= 3 from central
    moments {2: mu_2, ...}. Works on Fractions or floats.
    """
    order = max(mu_values)
    sigma_sq = mu_values[2]
    if not sigma_sq > 0:
        raise EstimatorSpec.DegenerateError("sigma2 must be positive")

    raw = [0] + [mu_values[j] for j in range(2, order + 1)]
    cumulants = moments_to_cumulants(raw)
    lambdas = {}
    for j in range(3, order + 1):
        if isinstance(sigma_sq, Fraction) and j % 2 == 0:
            lambdas[j] = cumulants[j - 1] / sigma_sq ** (j // 2)
        else:
            lambdas[j] = float(cumulants[j - 1]) / float(sigma_sq) ** (j / 2)
    return lambdas

def standardized_cumulants(ms):
    """
    Returns [l_3, ..., l_M] of a MomentSet.
    """
    lambdas = standardized_cumulants_from(ms.mu)
    return [lambdas[j] for j in sorted(lambdas)]
