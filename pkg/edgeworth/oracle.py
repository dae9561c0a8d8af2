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
Monte Carlo sampling distributions of the supported statistics and exact
reference CDFs.

Replicates are drawn in fixed-size blocks. Block b always uses the stream
Generator(Philox(SeedSequence([seed, b]))), so results do not depend on how
many threads run the blocks.
"""

import dataclasses
import json
import math

from fractions import Fraction
from typing import Tuple

import numpy as np
import pandas as pd

from scipy.special import betainc

from .engine import ONE_SAMPLE, statistic_kind
from .errors import ComputeError, ConfigError
from .estimators import MomentSet
from .logging import Logging
from .tasks import SimulateBlockTask
from .utils import block_ranges, parse_number
from .worker import WorkerPool

log = Logging.get('oracle')

# Redraw attempts for degenerate replicates within one block
MAX_REDRAWS = 1000

@dataclasses.dataclass(frozen=True)
class GeneratorSpec():
    """
    Data generating distribution. Tokens:
    `gamma:shape:scale[:centered]`, `normal:mean:sd` and
    `discrete:s1,s2,...:p1,p2,...`.
    """
    family: str
    params: Tuple

    @classmethod
    def parse(cls, token):
        parts = token.split(':')
        family = parts[0]
        try:
            if family == 'gamma':
                if len(parts) not in (3, 4) or (len(parts) == 4 and
                        parts[3] != 'centered'):
                    raise ValueError("expected gamma:shape:scale[:centered]")
                shape, scale = parse_number(parts[1]), parse_number(parts[2])
                if shape <= 0 or scale <= 0:
                    raise ValueError("gamma parameters must be positive")
                return cls(family, (shape, scale, len(parts) == 4))

            if family == 'normal':
                if len(parts) != 3:
                    raise ValueError("expected normal:mean:sd")
                mean, sd = parse_number(parts[1]), parse_number(parts[2])
                if sd <= 0:
                    raise ValueError("sd must be positive")
                return cls(family, (mean, sd))

            if family == 'discrete':
                if len(parts) != 3:
                    raise ValueError("expected discrete:support:probs")
                support = tuple(parse_number(s) for s in parts[1].split(','))
                probs = tuple(parse_number(p) for p in parts[2].split(','))
                if len(support) != len(probs) or len(support) < 2:
                    raise ValueError("support and probs must match")
                if any(p <= 0 for p in probs) or sum(probs) != 1:
                    raise ValueError("probs must be positive and sum to 1")
                return cls(family, (support, probs))
        except ValueError as error:
            raise ConfigError("bad generator {!r}: {}".format(token, error))

        raise ConfigError("unknown generator family {!r}".format(family))

    def token(self):
        if self.family == 'gamma':
            shape, scale, centered = self.params
            return 'gamma:{}:{}{}'.format(shape, scale,
                ':centered' if centered else '')
        if self.family == 'normal':
            return 'normal:{}:{}'.format(*self.params)
        support, probs = self.params
        return 'discrete:{}:{}'.format(','.join(map(str, support)),
            ','.join(map(str, probs)))

    def mean(self):
        """
        The exact mean.
        """
        if self.family == 'gamma':
            shape, scale, centered = self.params
            return Fraction(0) if centered else shape * scale
        if self.family == 'normal':
            return self.params[0]
        support, probs = self.params
        return sum(s * p for s, p in zip(support, probs))

    def draw(self, rng, shape):
        """
        Draws an array of the given shape. Gamma variates come from numpy's
        Marsaglia-Tsang rejection sampler.
        """
        if self.family == 'gamma':
            k, scale, centered = self.params
            values = rng.standard_gamma(float(k), size=shape) * float(scale)
            return values - float(k * scale) if centered else values
        if self.family == 'normal':
            mean, sd = self.params
            return rng.normal(float(mean), float(sd), size=shape)
        support, probs = self.params
        return rng.choice(np.array([float(s) for s in support]), size=shape,
            p=np.array([float(p) for p in probs]))

    def moments(self, order=8):
        """
        Exact central moments mu_2..mu_order as a MomentSet.
        """
        if self.family == 'gamma':
            shape, scale, _ = self.params
            return MomentSet.gamma(shape, scale, order)
        if self.family == 'normal':
            return MomentSet.normal(self.params[1] ** 2, order)
        support, probs = self.params
        mean = self.mean()
        return MomentSet.create({j: sum(p * (s - mean) ** j
            for s, p in zip(support, probs)) for j in range(2, order + 1)})

@dataclasses.dataclass
class EmpiricalCdf():
    """
    Sorted Monte Carlo draws of a statistic.
    """
    values: np.ndarray
    reps: int
    seed: int
    degenerate: int = 0
    metadata: dict = dataclasses.field(default_factory=dict)

    def at(self, x):
        return empirical_cdf_at(self, x)

    def dump_csv(self, path):
        """
        Writes the sorted statistics as a one column CSV.
        """
        pd.DataFrame({'statistic': self.values}).to_csv(path, index=False,
            float_format='%.17g')

    def dump_metadata(self, path):
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(self.metadata, handle, indent=2, sort_keys=True)

class StatisticSampler():
    """
    Draws blocks of one statistic under one generator.
    """

    def __init__(self, gen, kind, sizes, seed, prior=None):
        """
        Args:
            gen: GeneratorSpec.
            kind: StatisticKind.
            sizes: (n,) for one sample, (nx, ny) for two samples.
            seed: Base seed.
            prior: ModeratedPrior for moderated statistics.
        """
        self.__gen = gen
        self.__kind = kind
        self.__sizes = tuple(int(s) for s in sizes)
        self.__seed = seed
        self.__prior = prior
        self.__mean = float(gen.mean())

        if kind.estimator == 'moderated' and prior is None:
            raise ConfigError("moderated statistic needs a prior (d0, s02)")

    def __statistic(self, rng, count):
        """
        Returns (theta, degenerate mask) for `count` replicates.
        """
        kind = self.__kind
        if kind.arity == ONE_SAMPLE:
            n, = self.__sizes
            x = self.__gen.draw(rng, (count, n)) - self.__mean
            xbar = x.mean(axis=1)
            ss = ((x - xbar[:, None]) ** 2).sum(axis=1)
            constant = np.ptp(x, axis=1) == 0

            if kind.estimator == 'biased':
                s2 = ss / n
            elif kind.estimator == 'unbiased':
                s2 = ss / (n - 1)
            else:
                d0, s02 = float(self.__prior.d0), float(self.__prior.s02)
                s2 = (d0 * s02 + ss) / (d0 + n - 1)
                constant &= d0 * s02 == 0
            diff = xbar
            n_eff = n
        else:
            nx, ny = self.__sizes
            x = self.__gen.draw(rng, (count, nx)) - self.__mean
            y = self.__gen.draw(rng, (count, ny)) - self.__mean
            xbar = x.mean(axis=1)
            ybar = y.mean(axis=1)
            ssx = ((x - xbar[:, None]) ** 2).sum(axis=1)
            ssy = ((y - ybar[:, None]) ** 2).sum(axis=1)
            constant = (np.ptp(x, axis=1) == 0) & (np.ptp(y, axis=1) == 0)

            n_eff = (nx + ny) / 2
            bx = n_eff / nx
            by = n_eff / ny
            if kind.estimator == 'welch-biased':
                s2 = bx * ssx / nx + by * ssy / ny
            elif kind.estimator == 'welch-unbiased':
                s2 = bx * ssx / (nx - 1) + by * ssy / (ny - 1)
            elif kind.estimator == 'pooled':
                cxy = n_eff / (n_eff - 1)
                s2 = cxy * (bx + by) * (ssx + ssy) / (nx + ny)
            else:
                d0, s02 = float(self.__prior.d0), float(self.__prior.s02)
                s2 = (bx + by) * (d0 * s02 + ssx + ssy) / (d0 + nx + ny - 2)
                constant &= d0 * s02 == 0
            diff = xbar - ybar

        with np.errstate(divide='ignore', invalid='ignore'):
            theta = math.sqrt(n_eff) * diff / np.sqrt(s2)
        return theta, constant

    def sample_block(self, block_index, count):
        """
        Draws one block. Degenerate (zero variance) replicates are redrawn
        from a second stream dedicated to the block.

        Returns:
            (values, number of degenerate draws)
        """
        rng = np.random.Generator(np.random.Philox(
            np.random.SeedSequence([self.__seed, block_index])))
        values, constant = self.__statistic(rng, count)

        degenerate = int(constant.sum())
        if degenerate:
            redraw = np.random.Generator(np.random.Philox(
                np.random.SeedSequence([self.__seed, block_index, 1])))
            attempts = 0
            while constant.any():
                attempts += 1
                if attempts > MAX_REDRAWS:
                    raise ComputeError("block {} keeps drawing degenerate "
                        "samples".format(block_index))
                index = np.flatnonzero(constant)
                fresh, fresh_constant = self.__statistic(redraw, len(index))
                values[index] = fresh
                constant[index] = fresh_constant
                degenerate += int(fresh_constant.sum())
        return values, degenerate

def sample_statistic(gen, kind, sizes, reps, seed, config, prior=None,
        pool=None, pool_size=None):
    """
    Simulates the sampling distribution of a statistic.

    Args:
        gen: GeneratorSpec or token.
        kind: StatisticKind or token.
        sizes: (n,) or (nx, ny).
        reps: Number of replicates, at least 1.
        seed: Base seed.
        config: Configuration ([simulation] and [pool] sections).
        prior: ModeratedPrior for moderated statistics.
        pool: Optional WorkerPool to run on.
        pool_size: Thread count when a pool is created here.

    Returns:
        An EmpiricalCdf.
    """

    if isinstance(gen, str):
        gen = GeneratorSpec.parse(gen)
    if isinstance(kind, str):
        kind = statistic_kind(kind)
    if reps < 1:
        raise ConfigError("reps must be at least 1, got {}".format(reps))
    expected = 1 if kind.arity == ONE_SAMPLE else 2
    if len(sizes) != expected or min(sizes) < 2:
        raise ConfigError("{} needs {} sample size(s) of at least 2".format(
            kind.token, expected))

    sampler = StatisticSampler(gen, kind, sizes, seed, prior)
    block_size = config.getint('simulation', 'block_size')

    def run(active):
        for index, _, count in block_ranges(reps, block_size):
            active.enqueue(SimulateBlockTask(sampler, index, count))
        return active.wait()

    if pool is None:
        with WorkerPool(config, size=pool_size) as own:
            results = run(own)
    else:
        results = run(pool)

    blocks = [results[index] for index in sorted(results)]
    values = np.sort(np.concatenate([block[0] for block in blocks]))
    degenerate = sum(block[1] for block in blocks)

    rate = degenerate / reps
    limit = config.getfloat('simulation', 'max_degenerate_rate')
    if degenerate:
        log.warning("%d degenerate replicates redrawn (rate %g)",
            degenerate, rate)
    if rate > limit:
        raise ComputeError("degenerate replicate rate {:g} exceeds {:g}".format(
            rate, limit))

    metadata = {
        'gen'       : gen.token(),
        'kind'      : kind.token,
        'n'         : list(sizes) if len(sizes) > 1 else sizes[0],
        'reps'      : reps,
        'seed'      : seed,
        'degenerate': degenerate,
    }
    if prior is not None:
        metadata['prior'] = {'d0': str(prior.d0), 's02': str(prior.s02)}
    return EmpiricalCdf(values, reps, seed, degenerate, metadata)

def student_t_cdf(df, x):
    """
    Student t CDF through the regularized incomplete beta function.
    """
    if df <= 0:
        raise ConfigError("degrees of freedom must be positive")
    x = np.asarray(x, dtype=float)
    tail = 0.5 * betainc(df / 2.0, 0.5, df / (df + x * x))
    value = np.where(x > 0, 1.0 - tail, tail)
    return float(value) if value.ndim == 0 else value

def empirical_cdf_at(e, x):
    """
    Proportion of simulated values <= x.
    """
    counts = np.searchsorted(e.values, x, side='right')
    value = counts / len(e.values)
    return float(value) if np.ndim(value) == 0 else value
