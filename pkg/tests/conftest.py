import itertools

from fractions import Fraction

import pytest

from edgeworth import config as aee_config
from edgeworth.cache import MemoryCache
from edgeworth.engine import Derivation
from edgeworth.polynomial import mu

# Centered discrete distributions: (support, probabilities)
TWO_POINT = ((Fraction(-1), Fraction(2)), (Fraction(2, 3), Fraction(1, 3)))
THREE_POINT = ((Fraction(-1), Fraction(0), Fraction(2)),
    (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
WIDE_THREE_POINT = ((Fraction(-2), Fraction(1), Fraction(4)),
    (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)))
DISTRIBUTIONS = [TWO_POINT, THREE_POINT, WIDE_THREE_POINT]

def central_moment(dist, order):
    support, probs = dist
    return sum(p * s ** order for s, p in zip(support, probs))

def moment_bindings(dist, top=12, sample='x'):
    return {mu(j, sample): central_moment(dist, j) for j in range(2, top + 1)}

def outcomes(dist, n):
    """
    Yields (values, probability) for every joint outcome of n draws.
    """
    support, probs = dist
    for index in itertools.product(range(len(support)), repeat=n):
        probability = Fraction(1)
        for i in index:
            probability *= probs[i]
        yield [support[i] for i in index], probability

def make_config(directory):
    config = aee_config.load(environ={})
    config.set('logging', 'dir', str(directory))
    config.set('logging', 'shell', 'False')
    config.set('pool', 'size', '2')
    config.set('simulation', 'block_size', '5000')
    return config

@pytest.fixture
def config(tmp_path):
    return make_config(tmp_path / 'logs')

@pytest.fixture(scope='session')
def derivation(tmp_path_factory):
    """
    One derivation shared by the whole session so each (arity, K) is built
    once.
    """
    config = make_config(tmp_path_factory.mktemp('logs'))
    return Derivation(config, MemoryCache())
