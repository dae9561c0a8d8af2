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
Exact expectations of products of sample means.

nu(k, l) = E[Xbar^k (X^2bar)^l] and rho(i, j) = E[Xbar^i Xsbar^j], with
Xsbar = X^2bar - sigma^2, are found by enumerating set partitions of the
k + l (or i + j) index slots. Every block of a partition is a coincidence of
sample indices and contributes one moment; a partition with b blocks
contributes the falling factorial n(n-1)...(n-b+1) / n^(k+l).
"""

import collections
import functools
import math

from fractions import Fraction

from .errors import ComputeError
from .logging import Logging
from .polynomial import SparsePoly, mu, sigma2
from .stats import Stats

log = Logging.get('moments')

# Partition counters, dumped by callers that want derivation stats
STATS = Stats()

# Default bound on the number of slots
DEFAULT_CAP = 12

class Partitions():
    """
    Helpers for set partition enumeration
    """

    class CapError(ComputeError):
        """
        Thrown when an enumeration exceeds the configured slot cap
        """

    @staticmethod
    @functools.lru_cache(maxsize=None)
    def bell(n):
        """
        Bell number B(n), the number of set partitions of n items.
        """
        row = [1]
        for _ in range(n):
            nxt = [row[-1]]
            for value in row:
                nxt.append(nxt[-1] + value)
            row = nxt
        return row[0]

@functools.lru_cache(maxsize=None)
def stirling_first(b):
    """
    Signed Stirling numbers of the first kind s(b, i) for i = 0..b, so that
    n(n-1)...(n-b+1) = sum_i s(b, i) n^i.
    """
    row = [1]
    for m in range(b):
        nxt = [0] * (len(row) + 1)
        for i, value in enumerate(row):
            nxt[i + 1] += value
            nxt[i] -= m * value
        row = nxt
    return tuple(row)

def enumerate_partitions(slots, visitor, vanishing=None, min_blocks=0,
        cap=DEFAULT_CAP):
    """
    Visits every set partition of range(slots) exactly once, using a
    restricted growth recursion.

    Args:
        slots: Number of labelled slots.
        visitor: Called with the list of blocks (lists of slot indices). The
            list is reused between calls and must not be kept.
        vanishing: Optional per-slot flags. A partition in which a flagged
            slot sits alone in its block is skipped, and branches that
            cannot avoid such singletons are cut early.
        min_blocks: Skip partitions with fewer blocks; used to prune by
            expansion order.
        cap: Maximum number of slots.

    Returns:
        The number of partitions visited.
    """

    if slots > cap:
        raise Partitions.CapError(
            "{} slots exceeds the cap of {} (Bell({}) = {} partitions)".format(
                slots, cap, slots, Partitions.bell(slots)))

    vanishing = list(vanishing) if vanishing is not None else [False] * slots

    # Remaining flagged / unflagged slots from each position onwards
    rest_vanishing = [0] * (slots + 1)
    rest_plain = [0] * (slots + 1)
    for i in range(slots - 1, -1, -1):
        rest_vanishing[i] = rest_vanishing[i + 1] + vanishing[i]
        rest_plain[i] = rest_plain[i + 1] + (not vanishing[i])

    blocks = []
    counts = [0, 0]

    def recurse(i, deficit):
        remaining = slots - i
        if deficit > remaining:
            counts[1] += 1
            return
        reachable = min(rest_plain[i] + rest_vanishing[i] // 2,
            remaining - deficit)
        if len(blocks) + reachable < min_blocks:
            counts[1] += 1
            return

        if i == slots:
            counts[0] += 1
            visitor(blocks)
            return

        for block in blocks:
            lone = len(block) == 1 and vanishing[block[0]]
            block.append(i)
            recurse(i + 1, deficit - lone)
            block.pop()

        blocks.append([i])
        recurse(i + 1, deficit + vanishing[i])
        blocks.pop()

    with Stats.Timer() as timer:
        recurse(0, 0)

    STATS.update(Stats.PARTITION, total=counts[0], pruned=counts[1],
        runtime=timer.elapsed())
    return counts[0]

class MomentPolynomial():
    """
    Polynomial in 1/n: a mapping v -> SparsePoly standing for
    sum_v coeff_v * n^(-v).
    """

    __slots__ = ('_coeffs',)

    def __init__(self, coeffs=None):
        self._coeffs = {v: c for v, c in (coeffs or {}).items() if c}

    def orders(self):
        return sorted(self._coeffs)

    def coefficient(self, v):
        return self._coeffs.get(v, SparsePoly.zero())

    def items(self):
        for v in self.orders():
            yield v, self._coeffs[v]

    def __bool__(self):
        return bool(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, MomentPolynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __repr__(self):
        return 'MomentPolynomial({})'.format(
            {v: str(c) for v, c in self.items()})

    def __add__(self, other):
        coeffs = dict(self._coeffs)
        for v, c in other._coeffs.items():
            coeffs[v] = coeffs[v] + c if v in coeffs else c
        return MomentPolynomial(coeffs)

    def __neg__(self):
        return MomentPolynomial({v: -c for v, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, SparsePoly)):
            return MomentPolynomial(
                {v: c * other for v, c in self._coeffs.items()})
        if not isinstance(other, MomentPolynomial):
            return NotImplemented
        coeffs = {}
        for va, ca in self._coeffs.items():
            for vb, cb in other._coeffs.items():
                term = ca * cb
                v = va + vb
                coeffs[v] = coeffs[v] + term if v in coeffs else term
        return MomentPolynomial(coeffs)

    __rmul__ = __mul__

    def substitute(self, mapping):
        return MomentPolynomial(
            {v: c.substitute(mapping) for v, c in self._coeffs.items()})

    def evaluate(self, n, bindings):
        """
        Exact value at sample size n with rational symbol bindings.
        """
        n = Fraction(n)
        return sum((c.eval(bindings, exact=True) / n ** v
            for v, c in self._coeffs.items()), Fraction(0))

def _moment(order, sample):
    if order == 0:
        return SparsePoly.one()
    if order == 1:
        return SparsePoly.zero()
    return SparsePoly.symbol(mu(order, sample))

@functools.lru_cache(maxsize=None)
def _block_moment(singles, squares, centered, sample, symbolic_sigma):
    """
    E[X^a (X^2 - sigma^2)^c] for one block, or E[X^(a+2c)] when the square
    slots are not centered.
    """
    if not centered:
        return _moment(singles + 2 * squares, sample)

    if symbolic_sigma:
        variance = SparsePoly.symbol(sigma2(sample))
    else:
        variance = _moment(2, sample)

    total = SparsePoly.zero()
    for d in range(squares + 1):
        term = _moment(singles + 2 * d, sample)
        if term:
            total = total + term * (-variance) ** (squares - d) * \
                math.comb(squares, d)
    return total

@functools.lru_cache(maxsize=None)
def _tally(singles, squares, centered, min_blocks, cap):
    """
    Counts partitions by block count and block-type multiset.
    """
    slots = singles + squares
    tally = collections.Counter()

    def visit(blocks):
        key = tuple(sorted(
            (sum(1 for s in block if s < singles),
             sum(1 for s in block if s >= singles))
            for block in blocks))
        tally[key] += 1

    vanishing = [True] * singles + [centered] * squares
    enumerate_partitions(slots, visit, vanishing, min_blocks, cap)
    return dict(tally)

@functools.lru_cache(maxsize=None)
def _expectation(singles, squares, centered, sample, max_order,
        symbolic_sigma, cap):
    total = singles + squares
    min_blocks = total - max_order if max_order is not None else 0

    coeffs = collections.defaultdict(SparsePoly.zero)
    for key, count in _tally(singles, squares, centered, min_blocks,
            cap).items():
        product = SparsePoly.constant(count)
        for a, c in key:
            product = product * _block_moment(a, c, centered, sample,
                symbolic_sigma)
            if not product:
                break
        if not product:
            continue

        for i, s in enumerate(stirling_first(len(key))):
            v = total - i
            if not s or (max_order is not None and v > max_order):
                continue
            coeffs[v] = coeffs[v] + product * s

    log.debug("expectation (%d, %d, centered=%s, %s) up to order %s: %d terms",
        singles, squares, centered, sample, max_order, len(coeffs))
    return MomentPolynomial(coeffs)

def nu(k, l, sample='x', max_order=None, cap=DEFAULT_CAP):
    """
    E[Xbar^k (X^2bar)^l] as a polynomial in 1/n over the central moments of
    the chosen sample.

    Args:
        k: Power of the sample mean.
        l: Power of the mean of squares.
        sample: 'x' or 'y'.
        max_order: Drop every n^(-v) with v above this; None keeps all.
        cap: Maximum k + l.

    Returns:
        A MomentPolynomial.
    """
    return _expectation(k, l, False, sample, max_order, False, cap)

def rho(i, j, sample='x', max_order=None, symbolic_sigma=False,
        cap=DEFAULT_CAP):
    """
    E[Xbar^i Xsbar^j] as a polynomial in 1/n. With symbolic_sigma the
    variance inside Xsbar is kept as its own symbol instead of mu[2].
    """
    return _expectation(i, j, True, sample, max_order, symbolic_sigma, cap)
