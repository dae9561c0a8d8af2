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
Tail diagnostics for truncated expansions: monotonicity and [0, 1] checks
per tail, usable order selection and quantile inversion.
"""

import numpy as np

from scipy import optimize

from .errors import ComputeError, ConfigError
from .logging import Logging

log = Logging.get('diagnostics')

LEFT = 'left'
RIGHT = 'right'
SIDES = (LEFT, RIGHT)

# Defaults matching the [diagnostics] config section
DEFAULT_WIDTH = 6.0
DEFAULT_STEP = 0.01
DEFAULT_TOLERANCE = 1e-12
DEFAULT_BISECT_TOL = 1e-10

class TailReport():
    """
    Per tail and per number of correction terms: whether the truncated
    expansion is a valid CDF on the scanned grid, and where it first fails.
    """

    class UnusableError(ComputeError):
        """
        Thrown when a quantile is requested from an unusable expansion
        """

    def __init__(self, order, lo, hi, step, results):
        """
        Args:
            order: K, the largest number of correction terms.
            lo, hi, step: The scanned grid.
            results: Dict side -> list of (usable, violation_x) for
                terms = 0..K.
        """
        self.__order = order
        self.__lo = lo
        self.__hi = hi
        self.__step = step
        self.__results = results

    def order(self):
        return self.__order

    def bounds(self, side):
        """
        The scanned interval of one side.
        """
        return (self.__lo, 0.0) if side == LEFT else (0.0, self.__hi)

    def step(self):
        return self.__step

    def usable(self, side, terms):
        return self.__results[side][terms][0]

    def violation_x(self, side, terms):
        return self.__results[side][terms][1]

    def usable_order(self, side):
        return usable_order(self, side)

    def to_json(self):
        """
        One object per side with the per-term results and the usable orders
        of both sides.
        """
        orders = {side: self.usable_order(side) for side in SIDES}
        return [{
            'side'          : side,
            'per_term'      : [{
                'terms'         : k,
                'usable'        : bool(usable),
                'violation_x'   : violation,
            } for k, (usable, violation) in enumerate(self.__results[side])],
            'usable_order'  : orders,
        } for side in SIDES]

def _grid(lo, hi, step):
    # Anchored at 0 so that halving the step keeps every old point
    left = -np.arange(0.0, -lo + step / 2, step)[::-1]
    right = np.arange(0.0, hi + step / 2, step)
    return left, right

def _first_violation(xs, values, tolerance):
    bad = (values < -tolerance) | (values > 1 + tolerance)
    drops = np.diff(values) < -tolerance
    candidates = []
    if bad.any():
        candidates.append(int(np.argmax(bad)))
    if drops.any():
        candidates.append(int(np.argmax(drops)) + 1)
    if not candidates:
        return None
    return float(xs[min(candidates)])

def tail_scan(bound, n, lo=None, hi=None, step=DEFAULT_STEP,
        tolerance=DEFAULT_TOLERANCE, width=DEFAULT_WIDTH):
    """
    Scans every truncated expansion F_0..F_K on a grid.

    The left side is scanned from 0 outwards over x <= 0 and the right side
    from 0 outwards over x >= 0. A side is unusable from the first point
    where F falls outside [0, 1] or decreases (for the left side walking
    outwards means increasing F must not increase).

    Args:
        bound: A BoundExpansion.
        n: Sample size.
        lo, hi: Grid limits; default to -/+ width * r.
        step: Grid step.
        tolerance: Slack for the monotonicity and bound checks.

    Returns:
        A TailReport.
    """

    lo = -width * bound.r() if lo is None else lo
    hi = width * bound.r() if hi is None else hi
    if step <= 0:
        raise ConfigError("grid step must be positive, got {}".format(step))
    if not lo < 0 < hi:
        raise ConfigError("grid must satisfy lo < 0 < hi, got [{}, {}]".format(
            lo, hi))

    left, right = _grid(lo, hi, step)
    if len(left) < 2 or len(right) < 2:
        raise ConfigError("grid is empty")

    left_values = bound.cumulative(n, left)
    right_values = bound.cumulative(n, right)

    results = {LEFT: [], RIGHT: []}
    for k in range(bound.order() + 1):
        # Walk outwards from 0: reverse the left side and flip the values so
        # that a valid CDF is still nondecreasing along the walk
        outward = left[::-1]
        walk = 1.0 - left_values[k][::-1]
        violation = _first_violation(outward, walk, tolerance)
        results[LEFT].append((violation is None, violation))

        violation = _first_violation(right, right_values[k], tolerance)
        results[RIGHT].append((violation is None, violation))

    report = TailReport(bound.order(), lo, hi, step, results)
    log.debug("tail scan: usable orders left %d, right %d",
        report.usable_order(LEFT), report.usable_order(RIGHT))
    return report

def usable_order(report, side):
    """
    Largest k such that every expansion with k' <= k terms is usable on the
    side.
    """
    if side not in SIDES:
        raise ConfigError("side must be left or right, got {!r}".format(side))
    order = -1
    for k in range(report.order() + 1):
        if not report.usable(side, k):
            break
        order = k
    return max(order, 0)

def invert_cdf(bound, n, p, side=None, terms=0, report=None,
        tolerance=DEFAULT_BISECT_TOL):
    """
    Solves F(x) = p by bisection on the diagnosed-monotone interval of one
    side.

    Args:
        bound: A BoundExpansion.
        n: Sample size.
        p: Probability in (0, 1).
        side: 'left' or 'right'; chosen from F(0) when omitted.
        terms: Number of correction terms.
        report: TailReport from `tail_scan`, computed when omitted.
        tolerance: Target for |F(x) - p|.

    Returns:
        The quantile x.
    """

    if not 0 < p < 1:
        raise ConfigError("p must be in (0, 1), got {}".format(p))
    if terms < 0 or terms > bound.order():
        raise ConfigError("terms must be in [0, {}], got {}".format(
            bound.order(), terms))
    if report is None:
        report = tail_scan(bound, n)

    def cdf(x):
        return float(bound.cumulative(n, x)[terms])

    if side is None:
        side = LEFT if p <= cdf(0.0) else RIGHT
    if not report.usable(side, terms):
        raise TailReport.UnusableError(
            "{} terms are not usable on the {} side (violation at x = {})".format(
                terms, side, report.violation_x(side, terms)))

    lo, hi = report.bounds(side)
    f_lo = cdf(lo) - p
    f_hi = cdf(hi) - p
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if f_lo > 0 or f_hi < 0:
        raise ComputeError("p = {} is not attained on the {} side [{}, {}]".format(
            p, side, lo, hi))

    x = optimize.bisect(lambda t: cdf(t) - p, lo, hi, xtol=1e-14,
        maxiter=400)
    miss = abs(cdf(x) - p)
    if miss > tolerance:
        raise TailReport.UnusableError(
            "bisection stopped at x = {} with |F(x) - p| = {:g} > {:g}".format(
                x, miss, tolerance))
    log.debug("quantile p = %g on the %s side: x = %.12g", p, side, x)
    return x
