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
Truncated series in n^(-1/2), univariate polynomials with symbolic
coefficients, Hermite polynomials and moment/cumulant conversion
"""

import functools

from fractions import Fraction
from math import comb

from .errors import ComputeError
from .polynomial import SparsePoly

class UniPoly():
    """
    Polynomial in one formal variable (`u` or `y`) whose coefficients are
    SparsePoly values. Trailing zero coefficients are trimmed.
    """

    __slots__ = ('_coeffs', '_var')

    def __init__(self, coeffs=(), var='u'):
        coeffs = [c if isinstance(c, SparsePoly) else SparsePoly.constant(c)
            for c in coeffs]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self._coeffs = tuple(coeffs)
        self._var = var

    @classmethod
    def monomial(cls, power, coefficient=1, var='u'):
        """
        Returns `coefficient * var^power`.
        """
        return cls([0] * power + [coefficient], var)

    def unit(self):
        return UniPoly([1], self._var)

    @property
    def var(self):
        return self._var

    def degree(self):
        """
        Degree of the polynomial, -1 for zero.
        """
        return len(self._coeffs) - 1

    def coefficient(self, power):
        if 0 <= power < len(self._coeffs):
            return self._coeffs[power]
        return SparsePoly.zero()

    def terms(self):
        """
        Yields (power, coefficient) pairs with nonzero coefficients.
        """
        for power, value in enumerate(self._coeffs):
            if value:
                yield power, value

    def __bool__(self):
        return bool(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return 'UniPoly({})'.format(self.render())

    def __add__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        size = max(len(self._coeffs), len(other._coeffs))
        return UniPoly([self.coefficient(i) + other.coefficient(i)
            for i in range(size)], self._var)

    def __neg__(self):
        return UniPoly([-c for c in self._coeffs], self._var)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, SparsePoly)):
            return UniPoly([c * other for c in self._coeffs], self._var)
        if not isinstance(other, UniPoly):
            return NotImplemented
        if not self or not other:
            return UniPoly((), self._var)

        coeffs = [SparsePoly.zero()] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if not a:
                continue
            for j, b in enumerate(other._coeffs):
                if b:
                    coeffs[i + j] = coeffs[i + j] + a * b
        return UniPoly(coeffs, self._var)

    __rmul__ = __mul__

    def map(self, fn):
        """
        Applies fn to every coefficient.
        """
        return UniPoly([fn(c) for c in self._coeffs], self._var)

    def render(self, var=None):
        """
        Renders in descending powers, e.g. `y^3 - 3*y`.
        """
        var = var or self._var
        parts = []
        for power in range(len(self._coeffs) - 1, -1, -1):
            value = self._coeffs[power]
            if not value:
                continue
            body = var if power == 1 else '{}^{}'.format(var, power)
            if value.is_constant():
                number = value.constant_value()
                sign = '-' if number < 0 else '+'
                number = abs(number)
                if power == 0:
                    text = str(number)
                elif number == 1:
                    text = body
                else:
                    text = '{}*{}'.format(number, body)
            else:
                sign = '+'
                text = '({})'.format(value.render())
                if power:
                    text = '{}*{}'.format(text, body)
            if not parts:
                parts.append(text if sign == '+' else '-' + text)
            else:
                parts.append('{} {}'.format(sign, text))
        return ' '.join(parts) if parts else '0'

class HalfPowerSeries():
    """
    Truncated series sum_p coeff_p * n^(-p/2). Coefficients are ring
    elements (SparsePoly or UniPoly) supporting +, * and `unit()`; missing
    powers are zero and nothing above `cap` is ever stored.
    """

    class CapError(ComputeError):
        """
        Thrown when two series with different caps are combined
        """

    class SeriesError(ComputeError):
        """
        Thrown when an operation's precondition on the series fails
        """

    __slots__ = ('_coeffs', '_cap')

    def __init__(self, coeffs, cap):
        self._cap = cap
        self._coeffs = {p: c for p, c in coeffs.items() if p <= cap and c}

    @property
    def cap(self):
        return self._cap

    def powers(self):
        """
        Sorted list of powers with nonzero coefficients.
        """
        return sorted(self._coeffs)

    def get(self, power, default=None):
        return self._coeffs.get(power, default)

    def items(self):
        for power in self.powers():
            yield power, self._coeffs[power]

    def map(self, fn):
        """
        Applies fn to every coefficient.
        """
        return HalfPowerSeries(
            {p: fn(c) for p, c in self._coeffs.items()}, self._cap)

    def truncate(self, cap):
        """
        Returns the series restricted to powers <= cap.
        """
        return HalfPowerSeries(self._coeffs, min(cap, self._cap))

    def __bool__(self):
        return bool(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, HalfPowerSeries):
            return NotImplemented
        return self._cap == other._cap and self._coeffs == other._coeffs

    def __repr__(self):
        return 'HalfPowerSeries(cap={}, {})'.format(self._cap, {
            p: str(c) for p, c in self.items()})

    def __check(self, other):
        if other._cap != self._cap:
            raise self.CapError("series caps differ: {} vs {}".format(
                self._cap, other._cap))

    def __add__(self, other):
        if not isinstance(other, HalfPowerSeries):
            return NotImplemented
        self.__check(other)
        coeffs = dict(self._coeffs)
        for p, c in other._coeffs.items():
            coeffs[p] = coeffs[p] + c if p in coeffs else c
        return HalfPowerSeries(coeffs, self._cap)

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, SparsePoly)):
            return self.map(lambda c: c * other)
        if not isinstance(other, HalfPowerSeries):
            return NotImplemented
        self.__check(other)

        coeffs = {}
        for pa, ca in self._coeffs.items():
            for pb, cb in other._coeffs.items():
                p = pa + pb
                if p > self._cap:
                    continue
                term = ca * cb
                coeffs[p] = coeffs[p] + term if p in coeffs else term
        return HalfPowerSeries(coeffs, self._cap)

    __rmul__ = __mul__

def series_mul(a, b):
    """
    Exact Cauchy product of two series sharing a cap.
    """
    return a * b

def series_exp(s, one=None):
    """
    Formal exponential sum_m s^m / m!, truncated at the series cap.

    Args:
        s: HalfPowerSeries whose powers are all >= 1.
        one: Multiplicative identity of the coefficient ring. Inferred from
            the coefficients when omitted.

    Returns:
        The truncated exponential as a HalfPowerSeries.
    """

    low = [p for p in s.powers() if p <= 0]
    if low:
        raise HalfPowerSeries.SeriesError(
            "exponent has a nonzero component at n^(-{}/2)".format(low[0]))

    if one is None:
        if not s:
            one = SparsePoly.one()
        else:
            one = s.get(s.powers()[0]).unit()

    result = HalfPowerSeries({0: one}, s.cap)
    term = result
    m = 1
    while True:
        term = term * s * Fraction(1, m)
        if not term:
            break
        result = result + term
        m += 1
    return result

@functools.lru_cache(maxsize=None)
def hermite(k):
    """
    Probabilists' Hermite polynomial He_k in y, built with
    He_{k+1} = y He_k - k He_{k-1}.
    """
    if k < 0:
        raise ValueError("Hermite index must be non-negative")
    if k == 0:
        return UniPoly([1], 'y')
    if k == 1:
        return UniPoly([0, 1], 'y')
    y = UniPoly([0, 1], 'y')
    return y * hermite(k - 1) - hermite(k - 2) * (k - 1)

def moments_to_cumulants(moments):
    """
    Converts raw moments mu'_1..mu'_M to cumulants k_1..k_M with
    k_M = mu'_M - sum_{i<M} C(M-1, i-1) k_i mu'_{M-i}. Works for any
    element type with +, - and * (numbers or series).
    """
    cumulants = []
    for order in range(1, len(moments) + 1):
        value = moments[order - 1]
        for i in range(1, order):
            value = value - cumulants[i - 1] * moments[order - i - 1] * \
                comb(order - 1, i - 1)
        cumulants.append(value)
    return cumulants

def cumulants_to_moments(cumulants):
    """
    Inverse of `moments_to_cumulants`.
    """
    moments = []
    for order in range(1, len(cumulants) + 1):
        value = cumulants[order - 1]
        for i in range(1, order):
            value = value + cumulants[i - 1] * moments[order - i - 1] * \
                comb(order - 1, i - 1)
        moments.append(value)
    return moments
