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
Sparse multivariate polynomials with exact rational coefficients over the
named statistical symbols used by the expansions (central moments, the
estimator constants A and B, sample size ratios, standardized cumulants and
the variance adjustment r).

Monomials are stored as a single packed integer: every symbol owns a 16 bit
field holding its exponent in halves plus a bias. Multiplying two monomials
is one integer addition followed by a range check on every field; exponents
outside [-64, 64) raise SparsePoly.ExponentError.
"""

import enum
import math
import re

from fractions import Fraction
from typing import NamedTuple

from .errors import ComputeError

class Kind(enum.IntEnum):
    """
    Symbol kinds, in canonical ordering.
    """
    MU_X    = 0
    MU_Y    = 1
    A       = 2
    B       = 3
    BX      = 4
    BY      = 5
    RATIO_X = 6
    RATIO_Y = 7
    SIGMA2X = 8
    SIGMA2Y = 9
    LAMBDA  = 10
    R       = 11

# Rendered names for each kind
_NAMES = {
    Kind.MU_X       : 'mu_x',
    Kind.MU_Y       : 'mu_y',
    Kind.A          : 'A',
    Kind.B          : 'B',
    Kind.BX         : 'Bx',
    Kind.BY         : 'By',
    Kind.RATIO_X    : 'bx',
    Kind.RATIO_Y    : 'by',
    Kind.SIGMA2X    : 'sigma2x',
    Kind.SIGMA2Y    : 'sigma2y',
    Kind.LAMBDA     : 'l',
    Kind.R          : 'r',
}

# Valid orders for the indexed kinds
_ORDERS = {
    Kind.MU_X       : range(2, 17),
    Kind.MU_Y       : range(2, 17),
    Kind.LAMBDA     : range(3, 17),
}

class SymbolId(NamedTuple):
    """
    A named symbol. `order` is the moment or cumulant order for the indexed
    kinds and 0 for everything else.
    """
    kind: Kind
    order: int = 0

    def render(self):
        """
        Returns the canonical text form, e.g. `mu_x[3]`, `A` or `l4`.
        """
        name = _NAMES[self.kind]
        if self.kind in (Kind.MU_X, Kind.MU_Y):
            return '{}[{}]'.format(name, self.order)
        if self.kind == Kind.LAMBDA:
            return '{}{}'.format(name, self.order)
        return name

    @classmethod
    def parse(cls, text):
        """
        Inverse of `render`.
        """
        match = re.fullmatch(r'(mu_x|mu_y)\[(\d+)\]|l(\d+)|(\w+)', text)
        if not match:
            raise ValueError("unknown symbol {!r}".format(text))
        names = {name: kind for kind, name in _NAMES.items()}
        if match.group(1):
            return cls.create(names[match.group(1)], int(match.group(2)))
        if match.group(3):
            return cls.create(Kind.LAMBDA, int(match.group(3)))
        if match.group(4) not in names or match.group(4) == 'l':
            raise ValueError("unknown symbol {!r}".format(text))
        return cls.create(names[match.group(4)])

    @classmethod
    def create(cls, kind, order=0):
        """
        Validating constructor.
        """
        kind = Kind(kind)
        if kind in _ORDERS:
            if order not in _ORDERS[kind]:
                raise ValueError("invalid order {} for {}".format(
                    order, _NAMES[kind]))
        elif order:
            raise ValueError("{} takes no order".format(_NAMES[kind]))
        return cls(kind, order)

def mu(order, sample='x'):
    """
    Central moment symbol of the x or y sample.
    """
    kind = Kind.MU_X if sample == 'x' else Kind.MU_Y
    return SymbolId.create(kind, order)

def lam(order):
    """
    Standardized cumulant symbol.
    """
    return SymbolId.create(Kind.LAMBDA, order)

def sigma2(sample='x'):
    """
    Variance symbol of the x or y sample.
    """
    return SymbolId(Kind.SIGMA2X if sample == 'x' else Kind.SIGMA2Y)

def ratio(sample='x'):
    """
    Sample size ratio symbol b_x = n/n_x (or b_y).
    """
    return SymbolId(Kind.RATIO_X if sample == 'x' else Kind.RATIO_Y)

A = SymbolId(Kind.A)
B = SymbolId(Kind.B)
BX = SymbolId(Kind.BX)
BY = SymbolId(Kind.BY)
R = SymbolId(Kind.R)

# Packed monomial layout. Each field is 16 bits wide but only holds
# exponents in [-_LIMIT, _LIMIT) halves, so adding two keys never carries
# into the next field and an overflow can be read off the high byte.
_WIDTH = 16
_BIAS = 1 << (_WIDTH - 1)
_MASK = (1 << _WIDTH) - 1
_LIMIT = 128
_SLOTS = sorted(
    SymbolId(kind, order)
    for kind in Kind
    for order in _ORDERS.get(kind, (0,)))
_SLOT_INDEX = {symbol: index for index, symbol in enumerate(_SLOTS)}
_UNIT = sum(_BIAS << (_WIDTH * index) for index in range(len(_SLOTS)))
_SHIFT = sum(_LIMIT << (_WIDTH * index) for index in range(len(_SLOTS)))
_HIGH = sum((_MASK ^ 0xFF) << (_WIDTH * index) for index in range(len(_SLOTS)))
_HIGH_VALID = _UNIT

def _pack(factors):
    key = _UNIT
    for symbol, halves in factors:
        if not -_LIMIT <= halves < _LIMIT:
            raise SparsePoly.ExponentError("exponent {}/2 of {} is outside "
                "[-{}, {})".format(halves, symbol.render(), _LIMIT // 2,
                _LIMIT // 2))
        key += halves << (_WIDTH * _SLOT_INDEX[symbol])
    return key

def _combine(key_a, key_b):
    key = key_a + key_b - _UNIT
    if (key + _SHIFT) & _HIGH != _HIGH_VALID:
        raise SparsePoly.ExponentError("monomial exponent overflow in "
            "{} * {}".format(_render_key(key_a), _render_key(key_b)))
    return key

def _render_key(key):
    return '*'.join(_render_factor(symbol, Fraction(halves, 2))
        for symbol, halves in _unpack(key)) or '1'

def _unpack(key):
    factors = []
    offset = key - _UNIT
    if not offset:
        return ()
    for index, symbol in enumerate(_SLOTS):
        halves = ((key >> (_WIDTH * index)) & _MASK) - _BIAS
        if halves:
            factors.append((symbol, halves))
    return tuple(factors)

def _order_key(key):
    return tuple((symbol.kind, symbol.order, halves)
        for symbol, halves in _unpack(key))

def _check_exponents(key):
    for symbol, halves in _unpack(key):
        if halves % 2 and symbol.kind != Kind.A:
            raise ValueError("only A may carry half-integer exponents, "
                "got {}^({}/2)".format(symbol.render(), halves))

def _fraction_text(value):
    if value.denominator == 1:
        return str(value.numerator)
    return '{}/{}'.format(value.numerator, value.denominator)

def _exact_sqrt(value):
    if value < 0:
        return None
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        return None
    return Fraction(num, den)

class SparsePoly():
    """
    Immutable sparse polynomial mapping monomials to Fractions. Zero
    coefficients are never stored.
    """

    class BindingError(ComputeError):
        """
        Thrown when a symbol has no usable binding during evaluation or
        substitution.
        """

    class ExponentError(ComputeError, ValueError):
        """
        Thrown when a monomial exponent leaves the packed range
        """

    __slots__ = ('_terms', '_hash')

    def __init__(self, terms=None):
        """
        Builds a polynomial from a packed monomial -> coefficient mapping.
        Callers outside this module should use the classmethod
        constructors.
        """
        self._terms = {key: Fraction(value)
            for key, value in (terms or {}).items() if value}
        self._hash = None

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({_UNIT: Fraction(1)})

    @classmethod
    def constant(cls, value):
        """
        Returns the constant polynomial with the given rational value.
        """
        return cls({_UNIT: Fraction(value)})

    @classmethod
    def symbol(cls, symbol, power=1):
        """
        Returns `symbol^power`. Only A accepts half-integer powers.
        """
        halves = Fraction(power) * 2
        if halves.denominator != 1:
            raise ValueError("power must be a multiple of 1/2")
        key = _pack(((symbol, int(halves)),))
        _check_exponents(key)
        return cls({key: Fraction(1)})

    @classmethod
    def monomial(cls, coefficient, factors):
        """
        Returns `coefficient * prod(symbol^power)` for (symbol, power) pairs.
        """
        poly = cls.constant(coefficient)
        for symbol, power in factors:
            poly = poly * cls.symbol(symbol, power)
        return poly

    def unit(self):
        return SparsePoly.one()

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SparsePoly.constant(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return 'SparsePoly({})'.format(self.render())

    def __str__(self):
        return self.render()

    def is_constant(self):
        """
        Returns whether the polynomial has no symbols.
        """
        return all(key == _UNIT for key in self._terms)

    def constant_value(self):
        """
        Returns the coefficient of the constant monomial.
        """
        return self._terms.get(_UNIT, Fraction(0))

    def symbols(self):
        """
        Returns the set of symbols that occur in the polynomial.
        """
        return {symbol for key in self._terms for symbol, _ in _unpack(key)}

    def items(self):
        """
        Yields (factors, coefficient) in canonical order, where factors is a
        tuple of (SymbolId, Fraction exponent).
        """
        for key in sorted(self._terms, key=_order_key):
            factors = tuple((symbol, Fraction(halves, 2))
                for symbol, halves in _unpack(key))
            yield factors, self._terms[key]

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for key, value in other._terms.items():
            total = terms.get(key, 0) + value
            if total:
                terms[key] = total
            else:
                terms.pop(key, None)
        return SparsePoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly({key: -value for key, value in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        """
        Multiplies every coefficient by a rational factor.
        """
        factor = Fraction(factor)
        if not factor:
            return SparsePoly()
        return SparsePoly({key: value * factor
            for key, value in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented

        terms = {}
        for key_a, value_a in self._terms.items():
            for key_b, value_b in other._terms.items():
                key = _combine(key_a, key_b)
                total = terms.get(key, 0) + value_a * value_b
                if total:
                    terms[key] = total
                else:
                    del terms[key]
        return SparsePoly(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = SparsePoly.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def substitute(self, mapping):
        """
        Replaces symbols with polynomials or rationals. Symbols with a
        negative or half-integer exponent can only be replaced by a single
        term whose required root is rational.

        Args:
            mapping: Dict of SymbolId -> SparsePoly or rational.

        Returns:
            The substituted polynomial.
        """

        mapping = {symbol: _coerce(value) for symbol, value in mapping.items()}
        result = SparsePoly()
        for key, value in self._terms.items():
            term = SparsePoly.constant(value)
            rest = []
            for symbol, halves in _unpack(key):
                if symbol in mapping:
                    term = term * _power(mapping[symbol], halves, symbol)
                else:
                    rest.append((symbol, halves))
            if rest:
                term = term * SparsePoly({_pack(rest): Fraction(1)})
            result = result + term
        return result

    def eval(self, bindings, exact=False):
        """
        Evaluates the polynomial at numeric bindings.

        Args:
            bindings: Dict of SymbolId -> number.
            exact: Return a Fraction; requires rational bindings and integer
                exponents.

        Returns:
            A float, or a Fraction when exact is set.
        """

        total = Fraction(0) if exact else 0.0
        for key, value in self._terms.items():
            term = value if exact else float(value)
            for symbol, halves in _unpack(key):
                if symbol not in bindings:
                    raise self.BindingError(
                        "no binding for {}".format(symbol.render()))
                base = bindings[symbol]
                if exact:
                    if halves % 2:
                        raise self.BindingError(
                            "{}^({}/2) has no exact value".format(
                                symbol.render(), halves))
                    term *= Fraction(base) ** (halves // 2)
                else:
                    base = float(base)
                    if halves % 2 and base < 0:
                        raise self.BindingError(
                            "{} must be positive, got {}".format(
                                symbol.render(), base))
                    if halves < 0 and base == 0:
                        raise self.BindingError(
                            "{} must be nonzero".format(symbol.render()))
                    term *= base ** (halves / 2)
            total += term
        return total

    def render(self):
        """
        Canonical text rendering with sorted monomials, e.g.
        `-1/2*mu_x[3]*A^(-3/2)*B`.
        """

        if not self._terms:
            return '0'

        parts = []
        for factors, value in self.items():
            body = '*'.join(_render_factor(symbol, power)
                for symbol, power in factors)
            if not body:
                text = _fraction_text(abs(value))
            elif abs(value) == 1:
                text = body
            else:
                text = '{}*{}'.format(_fraction_text(abs(value)), body)
            if not parts:
                parts.append(text if value > 0 else '-' + text)
            else:
                parts.append(('+ ' if value > 0 else '- ') + text)
        return ' '.join(parts)

    @classmethod
    def parse(cls, text):
        """
        Inverse of `render`.
        """

        tokens = text.split()
        if not tokens:
            raise ValueError("empty polynomial")
        if tokens == ['0']:
            return cls()

        terms = {}
        sign = 1
        expect_term = True
        for token in tokens:
            if not expect_term:
                if token not in ('+', '-'):
                    raise ValueError("malformed polynomial {!r}".format(text))
                sign = 1 if token == '+' else -1
                expect_term = True
                continue

            if token.startswith('-'):
                sign, token = -sign, token[1:]
            value = Fraction(sign)
            factors = {}
            for part in token.split('*'):
                if re.fullmatch(r'\d+(/\d+)?', part):
                    value *= Fraction(part)
                    continue
                match = re.fullmatch(r'([^\^]+)(?:\^\(?(-?\d+(?:/\d+)?)\)?)?', part)
                if not match:
                    raise ValueError("malformed factor {!r}".format(part))
                power = Fraction(match.group(2) or 1)
                symbol = SymbolId.parse(match.group(1))
                factors[symbol] = factors.get(symbol, 0) + int(power * 2)
            key = _pack(factors.items())
            terms[key] = terms.get(key, 0) + value
            sign = 1
            expect_term = False

        if expect_term:
            raise ValueError("malformed polynomial {!r}".format(text))
        return cls(terms)

    def collect(self, symbol):
        """
        Splits the polynomial by the power of one symbol.

        Returns:
            Dict of Fraction power -> SparsePoly free of that symbol.
        """
        groups = {}
        for key, value in self._terms.items():
            power = 0
            rest = []
            for other, halves in _unpack(key):
                if other == symbol:
                    power = Fraction(halves, 2)
                else:
                    rest.append((other, halves))
            group = groups.setdefault(power, {})
            group[_pack(rest)] = value
        return {power: SparsePoly(terms) for power, terms in groups.items()}

def _render_factor(symbol, power):
    name = symbol.render()
    if power == 1:
        return name
    if power.denominator == 1 and power > 0:
        return '{}^{}'.format(name, power.numerator)
    return '{}^({})'.format(name, _fraction_text(power))

def _coerce(value):
    if isinstance(value, SparsePoly):
        return value
    if isinstance(value, (int, Fraction)):
        return SparsePoly.constant(value)
    return None

def _power(poly, halves, symbol):
    if halves >= 0 and halves % 2 == 0:
        return poly ** (halves // 2)

    if len(poly) != 1:
        raise SparsePoly.BindingError(
            "cannot raise a multi-term replacement for {} to {}/2".format(
                symbol.render(), halves))

    (key, value), = poly._terms.items()
    if halves % 2:
        root = _exact_sqrt(value)
        if root is None:
            raise SparsePoly.BindingError(
                "replacement coefficient for {} has no rational "
                "square root".format(symbol.render()))
        coefficient = root ** halves
    else:
        coefficient = value ** (halves // 2)

    factors = []
    for inner, inner_halves in _unpack(key):
        scaled = inner_halves * halves
        if scaled % 2:
            raise SparsePoly.BindingError(
                "replacement for {} produces a fractional exponent".format(
                    symbol.render()))
        factors.append((inner, scaled // 2))
    key = _pack(factors)
    try:
        _check_exponents(key)
    except ValueError as error:
        raise SparsePoly.BindingError(str(error))
    return SparsePoly({key: coefficient})

def poly_arith(a, b, op, bindings=None):
    """
    Single entry point for the basic polynomial operations.

    Args:
        a: The left SparsePoly.
        b: The right operand: a SparsePoly for add/mul, a rational for scale,
            a {SymbolId: value} mapping for substitute; ignored for eval.
        op: One of 'add', 'mul', 'scale', 'substitute', 'eval'.
        bindings: Numeric bindings for eval.

    Returns:
        A SparsePoly, or a float for eval.
    """
    if op == 'add':
        return a + b
    if op == 'mul':
        return a * b
    if op == 'scale':
        return a.scale(b)
    if op == 'substitute':
        return a.substitute(b)
    if op == 'eval':
        return a.eval(bindings if bindings is not None else b)
    raise ValueError("unknown operation {!r}".format(op))
