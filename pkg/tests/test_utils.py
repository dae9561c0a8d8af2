from fractions import Fraction

import pytest

from edgeworth.utils import block_ranges, parse_list, parse_number

def test_block_ranges():
    assert list(block_ranges(12, 5)) == [(0, 0, 5), (1, 5, 5), (2, 10, 2)]
    assert list(block_ranges(5, 5)) == [(0, 0, 5)]
    assert list(block_ranges(0, 5)) == []

def test_parse_number():
    assert parse_number(' 3/4 ') == Fraction(3, 4)
    assert parse_number('-1.5') == Fraction(-3, 2)
    for token in ('1/0', 'abc', None):
        with pytest.raises(ValueError):
            parse_number(token)

def test_parse_list():
    assert parse_list('-1.5,0,1/2,') == [-1.5, 0.0, 0.5]
