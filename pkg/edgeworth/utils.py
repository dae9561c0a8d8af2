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
Utility methods
"""

from fractions import Fraction

def block_ranges(total, block_size):
    """
    Yield (block_index, start, count) triples covering range(total) in
    consecutive blocks of at most block_size items. Block boundaries depend
    only on the two arguments.
    """
    for index, start in enumerate(range(0, total, block_size)):
        yield index, start, min(block_size, total - start)

def parse_number(token):
    """
    Parses an integer, decimal or p/q token into a Fraction so that rational
    inputs stay exact.
    """
    try:
        return Fraction(token.strip())
    except (ValueError, ZeroDivisionError, AttributeError):
        raise ValueError("not a number: {!r}".format(token))

def parse_list(text):
    """
    Parses a comma separated list of numbers into floats.
    """
    return [float(parse_number(item)) for item in text.split(',') if item.strip()]
