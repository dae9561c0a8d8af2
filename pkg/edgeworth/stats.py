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
Counters for partition enumeration, series algebra and Monte Carlo
replicates, shared between threads
"""

import dataclasses
import threading
import time

@dataclasses.dataclass
class Counter():
    """
    Totals for one kind of event.
    """
    total: int = 0
    pruned: int = 0
    failure: int = 0
    time: float = 0.0

    def rate(self):
        """
        Fraction of events that failed.
        """
        return self.failure / self.total if self.total else 0.0

class Stats():
    """
    Thread safe event counters. Each stat index owns one Counter; `pruned`
    counts work skipped early (partitions cut by the order bound) and
    `failure` counts rejected work (degenerate replicates).
    """
    PARTITION, SERIES, REPLICATE, NUM_STATS = range(4)
    __NAMES = ["Partitions", "Series", "Replicates"]

    class StatError(Exception):
        """
        Thrown when an invalid stat index is passed to a query
        """

    class Timer():
        """
        Measures the time spent inside a `with` block. The elapsed time stays
        available after the block exits.
        """

        def __init__(self):
            self.__start = 0.0
            self.__end = 0.0

        def elapsed(self):
            return self.__end - self.__start

        def __enter__(self):
            self.__start = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc_value, traceback):
            self.__end = time.perf_counter()

    def __init__(self):
        self.__lock = threading.Lock()
        self.__counters = []
        self.reset()

    def __counter(self, stat):
        if not isinstance(stat, int) or not 0 <= stat < self.NUM_STATS:
            raise self.StatError("invalid stat type {}".format(stat))
        return self.__counters[stat]

    def dump(self, log):
        """
        Logs one line per stat that saw any events.
        """
        for name, counter in zip(self.__NAMES, self.snapshot()):
            if not counter.total:
                continue
            log.info("[%s] %d total, %d pruned, %d failed, %f s", name,
                counter.total, counter.pruned, counter.failure, counter.time)

    def update(self, stat, total=0, pruned=0, failure=0, runtime=0):
        """
        Adds to any number of fields of one stat.
        """
        with self.__lock:
            counter = self.__counter(stat)
            counter.total += total
            counter.pruned += pruned
            counter.failure += failure
            counter.time += runtime

    def reset(self):
        with self.__lock:
            self.__counters = [Counter() for _ in range(self.NUM_STATS)]

    def snapshot(self):
        """
        Returns a copy of every Counter, indexed by stat.
        """
        with self.__lock:
            return [dataclasses.replace(counter) for counter in self.__counters]

    def total(self, stat):
        with self.__lock:
            return self.__counter(stat).total

    def pruned(self, stat):
        with self.__lock:
            return self.__counter(stat).pruned

    def failure(self, stat):
        with self.__lock:
            return self.__counter(stat).failure

    def time(self, stat):
        with self.__lock:
            return self.__counter(stat).time

    def __iadd__(self, other):
        if not isinstance(other, Stats):
            raise TypeError(
                "unsupported operand type(s) for +=: '{}' and '{}'".format(
                    type(self), type(other)))

        for stat, counter in enumerate(other.snapshot()):
            self.update(stat, counter.total, counter.pruned, counter.failure,
                counter.time)
        return self
