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
Task functors executed by the worker pool
"""

from . import stats

class SimulateBlockTask():
    """
    Draws one block of Monte Carlo replicates.
    """

    def __init__(self, sampler, block_index, count):
        """
        Constructs a task that simulates a block of replicates.

        Args:
            sampler: The edgeworth.oracle.StatisticSampler to draw with.
            block_index: Index of the block; selects the random stream.
            count: Number of replicates in the block.
        """

        self.__sampler = sampler
        self.__block_index = block_index
        self.__count = count

    def __call__(self, pool, worker):
        worker.log().debug("Simulating block %d (%d replicates)",
            self.__block_index, self.__count)

        with stats.Stats.Timer() as timer:
            values, degenerate = self.__sampler.sample_block(
                self.__block_index, self.__count)

        worker.stats().update(stats.Stats.REPLICATE, total=self.__count,
            failure=degenerate, runtime=timer.elapsed())
        pool.record(self.__block_index, (values, degenerate))
