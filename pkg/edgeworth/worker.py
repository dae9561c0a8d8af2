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

"""Threaded pool of workers that can process tasks"""

import queue
import threading

from . import logging
from . import stats

class Worker():
    """
    Worker
    """
    def __init__(self, config, name, index):
        self.__config = config
        self.__index = index
        self.__log = logging.Logging.create(config,
            '{}.{}'.format(logging.Logging.ROOT, name), name.lower())
        self.__name = name
        self.__stats = stats.Stats()

    def config(self):
        """
        Returns the configuration the worker was created with
        """
        return self.__config

    def index(self):
        """
        Returns the worker index in the containing pool
        """
        return self.__index

    def log(self):
        """
        Returns the log writer for the worker
        """
        return self.__log

    def stats(self):
        """
        Returns the stat tracking object for the worker
        """
        return self.__stats

class WorkerPool():
    """
    Pool of daemon threads consuming callables `task(pool, worker)`. Tasks
    report results with `record`; the first exception raised by any task is
    re-raised from `wait`.
    """

    # Queue item that stops a worker thread
    __STOP = object()

    def __init__(self, config, size=None, base_index=0):
        self.__log = logging.Logging.create(config,
            '{}.Main'.format(logging.Logging.ROOT), "main")
        self.__queue = queue.Queue()
        self.__lock = threading.Lock()
        self.__results = {}
        self.__errors = []
        self.__workers = []
        self.__threads = []

        size = size if size is not None else config.getint('pool', 'size')
        for i in range(max(1, size)):
            worker_index = i + base_index
            worker_name = "Worker{:02}".format(worker_index)

            worker = Worker(config, worker_name, worker_index)
            thread = threading.Thread(
                target = WorkerPool.__process,
                args = (self, worker),
                daemon = True)
            thread.start()

            self.__workers.append(worker)
            self.__threads.append(thread)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.close()

    def size(self):
        """
        Returns the number of worker threads
        """
        return len(self.__workers)

    def enqueue(self, work):
        """
        Adds the specified task to the pool. The only requirement is that
        the task is a callable object
        """
        self.__queue.put(work)

    def record(self, key, value):
        """
        Stores a task result under a key
        """
        with self.__lock:
            self.__results[key] = value

    def results(self):
        """
        Returns a copy of the recorded results
        """
        with self.__lock:
            return dict(self.__results)

    def log(self):
        """
        Returns the pool-level log instance
        """
        return self.__log

    def wait(self):
        """
        Waits for pending work to complete and returns the results recorded
        since the last wait
        """
        self.__queue.join()

        total = stats.Stats()
        for worker in self.__workers:
            worker_stats = worker.stats()
            total += worker_stats
            worker_stats.reset()

        total.dump(self.__log)

        with self.__lock:
            errors, self.__errors = self.__errors, []
            results, self.__results = self.__results, {}

        if errors:
            raise errors[0]
        return results

    def close(self):
        """
        Stops the worker threads once queued work is done
        """
        for _ in self.__threads:
            self.__queue.put(self.__STOP)
        for thread in self.__threads:
            thread.join()
        self.__threads = []

    @staticmethod
    def __process(pool, worker):
        while True:
            work = pool.__queue.get()
            if work is pool.__STOP:
                pool.__queue.task_done()
                return

            try:
                work(pool, worker)
            except Exception as error:
                worker.log().exception("Worker tasks error")
                with pool.__lock:
                    pool.__errors.append(error)

            pool.__queue.task_done()
