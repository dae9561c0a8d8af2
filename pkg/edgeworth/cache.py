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
Generic cache interface for storing derived expansions.
"""

import copy
import threading

from .errors import ConfigError

class DerivationCache():
    """
    Generic cache interface. Entries are the JSON payloads of derived
    expansion sets, keyed by strings such as `aee:one:4`.
    """

    @classmethod
    def instance(cls, config):
        """
        Returns a new cache instance for the `[engine] cache` option.
        """
        kind = config.get('engine', 'cache')
        if kind == 'memory':
            return MemoryCache()
        if kind == 'none':
            return NullCache()
        if kind == 'redis':
            from . import redis
            return redis.RedisCache(config)

        raise ConfigError("unknown cache type {!r}".format(kind))

    def get(self, key):
        """
        Looks up a payload.

        Args:
            key: The cache key.

        Returns:
            The stored payload, or None when absent.
        """

        raise NotImplementedError

    def put(self, key, payload):
        """
        Stores a payload.

        Args:
            key: The cache key.
            payload: A JSON serializable dict.
        """

        raise NotImplementedError

class MemoryCache(DerivationCache):
    """
    In-process cache shared by every thread of the process
    """

    def __init__(self):
        self.__lock = threading.Lock()
        self.__entries = {}

    def get(self, key):
        with self.__lock:
            payload = self.__entries.get(key)
        return copy.deepcopy(payload) if payload is not None else None

    def put(self, key, payload):
        with self.__lock:
            self.__entries[key] = copy.deepcopy(payload)

class NullCache(DerivationCache):
    """
    Cache that stores nothing
    """

    def get(self, key):
        return None

    def put(self, key, payload):
        pass
