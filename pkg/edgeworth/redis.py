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
Redis cache interface
"""

import json

import redis

from . import cache
from .logging import Logging

log = Logging.get('redis')

class RedisCache(cache.DerivationCache):
    """
    Cache implementation that stores derived expansions as JSON strings in a
    Redis DB, so that several processes share one derivation.
    """

    # Prefix applied to every key written by this cache
    __KEY_PREFIX = 'edgeworth:'

    def __init__(self, config, connection=None):
        """
        Constructs a new database connection.

        Args:
            config: The configuration options for the database.
            connection: Optional ready-made client, used by tests.
        """

        cache.DerivationCache.__init__(self)
        self.__ttl = config.getint('database', 'ttl')

        if connection is not None:
            self.__connection = connection
            return

        db = config.getint('database', 'database')
        socket = config.get('database', 'unixsocket')
        if socket:
            pool = redis.ConnectionPool(
                connection_class=redis.UnixDomainSocketConnection,
                path=socket,
                decode_responses=True)
            self.__connection = redis.Redis(
                connection_pool=pool,
                db = db)
        else:
            self.__connection = redis.StrictRedis(
                host = config.get('database', 'host'),
                port = config.getint('database', 'port'),
                db = db,
                decode_responses=True)

    def get(self, key):
        try:
            text = self.__connection.get(self.__KEY_PREFIX + key)
        except redis.RedisError:
            log.exception("Redis lookup of %s failed", key)
            return None

        if text is None:
            return None
        return json.loads(text)

    def put(self, key, payload):
        try:
            self.__connection.set(self.__KEY_PREFIX + key,
                json.dumps(payload, sort_keys=True), ex=self.__ttl)
        except redis.RedisError:
            log.exception("Redis store of %s failed", key)
