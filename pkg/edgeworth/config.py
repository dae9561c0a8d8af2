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
Configuration loading. Options live in an INI file read with configparser;
anything missing from the file falls back to the defaults below.
"""

import configparser
import os

from .errors import ConfigError

DEFAULTS = {
    "engine"        : {
        "max_order"     : "5",
        "hard_cap"      : "6",
        "cache"         : "memory",
    },

    "combinatorics" : {
        "cap"           : "12",
    },

    "diagnostics"   : {
        "width"         : "6",
        "step"          : "0.01",
        "tolerance"     : "1e-12",
        "bisect_tol"    : "1e-10",
    },

    "simulation"    : {
        "block_size"            : "50000",
        "max_degenerate_rate"   : "1e-4",
    },

    "pool"          : {
        "size"          : "4",
    },

    "logging"       : {
        "dir"           : "logs",
        "level"         : "INFO",
        "roll_count"    : "5",
        "roll_size"     : "65536",
        "shell"         : "True",
    },

    "database"      : {
        "host"          : "localhost",
        "unixsocket"    : "",
        "port"          : "6379",
        "database"      : "0",
        "ttl"           : "86400",
    },
}

# Environment variable that overrides [engine] max_order
MAX_ORDER_ENV = "AEE_MAX_ORDER"

def load(path=None, environ=None):
    """
    Builds a config from the defaults, an optional INI file and the
    environment.

    Args:
        path: Optional path to an INI file.
        environ: Optional mapping used in place of os.environ.

    Returns:
        A configparser.ConfigParser instance.
    """

    config = configparser.ConfigParser()
    config.read_dict(DEFAULTS)

    if path:
        if not os.path.isfile(path):
            raise ConfigError("config file not found: {}".format(path))
        config.read(path)

    environ = os.environ if environ is None else environ
    override = environ.get(MAX_ORDER_ENV)
    if override:
        config.set("engine", "max_order", override)

    max_order(config)
    return config

def max_order(config):
    """
    Returns the validated expansion order cap for the config.
    """

    try:
        order = config.getint("engine", "max_order")
        hard_cap = config.getint("engine", "hard_cap")
    except ValueError:
        raise ConfigError("[engine] max_order must be an integer")

    if order < 1 or order > hard_cap:
        raise ConfigError("max order {} outside [1, {}]".format(order, hard_cap))
    return order
