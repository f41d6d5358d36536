# Copyright (c) 2011-2015 Rackspace US, Inc.
# All Rights Reserved.
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.
#
"""Console logging for the fermistar command line.

Named `log` so as not to conflict with stdlib logging. Everything goes to
stderr: stdout carries the JSON report or the result of `fermistar eval`.

Library modules log numerical diagnostics as a ``data`` extra:

.. code-block:: python

    LOG = logging.getLogger(__name__)
    LOG.debug("segment transported", extra={'data': {'residual': r}})

With ``--debug`` the extras are appended to the message as sorted
``key=value`` pairs. Warnings raised by numpy and scipy (ill-conditioned
solves, overflow in ``expm``) are routed into the same handler.
"""
import logging
import logging.config
import numbers
import os
import sys

from fermistar import config

OPTIONS = [
    config.Option("--logconfig",
                  help="logging configuration file (overrides the console "
                       "setup)"),
    config.OPTIONS['debug'],
    config.OPTIONS['quiet'],
    config.Option("-v", "--verbose",
                  default=False,
                  action="store_true",
                  help="turn up logging to DEBUG (numerical diagnostics)"),
]

getLogger = logging.getLogger  # pylint: disable=C0103

FORMATS = {
    logging.DEBUG: '%(name)s:%(lineno)d %(levelname)s %(message)s',
    logging.INFO: '%(message)s',
    logging.WARNING: '%(levelname)s: %(message)s',
}


def log_level(conf):
    """Console level for the parsed flags.

    --debug, --verbose: DEBUG; --quiet: WARNING; otherwise INFO.
    """
    if conf.get('debug') is True or conf.get('verbose') is True:
        return logging.DEBUG
    if conf.get('quiet') is True:
        return logging.WARNING
    return logging.INFO


def configure(conf):
    """Set up logging from --logconfig or on the console."""
    logging.captureWarnings(True)
    logconfig = conf.get('logconfig')
    if logconfig and os.path.isfile(logconfig):
        logging.config.fileConfig(logconfig, disable_existing_loggers=False)
    else:
        init_console_logging(conf)


def init_console_logging(conf):
    """Log to stderr, reusing an existing stderr handler."""
    root = logging.getLogger()
    console = find_console_handler(root)
    if console is None:
        console = logging.StreamHandler(sys.stderr)
        root.addHandler(console)
    level = log_level(conf)
    console.setLevel(level)
    if conf.get('debug') is True:
        console.setFormatter(DebugFormatter(FORMATS[logging.DEBUG]))
    else:
        console.setFormatter(logging.Formatter(FORMATS[level]))
    root.setLevel(level)


def format_value(value):
    """Compact rendering of a diagnostic value."""
    if isinstance(value, bool) or not isinstance(value, numbers.Number):
        return str(value)
    if isinstance(value, numbers.Integral):
        return '%d' % value
    if isinstance(value, complex):
        return '%.3g%+.3gj' % (value.real, value.imag)
    return '%.3g' % value


class DebugFormatter(logging.Formatter):

    """Append the ``data`` extra of a record as key=value pairs."""

    def format(self, record):
        message = logging.Formatter.format(self, record)
        data = getattr(record, 'data', None)
        if not data:
            return message
        if not isinstance(data, dict):
            return "%s [%s]" % (message, data)
        pairs = ' '.join('%s=%s' % (key, format_value(data[key]))
                         for key in sorted(data))
        return "%s [%s]" % (message, pairs)


def find_console_handler(logger):
    """Return the handler writing to stderr, if there is one."""
    for handler in logger.handlers:
        if (isinstance(handler, logging.StreamHandler) and
                getattr(handler, 'stream', None) is sys.stderr):
            return handler
    return None
