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
# pylint: disable=W0212

r"""Configuration Parser.

Layers option values from defaults, ini files, environment variables and
command-line arguments (later sources win).

Example fermistar.ini file:

.. code-block:: ini

    [fermistar]
    m = 6
    tol = 1e-9

Example:

.. code-block:: bash

    $ FERMISTAR_SEED=7 fermistar verify star --ini fermistar.ini --hbar 0.5
    # m=6 and tol=1e-9 from the ini file, seed=7 from the environment,
    # hbar=0.5 from the command line

"""
from __future__ import print_function

import argparse
import copy
import errno
import logging
import os

from six.moves import collections_abc
from six.moves import configparser

from fermistar import exceptions

LOG = logging.getLogger(__name__)


class Option(object):

    """Holds a configuration option and the names and locations for it.

    Instantiate options using the same arguments as you would for an
    add_argument call in argparse. Two additional kwargs are available:

    :keyword env:
        The name of the environment variable to use for this option
    :keyword group:
        The name of the argument group used in the --help output.
    """

    def __init__(self, *args, **kwargs):
        """Initialize options."""
        self.args = args or []
        self.kwargs = kwargs or {}

    def __copy__(self):
        """Implement copy."""
        return type(self)(*copy.copy(self.args), **copy.copy(self.kwargs))

    def __repr__(self):
        """Customize repr to show option args and kwargs."""
        args = ', '.join(self.args)
        kwrgs = ', '.join(['%s=%s' % (k, v) for k, v in self.kwargs.items()])
        rpr = 'Option(%s' % args
        if kwrgs:
            rpr = '%s, %s' % (rpr, kwrgs)
        return '%s)' % rpr

    def add_argument(self, parser, **override_kwargs):
        """Add this option to an argparse parser (or argument group)."""
        kwargs = copy.copy(self.kwargs)
        if 'env' in kwargs and 'help' in kwargs:
            kwargs['help'] = "%s (or set %s)" % (kwargs['help'],
                                                 kwargs['env'])
        kwargs.pop('env', None)
        groupname = kwargs.pop('group', None)
        kwargs.update(override_kwargs)
        if groupname:
            exists = [grp for grp in parser._action_groups
                      if grp.title == groupname]
            target = exists[0] if exists else parser.add_argument_group(
                title=groupname)
        else:
            target = parser
        return target.add_argument(*self.args, **kwargs)

    @property
    def type(self):
        """The callable used to parse values of the option."""
        return self.kwargs.get("type", str)

    @property
    def name(self):
        """The name of the option as determined from the args."""
        for arg in self.args:
            if arg.startswith("--"):
                return arg[2:].replace("-", "_")
            elif arg.startswith("-"):
                continue
            else:
                return arg.replace("-", "_")

    @property
    def dest(self):
        """The destination name of the option as determined from the args."""
        return self.kwargs.get('dest', self.name)

    @property
    def default(self):
        """The default for the option."""
        return self.kwargs.get("default")

    def convert(self, value):
        """Parse a string from an ini file or the environment."""
        action = self.kwargs.get('action')
        if action in ('store_true', 'store_false'):
            return str(value).strip().lower() in ('1', 'true', 'yes', 'on')
        try:
            return self.type(value)
        except (argparse.ArgumentTypeError, ValueError, TypeError) as exc:
            raise exceptions.ConfigError(
                "Invalid value %r for '%s': %s" % (value, self.name, exc))


class Config(collections_abc.MutableMapping):

    """Parses configuration sources."""

    def __init__(self, options=None, ini_paths=None, prog='fermistar',
                 env=None):
        """Initialize with a list of options.

        :param ini_paths: optional paths to ini files to look up values from
        :param prog: program name; also the ini section and the
            environment variable prefix
        :param env: environment mapping (defaults to os.environ)
        """
        self._options = list(options or [])
        self._ini_paths = [normalized_path(x) for x in ini_paths or []]
        self._env = env
        self.prog = prog
        self._values = {option.dest: option.default
                        for option in self._options}
        self.sources = {}

    def __getitem__(self, key):
        """Get item from config."""
        return self._values[key]

    def __setitem__(self, key, value):
        """Set item in config."""
        self._values[key] = value

    def __delitem__(self, key):
        """Delete item from config."""
        del self._values[key]

    def __iter__(self):
        """Iterate config."""
        return iter(self._values)

    def __len__(self):
        """Check number of config options."""
        return len(self._values)

    def __getattr__(self, attr):
        """Get attribute."""
        # protection from infinite recursion when __init__
        # is skipped during object creation (probably copy.copy)
        if attr == '_values':
            raise AttributeError()
        if attr in self._values:
            return self._values[attr]
        raise AttributeError("'config' object has no attribute '%s'" % attr)

    def add_ini_path(self, path):
        """Give an ini file precedence over the ones already known."""
        path = normalized_path(path)
        if path and path not in self._ini_paths:
            self._ini_paths.insert(0, path)

    def build_parser(self, parser=None, suppress_defaults=False):
        """Attach every option to `parser` (a new one if not given).

        :keyword suppress_defaults: leave unset options out of the parsed
            namespace so only explicitly supplied values show up.
        """
        if parser is None:
            parser = argparse.ArgumentParser(prog=self.prog, add_help=False)
        for option in self._options:
            if suppress_defaults:
                option.add_argument(parser, default=argparse.SUPPRESS)
            else:
                option.add_argument(parser)
        return parser

    def cli_values(self, argv):
        """Parse command-line arguments into values.

        Only returns arguments that are explicitly supplied.
        """
        parser = self.build_parser(suppress_defaults=True)
        parsed, _ = parser.parse_known_args(argv or [])
        return vars(parsed)

    def parse_env(self, env=None, namespace=None):
        """Parse environment variables."""
        env = env if env is not None else (
            self._env if self._env is not None else os.environ)
        namespace = (namespace or self.prog).upper()
        results = {}
        for option in self._options:
            env_var = option.kwargs.get('env')
            default_env = "%s_%s" % (namespace, option.name.upper())
            if env_var and env_var in env:
                results[option.dest] = option.convert(env[env_var])
            elif default_env in env:
                results[option.dest] = option.convert(env[default_env])
        return results

    def parse_ini(self, paths=None, namespace=None, permissive=False):
        """Parse ini files and return configuration options.

        Values are read from the section named after the program.

        :raises UnknownOption: when the section has keys without options
            (unless permissive)
        """
        namespace = namespace or self.prog
        inipaths = list(paths or reversed(self._ini_paths))
        for pth in inipaths:
            if not os.path.isfile(pth):
                raise OSError(errno.ENOENT, 'No such file or directory', pth)
        results = {}
        if not inipaths:
            return results
        parser = configparser.ConfigParser()
        parser.read(inipaths)
        if not parser.has_section(namespace):
            LOG.debug("No [%s] section in %s", namespace, inipaths)
            return results
        ini_options = set(parser.options(namespace))
        for option in self._options:
            if parser.has_option(namespace, option.name):
                value = parser.get(namespace, option.name)
                results[option.dest] = option.convert(value)
                ini_options.discard(option.name)
        if ini_options and not permissive:
            raise exceptions.UnknownOption(
                'No corresponding Option was found for the following '
                'values in the ini file: %s'
                % ', '.join(["'%s'" % o for o in sorted(ini_options)]))
        return results

    def get_defaults(self):
        """Return dict of defaults."""
        return {option.dest: option.default for option in self._options}

    def load_options(self, argv=None):
        """Find settings from all sources.

        Sources are applied in order: defaults, ini files, environment,
        command line.
        """
        args = self.cli_values(argv)
        if args.get('ini'):
            self.add_ini_path(args['ini'])
        layers = (
            ('default', self.get_defaults()),
            ('ini-file', self.parse_ini()),
            ('environment', self.parse_env()),
            ('command-line', args),
        )
        results = {}
        for source, values in layers:
            for key, value in values.items():
                results[key] = value
                self.sources[key] = source
        return results

    def parse(self, argv=None):
        """Find settings from all sources and store them.

        :returns: self
        """
        self._values = self.load_options(argv=argv)
        return self

    def __repr__(self):
        """Display configured values when representing instance."""
        return "<Config %s>" % ', '.join([
            '%s=%s' % (k, v) for k, v in sorted(self.items())])


def normalized_path(value):
    """Normalize and expand a shorthand or relative path."""
    if not value:
        return
    norm = os.path.normpath(value)
    return os.path.abspath(os.path.expanduser(norm))


def comma_separated_strings(value):
    """Handle comma-separated arguments passed in command-line."""
    return [str(v).strip() for v in value.split(",") if v.strip()]


def even_dimension(value):
    """Argument type for the phase-space dimension m."""
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError("%r is not an integer" % (value,))
    if number < 2 or number > 16 or number % 2:
        raise argparse.ArgumentTypeError(
            "m must be an even integer between 2 and 16, got %d" % number)
    return number


def positive_float(value):
    """Argument type for strictly positive reals."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError("%r is not a number" % (value,))
    if not number > 0:
        raise argparse.ArgumentTypeError("%r must be positive" % (value,))
    return number


def seed_value(value):
    """Argument type for 64-bit seeds."""
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError("%r is not an integer" % (value,))
    if number < 0 or number >= 2 ** 64:
        raise argparse.ArgumentTypeError(
            "seed must lie in [0, 2**64), got %d" % number)
    return number


OPTIONS = {
    'debug': Option(
        "-d", "--debug",
        default=False,
        action="store_true",
        help="turn on additional debugging output; log output includes "
             "source file path and line numbers"
    ),
    'quiet': Option(
        "-q", "--quiet",
        default=False,
        action="store_true",
        help="turn down logging to WARN (default is INFO)"
    ),
}
