# Copyright (c) 2011-2015 Rackspace US, Inc.
#
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
"""CLI utilities."""

import argparse
import io
import json
import os
import sys

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

FermistarHelpFormatter = type('FermistarHelpFormatter',
                              (argparse.ArgumentDefaultsHelpFormatter,
                               argparse.RawTextHelpFormatter), {})


class HelpfulParser(argparse.ArgumentParser):

    """An argparser that won't leave you hanging."""

    def __init__(self, *args, **kwargs):
        """Set formatter_class if it is not explicitly specified."""
        kwargs.setdefault('formatter_class', FermistarHelpFormatter)
        super(HelpfulParser, self).__init__(*args, **kwargs)

    def error(self, message, print_help=False):
        """Provide a more helpful message if there are too few arguments."""
        lowered = message.lower()
        if 'too few arguments' in lowered or 'required' in lowered:
            prog = os.path.basename(self.prog) or self.prog
            message = "%s. Try getting help with `%s --help`" % (message,
                                                                 prog)
        if print_help:
            self.print_help()
        else:
            self.print_usage()
        sys.stderr.write('\nerror: %s\n' % message)
        sys.exit(EXIT_USAGE)


def read_json(path):
    """Load a JSON document from a path, or from stdin when path is '-'."""
    if path == '-':
        return json.load(sys.stdin)
    with io.open(path, 'r', encoding='utf-8') as handle:
        return json.load(handle)


def write_json(document, path=None):
    """Write a JSON document to a path, or to stdout when path is '-'."""
    text = json.dumps(document, indent=2, sort_keys=True)
    if path in (None, '-'):
        sys.stdout.write(text + '\n')
        return
    with io.open(path, 'w', encoding='utf-8') as handle:
        handle.write(u'%s\n' % text)
