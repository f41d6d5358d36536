# pylint: disable=C0103,C0111,R0903,R0904,W0212,W0232

# Copyright 2013-2015 Rackspace US, Inc.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Tests for :mod:`fermistar.log`."""
from __future__ import print_function

import logging
import sys
import unittest

import mock

from fermistar import log


class TestLogLevel(unittest.TestCase):

    def test_default(self):
        self.assertEqual(log.log_level({}), logging.INFO)

    def test_debug_and_verbose(self):
        self.assertEqual(log.log_level({'debug': True}), logging.DEBUG)
        self.assertEqual(log.log_level({'verbose': True}), logging.DEBUG)

    def test_quiet(self):
        self.assertEqual(log.log_level({'quiet': True}), logging.WARNING)

    def test_options(self):
        names = [option.name for option in log.OPTIONS]
        self.assertEqual(names, ['logconfig', 'debug', 'quiet', 'verbose'])


class TestConsoleLogging(unittest.TestCase):

    def setUp(self):
        root = logging.getLogger()
        saved = (list(root.handlers), root.level)

        def restore():
            root.handlers[:] = saved[0]
            root.setLevel(saved[1])
            logging.captureWarnings(False)
        self.addCleanup(restore)

    def test_logs_to_stderr(self):
        log.init_console_logging({'quiet': True})
        handler = log.find_console_handler(logging.getLogger())
        self.assertIsNotNone(handler)
        self.assertIs(handler.stream, sys.stderr)
        self.assertEqual(handler.level, logging.WARNING)
        self.assertEqual(handler.formatter._fmt,
                         log.FORMATS[logging.WARNING])

    def test_reuses_handler(self):
        log.init_console_logging({})
        log.init_console_logging({'debug': True})
        handlers = [h for h in logging.getLogger().handlers
                    if getattr(h, 'stream', None) is sys.stderr]
        self.assertEqual(len(handlers), 1)
        self.assertIsInstance(handlers[0].formatter, log.DebugFormatter)

    @mock.patch.object(log.logging.config, 'fileConfig')
    @mock.patch.object(log.os.path, 'isfile', return_value=True)
    def test_logconfig_file(self, mock_isfile, mock_file_config):
        log.configure({'logconfig': 'logging.ini'})
        mock_isfile.assert_called_with('logging.ini')
        mock_file_config.assert_called_once_with(
            'logging.ini', disable_existing_loggers=False)

    @mock.patch.object(log.logging, 'captureWarnings')
    def test_captures_numeric_warnings(self, mock_capture):
        log.configure({'quiet': True})
        mock_capture.assert_called_once_with(True)


class TestDebugFormatter(unittest.TestCase):

    def record(self, data=None):
        record = logging.LogRecord('fermistar', logging.DEBUG, __file__, 1,
                                   'transported', None, None)
        if data is not None:
            record.data = data
        return record

    def test_data_pairs(self):
        formatter = log.DebugFormatter('%(message)s')
        record = self.record({'steps': 200, 'residual': 1.25e-11,
                              'factor': 1j})
        self.assertEqual(formatter.format(record),
                         'transported [factor=0+1j residual=1.25e-11 '
                         'steps=200]')

    def test_without_data(self):
        formatter = log.DebugFormatter('%(message)s')
        self.assertEqual(formatter.format(self.record()), 'transported')
        self.assertEqual(formatter.format(self.record('raw')),
                         'transported [raw]')

    def test_format_value(self):
        self.assertEqual(log.format_value(True), 'True')
        self.assertEqual(log.format_value('anchor'), 'anchor')
        self.assertEqual(log.format_value(0.5), '0.5')


if __name__ == '__main__':
    unittest.main()
