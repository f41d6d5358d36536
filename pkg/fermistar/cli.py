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

"""The `fermistar` command line.

.. code-block:: bash

    $ fermistar verify states --m 4 --hbar 1.0
    $ fermistar verify --suite star,clifford --seed 7 --json report.json
    $ echo '{"op": "berezin", "args": {...}}' | fermistar eval -

Exit codes: 0 pass, 1 check failure (or a failing eval operation),
2 configuration, schema or I/O error. Logging goes to stderr; stdout only
carries JSON.
"""

import logging
import sys

from fermistar import config
from fermistar import exceptions
from fermistar import log
from fermistar import operations
from fermistar import verify
from fermistar.utils import cli as cli_utils

LOG = logging.getLogger(__name__)


def verify_config():
    """Options of `fermistar verify` (verification and logging)."""
    return config.Config(options=verify.OPTIONS + log.OPTIONS,
                         prog='fermistar')


def eval_config():
    """Options of `fermistar eval` (logging only)."""
    return config.Config(options=log.OPTIONS, prog='fermistar')


def build_parser():
    """Return the top-level parser with its subcommands attached."""
    parser = cli_utils.HelpfulParser(
        prog='fermistar',
        description='Fermionic star products, quantisation and transport.',
    )
    subparser = parser.add_subparsers(
        title='commands',
        description='Available commands',
        dest='command',
    )
    verify_parser = subparser.add_parser(
        'verify',
        help='Run verification suites and write a JSON report',
        parents=[verify_config().build_parser()],
        formatter_class=cli_utils.FermistarHelpFormatter,
    )
    verify_parser.add_argument(
        'suite_names', nargs='*', metavar='SUITE',
        help="suites to run (%s or all)" % ', '.join(verify.SUITES))
    verify_parser.set_defaults(_func=run_verify)
    eval_parser = subparser.add_parser(
        'eval',
        help='Evaluate one operation given as JSON',
        parents=[eval_config().build_parser()],
        formatter_class=cli_utils.FermistarHelpFormatter,
    )
    eval_parser.add_argument(
        'file', metavar='FILE',
        help='request {"op": NAME, "args": {...}} (- for stdin)')
    eval_parser.set_defaults(_func=run_eval)
    return parser


def run_verify(args, argv):
    """`fermistar verify`: run suites, log a summary, write the report."""
    try:
        conf = verify_config().parse(argv)
        log.configure(conf)
        suites = list(conf.suites or []) + list(args.suite_names)
        settings = verify.SuiteConfig(
            m=conf.m, hbar=conf.hbar, seed=conf.seed, tol=conf.tol,
            suites=suites or None, output=conf.output, jobs=conf.jobs,
            steps=conf.steps)
    except (exceptions.ConfigError, EnvironmentError) as exc:
        LOG.error("Invalid configuration: %s", exc)
        return cli_utils.EXIT_USAGE
    report = verify.run(settings)
    try:
        cli_utils.write_json(report.to_dict(), settings.output)
    except EnvironmentError as exc:
        LOG.error("Could not write the report: %s", exc)
        return cli_utils.EXIT_USAGE
    failed = [record.name for record in report.records if not record.passed]
    if failed:
        LOG.warning("%d of %d checks failed: %s", len(failed),
                    len(report.records), ', '.join(failed))
        return cli_utils.EXIT_FAILURE
    LOG.info("All %d checks passed (fingerprint %s)", len(report.records),
             report.fingerprint)
    return cli_utils.EXIT_OK


def run_eval(args, argv):
    """`fermistar eval FILE`: print the JSON result of one operation."""
    log.configure(eval_config().parse(argv))
    try:
        request = cli_utils.read_json(args.file)
    except (EnvironmentError, ValueError) as exc:
        LOG.error("Could not read %s: %s", args.file, exc)
        return cli_utils.EXIT_USAGE
    try:
        result = operations.evaluate(request)
    except exceptions.SchemaError as exc:
        LOG.error("Invalid request at %s: %s", exc.location, exc.message)
        return cli_utils.EXIT_USAGE
    except exceptions.FermistarException as exc:
        LOG.error("%s failed: %s", request.get('op'), exc)
        return cli_utils.EXIT_FAILURE
    cli_utils.write_json(result, '-')
    return cli_utils.EXIT_OK


def main(argv=None):
    """Entry point for the `fermistar` command."""
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    if not getattr(args, '_func', None):
        build_parser().error('a command is required (verify or eval)')
    return args._func(args, argv)


if __name__ == '__main__':

    sys.exit(main())
