# Copyright 2015 Rackspace US, Inc.
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

"""Verification suites.

Each suite is a list of named checks. A check draws its random inputs from
its own stream (see :mod:`fermistar.sampling`), computes a residual and
compares it with a limit. Formal-mode checks use Gaussian-integer inputs,
dyadic bivectors and a dyadic diagonal metric, so their limit is zero.

Usage:

.. code-block:: python

    from fermistar import verify

    report = verify.run(verify.SuiteConfig(m=4, seed=7, suites=['star']))
    print(report.passed, report.fingerprint)
"""

import collections
import functools
import hashlib
import json
import logging
import time

from concurrent import futures
import numpy as np
from scipy import linalg
import six  # pylint: disable=wrong-import-order

from fermistar import clifford
from fermistar import config
from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import polarization as pol
from fermistar import quantiser
from fermistar import sampling
from fermistar import sections
from fermistar import star
from fermistar import tensors
from fermistar import transport

LOG = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SUITES = ('algebra', 'star', 'clifford', 'polarization', 'states',
          'transport', 'metaplectic', 'equivariance')

# largest generator count each suite runs at
SIZE_CAPS = {
    'algebra': 8,
    'star': 6,
    'clifford': 4,
    'polarization': 16,
    'states': 6,
    'transport': 4,
    'metaplectic': 4,
    'equivariance': 4,
}

TRIALS = 100
KERNEL_HBARS = (0.3, 1.0, 2.7)
EXAMPLE_HBARS = (0.5, 1.0, 2.0)
HOLONOMY_DELTAS = (0.1, 0.05, 0.025)
COMPATIBILITY_EPSILONS = (1e-2, 1e-3, 1e-4)
TRANSPORT_TOLERANCE = 1e-8
METAPLECTIC_TOLERANCE = 1e-6
ROTATIONS = 20

OPTIONS = [
    config.Option('--ini', help="ini file with a [fermistar] section",
                  group='verify'),
    config.Option('--m', type=config.even_dimension, default=4,
                  help="phase-space dimension (even, 2..16)",
                  group='verify'),
    config.Option('--hbar', type=config.positive_float, default=1.0,
                  help="numeric value of hbar", group='verify'),
    config.Option('--seed', type=config.seed_value, default=0,
                  help="seed of the random streams", group='verify'),
    config.Option('--tol', type=config.positive_float, default=1e-10,
                  help="tolerance of numeric identities", group='verify'),
    config.Option('--suite', dest='suites',
                  type=config.comma_separated_strings, action='append',
                  help="suites to run (repeatable or comma-separated; "
                       "default: all)", group='verify'),
    config.Option('--json', dest='output',
                  help="write the report JSON here ('-' for stdout)",
                  group='verify'),
    config.Option('--jobs', type=int, default=1,
                  help="suites run in parallel", group='verify'),
    config.Option('--steps', type=int, default=transport.DEFAULT_STEPS,
                  help="transport steps per unit path parameter",
                  group='verify'),
]


def expand_suites(names):
    """Flatten repeated/comma-separated suite names; 'all' expands."""
    flat = []
    for name in names or ['all']:
        items = [name] if isinstance(name, six.string_types) else name
        for item in items:
            flat.extend(SUITES if item == 'all' else [item])
    unknown = sorted(set(flat) - set(SUITES))
    if unknown:
        raise exceptions.ConfigError(
            "unknown suite(s) %s; choose from %s or all"
            % (', '.join(unknown), ', '.join(SUITES)))
    return [suite for suite in SUITES if suite in flat]


class SuiteConfig(object):

    """Validated verification settings."""

    def __init__(self, m=4, hbar=1.0, seed=0, tol=1e-10, suites=None,
                 output=None, jobs=1, steps=transport.DEFAULT_STEPS):
        """Validate the settings.

        :raises ConfigError: on an invalid value
        """
        if isinstance(m, bool) or not isinstance(m, int) or \
                not 2 <= m <= mv.MAX_GENERATORS or m % 2:
            raise exceptions.ConfigError(
                "m must be an even integer in 2..%d, got %r"
                % (mv.MAX_GENERATORS, m))
        if not hbar > 0:
            raise exceptions.ConfigError("hbar must be positive")
        if not tol > 0:
            raise exceptions.ConfigError("tol must be positive")
        if not 0 <= seed < 2 ** 64:
            raise exceptions.ConfigError("seed must lie in [0, 2**64)")
        if jobs < 1 or steps < 4:
            raise exceptions.ConfigError(
                "jobs must be >= 1 and steps >= 4")
        self.m = m
        self.hbar = float(hbar)
        self.seed = int(seed)
        self.tol = float(tol)
        self.suites = expand_suites(suites)
        self.output = output
        self.jobs = jobs
        self.steps = steps

    @classmethod
    def from_config(cls, conf):
        """Build from a parsed :class:`fermistar.config.Config`."""
        return cls(m=conf.m, hbar=conf.hbar, seed=conf.seed, tol=conf.tol,
                   suites=conf.suites, output=conf.output, jobs=conf.jobs,
                   steps=conf.steps)

    def to_dict(self):
        """Settings that determine the report."""
        return {'m': self.m, 'hbar': self.hbar, 'seed': self.seed,
                'tol': self.tol, 'suites': list(self.suites),
                'steps': self.steps}


class Outcome(object):

    """Residual of one check."""

    def __init__(self, residual, passed, detail=''):
        self.residual = float(residual)
        self.passed = bool(passed)
        self.detail = detail


def bound(residual, limit, detail=''):
    """Outcome passing when residual <= limit."""
    return Outcome(residual, residual <= limit, detail)


class Record(object):

    """One report line."""

    def __init__(self, name, anchor, status, max_residual, runtime, m,
                 detail=''):
        self.name = name
        self.anchor = anchor
        self.status = status
        self.max_residual = max_residual
        self.runtime = runtime
        self.m = m
        self.detail = detail

    @property
    def passed(self):
        """Whether the check passed."""
        return self.status == 'pass'

    def to_dict(self, runtime=True):
        """JSON form (optionally without the runtime)."""
        result = {'name': self.name, 'anchor': self.anchor,
                  'status': self.status, 'max_residual': self.max_residual,
                  'm': self.m, 'detail': self.detail}
        if runtime:
            result['runtime'] = round(self.runtime, 6)
        return result


class Report(object):

    """Records of a run plus the overall verdict."""

    def __init__(self, config_, records):
        self.config = config_
        self.records = list(records)

    @property
    def passed(self):
        """True when every record passes."""
        return all(record.passed for record in self.records)

    @property
    def fingerprint(self):
        """sha256 of the canonical report without runtimes."""
        body = {'schema': SCHEMA_VERSION, 'config': self.config.to_dict(),
                'records': [record.to_dict(runtime=False)
                            for record in self.records],
                'passed': self.passed}
        text = json.dumps(body, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    def to_dict(self):
        """The report document."""
        return {'schema': SCHEMA_VERSION, 'config': self.config.to_dict(),
                'records': [record.to_dict() for record in self.records],
                'passed': self.passed, 'fingerprint': self.fingerprint}


class Context(object):

    """What a check sees: the settings, its size and its random stream."""

    def __init__(self, config_, suite, name):
        self.config = config_
        self.m = min(config_.m, SIZE_CAPS[suite])
        self.hbar = config_.hbar
        self.tol = config_.tol
        self.steps = config_.steps
        self.rng = sampling.stream(config_.seed, '%s.%s' % (suite, name))


CHECKS = collections.OrderedDict((suite, []) for suite in SUITES)


def check(suite, name, anchor):
    """Register fxn(ctx) -> Outcome as a check of a suite."""
    def wrap(fxn):
        """Add to the suite."""
        CHECKS[suite].append((name, anchor, fxn))
        return fxn
    return wrap


def run_check(config_, suite, name, anchor, fxn):
    """Run one check; library and linear-algebra errors become records."""
    ctx = Context(config_, suite, name)
    started = time.time()
    try:
        outcome = fxn(ctx)
        status = 'pass' if outcome.passed else 'fail'
        residual, detail = outcome.residual, outcome.detail
    except (exceptions.FermistarException, linalg.LinAlgError,
            np.linalg.LinAlgError, FloatingPointError) as exc:
        LOG.error("%s.%s raised %s", suite, name, exc)
        status, residual, detail = 'error', float('inf'), str(exc)
    runtime = time.time() - started
    record = Record('%s.%s' % (suite, name), anchor, status,
                    _finite(residual), runtime, ctx.m, detail)
    LOG.info("%-4s %-40s max residual %.3g (%.2fs)", status.upper(),
             record.name, residual, runtime,
             extra={'data': {'anchor': anchor, 'm': ctx.m}})
    return record


def _finite(value):
    return value if np.isfinite(value) else None


def run_suite(config_, suite):
    """Run every check of a suite."""
    LOG.info("Running suite %s (m=%d)", suite,
             min(config_.m, SIZE_CAPS[suite]))
    records = [run_check(config_, suite, name, anchor, fxn)
               for name, anchor, fxn in CHECKS[suite]]
    failed = sum(1 for record in records if not record.passed)
    LOG.info("Suite %s finished: %d checks, %d failed", suite,
             len(records), failed)
    return records


def run(config_):
    """Run the configured suites and assemble the Report."""
    if config_.jobs > 1 and len(config_.suites) > 1:
        with futures.ThreadPoolExecutor(max_workers=config_.jobs) as pool:
            results = list(pool.map(lambda suite: run_suite(config_, suite),
                                    config_.suites))
    else:
        results = [run_suite(config_, suite) for suite in config_.suites]
    return Report(config_, [record for records in results
                            for record in records])


#
# Shared helpers
#
def _dyadic_metric(m):
    """diag(1, 2, 1/2, 4, ...): exact in binary together with its inverse."""
    cycle = (1.0, 2.0, 0.5, 4.0)
    return tensors.Metric(np.diag([cycle[k % 4] for k in range(m)]))


def _formal(rng, m, parity=None):
    if parity is None:
        return sampling.random_multivector(rng, m)
    return sampling.random_homogeneous(rng, m, parity)


def _numeric(rng, m, hbar, parity=None):
    if parity is None:
        return sampling.random_multivector(rng, m, hbar=hbar)
    return sampling.random_homogeneous(rng, m, parity, hbar=hbar)


def _monomials(m, hbar=None):
    return [mv.Multivector.monomial(m, mv.indices_of(mask), hbar=hbar)
            for mask in range(1 << m)]


def _relative(difference, *references):
    scale = max([1.0] + [reference.norm() for reference in references])
    return difference.norm() / scale


def _sign(f, g):
    return -1.0 if f.parity() and g.parity() else 1.0


def _sizes(ctx, low=4):
    return sorted(set([min(low, ctx.m), ctx.m]))


def _trials(m):
    """Random triples per size: the full count up to the star suite cap."""
    return TRIALS if m <= SIZE_CAPS['star'] else TRIALS // 4


#
# algebra: the Grassmann algebra and its doubled forms
#
@check('algebra', 'wedge_associativity', 'associativity of the wedge')
def _wedge_associativity(ctx):
    worst = 0.0
    for _ in range(TRIALS // 4):
        f, g, h = [_formal(ctx.rng, ctx.m) for _ in range(3)]
        worst = max(worst, mv.wedge(mv.wedge(f, g), h).distance(
            mv.wedge(f, mv.wedge(g, h))))
    return bound(worst, 0.0)


@check('algebra', 'graded_commutativity', 'f^g = (-1)^{|f||g|} g^f')
def _graded_commutativity(ctx):
    worst = 0.0
    for trial in range(TRIALS // 4):
        f = _formal(ctx.rng, ctx.m, trial % 2)
        g = _formal(ctx.rng, ctx.m, (trial // 2) % 2)
        worst = max(worst, mv.wedge(f, g).distance(
            mv.wedge(g, f) * _sign(f, g)))
    return bound(worst, 0.0)


def _leibniz_residual(F, m):
    worst = 0.0
    for mu in range(m):
        vector = np.eye(m)[mu]
        left = mv.fermi_derivative(mu + 1, mv.diagonal_pullback(F))
        right = mv.diagonal_pullback(F.slot_derivative(0, vector) +
                                     F.slot_derivative(1, vector))
        worst = max(worst, left.distance(right))
    return worst


@check('algebra', 'leibniz_operator',
       'd_mu Delta^* = Delta^* (d_mu (x) 1 + 1 (x) d_mu)')
def _leibniz_operator(ctx):
    small = min(ctx.m, 3)
    worst = 0.0
    for mask in range(1 << (2 * small)):
        F = mv.DoubledMultivector(2 * small,
                                  np.eye(1, 1 << (2 * small), mask))
        worst = max(worst, _leibniz_residual(F, small))
    large = min(ctx.m, 6)
    for _ in range(5):
        f = _formal(ctx.rng, 2 * large)
        F = mv.DoubledMultivector(2 * large, f.layers, low=f.low)
        worst = max(worst, _leibniz_residual(F, large))
    return bound(worst, 0.0, 'exhaustive at m=%d, random at m=%d'
                 % (small, large))


@check('algebra', 'tri_diagonal', '(Delta x 1) Delta = (1 x Delta) Delta')
def _tri_diagonal(ctx):
    m = min(ctx.m, 5)
    worst = 0.0
    for _ in range(10):
        f, g, h = [_formal(ctx.rng, m) for _ in range(3)]
        F = mv.triple_embed(f, g, h)
        first = mv.merge_slots(mv.merge_slots(F, 0), 0)
        second = mv.merge_slots(mv.merge_slots(F, 1), 0)
        direct = mv.wedge(mv.wedge(f, g), h)
        worst = max(worst, first.distance(second), first.distance(direct))
    return bound(worst, 0.0)


@check('algebra', 'graded_flip', 'Delta^* sigma_2 = Delta^*')
def _graded_flip(ctx):
    m = min(ctx.m, 6)
    worst = 0.0
    for _ in range(10):
        f = _formal(ctx.rng, 2 * m)
        F = mv.DoubledMultivector(2 * m, f.layers, low=f.low)
        worst = max(worst, mv.diagonal_pullback(mv.graded_flip(F)).distance(
            mv.diagonal_pullback(F)))
    return bound(worst, 0.0)


@check('algebra', 'berezin_top', 'Berezin integral picks the top monomial')
def _berezin_top(ctx):
    worst = 0.0
    for mask in range(1 << ctx.m):
        monomial = mv.Multivector.monomial(ctx.m, mv.indices_of(mask),
                                           hbar=ctx.hbar)
        expected = 1.0 if mask == (1 << ctx.m) - 1 else 0.0
        worst = max(worst, abs(mv.berezin_integral(monomial) - expected))
    return bound(worst, 0.0)


@check('algebra', 'exp_even', 'exp(a + b) = exp(a) ^ exp(b) for even a, b')
def _exp_even(ctx):
    worst = 0.0
    for _ in range(10):
        a, b = [_numeric(ctx.rng, ctx.m, ctx.hbar, 0) for _ in range(2)]
        a = a - a.one_like() * a.coefficient(0)
        b = b - b.one_like() * b.coefficient(0)
        left = mv.exp_even(a + b)
        right = mv.wedge(mv.exp_even(a), mv.exp_even(b))
        worst = max(worst, _relative(left - right, left, right))
    return bound(worst, ctx.tol)


#
# star: Poisson superalgebra and the star products *_K
#
def _star_inputs(ctx, m):
    return _dyadic_metric(m), sampling.random_bivector(ctx.rng, m,
                                                       dyadic=True)


@check('star', 'associativity', 'associativity of *_K')
def _star_associativity(ctx):
    small = min(ctx.m, 3)
    metric, K = _star_inputs(ctx, small)
    basis = _monomials(small)
    right = {}
    worst = 0.0
    for f in basis:
        for i, g in enumerate(basis):
            fg = star.star_k(f, g, metric, K)
            for j, h in enumerate(basis):
                if (i, j) not in right:
                    right[i, j] = star.star_k(g, h, metric, K)
                worst = max(worst, star.star_k(fg, h, metric, K).distance(
                    star.star_k(f, right[i, j], metric, K)))
    for m in _sizes(ctx):
        metric, K = _star_inputs(ctx, m)
        for _ in range(_trials(m)):
            f, g, h = [_formal(ctx.rng, m) for _ in range(3)]
            left = star.star_k(star.star_k(f, g, metric, K), h, metric, K)
            worst = max(worst, left.distance(star.star_k(
                f, star.star_k(g, h, metric, K), metric, K)))
    return bound(worst, 0.0)


@check('star', 'first_order', 'graded commutator of *_K is hbar {f, g}')
def _first_order(ctx):
    metric, K = _star_inputs(ctx, ctx.m)
    worst = 0.0
    for trial in range(TRIALS // 4):
        f = _formal(ctx.rng, ctx.m, trial % 2)
        g = _formal(ctx.rng, ctx.m, (trial // 2) % 2)
        difference = (star.star_k(f, g, metric, K) -
                      star.star_k(g, f, metric, K) * _sign(f, g))
        bracket = star.poisson_bracket(f, g, metric)
        worst = max(worst, difference.hbar_coefficient(0).norm(),
                    difference.hbar_coefficient(1).distance(bracket))
    return bound(worst, 0.0)


@check('star', 'jacobi', 'graded Jacobi identity of the bracket')
def _jacobi(ctx):
    metric = _dyadic_metric(ctx.m)
    bracket = functools.partial(star.poisson_bracket, metric=metric)
    worst = 0.0
    for trial in range(TRIALS // 4):
        f, g, h = [_formal(ctx.rng, ctx.m, (trial >> k) % 2)
                   for k in range(3)]
        left = bracket(f, bracket(g, h))
        right = (bracket(bracket(f, g), h) +
                 bracket(g, bracket(f, h)) * _sign(f, g))
        worst = max(worst, left.distance(right))
    return bound(worst, 0.0)


@check('star', 'leibniz', '{f, g^h} = {f,g}^h + (-1)^{|f||g|} g^{f,h}')
def _bracket_leibniz(ctx):
    metric = _dyadic_metric(ctx.m)
    worst = 0.0
    for trial in range(TRIALS // 4):
        f = _formal(ctx.rng, ctx.m, trial % 2)
        g = _formal(ctx.rng, ctx.m, (trial // 2) % 2)
        h = _formal(ctx.rng, ctx.m)
        left = star.poisson_bracket(f, mv.wedge(g, h), metric)
        right = (mv.wedge(star.poisson_bracket(f, g, metric), h) +
                 mv.wedge(g, star.poisson_bracket(f, h, metric)) *
                 _sign(f, g))
        worst = max(worst, left.distance(right))
    return bound(worst, 0.0)


@check('star', 'linear_wedge', 'a *_0 g and f *_0 a for linear a')
def _linear_wedge(ctx):
    m = ctx.m
    metric = _dyadic_metric(m)
    worst = 0.0
    for trial in range(TRIALS // 4):
        covector = sampling.gaussian_integers(ctx.rng, m)
        a = mv.Multivector.linear(covector)
        f = _formal(ctx.rng, m, trial % 2)
        g = _formal(ctx.rng, m)
        raised = metric.raise_(covector)
        sign = -1.0 if f.parity() else 1.0
        left = star.moyal(mv.wedge(a, f), g, metric)
        right = (mv.wedge(a, star.moyal(f, g, metric)) + star.hbar_term(
            star.moyal(f, mv.derivative_along(raised, g), metric),
            0.25 * sign))
        worst = max(worst, left.distance(right))
        left = star.moyal(f, mv.wedge(a, g), metric)
        right = (mv.wedge(a, star.moyal(f, g, metric)) * sign +
                 star.hbar_term(star.moyal(
                     mv.derivative_along(raised, f).grade_involution(), g,
                     metric), 0.25))
        worst = max(worst, left.distance(right))
    return bound(worst, 0.0)


@check('star', 'degree_one', 'a *_K b = a^b + (hbar/4) Lambda(a, b)')
def _degree_one(ctx):
    metric, K = _star_inputs(ctx, ctx.m)
    lam = K.lam(metric)
    worst = 0.0
    for _ in range(TRIALS // 4):
        a_vec = sampling.gaussian_integers(ctx.rng, ctx.m)
        b_vec = sampling.gaussian_integers(ctx.rng, ctx.m)
        a = mv.Multivector.linear(a_vec)
        b = mv.Multivector.linear(b_vec)
        expected = mv.wedge(a, b) + star.hbar_term(
            a.one_like(), 0.25 * np.dot(a_vec, np.dot(lam, b_vec)))
        worst = max(worst, star.star_k(a, b, metric, K).distance(expected))
    return bound(worst, 0.0)


@check('star', 'intertwining', 'U(f *_K g) = U f *_K\' U g')
def _intertwining(ctx):
    worst = 0.0
    for m in sorted(set([min(2, ctx.m)] + _sizes(ctx))):
        metric, source = _star_inputs(ctx, m)
        target = sampling.random_bivector(ctx.rng, m, dyadic=True)
        for _ in range(_trials(m)):
            f, g = [_formal(ctx.rng, m) for _ in range(2)]
            left = star.intertwiner(source, target,
                                    star.star_k(f, g, metric, source))
            right = star.star_k(star.intertwiner(source, target, f),
                                star.intertwiner(source, target, g),
                                metric, target)
            worst = max(worst, left.distance(right))
    return bound(worst, 0.0)


@check('star', 'cocycle', 'U_{K2,K1} U_{K1,K0} = U_{K2,K0}')
def _cocycle(ctx):
    path = [sampling.random_bivector(ctx.rng, ctx.m, dyadic=True)
            for _ in range(3)]
    worst = 0.0
    for _ in range(TRIALS // 4):
        f = _formal(ctx.rng, ctx.m)
        worst = max(worst, star.o_transport(path, f).distance(
            star.intertwiner(path[0], path[-1], f)))
        worst = max(worst, star.o_transport(path + path[-2::-1], f)
                    .distance(f))
    return bound(worst, 0.0)


@check('star', 'degree_bound', 'deg_hbar(f *_K g) <= m')
def _degree_bound(ctx):
    metric, K = _star_inputs(ctx, ctx.m)
    worst = 0
    for _ in range(TRIALS // 4):
        f, g = [_formal(ctx.rng, ctx.m) for _ in range(2)]
        degree = star.star_k(f, g, metric, K).hbar_degree() or 0
        worst = max(worst, degree)
    return Outcome(max(0, worst - ctx.m), worst <= ctx.m,
                   'highest hbar power %d' % worst)


@check('star', 'direct_oracle', 'nested-sum *_K agrees with the doubled form')
def _direct_oracle(ctx):
    m = min(ctx.m, 4)
    metric, K = _star_inputs(ctx, m)
    worst = 0.0
    for _ in range(TRIALS // 10):
        f, g = [_formal(ctx.rng, m) for _ in range(2)]
        left = star.star_k(f, g, metric, K)
        worst = max(worst, _relative(left - star.star_k_direct(f, g, metric,
                                                               K), left))
    return bound(worst, ctx.tol)


#
# clifford: quantisation maps
#
def _clifford_inputs(ctx, m):
    return _dyadic_metric(m), sampling.random_bivector(ctx.rng, m,
                                                       dyadic=True)


@check('clifford', 'quantization_homomorphism', 'Q_K(f) Q_K(g) = Q_K(f *_K g)')
def _quantization_homomorphism(ctx):
    worst = 0.0
    small = min(ctx.m, 3)
    metric, K = _clifford_inputs(ctx, small)
    basis = _monomials(small)
    images = [clifford.quantize(f, K, metric) for f in basis]
    for i, f in enumerate(basis):
        for j, g in enumerate(basis):
            left = clifford.clifford_mul(images[i], images[j], metric)
            right = clifford.quantize(star.star_k(f, g, metric, K), K, metric)
            worst = max(worst, left.distance(right))
    metric, K = _clifford_inputs(ctx, ctx.m)
    for _ in range(TRIALS // 4):
        f, g = [_formal(ctx.rng, ctx.m) for _ in range(2)]
        left = clifford.clifford_mul(clifford.quantize(f, K, metric),
                                     clifford.quantize(g, K, metric), metric)
        right = clifford.quantize(star.star_k(f, g, metric, K), K, metric)
        worst = max(worst, left.distance(right))
    return bound(worst, 0.0)


@check('clifford', 'symbol_inverse', 'symbol(Q_K f) = f')
def _symbol_inverse(ctx):
    metric, K = _clifford_inputs(ctx, ctx.m)
    worst = 0.0
    for _ in range(TRIALS // 4):
        f = _formal(ctx.rng, ctx.m)
        worst = max(worst, clifford.symbol(
            clifford.quantize(f, K, metric), K, metric).distance(f))
    return bound(worst, 0.0)


@check('clifford', 'supertrace_table', 'str vanishes below the top degree')
def _supertrace_table(ctx):
    m = ctx.m
    n = m // 2
    worst = 0.0
    for mask in range(1 << m):
        x = clifford.CliffordElement.monomial(m, mv.indices_of(mask))
        value = clifford.supertrace(x)
        expected = {n: (0.5j) ** n} if mask == (1 << m) - 1 else {}
        got = value.to_dict()
        for power in set(got) | set(expected):
            worst = max(worst, abs(got.get(power, 0) -
                                   expected.get(power, 0)))
    return bound(worst, 0.0)


@check('clifford', 'derivative_compatibility',
       'd_v Q_0(f) = Q_0(d_v f) with the inner derivation')
def _derivative_compatibility(ctx):
    metric = _dyadic_metric(ctx.m)
    zero = tensors.Bivector.zero(ctx.m)
    worst = 0.0
    for _ in range(TRIALS // 4):
        f = _formal(ctx.rng, ctx.m)
        vector = sampling.gaussian_integers(ctx.rng, ctx.m)
        left = clifford.inner_derivation(vector,
                                         clifford.quantize(f, zero, metric),
                                         metric)
        right = clifford.quantize(mv.derivative_along(vector, f), zero,
                                  metric)
        worst = max(worst, left.distance(right))
    return bound(worst, 0.0)


@check('clifford', 'flat_transport', 'Q_K1(U_{K1,K0} f) = Q_K0(f)')
def _flat_transport(ctx):
    metric, source = _clifford_inputs(ctx, ctx.m)
    target = sampling.random_bivector(ctx.rng, ctx.m, dyadic=True)
    worst = 0.0
    for _ in range(TRIALS // 4):
        f = _formal(ctx.rng, ctx.m)
        left = clifford.quantize(star.intertwiner(source, target, f),
                                 target, metric)
        worst = max(worst, left.distance(clifford.quantize(f, source,
                                                           metric)))
    return bound(worst, 0.0)


@check('clifford', 'stratonovich_weyl', 'Berezin pairing with Omega_K is Q_K')
def _stratonovich_weyl(ctx):
    metric = tensors.Metric.identity(ctx.m)
    K = sampling.random_bivector(ctx.rng, ctx.m)
    worst = 0.0
    for _ in range(10):
        f = _numeric(ctx.rng, ctx.m, ctx.hbar)
        expected = clifford.quantize(f, K, metric)
        got = quantiser.quantize_via_sw(f, K, metric)
        worst = max(worst, _relative(got - expected, expected))
        x = _numeric(ctx.rng, ctx.m, ctx.hbar)
        x = clifford.as_clifford(x)
        symbol = clifford.symbol(x, K, metric)
        worst = max(worst, _relative(
            quantiser.symbol_via_supertrace(x, K, metric) - symbol, symbol))
    return bound(worst, max(ctx.tol, 1e-12))


@check('clifford', 'kernel_star', 'Berezin-kernel *_K agrees with *_K')
def _kernel_star(ctx):
    worst = 0.0
    for m in sorted(set([2, min(ctx.m, 4)])):
        metric = tensors.Metric.identity(m)
        K = sampling.random_bivector(ctx.rng, m)
        for hbar in KERNEL_HBARS:
            for _ in range(5):
                f, g = [_numeric(ctx.rng, m, hbar) for _ in range(2)]
                expected = star.star_k(f, g, metric, K)
                got = quantiser.star_via_kernel(f, g, K, metric)
                worst = max(worst, _relative(got - expected, expected))
    return bound(worst, ctx.tol)


@check('clifford', 'pair_supertrace',
       'str(Omega_-K(theta) Omega_K(theta\')) = (i hbar/2)^n delta')
def _pair_supertrace(ctx):
    m = min(ctx.m, 4)
    metric = tensors.Metric.identity(m)
    K = sampling.random_bivector(ctx.rng, m)
    got = quantiser.pair_supertrace(metric, K, ctx.hbar)
    expected = quantiser.delta_function(m, ctx.hbar) * (
        (0.5j * ctx.hbar) ** (m // 2))
    return bound(_relative(got - expected, expected), ctx.tol)


@check('clifford', 'triple_supertrace',
       'triple quantiser supertrace is the displayed Gaussian')
def _triple_supertrace(ctx):
    metric = tensors.Metric.identity(2)
    got = quantiser.triple_supertrace(metric, ctx.hbar)
    expected = quantiser.triple_closed_form(metric, ctx.hbar)
    return bound(_relative(got - expected, expected), ctx.tol, 'm=2')


@check('clifford', 'omega_equivariance',
       '(gamma^C (x) gamma^O) Omega_K = Omega_{gamma K}')
def _omega_equivariance(ctx):
    metric = tensors.Metric.identity(ctx.m)
    K = sampling.random_bivector(ctx.rng, ctx.m)
    worst = 0.0
    for _ in range(5):
        rotation = sampling.random_rotation(ctx.rng, metric)
        kernel = quantiser.omega(metric, K, ctx.hbar)
        moved = quantiser.transform_omega(rotation, kernel)
        expected = quantiser.omega(metric, K.transformed(rotation), ctx.hbar)
        scale = max(1.0, float(np.max(np.abs(expected.table))))
        worst = max(worst, float(np.max(np.abs(moved.table -
                                               expected.table))) / scale)
    return bound(worst, ctx.tol)


#
# polarization: the spaces of polarisations and complex structures
#
def _polarizations(ctx, metric):
    return [sampling.random_polarization(ctx.rng, metric),
            sampling.random_polarization(ctx.rng, metric, in_j=False)]


@check('polarization', 'frames_bijection', 'P is recovered from its frames')
def _frames_bijection(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    worst = 0.0
    for polarization in _polarizations(ctx, metric):
        rebuilt = pol.from_frames(polarization.image_frame,
                                  polarization.kernel_frame, metric)
        worst = max(worst, rebuilt.distance(polarization))
    return bound(worst, ctx.tol)


@check('polarization', 'standard_kp', 'K_P of the standard structure at m=2')
def _standard_kp(ctx):
    metric = tensors.Metric.identity(2)
    structure = pol.ComplexStructure.standard(metric)
    K, lam = pol.kp_lambda(pol.from_complex_structure(structure))
    expected = np.array([[0, -1j], [1j, 0]])
    worst = max(float(np.max(np.abs(K.K - expected))),
                float(np.max(np.abs(lam - (np.eye(2) + expected)))))
    return bound(worst, ctx.tol)


@check('polarization', 'retraction', 'r(P_J) = J and P_{r(P)} = P on J')
def _retraction(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    worst = 0.0
    for _ in range(5):
        structure = sampling.random_complex_structure(ctx.rng, metric)
        polarization = pol.from_complex_structure(structure)
        worst = max(worst, float(np.max(np.abs(
            pol.retraction(polarization).J - structure.J))))
        rebuilt = pol.from_complex_structure(pol.retraction(polarization))
        worst = max(worst, rebuilt.distance(polarization))
        paired = pol.polarization_from_pair(structure, structure)
        worst = max(worst, paired.distance(polarization))
    return bound(worst, ctx.tol * 10)


@check('polarization', 'transversality', 'det(J + J\') decides transversality')
def _transversality(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    frame = metric.orthonormal_frame()
    rotation = sampling.random_rotation(ctx.rng, metric)
    standard = pol.ComplexStructure.standard(
        tensors.Metric.identity(ctx.m)).J

    def structure(flipped_blocks):
        J = np.array(standard)
        J[:2 * flipped_blocks, :2 * flipped_blocks] *= -1
        return pol.ComplexStructure(linalg.solve(frame, np.dot(J, frame)),
                                    metric).transformed(rotation)
    passed = pol.transversal(structure(0), structure(0))
    if ctx.m >= 4:
        # J' = -J on two blocks keeps the orientation and meets conj(L_J)
        passed = passed and not pol.transversal(structure(0), structure(2))
    return Outcome(0.0 if passed else 1.0, passed)


@check('polarization', 'tangent_dimension',
       'tangent spaces have dimension n(n-1)')
def _tangent_dimension(ctx):
    m = min(ctx.m, 8)
    n = m // 2
    metric = sampling.random_metric(ctx.rng, m)
    worst = 0
    for polarization in _polarizations(ctx, metric):
        basis = pol.tangent_space(polarization)
        worst = max(worst, abs(len(basis) - n * (n - 1)))
        for delta in basis:
            pol.validate_tangent(polarization, delta)
    structure = sampling.random_complex_structure(ctx.rng, metric)
    worst = max(worst, abs(len(pol.complex_structure_tangents(structure)) -
                           n * (n - 1)))
    return Outcome(worst, worst == 0, 'n(n-1) = %d' % (n * (n - 1)))


@check('polarization', 'tangent_rejection', 'non-tangent directions fail')
def _tangent_rejection(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    polarization = sampling.random_polarization(ctx.rng, metric)
    noise = ctx.rng.standard_normal((ctx.m, ctx.m))
    try:
        pol.validate_tangent(polarization, noise)
    except exceptions.TangentError as exc:
        return Outcome(0.0, True, exc.constraint)
    return Outcome(1.0, False, 'random matrix accepted as a tangent')


@check('polarization', 'equivariance',
       'K_P and r(P) commute with the SO(V, q) action')
def _polarization_equivariance(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    worst = 0.0
    for polarization in _polarizations(ctx, metric):
        rotation = sampling.random_rotation(ctx.rng, metric)
        moved = polarization.transformed(rotation)
        K, _ = pol.kp_lambda(polarization)
        K_moved, _ = pol.kp_lambda(moved)
        worst = max(worst, float(np.max(np.abs(
            K_moved.K - K.transformed(rotation).K))))
        if pol.is_in_j(polarization):
            J = pol.retraction(polarization).J
            expected = np.dot(rotation.matrix, np.dot(J,
                                                      rotation.inverse_matrix))
            worst = max(worst, float(np.max(np.abs(
                pol.retraction(moved).J - expected))))
    return bound(worst, ctx.tol * 10)


@check('polarization', 'curvature_constant',
       'F^H is a constant multiple of the Kahler form')
def _curvature_constant(ctx):
    m = min(ctx.m, 8)
    metric = sampling.random_metric(ctx.rng, m)
    structure = sampling.random_complex_structure(ctx.rng, metric)
    polarization = pol.from_complex_structure(structure)
    tangents = pol.complex_structure_tangents(structure)
    ratios = []
    for i, first in enumerate(tangents):
        for second in tangents[i + 1:]:
            omega = pol.kahler_form(structure, first, second)
            if abs(omega) < 1e-8:
                continue
            curvature = pol.section_curvature(polarization, -0.5j * first,
                                              -0.5j * second)
            ratios.append(curvature / omega)
    if not ratios:
        return Outcome(0.0, True, 'no tangent pairs at n=%d' % (m // 2))
    constant = ratios[0]
    spread = max(abs(ratio - constant) for ratio in ratios)
    return bound(spread, ctx.tol * 100,
                 'F^H = (%.6g%+.6gi) omega' % (constant.real, constant.imag))


@check('polarization', 'geodesic_path', 'geodesic samples are valid P_{J_t}')
def _geodesic_path(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    structure = sampling.random_complex_structure(ctx.rng, metric)
    generator = sampling.random_generator(ctx.rng, metric, 0.5)
    samples = pol.geodesic_path(structure, generator, 8)
    group = linalg.expm(generator)
    endpoint = pol.from_complex_structure(pol.ComplexStructure(
        np.dot(group, np.dot(structure.J, linalg.inv(group))), metric))
    constant = pol.geodesic_path(structure, np.zeros((ctx.m, ctx.m)), 4)
    worst = max([samples[-1].distance(endpoint)] +
                [sample.distance(constant[0]) for sample in constant])
    return bound(worst, ctx.tol * 10, '%d samples' % len(samples))


#
# states: sections, prequantum operators and *_P
#
WorkedExample = collections.namedtuple(
    'WorkedExample', 'polarization f psi gaussian image kernel')


def worked_example(hbar):
    """The m = 4 example with image frame e_k = (u_k - i u_k+1)/2.

    f = w2 w1 and psi = z1 z2 G, where z_k, w_k are the image and kernel
    coordinates and G = exp((1/2 hbar)(w1 z1 + w2 z2)).
    """
    metric = tensors.Metric.identity(4)
    image = 0.5 * np.array([[1, -1j, 0, 0], [0, 0, 1, -1j]]).T
    polarization = pol.from_frames(image, np.conj(image), metric)
    z1, z2 = sections.image_linear_forms(polarization, hbar)
    w1, w2 = sections.kernel_linear_forms(polarization, hbar)
    gaussian = mv.exp_even((mv.wedge(w1, z1) + mv.wedge(w2, z2)) *
                           (0.5 / hbar))
    psi = sections.Section.from_multivector(
        mv.wedge(mv.wedge(z1, z2), gaussian), metric)
    return WorkedExample(polarization, mv.wedge(w2, w1), psi, gaussian,
                         (z1, z2), (w1, w2))


@check('states', 'worked_example', 'f *_P psi stays in H_P where f^ psi fails')
def _worked_example_check(ctx):
    worst = 0.0
    flags = True
    for hbar in EXAMPLE_HBARS:
        example = worked_example(hbar)
        polarization, gaussian = example.polarization, example.gaussian
        (z1, z2), (w1, w2) = example.image, example.kernel
        result = sections.star_on_state(example.f, example.psi, polarization)
        expected = gaussian * hbar ** 2
        worst = max(worst, _relative(result - expected, expected),
                    _relative(sections.gaussian(polarization, hbar) -
                              gaussian, gaussian))
        quartic = mv.wedge(mv.wedge(w1, z1), mv.wedge(w2, z2))
        displayed = mv.wedge(
            (mv.wedge(w1, z1) + mv.wedge(w2, z2)) * hbar - quartic, gaussian)
        prequantum = sections.prequantum_op(example.f, example.psi)
        worst = max(worst, _relative(prequantum - displayed, displayed))
        flags = flags and sections.is_polarized(result, polarization) and \
            not sections.is_polarized(prequantum, polarization)
    residual = max(worst, 0.0 if flags else 1.0)
    return bound(residual, 1e-12, 'hbar in %s' % (EXAMPLE_HBARS,))


@check('states', 'polarized_basis', 'H_P has dimension 2^n')
def _polarized_basis(ctx):
    worst = 0.0
    for m in _sizes(ctx):
        metric = sampling.random_metric(ctx.rng, m)
        for polarization in _polarizations(ctx, metric):
            basis = sections.polarized_basis(polarization, ctx.hbar)
            matrix = np.array([state.section.coeffs for state in basis]).T
            rank = np.linalg.matrix_rank(matrix)
            worst = max(worst, abs(rank - (1 << (m // 2))),
                        abs(len(basis) - (1 << (m // 2))))
            worst = max(worst, max(
                sections.polarization_residual(state, polarization)
                for state in basis))
    return bound(worst, sections.POLARIZATION_TOLERANCE)


@check('states', 'connection_curvature',
       '{nabla_mu, nabla_nu} = -2 hbar^-1 q_{mu nu}')
def _connection_curvature(ctx):
    m = ctx.m
    metric = sampling.random_metric(ctx.rng, m)
    psi = sections.Section.from_multivector(
        _numeric(ctx.rng, m, ctx.hbar), metric)
    worst = 0.0
    for mu in range(1, m + 1):
        for nu in range(mu, m + 1):
            total = (sections.covariant_derivative(
                mu, sections.covariant_derivative(nu, psi)) +
                sections.covariant_derivative(
                    nu, sections.covariant_derivative(mu, psi)) +
                psi * (2.0 * metric.q[mu - 1, nu - 1] / ctx.hbar))
            worst = max(worst, _relative(total, psi))
    return bound(worst, ctx.tol * 10)


def _random_state(ctx, polarization):
    basis = sections.polarized_basis(polarization, ctx.hbar)
    weights = sampling.gaussian_integers(ctx.rng, len(basis))
    total = basis[0].section * 0
    for weight, state in zip(weights, basis):
        total = total + state.section * weight
    return total, basis


@check('states', 'preservation', 'nabla_{i\'}(f *_P psi) = 0 for psi in H_P')
def _preservation(ctx):
    worst = 0.0
    for m in _sizes(ctx):
        metric = sampling.random_metric(ctx.rng, m)
        for polarization in _polarizations(ctx, metric):
            basis = sections.polarized_basis(polarization, ctx.hbar)
            for _ in range(_trials(m)):
                f = _numeric(ctx.rng, m, ctx.hbar)
                for state in basis:
                    result = sections.star_on_state(f, state, polarization)
                    residual = sections.polarization_residual(result,
                                                              polarization)
                    scale = f.norm() * state.section.norm() * max(
                        1.0, 1.0 / ctx.hbar)
                    worst = max(worst, residual * max(1.0, result.norm()) /
                                max(1.0, scale))
    return bound(worst, sections.POLARIZATION_TOLERANCE)


@check('states', 'dirac', '[f^, g^] psi = hbar {f, g}^ psi')
def _dirac(ctx):
    m = min(ctx.m, 4)
    metric = sampling.random_metric(ctx.rng, m)
    worst = 0.0
    for trial in range(TRIALS):
        f = _numeric(ctx.rng, m, ctx.hbar, trial % 2)
        g = _numeric(ctx.rng, m, ctx.hbar, (trial // 2) % 2)
        psi = sections.Section.from_multivector(
            _numeric(ctx.rng, m, ctx.hbar), metric)
        fg = sections.prequantum_op(f, sections.prequantum_op(g, psi))
        gf = sections.prequantum_op(g, sections.prequantum_op(f, psi))
        left = fg - gf * _sign(f, g)
        right = sections.prequantum_op(star.poisson_bracket(f, g, metric),
                                       psi) * ctx.hbar
        worst = max(worst, _relative(left - right, fg, gf, right))
    return bound(worst, ctx.tol)


def _kernel_linear(ctx, polarization):
    """A random f at most linear in the kernel coordinates."""
    m, n = polarization.m, polarization.n
    adapted = _numeric(ctx.rng, m, ctx.hbar)
    kernel_degree = mv.tables(m).popcount[np.arange(1 << m) >> n]
    coeffs = np.where(kernel_degree <= 1, adapted.coeffs, 0)
    adapted = mv.Multivector(m, coeffs, hbar=ctx.hbar)
    return mv.linear_substitution(adapted, polarization.coframe)


@check('states', 'prequantum_agreement',
       'f *_P psi = f^ psi for f linear in the kernel coordinates')
def _prequantum_agreement(ctx):
    worst = 0.0
    metric = sampling.random_metric(ctx.rng, ctx.m)
    for polarization in _polarizations(ctx, metric):
        basis = sections.polarized_basis(polarization, ctx.hbar)
        for _ in range(10):
            f = _kernel_linear(ctx, polarization)
            for state in basis:
                star_ = sections.star_on_state(f, state, polarization)
                prequantum = sections.prequantum_op(f, state)
                worst = max(worst, _relative(star_ - prequantum, star_,
                                             prequantum))
    return bound(worst, ctx.tol * 10)


@check('states', 'associativity', 'f *_P (g *_P psi) = (f *_KP g) *_P psi')
def _state_associativity(ctx):
    worst = 0.0
    for m in _sizes(ctx):
        metric = sampling.random_metric(ctx.rng, m)
        for polarization in _polarizations(ctx, metric):
            K, _ = pol.kp_lambda(polarization)
            for _ in range(5):
                psi, _ = _random_state(ctx, polarization)
                f, g = [_numeric(ctx.rng, m, ctx.hbar) for _ in range(2)]
                left = sections.star_on_state(
                    f, sections.star_on_state(g, psi, polarization),
                    polarization)
                right = sections.star_on_state(
                    star.star_k(f, g, metric, K), psi, polarization)
                worst = max(worst, _relative(left - right, left, right))
    return bound(worst, ctx.tol * 100)


@check('states', 'decomposition', 'sections split as H_P + H\'_P')
def _decomposition(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    worst = 0.0
    details = []
    for polarization in _polarizations(ctx, metric):
        psi, _ = _random_state(ctx, polarization)
        h, h_prime = sections.decompose(psi, polarization)
        worst = max(worst, _relative(h.section - psi, psi),
                    _relative(h_prime, psi))
        chi = sections.Section.from_multivector(
            _numeric(ctx.rng, ctx.m, ctx.hbar), metric)
        derived = sections.covariant_derivative(
            polarization.image_frame[:, 0], chi)
        h, h_prime = sections.decompose(derived, polarization)
        worst = max(worst, _relative(h.section, derived),
                    _relative(h_prime - derived, derived))
        if pol.is_in_j(polarization):
            mixed = sections.Section.from_multivector(
                _numeric(ctx.rng, ctx.m, ctx.hbar), metric)
            h, h_prime = sections.decompose(mixed, polarization)
            overlap = abs(sections.hermitian_pairing(h.section, h_prime))
            norms = np.sqrt(abs(sections.hermitian_pairing(
                h.section, h.section) * sections.hermitian_pairing(
                    h_prime, h_prime)))
            worst = max(worst, overlap / max(norms, 1e-300))
            details.append('orthogonal at P_J')
    return bound(worst, 1e-9, ', '.join(details))


#
# transport: the projectively flat connection
#
def _transport_setup(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    polarization = sampling.random_polarization(ctx.rng, metric)
    return metric, polarization


@check('transport', 'constant_path', 'transport along a constant path')
def _constant_path(ctx):
    _, polarization = _transport_setup(ctx)
    psi, _ = _random_state(ctx, polarization)
    result = transport.h_transport(pol.ConjugationPath(polarization), psi,
                                   ctx.steps)
    return bound(_relative(result.state - psi, psi), ctx.tol)


@check('transport', 'endpoint_polarized', 'transported states lie in H_P1')
def _endpoint_polarized(ctx):
    metric, polarization = _transport_setup(ctx)
    worst = 0.0
    for _ in range(3):
        generator = sampling.random_generator(ctx.rng, metric, 0.5)
        psi, _ = _random_state(ctx, polarization)
        result = transport.h_transport(
            pol.ConjugationPath(polarization, None, generator), psi,
            ctx.steps)
        worst = max(worst, result.residual)
    return bound(worst, TRANSPORT_TOLERANCE)


@check('transport', 'unitarity', 'transport inside J preserves the norm')
def _unitarity(ctx):
    metric, polarization = _transport_setup(ctx)
    worst = 0.0
    for _ in range(3):
        generator = sampling.random_generator(ctx.rng, metric, 0.5)
        psi, _ = _random_state(ctx, polarization)
        result = transport.h_transport(
            pol.ConjugationPath(polarization, None, generator), psi,
            ctx.steps)
        before = sections.hermitian_pairing(psi, psi).real
        after = sections.hermitian_pairing(result.state, result.state).real
        worst = max(worst, abs(after - before) / before)
    return bound(worst, TRANSPORT_TOLERANCE)


def _slope(deltas, residuals):
    logs = np.log(np.maximum(residuals, 1e-300))
    return float(np.polyfit(np.log(deltas), logs, 1)[0])


@check('transport', 'holonomy', 'small-loop holonomy is exp(-F^H)')
def _holonomy(ctx):
    metric, polarization = _transport_setup(ctx)
    first = sampling.random_generator(ctx.rng, metric)
    second = sampling.random_generator(ctx.rng, metric)
    residuals = []
    for delta in HOLONOMY_DELTAS:
        loop = transport.square_loop(polarization, first, second, delta)
        matrix = transport.holonomy_matrix(loop, ctx.hbar, ctx.steps)
        expected = transport.expected_holonomy(polarization, first, second,
                                               delta)
        identity = np.eye(len(matrix))
        residuals.append(float(np.max(np.abs(
            matrix / expected - identity))))
    slope = _slope(HOLONOMY_DELTAS, residuals)
    return Outcome(residuals[0], slope >= 2.9,
                   'log-residual slope %.3f over delta %s'
                   % (slope, HOLONOMY_DELTAS))


def _first_order_transport(polarization, generator, psi):
    segment = pol.ConjugationPath(polarization, None, generator)
    packed = transport.connection(polarization.metric, psi.hbar)
    matrix = transport.generator_matrix(segment, 0.0, packed)
    return segment, matrix


@check('transport', 'infinitesimal_compatibility',
       'f (*_{P+dP} - *_P) psi = d(f *_P psi) - df *_P psi - f *_P dpsi')
def _infinitesimal_compatibility(ctx):
    metric, polarization = _transport_setup(ctx)
    generator = sampling.random_generator(ctx.rng, metric)
    psi, _ = _random_state(ctx, polarization)
    f = _numeric(ctx.rng, ctx.m, ctx.hbar)
    segment, matrix = _first_order_transport(polarization, generator, psi)
    K, _ = pol.kp_lambda(polarization)
    product = sections.star_on_state(f, psi, polarization)
    residuals = []
    for epsilon in COMPATIBILITY_EPSILONS:
        moved = segment.at(epsilon)
        K_moved, _ = pol.kp_lambda(moved)
        f_moved = star.intertwiner(K, K_moved, f)
        psi_moved = psi + sections.Section(
            ctx.m, np.dot(matrix, psi.coeffs) * epsilon, hbar=ctx.hbar,
            metric=metric)
        left = sections.star_on_state(f_moved, psi_moved, moved)
        right = product + sections.Section(
            ctx.m, np.dot(matrix, product.coeffs) * epsilon, hbar=ctx.hbar,
            metric=metric)
        residuals.append(_relative(left - right, product))
    slope = _slope(COMPATIBILITY_EPSILONS, residuals)
    return Outcome(residuals[-1], slope >= 1.9,
                   'residual slope %.3f over epsilon %s'
                   % (slope, COMPATIBILITY_EPSILONS))


@check('transport', 'path_compatibility',
       'U^H(f *_P0 psi) = (U^O f) *_P1 (U^H psi)')
def _path_compatibility(ctx):
    metric, polarization = _transport_setup(ctx)
    generator = sampling.random_generator(ctx.rng, metric, 0.5)
    path = pol.ConjugationPath(polarization, None, generator)
    endpoint = path.at(1.0)
    psi, _ = _random_state(ctx, polarization)
    f = _numeric(ctx.rng, ctx.m, ctx.hbar)
    left = transport.h_transport(
        path, sections.star_on_state(f, psi, polarization), ctx.steps).state
    moved = transport.h_transport(path, psi, ctx.steps).state
    f_moved = star.intertwiner(pol.kp_lambda(polarization)[0],
                               pol.kp_lambda(endpoint)[0], f)
    right = sections.star_on_state(f_moved, moved, endpoint)
    return bound(_relative(left - right, left, right), TRANSPORT_TOLERANCE)


#
# metaplectic: the corrected, flat transport
#
@check('metaplectic', 'constant_phase', 'a constant path has phase 1')
def _constant_phase(ctx):
    _, polarization = _transport_setup(ctx)
    psi, _ = _random_state(ctx, polarization)
    result = transport.metaplectic_transport(
        pol.ConjugationPath(polarization), psi, ctx.steps)
    return bound(abs(result.metaplectic_phase - 1.0), ctx.tol)


@check('metaplectic', 'flat_loop',
       'corrected holonomy of a triangle is the identity')
def _flat_loop(ctx):
    metric, polarization = _transport_setup(ctx)
    corners = [np.zeros((ctx.m, ctx.m)),
               sampling.random_generator(ctx.rng, metric, 0.6),
               sampling.random_generator(ctx.rng, metric, 0.6)]
    loop = pol.loop_segments(polarization, corners)
    corrected = transport.holonomy_matrix(loop, ctx.hbar, ctx.steps,
                                          metaplectic=True)
    plain = transport.holonomy_matrix(loop, ctx.hbar, ctx.steps)
    identity = np.eye(len(corrected))
    residual = float(np.max(np.abs(corrected - identity)))
    deviation = float(np.max(np.abs(plain - identity)))
    passed = residual <= METAPLECTIC_TOLERANCE and \
        deviation >= 10 * METAPLECTIC_TOLERANCE
    return Outcome(residual, passed,
                   'uncorrected holonomy deviates by %.3g' % deviation)


@check('metaplectic', 'path_independence',
       'two paths P0 -> P1 give the same corrected transport')
def _path_independence(ctx):
    metric, polarization = _transport_setup(ctx)
    target = sampling.random_generator(ctx.rng, metric, 0.5)
    via = sampling.random_generator(ctx.rng, metric, 0.5)
    direct = [pol.ConjugationPath(polarization, None, target)]
    detour = [pol.ConjugationPath(polarization, None, via),
              pol.ConjugationPath(polarization, via, target)]
    worst = 0.0
    phases = []
    for state in sections.polarized_basis(polarization, ctx.hbar):
        first = transport.metaplectic_transport(direct, state, ctx.steps,
                                                check=False)
        second = transport.metaplectic_transport(detour, state, ctx.steps,
                                                 check=False)
        worst = max(worst, _relative(first.state - second.state,
                                     first.state))
        phases.extend([first.metaplectic_phase, second.metaplectic_phase])
    unit = max(abs(abs(phase) - 1.0) for phase in phases)
    return bound(worst, METAPLECTIC_TOLERANCE,
                 'max ||phase| - 1| = %.3g' % unit)


#
# equivariance: the SO(V, q) actions
#
def _rotations(ctx, metric, count=ROTATIONS, scale=1.0):
    return [sampling.random_rotation(ctx.rng, metric, scale)
            for _ in range(count)]


@check('equivariance', 'functions',
       'gamma^O(f *_K g) = gamma^O f *_{gamma K} gamma^O g')
def _function_equivariance(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    K = sampling.random_bivector(ctx.rng, ctx.m)
    worst = 0.0
    for rotation in _rotations(ctx, metric):
        f, g = [_numeric(ctx.rng, ctx.m, ctx.hbar) for _ in range(2)]
        moved_f = star.so_action_function(rotation, f)
        moved_g = star.so_action_function(rotation, g)
        left = star.so_action_function(rotation, star.star_k(f, g, metric, K))
        right = star.star_k(moved_f, moved_g, metric, K.transformed(rotation))
        worst = max(worst, _relative(left - right, left))
        left = star.so_action_function(rotation,
                                       star.poisson_bracket(f, g, metric))
        right = star.poisson_bracket(moved_f, moved_g, metric)
        worst = max(worst, _relative(left - right, left))
    return bound(worst, ctx.tol)


@check('equivariance', 'clifford',
       'gamma^C(Q_K f) = Q_{gamma K}(gamma^O f) and gamma^C is multiplicative')
def _clifford_equivariance(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    K = sampling.random_bivector(ctx.rng, ctx.m)
    worst = 0.0
    for rotation in _rotations(ctx, metric):
        f = _numeric(ctx.rng, ctx.m, ctx.hbar)
        left = clifford.so_action_clifford(rotation,
                                           clifford.quantize(f, K, metric))
        right = clifford.quantize(star.so_action_function(rotation, f),
                                  K.transformed(rotation), metric)
        worst = max(worst, _relative(left - right, left))
        x, y = [clifford.as_clifford(_numeric(ctx.rng, ctx.m, ctx.hbar))
                for _ in range(2)]
        left = clifford.so_action_clifford(
            rotation, clifford.clifford_mul(x, y, metric))
        right = clifford.clifford_mul(
            clifford.so_action_clifford(rotation, x),
            clifford.so_action_clifford(rotation, y), metric)
        worst = max(worst, _relative(left - right, left))
    return bound(worst, ctx.tol)


@check('equivariance', 'kp', 'K_{gamma P gamma^-1} = gamma K_P gamma^T')
def _kp_equivariance(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    worst = 0.0
    polarizations = _polarizations(ctx, metric)
    for index, rotation in enumerate(_rotations(ctx, metric)):
        polarization = polarizations[index % 2]
        K, _ = pol.kp_lambda(polarization)
        moved, _ = pol.kp_lambda(polarization.transformed(rotation))
        worst = max(worst, float(np.max(np.abs(
            moved.K - K.transformed(rotation).K))))
    return bound(worst, ctx.tol * 10)


@check('equivariance', 'star_on_state',
       'gamma^H(f *_P psi) = gamma^O f *_{gamma P} gamma^H psi')
def _state_equivariance(ctx):
    metric = sampling.random_metric(ctx.rng, ctx.m)
    polarizations = _polarizations(ctx, metric)
    worst = 0.0
    for index, rotation in enumerate(_rotations(ctx, metric)):
        polarization = polarizations[index % 2]
        psi, _ = _random_state(ctx, polarization)
        f = _numeric(ctx.rng, ctx.m, ctx.hbar)
        left = sections.so_action_section(
            rotation, sections.star_on_state(f, psi, polarization))
        right = sections.star_on_state(
            star.so_action_function(rotation, f),
            sections.so_action_section(rotation, psi),
            polarization.transformed(rotation))
        worst = max(worst, _relative(left - right, left))
    return bound(worst, ctx.tol)


@check('equivariance', 'rho_composition',
       'rho_P(gg\') = rho_P(g) rho_P(g\'), exactly after correction')
def _rho_composition(ctx):
    metric, polarization = _transport_setup(ctx)
    worst = 0.0
    scalars = []
    identity = transport.rho_matrix(polarization,
                                    tensors.Rotation.identity(metric),
                                    ctx.hbar, ctx.steps, metaplectic=True)
    worst = max(worst, float(np.max(np.abs(identity -
                                           np.eye(len(identity))))))
    for _ in range(2):
        first, second = _rotations(ctx, metric, 2, 0.3)
        product = first.compose(second)
        for metaplectic in (True, False):
            rho = functools.partial(transport.rho_matrix, polarization,
                                    hbar=ctx.hbar, steps=ctx.steps,
                                    metaplectic=metaplectic)
            left = rho(product)
            right = np.dot(rho(first), rho(second))
            if metaplectic:
                worst = max(worst, float(np.max(np.abs(left - right))))
            else:
                scalar = np.vdot(right, left) / np.vdot(right, right)
                scalars.append(abs(abs(scalar) - 1.0))
                worst = max(worst, float(np.max(np.abs(
                    left - scalar * right))))
    return bound(worst, METAPLECTIC_TOLERANCE,
                 'uncorrected scalars off the unit circle by %.3g'
                 % max(scalars))
