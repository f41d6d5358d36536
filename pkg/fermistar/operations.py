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

"""Operations available to `fermistar eval`.

A request names an operation and its arguments::

    {"op": "star_k", "args": {"f": {...}, "g": {...}, "K": [[0, 1], [-1, 0]]}}

Arguments are decoded by name (elements, matrices, metrics, ...) and the
result is encoded with :func:`fermistar.codec.encode_value`. Invalid input
raises SchemaError pointing into the request (e.g. `args.f.terms[0].mask`).
"""

import functools
import logging

import numpy as np
import six  # pylint: disable=wrong-import-order
import voluptuous as volup  # pylint: disable=wrong-import-order

from fermistar import clifford
from fermistar import codec
from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import polarization as pol
from fermistar import quantiser
from fermistar import sections
from fermistar import star
from fermistar import tensors
from fermistar import transport

LOG = logging.getLogger(__name__)

REGISTRY = {}

REQUEST_SCHEMA = volup.Schema({
    volup.Required('op'): six.text_type,
    volup.Optional('args', default={}): dict,
})

_DOMAIN_ERRORS = (exceptions.InvalidTensor, exceptions.InvalidPolarization,
                  exceptions.DimensionError)


class Arguments(object):

    """Named-argument decoder for one request."""

    def __init__(self, document, path=('args',)):
        self.document = document
        self.path = list(path)

    def _where(self, name):
        return self.path + [name]

    def _get(self, name, required=True):
        if name not in self.document:
            if required:
                raise exceptions.SchemaError("missing argument '%s'" % name,
                                             self.path)
            return None
        return self.document[name]

    def has(self, name):
        """Whether an argument is present."""
        return name in self.document

    def element(self, name, algebra=None):
        """A Multivector or CliffordElement."""
        element = codec.decode_element(self._get(name), self._where(name))
        if algebra is not None and element.algebra != algebra:
            raise exceptions.SchemaError(
                "expected a %s element" % algebra, self._where(name))
        return element

    def matrix(self, name, shape=None, required=True):
        """A complex matrix."""
        document = self._get(name, required)
        if document is None:
            return None
        return codec.decode_matrix(document, self._where(name), shape)

    def square(self, name, m=None):
        """A square matrix (m x m when m is given)."""
        matrix = self.matrix(name, None if m is None else (m, m))
        if matrix.shape[0] != matrix.shape[1]:
            raise exceptions.SchemaError("expected a square matrix",
                                         self._where(name))
        return matrix

    def metric(self, m, name='metric'):
        """q, defaulting to the identity."""
        return codec.decode_metric(self._get(name, False), m,
                                   self._where(name))

    def bivector(self, name, m):
        """K, defaulting to zero."""
        return codec.decode_bivector(self._get(name, False), m,
                                     self._where(name))

    def number(self, name, default=None):
        """A positive real number."""
        value = self._get(name, default is None)
        if value is None:
            return default
        try:
            return codec.positive_number(value)
        except volup.Invalid as exc:
            raise exceptions.SchemaError(exc.msg, self._where(name))

    def integer(self, name, default=None):
        """A positive integer."""
        value = self._get(name, default is None)
        if value is None:
            return default
        if isinstance(value, bool) or \
                not isinstance(value, six.integer_types) or value < 1:
            raise exceptions.SchemaError("expected a positive integer",
                                         self._where(name))
        return value

    def flag(self, name, default=False):
        """A boolean."""
        value = self._get(name, False)
        if value is None:
            return default
        if not isinstance(value, bool):
            raise exceptions.SchemaError("expected true or false",
                                         self._where(name))
        return value

    def vector(self, name, m):
        """A 1-based index or a complex vector."""
        return codec.decode_vector(self._get(name), m, self._where(name))

    def _domain(self, name, builder, *args):
        try:
            return builder(*args)
        except _DOMAIN_ERRORS as exc:
            raise exceptions.SchemaError(str(exc), self._where(name))

    def polarization(self, metric, name='P'):
        """A Polarization from its projection matrix."""
        matrix = self.square(name, metric.m)
        return self._domain(name, pol.Polarization, matrix, metric)

    def structure(self, metric, name='J'):
        """A ComplexStructure."""
        matrix = self.square(name, metric.m)
        if np.any(matrix.imag):
            raise exceptions.SchemaError("complex structures are real",
                                         self._where(name))
        return self._domain(name, pol.ComplexStructure, matrix.real, metric)

    def rotation(self, metric, name='gamma'):
        """A Rotation given as a matrix or as {"generator": Y}."""
        document = self._get(name)
        if isinstance(document, dict) and 'generator' in document:
            where = self._where(name) + ['generator']
            generator = codec.decode_matrix(document['generator'], where,
                                            (metric.m, metric.m))
            if np.any(generator.imag):
                raise exceptions.SchemaError("generators are real", where)
            return self._domain(name, tensors.Rotation.from_generator,
                                generator.real, metric)
        matrix = self.square(name, metric.m)
        return self._domain(name, tensors.Rotation, matrix, metric)


def operation(name):
    """Register fxn(args) as the eval operation `name`."""
    def wrap(fxn):
        """Add to the registry."""
        @functools.wraps(fxn)
        def wrapped(args):
            """Decode, compute, encode."""
            return codec.encode_value(fxn(args))
        REGISTRY[name] = wrapped
        return wrapped
    return wrap


def evaluate(request):
    """Run an eval request and return its encoded result."""
    request = codec.validate(REQUEST_SCHEMA, request)
    name = request['op']
    if name not in REGISTRY:
        raise exceptions.SchemaError(
            "unknown operation '%s' (known: %s)"
            % (name, ', '.join(sorted(REGISTRY))), ['op'])
    LOG.debug("Evaluating %s", name)
    return REGISTRY[name](Arguments(request['args']))


def _doubled(element, where):
    if element.m % 2:
        raise exceptions.SchemaError(
            "doubled elements need an even generator count", where)
    return mv.DoubledMultivector(element.m, element.coeffs,
                                 hbar=element.hbar, low=element.low)


def _section(args, name='psi'):
    psi = args.element(name, 'grassmann')
    metric = args.metric(psi.m)
    try:
        return sections.Section.from_multivector(psi, metric)
    except exceptions.FormalModeError as exc:
        raise exceptions.SchemaError(str(exc), args._where(name))


#
# Grassmann algebra and star products
#
@operation('wedge')
def _wedge(args):
    return mv.wedge(args.element('f'), args.element('g'))


@operation('derivative')
def _derivative(args):
    f = args.element('f')
    mu = args.vector('mu', f.m)
    if isinstance(mu, np.ndarray):
        return mv.derivative_along(mu, f)
    return mv.fermi_derivative(mu, f)


@operation('signed_derivative')
def _signed_derivative(args):
    f = args.element('f')
    mu = args.vector('mu', f.m)
    if isinstance(mu, np.ndarray):
        raise exceptions.SchemaError("expected a generator index",
                                     args._where('mu'))
    return mv.signed_derivative(mu, f)


@operation('berezin')
def _berezin(args):
    return mv.berezin_integral(args.element('f'))


@operation('exp_even')
def _exp_even(args):
    return mv.exp_even(args.element('f'))


@operation('tensor_embed')
def _tensor_embed(args):
    return mv.tensor_embed(args.element('f'), args.element('g'))


@operation('diagonal_pullback')
def _diagonal_pullback(args):
    return mv.diagonal_pullback(_doubled(args.element('F'),
                                         args._where('F')))


@operation('graded_flip')
def _graded_flip(args):
    return mv.graded_flip(_doubled(args.element('F'), args._where('F')))


@operation('poisson')
def _poisson(args):
    f = args.element('f')
    return star.poisson_bracket(f, args.element('g'), args.metric(f.m))


@operation('hamiltonian_field')
def _hamiltonian_field(args):
    f = args.element('f')
    return star.hamiltonian_field(f, args.metric(f.m))


@operation('star_k')
def _star_k(args):
    f = args.element('f')
    return star.star_k(f, args.element('g'), args.metric(f.m),
                       args.bivector('K', f.m))


@operation('moyal')
def _moyal(args):
    f = args.element('f')
    return star.moyal(f, args.element('g'), args.metric(f.m))


@operation('intertwiner')
def _intertwiner(args):
    f = args.element('f')
    return star.intertwiner(args.bivector('source', f.m),
                            args.bivector('target', f.m), f)


@operation('o_transport')
def _o_transport(args):
    f = args.element('f')
    path = args._get('path')
    if not isinstance(path, list) or not path:
        raise exceptions.SchemaError("expected a nonempty list of bivectors",
                                     args._where('path'))
    bivectors = [codec.decode_bivector(item, f.m,
                                       args._where('path') + [index])
                 for index, item in enumerate(path)]
    return star.o_transport(bivectors, f)


@operation('so_action')
def _so_action(args):
    f = args.element('f')
    return star.so_action_function(args.rotation(args.metric(f.m)), f)


#
# Clifford quantisation
#
@operation('clifford_mul')
def _clifford_mul(args):
    x = args.element('x', 'clifford')
    return clifford.clifford_mul(x, args.element('y', 'clifford'),
                                 args.metric(x.m))


@operation('varrho0')
def _varrho0(args):
    f = args.element('f', 'grassmann')
    return clifford.varrho0_apply(f, args.element('x', 'clifford'),
                                  args.metric(f.m))


@operation('quantize')
def _quantize(args):
    f = args.element('f', 'grassmann')
    return clifford.quantize(f, args.bivector('K', f.m), args.metric(f.m))


@operation('symbol')
def _symbol(args):
    x = args.element('x', 'clifford')
    return clifford.symbol(x, args.bivector('K', x.m), args.metric(x.m))


@operation('supertrace')
def _supertrace(args):
    return clifford.supertrace(args.element('x', 'clifford'))


@operation('so_action_clifford')
def _so_action_clifford(args):
    x = args.element('x', 'clifford')
    return clifford.so_action_clifford(args.rotation(args.metric(x.m)), x)


@operation('quantize_sw')
def _quantize_sw(args):
    f = args.element('f', 'grassmann')
    return quantiser.quantize_via_sw(f, args.bivector('K', f.m),
                                     args.metric(f.m))


@operation('symbol_sw')
def _symbol_sw(args):
    x = args.element('x', 'clifford')
    return quantiser.symbol_via_supertrace(x, args.bivector('K', x.m),
                                           args.metric(x.m))


@operation('star_kernel')
def _star_kernel(args):
    f = args.element('f', 'grassmann')
    return quantiser.star_via_kernel(f, args.element('g', 'grassmann'),
                                     args.bivector('K', f.m),
                                     args.metric(f.m))


#
# Polarisations
#
def _metric_for(args, name):
    return args.metric(args.square(name).shape[0])


@operation('from_complex_structure')
def _from_complex_structure(args):
    metric = _metric_for(args, 'J')
    return pol.from_complex_structure(args.structure(metric))


@operation('kp_lambda')
def _kp_lambda(args):
    metric = _metric_for(args, 'P')
    K, lam = pol.kp_lambda(args.polarization(metric))
    return {'K': K, 'Lambda': lam}


@operation('retraction')
def _retraction(args):
    metric = _metric_for(args, 'P')
    return pol.retraction(args.polarization(metric))


@operation('transversal')
def _transversal(args):
    metric = _metric_for(args, 'J')
    return pol.transversal(args.structure(metric),
                           args.structure(metric, 'J2'))


@operation('validate_tangent')
def _validate_tangent(args):
    metric = _metric_for(args, 'P')
    polarization = args.polarization(metric)
    tangent = pol.validate_tangent(polarization,
                                   args.square('dP', metric.m))
    return {'delta_k': tangent.delta_k,
            'image_block': tangent.image_block,
            'kernel_block': tangent.kernel_block}


@operation('kahler_form')
def _kahler_form(args):
    metric = _metric_for(args, 'J')
    return pol.kahler_form(args.structure(metric),
                           args.square('dJ1', metric.m),
                           args.square('dJ2', metric.m))


@operation('geodesic_path')
def _geodesic_path(args):
    metric = _metric_for(args, 'J')
    generator = args.square('X', metric.m)
    return pol.geodesic_path(args.structure(metric), generator.real,
                             args.integer('steps', 10))


#
# Sections and polarised states
#
@operation('covariant_derivative')
def _covariant_derivative(args):
    psi = _section(args)
    return sections.covariant_derivative(args.vector('mu', psi.m), psi)


@operation('prequantum')
def _prequantum(args):
    psi = _section(args)
    return sections.prequantum_op(args.element('f', 'grassmann'), psi)


@operation('star_on_state')
def _star_on_state(args):
    psi = _section(args)
    return sections.star_on_state(args.element('f', 'grassmann'), psi,
                                  args.polarization(psi.metric))


@operation('is_polarized')
def _is_polarized(args):
    psi = _section(args)
    return sections.is_polarized(psi, args.polarization(psi.metric))


@operation('polarized_basis')
def _polarized_basis(args):
    metric = _metric_for(args, 'P')
    return sections.polarized_basis(args.polarization(metric),
                                    args.number('hbar'))


@operation('decompose')
def _decompose(args):
    psi = _section(args)
    h, h_prime = sections.decompose(psi, args.polarization(psi.metric))
    return {'h': h, 'h_prime': h_prime}


@operation('so_action_section')
def _so_action_section(args):
    psi = _section(args)
    return sections.so_action_section(args.rotation(psi.metric), psi)


#
# Transport
#
def _path(args, base):
    path = args._get('path')
    where = args._where('path')
    if not isinstance(path, list) or not path:
        raise exceptions.SchemaError("expected a nonempty list of segments",
                                     where)
    segments = []
    for index, segment in enumerate(path):
        here = where + [index]
        if not isinstance(segment, dict):
            raise exceptions.SchemaError(
                "segments are {start: Y, end: Y} objects", here)
        ends = []
        for key in ('start', 'end'):
            document = segment.get(key)
            ends.append(None if document is None else codec.decode_matrix(
                document, here + [key], (base.m, base.m)))
        try:
            segments.append(pol.ConjugationPath(base, *ends))
        except exceptions.InvalidTensor as exc:
            raise exceptions.SchemaError(str(exc), here)
    return segments


@operation('h_transport')
def _h_transport(args):
    psi = _section(args)
    base = args.polarization(psi.metric)
    segments = _path(args, base)
    steps = args.integer('steps', transport.DEFAULT_STEPS)
    if args.flag('metaplectic'):
        result = transport.metaplectic_transport(segments, psi, steps)
    else:
        result = transport.h_transport(segments, psi, steps)
    return {'state': result.state, 'endpoint': result.endpoint,
            'steps': result.steps, 'phase': result.metaplectic_phase,
            'residual': result.residual}


@operation('rho')
def _rho(args):
    metric = _metric_for(args, 'P')
    return transport.rho_matrix(args.polarization(metric),
                                args.rotation(metric), args.number('hbar'),
                                args.integer('steps', transport.DEFAULT_STEPS),
                                metaplectic=args.flag('metaplectic'))
