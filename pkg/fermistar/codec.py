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

"""JSON encoding of algebra elements, tensors and states.

Element documents::

    {"m": 4, "mode": "numeric", "hbar": 0.5, "algebra": "grassmann",
     "terms": [{"mask": [1, 2], "re": 0.5, "im": 0.0}]}

    {"m": 2, "mode": "formal", "hbar": null,
     "terms": [{"mask": [], "laurent": {"-1": [1.0, 0.0], "0": [2, 0]}}]}

Masks are strictly increasing 1-based index lists and may not repeat within
an element. `algebra` defaults to "grassmann". Matrices are row-major
nested lists (entries are numbers or [re, im] pairs), optionally wrapped as
{"m": 4, "matrix": [...]}. Decoding errors raise SchemaError carrying the
location of the offending item (e.g. `terms[2].mask`).
"""

import numbers

import numpy as np
import six  # pylint: disable=wrong-import-order
import voluptuous as volup  # pylint: disable=wrong-import-order

from fermistar import clifford
from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import scalar as scalars
from fermistar import tensors

ALGEBRAS = {
    'grassmann': mv.Multivector,
    'clifford': clifford.CliffordElement,
}


def _number(value):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise volup.Invalid("expected a real number")
    return float(value)


def _integer(value):
    if isinstance(value, bool) or not isinstance(value, six.integer_types):
        raise volup.Invalid("expected an integer")
    return value


def complex_value(value):
    """Validator: a number or an [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise volup.Invalid("complex pairs take exactly two numbers")
        return complex(_number(value[0]), _number(value[1]))
    return complex(_number(value), 0.0)


def _generator_count(value):
    value = _integer(value)
    if not 1 <= value <= mv.MAX_GENERATORS:
        raise volup.Invalid("m must lie in 1..%d" % mv.MAX_GENERATORS)
    return value


def positive_number(value):
    """Validator: a positive real (None passes through)."""
    if value is None:
        return None
    value = _number(value)
    if not value > 0:
        raise volup.Invalid("expected a positive number")
    return value


def _index_list(value):
    if not isinstance(value, list):
        raise volup.Invalid("expected a list of generator indices")
    indices = [_integer(index) for index in value]
    if any(index < 1 for index in indices):
        raise volup.Invalid("generator indices start at 1")
    if any(a >= b for a, b in zip(indices, indices[1:])):
        raise volup.Invalid("mask indices must be strictly increasing")
    return indices


def _laurent(value):
    if not isinstance(value, dict) or not value:
        raise volup.Invalid("expected a nonempty {power: [re, im]} object")
    terms = {}
    for key, coeff in value.items():
        try:
            power = int(key)
        except (TypeError, ValueError):
            raise volup.Invalid("hbar powers must be integers", path=[key])
        try:
            terms[power] = complex_value(coeff)
        except volup.Invalid as exc:
            raise volup.Invalid(exc.msg, path=[key])
    return terms


NUMERIC_TERM = {
    volup.Required('mask'): _index_list,
    volup.Optional('re', default=0.0): _number,
    volup.Optional('im', default=0.0): _number,
}

FORMAL_TERM = {
    volup.Required('mask'): _index_list,
    volup.Required('laurent'): _laurent,
}

ELEMENT_SCHEMA = volup.Schema({
    volup.Required('m'): _generator_count,
    volup.Optional('mode', default='numeric'): volup.In(
        [mv.NUMERIC, mv.FORMAL]),
    volup.Optional('hbar', default=None): positive_number,
    volup.Optional('algebra', default='grassmann'): volup.In(
        sorted(ALGEBRAS)),
    volup.Required('terms'): list,
})

MATRIX_SCHEMA = volup.Schema([[complex_value]])

SCALAR_SCHEMA = volup.Schema(volup.Any(
    complex_value, {volup.Required('laurent'): _laurent}))


def validate(schema, document, path=None):
    """Apply a voluptuous schema; failures become SchemaError with a path."""
    try:
        return schema(document)
    except volup.MultipleInvalid as exc:
        errors = sorted(exc.errors, key=lambda e: [str(p) for p in e.path])
        first = errors[0]
        raise exceptions.SchemaError(first.msg,
                                     list(path or []) + list(first.path))
    except volup.Invalid as exc:
        raise exceptions.SchemaError(exc.msg,
                                     list(path or []) + list(exc.path))


def decode_element(document, path=None):
    """Build a Multivector or CliffordElement from a document."""
    path = list(path or [])
    doc = validate(ELEMENT_SCHEMA, document, path)
    m, hbar, mode = doc['m'], doc['hbar'], doc['mode']
    if mode == mv.NUMERIC and hbar is None:
        raise exceptions.SchemaError("numeric elements need a positive hbar",
                                     path + ['hbar'])
    if mode == mv.FORMAL and hbar is not None:
        raise exceptions.SchemaError("formal elements take hbar: null",
                                     path + ['hbar'])
    schema = volup.Schema(NUMERIC_TERM if mode == mv.NUMERIC
                          else FORMAL_TERM)
    terms, seen = {}, set()
    for index, term in enumerate(doc['terms']):
        where = path + ['terms', index]
        term = validate(schema, term, where)
        indices = term['mask']
        if indices and indices[-1] > m:
            raise exceptions.SchemaError(
                "index %d out of range 1..%d" % (indices[-1], m),
                where + ['mask'])
        mask = mv.mask_of(indices)
        if mask in seen:
            raise exceptions.SchemaError("duplicate mask %s" % indices,
                                         where + ['mask'])
        seen.add(mask)
        if mode == mv.NUMERIC:
            terms[mask] = complex(term['re'], term['im'])
        else:
            terms[mask] = term['laurent']
    cls = ALGEBRAS[doc['algebra']]
    if mode == mv.NUMERIC:
        coeffs = np.zeros(1 << m, complex)
        for mask, value in terms.items():
            coeffs[mask] = value
        return cls(m, coeffs, hbar=hbar)
    powers = [power for laurent in terms.values() for power in laurent]
    low = min(powers or [0])
    layers = np.zeros((max(powers or [0]) - low + 1, 1 << m), complex)
    for mask, laurent in terms.items():
        for power, value in laurent.items():
            layers[power - low, mask] = value
    return cls(m, layers, low=low)


def encode_element(element):
    """Canonical document of a graded element (terms sorted by mask)."""
    terms = []
    for mask, coeff in sorted(element.terms().items()):
        term = {'mask': mv.indices_of(mask)}
        if element.is_formal:
            term['laurent'] = dict(
                (str(power), encode_complex(value))
                for power, value in sorted(coeff.to_dict().items()))
        else:
            term['re'], term['im'] = coeff.real, coeff.imag
        terms.append(term)
    return {'m': element.m, 'mode': element.mode, 'hbar': element.hbar,
            'algebra': element.algebra, 'terms': terms}


def encode_complex(value):
    """[re, im] pair."""
    value = complex(value)
    return [value.real, value.imag]


def decode_scalar(document, path=None):
    """A complex number or a Laurent polynomial."""
    value = validate(SCALAR_SCHEMA, document, path)
    if isinstance(value, dict):
        return scalars.Laurent.from_dict(value['laurent'])
    return value


def encode_scalar(value):
    """Document of a complex number or a Laurent polynomial."""
    if isinstance(value, scalars.Laurent):
        return {'laurent': dict(
            (str(power), encode_complex(coeff))
            for power, coeff in sorted(value.to_dict().items()))}
    return encode_complex(value)


def decode_matrix(document, path=None, shape=None):
    """A complex matrix from nested lists or {"m": .., "matrix": ..}."""
    path = list(path or [])
    if isinstance(document, dict):
        if 'matrix' not in document:
            raise exceptions.SchemaError("expected a 'matrix' entry", path)
        size = document.get('m')
        if size is not None:
            shape = shape or (size, size)
            if tuple(shape) != (size, size):
                raise exceptions.SchemaError(
                    "expected m = %d, got %r" % (shape[0], size),
                    path + ['m'])
        document, path = document['matrix'], path + ['matrix']
    rows = validate(MATRIX_SCHEMA, document, path)
    widths = set(len(row) for row in rows)
    if not rows or len(widths) != 1:
        raise exceptions.SchemaError("matrix rows must have equal length",
                                     path)
    matrix = np.array(rows, dtype=complex)
    if shape is not None and matrix.shape != tuple(shape):
        raise exceptions.SchemaError(
            "expected a %dx%d matrix" % tuple(shape), path)
    return matrix


def encode_matrix(matrix):
    """Nested lists of [re, im] pairs (wrapped with m when square)."""
    matrix = np.atleast_2d(matrix)
    rows = [[encode_complex(value) for value in row] for row in matrix]
    if matrix.shape[0] == matrix.shape[1]:
        return {'m': matrix.shape[0], 'matrix': rows}
    return rows


def decode_vector(document, m, path=None):
    """A 1-based generator index or a complex vector of length m."""
    if isinstance(document, six.integer_types) and \
            not isinstance(document, bool):
        if not 1 <= document <= m:
            raise exceptions.SchemaError(
                "index %d out of range 1..%d" % (document, m), path)
        return document
    vector = decode_matrix([document], path, (1, m))
    return vector[0]


def decode_metric(document, m, path=None):
    """'identity' (or null) or a real symmetric positive-definite matrix."""
    if document in (None, 'identity'):
        return tensors.Metric.identity(m)
    matrix = decode_matrix(document, path, (m, m))
    if np.any(matrix.imag):
        raise exceptions.SchemaError("metrics are real", path)
    try:
        return tensors.Metric(matrix.real)
    except exceptions.InvalidTensor as exc:
        raise exceptions.SchemaError(str(exc), path)


def decode_bivector(document, m, path=None):
    """null (zero) or an antisymmetric matrix."""
    if document is None:
        return tensors.Bivector.zero(m)
    try:
        return tensors.Bivector(decode_matrix(document, path, (m, m)))
    except exceptions.InvalidTensor as exc:
        raise exceptions.SchemaError(str(exc), path)


def encode_value(value):
    """Encode an operation result by type."""
    if isinstance(value, mv.GradedElement):
        return encode_element(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (six.integer_types, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (scalars.Laurent, numbers.Number)):
        return encode_scalar(value)
    if isinstance(value, tensors.Bivector):
        return encode_matrix(value.K)
    if isinstance(value, np.ndarray):
        return encode_matrix(value)
    if isinstance(value, dict):
        return dict((key, encode_value(item)) for key, item in value.items())
    if isinstance(value, (list, tuple)):
        return [encode_value(item) for item in value]
    if hasattr(value, 'section'):
        return encode_element(value.section)
    if hasattr(value, 'P'):
        return encode_matrix(value.P)
    if hasattr(value, 'J'):
        return encode_matrix(value.J)
    raise TypeError("cannot encode %r" % type(value))
