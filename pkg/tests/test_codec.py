# pylint: disable=C0103,C0111,R0903,R0904,W0212,W0232

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

"""Tests for :mod:`fermistar.codec`."""

import unittest

import numpy as np

from fermistar import clifford
from fermistar import codec
from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import tensors
from fermistar.scalar import Laurent


def numeric(m, terms, hbar=0.5):
    return {'m': m, 'mode': 'numeric', 'hbar': hbar, 'terms': terms}


class TestDecodeElement(unittest.TestCase):

    def test_numeric(self):
        f = codec.decode_element(numeric(2, [
            {'mask': [1, 2], 're': 1.5},
            {'mask': [], 'im': -1},
        ]))
        self.assertIsInstance(f, mv.Multivector)
        self.assertEqual(f.hbar, 0.5)
        np.testing.assert_array_equal(f.coeffs, [-1j, 0, 0, 1.5])

    def test_formal(self):
        f = codec.decode_element({
            'm': 2, 'mode': 'formal', 'hbar': None,
            'terms': [{'mask': [2], 'laurent': {'-1': [1, 0], '0': 2}}]})
        self.assertTrue(f.is_formal)
        self.assertEqual(f.terms(), {2: Laurent.from_dict({-1: 1, 0: 2})})

    def test_clifford(self):
        x = codec.decode_element(dict(numeric(2, [{'mask': [1]}]),
                                      algebra='clifford'))
        self.assertIsInstance(x, clifford.CliffordElement)

    def test_encode_is_canonical(self):
        f = mv.Multivector.monomial(3, [2, 1], coeff=2.0, hbar=1.0) + 1
        document = codec.encode_element(f)
        self.assertEqual(document, {
            'm': 3, 'mode': 'numeric', 'hbar': 1.0, 'algebra': 'grassmann',
            'terms': [{'mask': [], 're': 1.0, 'im': 0.0},
                      {'mask': [1, 2], 're': -2.0, 'im': 0.0}]})
        self.assertEqual(codec.decode_element(document), f)

    def assertLocation(self, document, location):
        with self.assertRaises(exceptions.SchemaError) as context:
            codec.decode_element(document, ['f'])
        self.assertEqual(context.exception.location, location)

    def test_mode_and_hbar(self):
        self.assertLocation(numeric(2, [], hbar=None), 'f.hbar')
        self.assertLocation({'m': 2, 'mode': 'formal', 'hbar': 1.0,
                             'terms': []}, 'f.hbar')
        self.assertLocation(numeric(2, [], hbar=-1.0), 'f.hbar')
        self.assertLocation(dict(numeric(2, []), mode='lazy'), 'f.mode')

    def test_generator_count(self):
        self.assertLocation(numeric(0, []), 'f.m')
        self.assertLocation(numeric(True, []), 'f.m')
        self.assertLocation(numeric(mv.MAX_GENERATORS + 1, []), 'f.m')

    def test_masks(self):
        self.assertLocation(numeric(2, [{'mask': [2, 1]}]),
                            'f.terms[0].mask')
        self.assertLocation(numeric(2, [{'mask': [1, 3]}]),
                            'f.terms[0].mask')
        self.assertLocation(numeric(2, [{'mask': [0]}]), 'f.terms[0].mask')
        self.assertLocation(numeric(2, [{'mask': [1]}, {'mask': [1]}]),
                            'f.terms[1].mask')

    def test_terms(self):
        self.assertLocation(numeric(2, [{'mask': [1], 're': 'x'}]),
                            'f.terms[0].re')
        self.assertLocation(numeric(2, [{'mask': [1], 'spin': 1}]),
                            'f.terms[0].spin')
        self.assertLocation({'m': 2, 'mode': 'formal', 'terms': [
            {'mask': [], 'laurent': {'x': 1}}]}, 'f.terms[0].laurent.x')


class TestMatrices(unittest.TestCase):

    def test_nested_lists(self):
        matrix = codec.decode_matrix([[1, [0, 2]], [3.5, 0]])
        np.testing.assert_array_equal(matrix, [[1, 2j], [3.5, 0]])

    def test_wrapped(self):
        document = codec.encode_matrix(np.array([[0, 1j], [-1j, 0]]))
        self.assertEqual(document['m'], 2)
        np.testing.assert_array_equal(codec.decode_matrix(document),
                                      [[0, 1j], [-1j, 0]])
        with self.assertRaises(exceptions.SchemaError) as context:
            codec.decode_matrix(document, ['K'], (3, 3))
        self.assertEqual(context.exception.location, 'K.m')

    def test_rejects(self):
        for document in ([[1, 2], [3]], [], {'m': 2}, [[1, [1, 2, 3]]]):
            with self.assertRaises(exceptions.SchemaError):
                codec.decode_matrix(document)
        with self.assertRaises(exceptions.SchemaError):
            codec.decode_matrix([[1, 0]], shape=(2, 2))

    def test_metric(self):
        self.assertEqual(codec.decode_metric('identity', 3),
                         tensors.Metric.identity(3))
        self.assertEqual(codec.decode_metric(None, 2),
                         tensors.Metric.identity(2))
        self.assertEqual(codec.decode_metric([[2, 0], [0, 1]], 2),
                         tensors.Metric(np.diag([2.0, 1.0])))
        for document in ([[1, [0, 1]], [[0, 1], 1]], [[1, 2], [2, 1]]):
            with self.assertRaises(exceptions.SchemaError):
                codec.decode_metric(document, 2)

    def test_bivector(self):
        self.assertEqual(codec.decode_bivector(None, 2),
                         tensors.Bivector.zero(2))
        self.assertEqual(codec.decode_bivector([[0, 1], [-1, 0]], 2),
                         tensors.Bivector([[0, 1], [-1, 0]]))
        with self.assertRaises(exceptions.SchemaError):
            codec.decode_bivector([[0, 1], [1, 0]], 2)

    def test_vector(self):
        self.assertEqual(codec.decode_vector(2, 3), 2)
        np.testing.assert_array_equal(codec.decode_vector([1, [0, 1], 0], 3),
                                      [1, 1j, 0])
        with self.assertRaises(exceptions.SchemaError):
            codec.decode_vector(4, 3)
        with self.assertRaises(exceptions.SchemaError):
            codec.decode_vector([1, 0], 3)


class TestValues(unittest.TestCase):

    def test_scalars(self):
        self.assertEqual(codec.decode_scalar(2), 2 + 0j)
        self.assertEqual(codec.decode_scalar([1, -1]), 1 - 1j)
        self.assertEqual(codec.decode_scalar({'laurent': {'1': 0.5}}),
                         Laurent.hbar_power(1, 0.5))
        self.assertEqual(codec.encode_scalar(Laurent.hbar_power(-1, 1j)),
                         {'laurent': {'-1': [0.0, 1.0]}})

    def test_encode_value(self):
        self.assertIs(codec.encode_value(np.bool_(True)), True)
        self.assertEqual(codec.encode_value(np.int64(3)), 3)
        self.assertEqual(codec.encode_value(0.25), 0.25)
        self.assertEqual(codec.encode_value(2j), [0.0, 2.0])
        self.assertEqual(codec.encode_value({'x': [1, 2.5]}),
                         {'x': [1, 2.5]})
        self.assertEqual(codec.encode_value(tensors.Bivector.zero(1)),
                         {'m': 1, 'matrix': [[[0.0, 0.0]]]})
        with self.assertRaises(TypeError):
            codec.encode_value(object())


if __name__ == '__main__':
    unittest.main()
