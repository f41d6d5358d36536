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

"""Tests for :mod:`fermistar.sampling`."""

import unittest

import numpy as np
from scipy import linalg

from fermistar import polarization as pol
from fermistar import sampling
from fermistar import tensors


class TestStreams(unittest.TestCase):

    def test_reproducible(self):
        first = sampling.stream(7, 'star.jacobi').integers(0, 1000, 8)
        second = sampling.stream(7, 'star.jacobi').integers(0, 1000, 8)
        np.testing.assert_array_equal(first, second)

    def test_names_and_seeds_differ(self):
        base = sampling.stream(7, 'star.jacobi').random(4)
        other_name = sampling.stream(7, 'star.degree_bound').random(4)
        other_seed = sampling.stream(8, 'star.jacobi').random(4)
        self.assertFalse(np.allclose(base, other_name))
        self.assertFalse(np.allclose(base, other_seed))

    def test_gaussian_integers(self):
        values = sampling.gaussian_integers(sampling.stream(0, 'x'), 200, 2)
        np.testing.assert_array_equal(values.real, np.round(values.real))
        self.assertLessEqual(np.max(np.abs(values.real)), 2)
        self.assertLessEqual(np.max(np.abs(values.imag)), 2)


class TestElements(unittest.TestCase):

    def setUp(self):
        self.rng = sampling.stream(1, self.id())

    def test_formal(self):
        f = sampling.random_multivector(self.rng, 3)
        self.assertTrue(f.is_formal)
        self.assertEqual(f.hbar_valuation(), 0)

    def test_numeric(self):
        f = sampling.random_multivector(self.rng, 3, hbar=0.5)
        self.assertEqual(f.hbar, 0.5)
        self.assertEqual(f.degrees(), [0, 1, 2, 3])

    def test_degrees(self):
        f = sampling.random_multivector(self.rng, 4, hbar=1.0,
                                        degrees=(0, 4))
        self.assertEqual(f.degrees(), [0, 4])
        for parity in (0, 1):
            g = sampling.random_homogeneous(self.rng, 4, parity)
            self.assertEqual(g.parity(), parity)

    def test_density(self):
        f = sampling.random_multivector(self.rng, 6, hbar=1.0, density=0.0)
        self.assertTrue(f.is_zero())


class TestTensors(unittest.TestCase):

    def setUp(self):
        self.rng = sampling.stream(2, self.id())

    def test_bivectors(self):
        K = sampling.random_bivector(self.rng, 4)
        np.testing.assert_array_equal(K.K, -K.K.T)
        dyadic = sampling.random_bivector(self.rng, 4, dyadic=True)
        np.testing.assert_array_equal(dyadic.K * 4, np.round(dyadic.K * 4))

    def test_metric(self):
        metric = sampling.random_metric(self.rng, 5)
        self.assertGreater(np.min(linalg.eigvalsh(metric.q)), 0)

    def test_generator_and_rotation(self):
        metric = sampling.random_metric(self.rng, 4)
        generator = sampling.random_generator(self.rng, metric)
        tensors.check_so_generator(generator, metric)
        rotation = sampling.random_rotation(self.rng, metric)
        self.assertAlmostEqual(linalg.det(rotation.matrix), 1.0)

    def test_complex_structure(self):
        metric = sampling.random_metric(self.rng, 6)
        structure = sampling.random_complex_structure(self.rng, metric)
        self.assertIsInstance(structure, pol.ComplexStructure)
        np.testing.assert_allclose(np.dot(structure.J, structure.J),
                                   -np.eye(6), atol=1e-10)

    def test_polarizations(self):
        metric = sampling.random_metric(self.rng, 4)
        inside = sampling.random_polarization(self.rng, metric)
        outside = sampling.random_polarization(self.rng, metric, in_j=False)
        self.assertTrue(pol.is_in_j(inside))
        self.assertFalse(pol.is_in_j(outside))


if __name__ == '__main__':
    unittest.main()
