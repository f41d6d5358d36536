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

"""Tests for :mod:`fermistar.quantiser`."""

import unittest

import numpy as np

from fermistar import clifford
from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import quantiser
from fermistar import sampling
from fermistar import star
from fermistar import tensors

TOLERANCE = 1e-10


def relative(got, expected):
    return got.distance(expected) / max(1.0, expected.norm())


class QuantiserTestCase(unittest.TestCase):

    def setUp(self):
        self.rng = sampling.stream(3, self.id())

    def assertClose(self, got, expected, tol=TOLERANCE):
        self.assertLessEqual(relative(got, expected), tol)


class TestGuards(QuantiserTestCase):

    def test_orthonormal_gauge(self):
        with self.assertRaises(exceptions.BasisError):
            quantiser.require_orthonormal(tensors.Metric(np.diag([2.0, 1.0])))
        quantiser.require_orthonormal(tensors.Metric.identity(2))

    def test_numeric_hbar(self):
        with self.assertRaises(exceptions.FormalModeError):
            quantiser.quantize_via_sw(mv.Multivector.one(2),
                                      tensors.Bivector.zero(2),
                                      tensors.Metric.identity(2))

    def test_table_shape(self):
        with self.assertRaises(exceptions.DimensionError):
            quantiser.CliffordGrassmann(tensors.Metric.identity(2), 2, 1.0,
                                        np.zeros((4, 8)))

    def test_integrand_dimension(self):
        kernel = quantiser.omega(tensors.Metric.identity(2),
                                 tensors.Bivector.zero(2), 1.0)
        with self.assertRaises(exceptions.DimensionError):
            kernel.integrate_against(mv.Multivector.one(4, hbar=1.0))

    def test_kernel_star_size(self):
        f = mv.Multivector.one(5, hbar=1.0)
        with self.assertRaises(exceptions.DimensionError):
            quantiser.star_via_kernel(f, f, tensors.Bivector.zero(5),
                                      tensors.Metric.identity(5))


class TestStratonovichWeyl(QuantiserTestCase):

    def test_unit_quantiser(self):
        metric = tensors.Metric.identity(2)
        kernel = quantiser.omega(metric, tensors.Bivector.zero(2), 1.0)
        # the Berezin integral of Omega_0 against 1 is Q(1) = 1
        one = kernel.integrate_against(mv.Multivector.one(2, hbar=1.0))
        self.assertClose(one, clifford.CliffordElement.one(2, hbar=1.0))

    def test_quantize_matches_varrho(self):
        for m in (2, 4):
            metric = tensors.Metric.identity(m)
            K = sampling.random_bivector(self.rng, m)
            for hbar in (0.5, 2.0):
                f = sampling.random_multivector(self.rng, m, hbar=hbar)
                self.assertClose(quantiser.quantize_via_sw(f, K, metric),
                                 clifford.quantize(f, K, metric))

    def test_symbol_via_supertrace(self):
        for m in (2, 4):
            metric = tensors.Metric.identity(m)
            K = sampling.random_bivector(self.rng, m)
            x = clifford.as_clifford(
                sampling.random_multivector(self.rng, m, hbar=1.3))
            self.assertClose(quantiser.symbol_via_supertrace(x, K, metric),
                             clifford.symbol(x, K, metric))

    def test_symbol_needs_even_dimension(self):
        x = clifford.CliffordElement.one(3, hbar=1.0)
        with self.assertRaises(exceptions.DimensionError):
            quantiser.symbol_via_supertrace(x, tensors.Bivector.zero(3),
                                            tensors.Metric.identity(3))


class TestKernelIdentities(QuantiserTestCase):

    def test_delta_function(self):
        delta = quantiser.delta_function(1)
        self.assertEqual(delta, mv.Multivector.monomial(2, [1]) -
                         mv.Multivector.monomial(2, [2]))
        self.assertIsInstance(quantiser.delta_function(2, hbar=1.0),
                              mv.Multivector)

    def test_pair_supertrace(self):
        for m in (2, 4):
            metric = tensors.Metric.identity(m)
            K = sampling.random_bivector(self.rng, m)
            hbar = 0.7
            got = quantiser.pair_supertrace(metric, K, hbar)
            expected = quantiser.delta_function(m, hbar) * (
                (0.5j * hbar) ** (m // 2))
            self.assertClose(got, expected)

    def test_triple_supertrace(self):
        metric = tensors.Metric.identity(2)
        for hbar in (0.5, 1.0, 2.0):
            self.assertClose(quantiser.triple_supertrace(metric, hbar),
                             quantiser.triple_closed_form(metric, hbar))

    def test_star_via_kernel(self):
        for m in (2, 4):
            metric = tensors.Metric.identity(m)
            K = sampling.random_bivector(self.rng, m)
            for hbar in (0.3, 2.7):
                f = sampling.random_multivector(self.rng, m, hbar=hbar)
                g = sampling.random_multivector(self.rng, m, hbar=hbar)
                self.assertClose(quantiser.star_via_kernel(f, g, K, metric),
                                 star.star_k(f, g, metric, K))

    def test_star_via_kernel_linear(self):
        metric = tensors.Metric.identity(2)
        K = tensors.Bivector(np.array([[0.0, 0.5], [-0.5, 0.0]]))
        f = mv.Multivector.monomial(2, [1], hbar=1.0)
        g = mv.Multivector.monomial(2, [2], hbar=1.0)
        self.assertClose(quantiser.star_via_kernel(f, g, K, metric),
                         mv.Multivector.monomial(2, [1, 2], hbar=1.0) +
                         mv.Multivector.one(2, hbar=1.0) * 0.125)

    def test_star_via_kernel_top_degree(self):
        # the hbar^2 coefficient needs the K^2 terms of the propagator
        metric = tensors.Metric.identity(2)
        K = tensors.Bivector(np.array([[0.0, 0.75], [-0.75, 0.0]]))
        top = mv.Multivector.monomial(2, [1, 2], hbar=1.5)
        expected = star.star_k(top, top, metric, K)
        self.assertClose(quantiser.star_via_kernel(top, top, K, metric),
                         expected)
        self.assertClose(star.star_k_direct(top, top, metric, K), expected)

    def test_star_via_kernel_moyal(self):
        metric = tensors.Metric.identity(4)
        f = sampling.random_multivector(self.rng, 4, hbar=0.8)
        g = sampling.random_multivector(self.rng, 4, hbar=0.8)
        self.assertClose(quantiser.star_via_kernel(
            f, g, tensors.Bivector.zero(4), metric), star.moyal(f, g, metric))

    def test_star_via_kernel_singular_lambda(self):
        metric = tensors.Metric.identity(2)
        K = tensors.Bivector(np.array([[0.0, 1j], [-1j, 0.0]]))
        f = mv.Multivector.one(2, hbar=1.0)
        with self.assertRaises(exceptions.InvalidTensor):
            quantiser.star_via_kernel(f, f, K, metric)

    def test_omega_equivariance(self):
        metric = tensors.Metric.identity(4)
        K = sampling.random_bivector(self.rng, 4)
        rotation = sampling.random_rotation(self.rng, metric)
        kernel = quantiser.omega(metric, K, 1.0)
        moved = quantiser.transform_omega(rotation, kernel)
        expected = quantiser.omega(metric, K.transformed(rotation), 1.0)
        np.testing.assert_allclose(moved.table, expected.table, atol=1e-10)


if __name__ == '__main__':
    unittest.main()
