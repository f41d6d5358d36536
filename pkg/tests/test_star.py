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

"""Tests for :mod:`fermistar.star`."""

import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import star
from fermistar import tensors
from fermistar.scalar import Laurent

from tests import strategies

PROPERTY = settings(max_examples=25, deadline=None)

# dyadic metric and bivector: every product stays exact
METRIC = tensors.Metric(np.diag([1.0, 2.0, 0.5]))
K = tensors.Bivector([[0, 0.5, -0.25j], [-0.5, 0, 1], [0.25j, -1, 0]])


def e(m, *indices):
    return mv.Multivector.monomial(m, indices)


def sign(f, g):
    return -1 if f.parity() and g.parity() else 1


class TestPoisson(unittest.TestCase):

    def test_generators(self):
        metric = tensors.Metric.identity(2)
        self.assertEqual(star.poisson_bracket(e(2, 1), e(2, 1), metric),
                         mv.Multivector.one(2) * 0.5)
        self.assertTrue(star.poisson_bracket(e(2, 1), e(2, 2),
                                             metric).is_zero())

    def test_quadratic_acts_as_rotation(self):
        metric = tensors.Metric.identity(2)
        bracket = star.poisson_bracket(e(2, 1, 2), e(2, 1), metric)
        self.assertEqual(bracket, e(2, 2) * -0.5)

    def test_hamiltonian_field(self):
        f, g = e(3, 1, 2), e(3, 1, 3)
        field = star.hamiltonian_field(f, METRIC)
        self.assertEqual(len(field), 3)
        self.assertEqual(star.apply_field(field, g) * 0.5,
                         star.poisson_bracket(f, g, METRIC))

    def test_dimension_check(self):
        with self.assertRaises(exceptions.DimensionError):
            star.poisson_bracket(e(2, 1), e(2, 2), METRIC)

    @PROPERTY
    @given(st.data())
    def test_jacobi(self, data):
        parities = [data.draw(st.integers(0, 1)) for _ in range(3)]
        f, g, h = [data.draw(strategies.multivectors(3, parity=p))
                   for p in parities]

        def bracket(a, b):
            return star.poisson_bracket(a, b, METRIC)
        self.assertEqual(bracket(f, bracket(g, h)),
                         bracket(bracket(f, g), h) +
                         bracket(g, bracket(f, h)) * sign(f, g))


class TestStarProduct(unittest.TestCase):

    def test_degree_one(self):
        metric = tensors.Metric.identity(2)
        product = star.moyal(e(2, 1), e(2, 1), metric)
        self.assertEqual(product, mv.Multivector.one(2) *
                         Laurent.hbar_power(1, 0.25))
        product = star.star_k(e(3, 1), e(3, 2), METRIC, K)
        self.assertEqual(product, e(3, 1, 2) + mv.Multivector.one(3) *
                         Laurent.hbar_power(1, 0.125))

    def test_clifford_relation(self):
        metric = tensors.Metric.identity(3)
        for mu in range(1, 4):
            for nu in range(1, 4):
                a, b = e(3, mu), e(3, nu)
                anti = star.moyal(a, b, metric) + star.moyal(b, a, metric)
                expected = 0.5 if mu == nu else 0.0
                self.assertEqual(anti, mv.Multivector.one(3) *
                                 Laurent.hbar_power(1, expected))

    def test_unit(self):
        f = e(3, 1, 3) * 2 + e(3, 2)
        one = mv.Multivector.one(3)
        self.assertEqual(star.star_k(one, f, METRIC, K), f)
        self.assertEqual(star.star_k(f, one, METRIC, K), f)

    def test_numeric_matches_formal(self):
        f = e(3, 1, 2) + e(3, 3) * 1j
        g = e(3, 2, 3) - 2
        formal = star.star_k(f, g, METRIC, K)
        numeric = star.star_k(f.evaluate(0.7), g.evaluate(0.7), METRIC, K)
        self.assertTrue(numeric.equals(formal.evaluate(0.7), 1e-14))

    def test_dimension_checks(self):
        with self.assertRaises(exceptions.DimensionError):
            star.moyal(e(2, 1), e(2, 2), METRIC)
        with self.assertRaises(exceptions.DimensionError):
            star.star_k(e(3, 1), e(2, 1), METRIC, K)

    @PROPERTY
    @given(st.data())
    def test_associative(self, data):
        f, g, h = [data.draw(strategies.multivectors(3)) for _ in range(3)]

        def prod(a, b):
            return star.star_k(a, b, METRIC, K)
        self.assertEqual(prod(prod(f, g), h), prod(f, prod(g, h)))

    @PROPERTY
    @given(st.data())
    def test_commutator_is_bracket(self, data):
        p, q = data.draw(st.integers(0, 1)), data.draw(st.integers(0, 1))
        f = data.draw(strategies.multivectors(3, parity=p))
        g = data.draw(strategies.multivectors(3, parity=q))
        difference = (star.star_k(f, g, METRIC, K) -
                      star.star_k(g, f, METRIC, K) * sign(f, g))
        self.assertTrue(difference.hbar_coefficient(0).is_zero())
        self.assertEqual(difference.hbar_coefficient(1),
                         star.poisson_bracket(f, g, METRIC))

    @PROPERTY
    @given(st.data())
    def test_hbar_degree_bound(self, data):
        f, g = [data.draw(strategies.multivectors(3)) for _ in range(2)]
        degree = star.star_k(f, g, METRIC, K).hbar_degree()
        self.assertLessEqual(degree or 0, 3)

    @PROPERTY
    @given(st.data())
    def test_direct_evaluation_agrees(self, data):
        f, g = [data.draw(strategies.multivectors(3)) for _ in range(2)]
        self.assertEqual(star.star_k_direct(f, g, METRIC, K),
                         star.star_k(f, g, METRIC, K))

    def test_direct_evaluation_top_degree(self):
        # the hbar^3 coefficient sums 3! orderings of each pair triple
        f = e(3, 1, 2, 3) * 1j
        self.assertEqual(star.star_k_direct(f, f, METRIC, K),
                         star.star_k(f, f, METRIC, K))

    def test_wedge_with_linear_on_the_right(self):
        metric = tensors.Metric.identity(3)
        f, a = e(3, 1, 2), e(3, 1)
        product = star.moyal(f, mv.wedge(a, mv.Multivector.one(3)), metric)
        self.assertEqual(product, e(3, 2) * Laurent.hbar_power(1, -0.25))

    @PROPERTY
    @given(st.data())
    def test_wedge_with_linear(self, data):
        p = data.draw(st.integers(0, 1))
        f = data.draw(strategies.multivectors(3, parity=p))
        g = data.draw(strategies.multivectors(3))
        covector = [data.draw(strategies.gaussian_integers)
                    for _ in range(3)]
        a = mv.Multivector.linear(covector)
        raised = METRIC.raise_(covector)
        parity = -1 if p else 1

        def prod(left, right):
            return star.moyal(left, right, METRIC)
        self.assertEqual(
            prod(mv.wedge(a, f), g),
            mv.wedge(a, prod(f, g)) + star.hbar_term(
                prod(f, mv.derivative_along(raised, g)), 0.25 * parity))
        signed = mv.derivative_along(raised, f).grade_involution()
        self.assertEqual(
            prod(f, mv.wedge(a, g)),
            mv.wedge(a, prod(f, g)) * parity +
            star.hbar_term(prod(signed, g), 0.25))


class TestIntertwiner(unittest.TestCase):

    def setUp(self):
        self.target = tensors.Bivector([[0, -1, 0], [1, 0, 0.5j],
                                        [0, -0.5j, 0]])

    def test_quadratic(self):
        zero = tensors.Bivector.zero(3)
        result = star.intertwiner(zero, self.target, e(3, 1, 2))
        # exp(-(hbar/8) K'^{mu nu} d_mu d_nu) on theta^1 theta^2
        self.assertEqual(result, e(3, 1, 2) + mv.Multivector.one(3) *
                         Laurent.hbar_power(1, -0.25))

    @PROPERTY
    @given(st.data())
    def test_intertwines_products(self, data):
        f, g = [data.draw(strategies.multivectors(3)) for _ in range(2)]

        def u(x):
            return star.intertwiner(K, self.target, x)
        self.assertEqual(u(star.star_k(f, g, METRIC, K)),
                         star.star_k(u(f), u(g), METRIC, self.target))

    def test_cocycle_and_loop(self):
        middle = tensors.Bivector([[0, 0.25, 0], [-0.25, 0, 0], [0, 0, 0]])
        f = e(3, 1, 2, 3) + e(3, 2, 3) * 2 - e(3, 1)
        path = [K, middle, self.target]
        self.assertEqual(star.o_transport(path, f),
                         star.intertwiner(K, self.target, f))
        self.assertEqual(star.o_transport(path + path[-2::-1], f), f)
        self.assertEqual(star.o_transport([K], f), f)

    def test_empty_path(self):
        with self.assertRaises(exceptions.DimensionError):
            star.o_transport([], e(3, 1))

    def test_second_order_kernel_matches(self):
        f = (e(3, 1, 2) + e(3, 2, 3) * 3 + e(3, 1, 2, 3)).evaluate(2.0)
        columns = self.target.K - K.K
        arr = star.second_order_kernel(f.coeffs, 3, columns, -0.125 * 2.0)
        expected = star.intertwiner(K, self.target, f)
        np.testing.assert_allclose(arr, expected.coeffs, atol=1e-14)


class TestRotations(unittest.TestCase):

    def test_so_action(self):
        metric = tensors.Metric.identity(3)
        rotation = tensors.Rotation([[0, -1, 0], [1, 0, 0], [0, 0, 1]],
                                    metric)
        # theta^mu o gamma^{-1} = (gamma^{-1})^mu_a theta^a
        self.assertEqual(star.so_action_function(rotation, e(3, 1)),
                         e(3, 2))
        self.assertEqual(star.so_action_function(rotation, e(3, 2)),
                         -e(3, 1))
        self.assertEqual(star.so_action_function(rotation, e(3, 1, 2)),
                         e(3, 1, 2))

    def test_equivariance(self):
        metric = tensors.Metric.identity(3)
        rotation = tensors.Rotation([[0, -1, 0], [1, 0, 0], [0, 0, 1]],
                                    metric)
        bivector = tensors.Bivector([[0, 0.5, 0.25], [-0.5, 0, 1j],
                                     [-0.25, -1j, 0]])
        f = e(3, 1, 3) + e(3, 2) * 2
        g = e(3, 2, 3) - e(3, 1) + 1

        def act(x):
            return star.so_action_function(rotation, x)
        self.assertEqual(act(star.star_k(f, g, metric, bivector)),
                         star.star_k(act(f), act(g), metric,
                                     bivector.transformed(rotation)))


if __name__ == '__main__':
    unittest.main()
