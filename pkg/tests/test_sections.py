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

"""Tests for :mod:`fermistar.sections`."""

import unittest

import numpy as np

from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import polarization as pol
from fermistar import sampling
from fermistar import sections
from fermistar import star
from fermistar import tensors
from fermistar import verify


def relative(difference, *references):
    return difference.norm() / max([1.0] + [r.norm() for r in references])


def standard_polarization(m):
    return pol.from_complex_structure(
        pol.ComplexStructure.standard(tensors.Metric.identity(m)))


class SectionTestCase(unittest.TestCase):

    hbar = 0.7

    def setUp(self):
        self.rng = sampling.stream(5, self.id())

    def numeric(self, m, parity=None):
        if parity is None:
            return sampling.random_multivector(self.rng, m, hbar=self.hbar)
        return sampling.random_homogeneous(self.rng, m, parity,
                                           hbar=self.hbar)

    def section(self, m, metric=None):
        return sections.Section.from_multivector(self.numeric(m), metric)


class TestSection(SectionTestCase):

    def test_needs_numeric_hbar(self):
        with self.assertRaises(exceptions.FormalModeError):
            sections.Section(2, np.zeros(4))
        with self.assertRaises(exceptions.FormalModeError):
            sections.Section.from_multivector(mv.Multivector.one(2))

    def test_metric_dimension(self):
        with self.assertRaises(exceptions.DimensionError):
            sections.Section(2, np.zeros(4), hbar=1.0,
                             metric=tensors.Metric.identity(3))

    def test_default_metric(self):
        psi = sections.Section(2, np.ones(4), hbar=1.0)
        self.assertEqual(psi.metric, tensors.Metric.identity(2))
        self.assertIs(sections.as_section(psi), psi)


class TestConnection(SectionTestCase):

    def test_derivative_of_unit(self):
        metric = tensors.Metric(np.diag([2.0, 1.0]))
        one = sections.Section(2, [1, 0, 0, 0], hbar=2.0, metric=metric)
        result = sections.covariant_derivative(1, one)
        expected = mv.Multivector.monomial(2, [1], coeff=-1.0, hbar=2.0)
        self.assertLess(result.distance(expected), 1e-15)

    def test_direction_checks(self):
        psi = sections.Section(2, np.ones(4), hbar=1.0)
        with self.assertRaises(exceptions.DimensionError):
            sections.covariant_derivative(3, psi)
        with self.assertRaises(exceptions.DimensionError):
            sections.covariant_derivative([1, 0, 0], psi)

    def test_curvature(self):
        metric = sampling.random_metric(self.rng, 3)
        psi = self.section(3, metric)

        def nabla(mu, section):
            return sections.covariant_derivative(mu, section)
        for mu in range(1, 4):
            for nu in range(1, 4):
                total = (nabla(mu, nabla(nu, psi)) +
                         nabla(nu, nabla(mu, psi)) +
                         psi * (2.0 * metric.q[mu - 1, nu - 1] / self.hbar))
                self.assertLess(relative(total, psi), 1e-12)

    def test_matrices(self):
        metric = sampling.random_metric(self.rng, 3)
        psi = self.section(3, metric)
        matrices = sections.connection_matrices(metric, self.hbar)
        for mu in range(3):
            np.testing.assert_allclose(
                np.dot(matrices[mu], psi.coeffs),
                sections.covariant_derivative(mu + 1, psi).coeffs,
                atol=1e-12)


class TestPolarizedStates(SectionTestCase):

    def test_basis(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric,
                                                    in_j=False)
        basis = sections.polarized_basis(polarization, self.hbar)
        self.assertEqual(len(basis), 4)
        matrix = np.array([state.section.coeffs for state in basis]).T
        self.assertEqual(np.linalg.matrix_rank(matrix), 4)
        for state in basis:
            self.assertTrue(sections.is_polarized(state, polarization))

    def test_phi(self):
        polarization = standard_polarization(4)
        basis = sections.polarized_basis(polarization, self.hbar)
        for index, state in enumerate(basis):
            np.testing.assert_allclose(state.phi, np.eye(4)[index],
                                       atol=1e-10)

    def test_rejects_unpolarized(self):
        polarization = standard_polarization(2)
        one = sections.Section(2, [1, 0, 0, 0], hbar=1.0)
        self.assertFalse(sections.is_polarized(one, polarization))
        with self.assertRaises(exceptions.NotPolarized):
            sections.PolarizedState(one, polarization)

    def test_worked_example(self):
        for hbar in (0.5, 1.0, 2.0):
            example = verify.worked_example(hbar)
            polarization = example.polarization
            result = sections.star_on_state(example.f, example.psi,
                                            polarization)
            expected = example.gaussian * hbar ** 2
            self.assertLess(relative(result - expected, expected), 1e-12)
            self.assertTrue(sections.is_polarized(result, polarization))
            gaussian = sections.gaussian(polarization, hbar)
            self.assertLess(relative(gaussian - example.gaussian,
                                     example.gaussian), 1e-12)
            prequantum = sections.prequantum_op(example.f, example.psi)
            self.assertFalse(sections.is_polarized(prequantum, polarization))


class TestOperators(SectionTestCase):

    def test_unit_acts_trivially(self):
        polarization = standard_polarization(4)
        psi = sections.polarized_basis(polarization, self.hbar)[3].section
        one = mv.Multivector.one(4, hbar=self.hbar)
        self.assertLess(sections.prequantum_op(one, psi).distance(psi),
                        1e-12)
        self.assertLess(sections.star_on_state(one, psi, polarization)
                        .distance(psi), 1e-12)

    def test_function_checks(self):
        psi = sections.Section(2, np.ones(4), hbar=1.0)
        with self.assertRaises(exceptions.FormalModeError):
            sections.prequantum_op(mv.Multivector.one(2), psi)
        with self.assertRaises(exceptions.DimensionError):
            sections.prequantum_op(mv.Multivector.one(3, hbar=1.0), psi)

    def test_dirac_condition(self):
        metric = sampling.random_metric(self.rng, 3)
        for p in (0, 1):
            for r in (0, 1):
                f, g = self.numeric(3, p), self.numeric(3, r)
                psi = self.section(3, metric)
                fg = sections.prequantum_op(f, sections.prequantum_op(g, psi))
                gf = sections.prequantum_op(g, sections.prequantum_op(f, psi))
                left = fg - gf * (-1) ** (p * r)
                right = sections.prequantum_op(
                    star.poisson_bracket(f, g, metric), psi) * self.hbar
                self.assertLess(relative(left - right, fg, gf, right), 1e-10)

    def test_preserves_polarized_states(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric)
        f = self.numeric(4)
        for state in sections.polarized_basis(polarization, self.hbar):
            result = sections.star_on_state(f, state, polarization)
            self.assertTrue(sections.is_polarized(result, polarization))

    def test_associativity(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric,
                                                    in_j=False)
        K, _ = pol.kp_lambda(polarization)
        psi = sections.polarized_basis(polarization, self.hbar)[1]
        f, g = self.numeric(4), self.numeric(4)
        left = sections.star_on_state(
            f, sections.star_on_state(g, psi, polarization), polarization)
        right = sections.star_on_state(star.star_k(f, g, metric, K), psi,
                                       polarization)
        self.assertLess(relative(left - right, left, right), 1e-8)


class TestDecomposition(SectionTestCase):

    def test_polarized_input(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric)
        psi = sections.polarized_basis(polarization, self.hbar)[2].section
        h, h_prime = sections.decompose(psi, polarization)
        self.assertIsInstance(h, sections.PolarizedState)
        self.assertLess(relative(h.section - psi, psi), 1e-9)
        self.assertLess(relative(h_prime, psi), 1e-9)

    def test_derivative_input(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric)
        derived = sections.covariant_derivative(
            polarization.image_frame[:, 0], self.section(4, metric))
        h, h_prime = sections.decompose(derived, polarization)
        self.assertLess(relative(h.section, derived), 1e-9)
        self.assertLess(relative(h_prime - derived, derived), 1e-9)

    def test_orthogonal_at_complex_structures(self):
        polarization = standard_polarization(4)
        h, h_prime = sections.decompose(self.section(4), polarization)
        self.assertAlmostEqual(sections.hermitian_pairing(h.section,
                                                          h_prime), 0)


class TestPairingAndRotations(SectionTestCase):

    def test_pairing_weights(self):
        one = sections.Section(2, [1, 0, 0, 0], hbar=2.0)
        theta = sections.Section(2, [0, 1, 0, 0], hbar=2.0)
        self.assertAlmostEqual(sections.hermitian_pairing(one, one), 1.0)
        self.assertAlmostEqual(sections.hermitian_pairing(theta, theta), 2.0)
        self.assertAlmostEqual(sections.hermitian_pairing(one * 1j, one),
                               -1j)
        self.assertAlmostEqual(sections.hermitian_pairing(one, theta), 0)

    def test_identity_rotation(self):
        metric = sampling.random_metric(self.rng, 3)
        psi = self.section(3, metric)
        moved = sections.so_action_section(tensors.Rotation.identity(metric),
                                           psi)
        self.assertLess(moved.distance(psi), 1e-12)
        with self.assertRaises(exceptions.DimensionError):
            sections.so_action_section(
                tensors.Rotation.identity(tensors.Metric.identity(2)), psi)

    def test_rotation_moves_polarized_states(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric)
        rotation = sampling.random_rotation(self.rng, metric)
        state = sections.polarized_basis(polarization, self.hbar)[1]
        moved = sections.so_action_section(rotation, state)
        self.assertTrue(sections.is_polarized(
            moved, polarization.transformed(rotation)))


if __name__ == '__main__':
    unittest.main()
