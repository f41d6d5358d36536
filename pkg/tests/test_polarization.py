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

"""Tests for :mod:`fermistar.polarization`."""

import unittest

import numpy as np
from scipy import linalg

from fermistar import exceptions
from fermistar import polarization as pol
from fermistar import sampling
from fermistar import tensors


def standard_polarization(m):
    metric = tensors.Metric.identity(m)
    return pol.from_complex_structure(pol.ComplexStructure.standard(metric))


class RandomTestCase(unittest.TestCase):

    def setUp(self):
        self.rng = sampling.stream(11, self.id())


class TestPolarization(RandomTestCase):

    def test_standard(self):
        polarization = standard_polarization(2)
        np.testing.assert_allclose(polarization.P,
                                   0.5 * np.array([[1, 1j], [-1j, 1]]))
        self.assertEqual(polarization.n, 1)
        np.testing.assert_allclose(
            np.dot(polarization.coframe, polarization.frame), np.eye(2),
            atol=1e-14)

    def test_kp_lambda(self):
        K, lam = pol.kp_lambda(standard_polarization(2))
        expected = np.array([[0, -1j], [1j, 0]])
        np.testing.assert_allclose(K.K, expected, atol=1e-14)
        np.testing.assert_allclose(lam, np.eye(2) + expected, atol=1e-14)

    def test_lambda_is_q_plus_k(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric,
                                                    in_j=False)
        K, lam = pol.kp_lambda(polarization)
        np.testing.assert_allclose(lam, K.lam(metric), atol=1e-10)

    def test_rejects(self):
        metric = tensors.Metric.identity(2)
        with self.assertRaises(exceptions.InvalidPolarization):
            pol.Polarization(np.eye(2), metric)
        with self.assertRaises(exceptions.InvalidPolarization):
            pol.Polarization(np.zeros((2, 2)), metric)
        with self.assertRaises(exceptions.DimensionError):
            pol.Polarization(np.eye(3), tensors.Metric.identity(3))
        with self.assertRaises(exceptions.DimensionError):
            pol.Polarization(np.eye(2), tensors.Metric.identity(4))

    def test_frames(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric,
                                                    in_j=False)
        rebuilt = pol.from_frames(polarization.image_frame,
                                  polarization.kernel_frame, metric)
        self.assertLess(rebuilt.distance(polarization), 1e-10)
        np.testing.assert_allclose(
            np.dot(polarization.P, polarization.image_frame),
            polarization.image_frame, atol=1e-10)
        np.testing.assert_allclose(
            np.dot(polarization.P, polarization.kernel_frame), 0,
            atol=1e-10)

    def test_adapted_metric_blocks(self):
        polarization = standard_polarization(4)
        q = polarization.q_adapted
        np.testing.assert_allclose(q[:2, :2], 0, atol=1e-14)
        np.testing.assert_allclose(q[2:, 2:], 0, atol=1e-14)

    def test_frames_must_be_transverse(self):
        image = 0.5 * np.array([[1], [-1j]])
        with self.assertRaises(exceptions.InvalidPolarization):
            pol.from_frames(image, image, tensors.Metric.identity(2))

    def test_complement_and_conjugate(self):
        polarization = standard_polarization(4)
        np.testing.assert_allclose(
            polarization.P + polarization.complement().P, np.eye(4))
        self.assertLess(polarization.conjugate().distance(
            polarization.complement()), 1e-14)

    def test_transformed(self):
        metric = tensors.Metric.identity(4)
        structure = pol.ComplexStructure.standard(metric)
        rotation = sampling.random_rotation(self.rng, metric)
        moved = pol.from_complex_structure(structure).transformed(rotation)
        expected = pol.from_complex_structure(
            structure.transformed(rotation))
        self.assertLess(moved.distance(expected), 1e-12)


class TestComplexStructures(RandomTestCase):

    def test_rejects(self):
        metric = tensors.Metric.identity(2)
        with self.assertRaises(exceptions.InvalidTensor) as context:
            pol.ComplexStructure(np.eye(2), metric)
        self.assertEqual(context.exception.reason, 'J^2 != -1')
        with self.assertRaises(exceptions.InvalidTensor) as context:
            pol.ComplexStructure([[0, 1], [-1, 0]], metric)
        self.assertEqual(context.exception.reason,
                         'not compatible with the orientation')
        with self.assertRaises(exceptions.InvalidTensor) as context:
            pol.ComplexStructure([[0, -2], [0.5, 0]], metric)
        self.assertEqual(context.exception.reason, 'J does not preserve q')

    def test_retraction(self):
        metric = sampling.random_metric(self.rng, 4)
        structure = sampling.random_complex_structure(self.rng, metric)
        polarization = pol.from_complex_structure(structure)
        self.assertTrue(pol.is_in_j(polarization))
        np.testing.assert_allclose(pol.retraction(polarization).J,
                                   structure.J, atol=1e-9)
        np.testing.assert_allclose(pol.retraction_prime(polarization).J,
                                   -structure.J, atol=1e-9)

    def test_outside_j(self):
        metric = tensors.Metric.identity(4)
        polarization = sampling.random_polarization(self.rng, metric,
                                                    in_j=False)
        self.assertFalse(pol.is_in_j(polarization))

    def test_transversal_pair(self):
        metric = sampling.random_metric(self.rng, 4)
        structure = sampling.random_complex_structure(self.rng, metric)
        self.assertTrue(pol.transversal(structure, structure))
        paired = pol.polarization_from_pair(structure, structure)
        self.assertLess(paired.distance(
            pol.from_complex_structure(structure)), 1e-10)

    def test_not_transversal(self):
        metric = tensors.Metric.identity(4)
        structure = pol.ComplexStructure.standard(metric)
        # -J has the orientation of J when n is even
        opposite = pol.ComplexStructure(-structure.J, metric)
        self.assertFalse(pol.transversal(structure, opposite))
        with self.assertRaises(exceptions.InvalidPolarization):
            pol.polarization_from_pair(structure, opposite)


class TestTangents(RandomTestCase):

    def test_dimension(self):
        for m in (2, 4, 6):
            n = m // 2
            metric = sampling.random_metric(self.rng, m)
            polarization = sampling.random_polarization(self.rng, metric,
                                                        in_j=False)
            basis = pol.tangent_space(polarization)
            self.assertEqual(len(basis), n * (n - 1))
            for delta in basis:
                pol.validate_tangent(polarization, delta)
            structure = sampling.random_complex_structure(self.rng, metric)
            self.assertEqual(len(pol.complex_structure_tangents(structure)),
                             n * (n - 1))

    def test_rejects_non_tangent(self):
        polarization = standard_polarization(4)
        with self.assertRaises(exceptions.TangentError) as context:
            pol.validate_tangent(polarization, np.eye(4))
        self.assertEqual(context.exception.constraint, 'P dP = dP (1-P)')

    def test_tangent_vector_blocks(self):
        polarization = standard_polarization(4)
        delta = pol.tangent_space(polarization)[0]
        tangent = pol.validate_tangent(polarization, delta)
        self.assertIsInstance(tangent.delta_k, tensors.Bivector)
        # only the image-image and kernel-kernel blocks survive
        blocks = tangent.contravariant
        np.testing.assert_allclose(blocks[:2, 2:], 0, atol=1e-10)
        np.testing.assert_allclose(blocks[2:, :2], 0, atol=1e-10)
        self.assertEqual(tangent.image_block.shape, (2, 2))
        self.assertEqual(tangent.kernel_block.shape, (2, 2))

    def test_conjugation_velocity_is_tangent(self):
        metric = sampling.random_metric(self.rng, 4)
        polarization = sampling.random_polarization(self.rng, metric)
        generator = sampling.random_generator(self.rng, metric)
        path = pol.ConjugationPath(polarization, None, generator)
        pol.validate_tangent(path.at(0.4), path.velocity(0.4), tol=1e-8)


class TestKahlerForm(RandomTestCase):

    def test_antisymmetric(self):
        structure = pol.ComplexStructure.standard(tensors.Metric.identity(4))
        first, second = pol.complex_structure_tangents(structure)
        forward = pol.kahler_form(structure, first, second)
        backward = pol.kahler_form(structure, second, first)
        self.assertGreater(abs(forward), 1e-8)
        self.assertAlmostEqual(forward, -backward)
        self.assertAlmostEqual(forward.imag, 0)

    @staticmethod
    def sphere_tangent(dz):
        """dJ at z = 0 of the chart z -> span(u1 - z* u2*, u2 + z* u1*).

        u1 = e1 - i e2 and u2 = e3 - i e4 span L_J of the standard J; z is
        the inhomogeneous coordinate of the sphere of complex structures.
        """
        u1 = np.array([1, -1j, 0, 0])
        u2 = np.array([0, 0, 1, -1j])
        frame = np.column_stack([u1, u2, u1.conj(), u2.conj()])
        dw = np.conj(dz)
        images = np.zeros((4, 4), dtype=complex)
        images[3, 0], images[2, 1] = -dw, dw
        images[1, 2], images[0, 3] = np.conj(dw), -np.conj(dw)
        dP = np.dot(frame, np.dot(images, linalg.inv(frame)))
        return (2j * dP).real

    def test_sphere_chart(self):
        # 2i dz ^ dz* / (1 + |z|^2)^2 at z = 0 on (d/dx, d/dy) is 4
        structure = pol.ComplexStructure.standard(tensors.Metric.identity(4))
        along_x, along_y = self.sphere_tangent(1.0), self.sphere_tangent(1j)
        self.assertAlmostEqual(pol.kahler_form(structure, along_x, along_y),
                               4.0)
        self.assertAlmostEqual(pol.kahler_form(structure, along_y, along_x),
                               -4.0)
        self.assertAlmostEqual(
            pol.kahler_form(structure, self.sphere_tangent(2.0),
                            self.sphere_tangent(0.5j)), 4.0)

    def test_rejects_non_tangent(self):
        structure = pol.ComplexStructure.standard(tensors.Metric.identity(4))
        with self.assertRaises(exceptions.TangentError):
            pol.kahler_form(structure, np.eye(4), np.eye(4))

    def test_curvature_is_proportional(self):
        metric = sampling.random_metric(self.rng, 6)
        structure = sampling.random_complex_structure(self.rng, metric)
        polarization = pol.from_complex_structure(structure)
        tangents = pol.complex_structure_tangents(structure)
        ratios = []
        for i, first in enumerate(tangents):
            for second in tangents[i + 1:]:
                omega = pol.kahler_form(structure, first, second)
                if abs(omega) < 1e-8:
                    continue
                curvature = pol.section_curvature(
                    polarization, -0.5j * first, -0.5j * second)
                ratios.append(curvature / omega)
        self.assertTrue(ratios)
        for ratio in ratios:
            self.assertAlmostEqual(ratio, ratios[0], places=6)
        self.assertAlmostEqual(ratios[0], 0.5j, places=6)

    def test_projective_form(self):
        polarization = standard_polarization(4)
        first, second = pol.tangent_space(polarization)[:2]
        value = pol.kahler_form_projective(polarization, first, second)
        self.assertAlmostEqual(
            value, -pol.kahler_form_projective(polarization, second, first))
        curvature = pol.frame_curvature(polarization, first, second)
        self.assertAlmostEqual(pol.section_curvature(polarization, first,
                                                     second),
                               -0.5 * np.trace(curvature))


class TestPaths(RandomTestCase):

    def setUp(self):
        super(TestPaths, self).setUp()
        self.metric = sampling.random_metric(self.rng, 4)
        self.base = sampling.random_polarization(self.rng, self.metric)
        self.start = sampling.random_generator(self.rng, self.metric, 0.3)
        self.end = sampling.random_generator(self.rng, self.metric, 0.3)

    def test_endpoints(self):
        path = pol.ConjugationPath(self.base, None, self.end)
        self.assertLess(path.at(0).distance(self.base), 1e-14)
        group = linalg.expm(self.end)
        np.testing.assert_allclose(
            path.projection(1.0),
            np.dot(group, np.dot(self.base.P, linalg.inv(group))),
            atol=1e-12)

    def test_velocity(self):
        path = pol.ConjugationPath(self.base, self.start, self.end)
        step = 1e-5
        finite = (path.projection(0.3 + step) -
                  path.projection(0.3 - step)) / (2 * step)
        np.testing.assert_allclose(path.velocity(0.3), finite, atol=1e-7)

    def test_reversed_and_sample(self):
        path = pol.ConjugationPath(self.base, self.start, self.end)
        samples = path.sample(4)
        self.assertEqual(len(samples), 5)
        self.assertLess(path.reversed().at(0).distance(samples[-1]), 1e-12)

    def test_rejects_generator(self):
        with self.assertRaises(exceptions.InvalidTensor):
            pol.ConjugationPath(self.base, None, np.eye(4))

    def test_geodesic_path(self):
        structure = sampling.random_complex_structure(self.rng, self.metric)
        samples = pol.geodesic_path(structure, self.end, 6)
        self.assertEqual(len(samples), 7)
        self.assertLess(samples[0].distance(
            pol.from_complex_structure(structure)), 1e-12)
        for sample in samples:
            self.assertTrue(pol.is_in_j(sample, 1e-9))

    def test_loop_segments(self):
        corners = [np.zeros((4, 4)), self.start, self.end]
        segments = pol.loop_segments(self.base, corners)
        self.assertEqual(len(segments), 3)
        np.testing.assert_array_equal(segments[-1].end, segments[0].start)
        np.testing.assert_array_equal(segments[0].end, segments[1].start)


if __name__ == '__main__':
    unittest.main()
