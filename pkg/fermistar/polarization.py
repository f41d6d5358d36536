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

"""Polarisations and compatible complex structures.

A polarisation is a complex projection P on V_C whose image L and kernel L'
are transverse complex Lagrangian subspaces. Adapted frames put the image
vectors first: ``frame = [E | E']`` and the adapted coordinates are the rows
of ``coframe = frame^{-1}`` (theta^j for j < n, theta^{j'} after).

Matrices act on vectors; P^T acts on covectors. Contravariant tensors
transform as A T A^T.
"""

import logging

import numpy as np
from scipy import linalg

from fermistar import exceptions
from fermistar import tensors

LOG = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10


def _residual(matrix):
    return float(np.max(np.abs(matrix))) if np.size(matrix) else 0.0


def _scale(*matrices):
    return max([1.0] + [_residual(matrix) for matrix in matrices])


class Polarization(object):

    """A projection P with im P and ker P transverse complex Lagrangians."""

    def __init__(self, P, metric, image_frame=None, kernel_frame=None,
                 tol=DEFAULT_TOLERANCE):
        """Validate P and compute adapted frames.

        :param image_frame: optional m x n matrix whose columns span im P
        :param kernel_frame: optional m x n matrix whose columns span ker P
        :raises InvalidPolarization: when a projection invariant fails
        """
        P = np.array(P, dtype=complex)
        m = metric.m
        if P.shape != (m, m):
            raise exceptions.DimensionError(
                "projection has shape %s, expected (%d, %d)"
                % (P.shape, m, m))
        if m % 2:
            raise exceptions.DimensionError(
                "polarisations need an even dimension, got %d" % m)
        self.metric = metric
        self.tol = tol
        self.P = P
        q = metric.q
        identity = np.eye(m)
        checks = (
            ('P^2 = P', np.dot(P, P) - P),
            ('im P isotropic', np.dot(P.T, np.dot(q, P))),
            ('ker P isotropic',
             np.dot((identity - P).T, np.dot(q, identity - P))),
        )
        scale = _scale(P) ** 2 * _scale(q)
        for name, matrix in checks:
            if _residual(matrix) > tol * scale:
                raise exceptions.InvalidPolarization(
                    "%s fails (residual %.3g)" % (name, _residual(matrix)))
        if abs(np.trace(P) - m // 2) > tol * scale * m:
            raise exceptions.InvalidPolarization(
                "rank of P is not m/2 (trace %s)" % np.trace(P))
        if image_frame is None:
            image_frame = linalg.orth(P)
        if kernel_frame is None:
            kernel_frame = linalg.orth(identity - P)
        image_frame = np.asarray(image_frame, dtype=complex)
        kernel_frame = np.asarray(kernel_frame, dtype=complex)
        if image_frame.shape != (m, m // 2) or \
                kernel_frame.shape != (m, m // 2):
            raise exceptions.InvalidPolarization(
                "adapted frames need m/2 columns each")
        self.frame = np.hstack([image_frame, kernel_frame])
        try:
            self.coframe = linalg.inv(self.frame)
        except linalg.LinAlgError:
            raise exceptions.InvalidPolarization("adapted frame is singular")
        self.P.setflags(write=False)

    @property
    def m(self):
        """Dimension of V."""
        return self.metric.m

    @property
    def n(self):
        """Half the dimension."""
        return self.metric.m // 2

    @property
    def image_frame(self):
        """Columns e_j spanning im P."""
        return self.frame[:, :self.n]

    @property
    def kernel_frame(self):
        """Columns e_{j'} spanning ker P."""
        return self.frame[:, self.n:]

    @property
    def image_coordinates(self):
        """Rows theta^j (covectors) of the image coordinates."""
        return self.coframe[:self.n]

    @property
    def kernel_coordinates(self):
        """Rows theta^{j'} of the kernel coordinates."""
        return self.coframe[self.n:]

    @property
    def q_adapted(self):
        """q_{ab} in the adapted frame (only q_{i'j} blocks are nonzero)."""
        return np.dot(self.frame.T, np.dot(self.metric.q, self.frame))

    @property
    def qsharp_adapted(self):
        """q^{ab} in the adapted coordinates."""
        return np.dot(self.coframe, np.dot(self.metric.qsharp,
                                           self.coframe.T))

    def complement(self):
        """1 - P (image and kernel exchanged)."""
        return Polarization(np.eye(self.m) - self.P, self.metric,
                            self.kernel_frame, self.image_frame, self.tol)

    def conjugate(self):
        """The complex conjugate projection."""
        return Polarization(np.conj(self.P), self.metric,
                            np.conj(self.image_frame),
                            np.conj(self.kernel_frame), self.tol)

    def transformed(self, rotation):
        """gamma P gamma^{-1} with frames gamma E."""
        gamma = rotation.matrix
        return Polarization(
            np.dot(gamma, np.dot(self.P, rotation.inverse_matrix)),
            self.metric, np.dot(gamma, self.image_frame),
            np.dot(gamma, self.kernel_frame), self.tol)

    def conjugated_by(self, group_element):
        """G P G^{-1} for a complex orthogonal G, frames G E."""
        inverse = linalg.inv(group_element)
        return Polarization(
            np.dot(group_element, np.dot(self.P, inverse)), self.metric,
            np.dot(group_element, self.image_frame),
            np.dot(group_element, self.kernel_frame), self.tol)

    def distance(self, other):
        """Largest entry of P - P'."""
        return _residual(self.P - other.P)

    def __repr__(self):
        return 'Polarization(m=%d)' % self.m


class ComplexStructure(object):

    """Orthogonal J with J^2 = -1, compatible with the orientation."""

    def __init__(self, J, metric, tol=DEFAULT_TOLERANCE):
        J = np.array(J, dtype=complex)
        m = metric.m
        if J.shape != (m, m):
            raise exceptions.DimensionError(
                "complex structure has shape %s, expected (%d, %d)"
                % (J.shape, m, m))
        if _residual(J.imag) > tol * _scale(J.real):
            raise exceptions.InvalidTensor('complex structure', 'not real',
                                           _residual(J.imag))
        J = J.real
        square = np.dot(J, J) + np.eye(m)
        if _residual(square) > tol * _scale(J) ** 2:
            raise exceptions.InvalidTensor('complex structure',
                                           'J^2 != -1', _residual(square))
        orthogonal = np.dot(J.T, np.dot(metric.q, J)) - metric.q
        if _residual(orthogonal) > tol * _scale(J) ** 2 * _scale(metric.q):
            raise exceptions.InvalidTensor('complex structure',
                                           'J does not preserve q',
                                           _residual(orthogonal))
        self.J = J
        self.metric = metric
        if orientation_sign(J, metric) < 0:
            raise exceptions.InvalidTensor(
                'complex structure', 'not compatible with the orientation')
        self.J.setflags(write=False)

    @classmethod
    def standard(cls, metric):
        """The block-diagonal J with blocks [[0, -1], [1, 0]] (q = 1)."""
        m = metric.m
        J = np.zeros((m, m))
        for k in range(0, m, 2):
            J[k, k + 1] = -1.0
            J[k + 1, k] = 1.0
        return cls(J, metric)

    @property
    def m(self):
        """Dimension of V."""
        return self.metric.m

    def transformed(self, rotation):
        """gamma J gamma^{-1}."""
        return ComplexStructure(
            np.dot(rotation.matrix, np.dot(self.J, rotation.inverse_matrix)),
            self.metric)

    def __repr__(self):
        return 'ComplexStructure(m=%d)' % self.m


def orientation_sign(J, metric):
    """Sign of det(x_1, J x_1, ..., x_n, J x_n) for a q-adapted real frame."""
    m = metric.m
    vectors = []
    for candidate in np.eye(m):
        vector = candidate.copy()
        for other in vectors:
            vector = vector - other * np.dot(other, np.dot(metric.q, vector))
        norm = np.sqrt(abs(np.dot(vector, np.dot(metric.q, vector))))
        if norm < 1e-8:
            continue
        vector = vector / norm
        image = np.dot(J, vector)
        for other in vectors:
            image = image - other * np.dot(other, np.dot(metric.q, image))
        vectors.extend([vector, image / np.sqrt(
            abs(np.dot(image, np.dot(metric.q, image))))])
        if len(vectors) == m:
            break
    frame = []
    for k in range(0, m, 2):
        frame.extend([vectors[k], np.dot(J, vectors[k])])
    return np.sign(linalg.det(np.array(frame).T))


def from_complex_structure(structure):
    """P_J = 1/2 (1 - iJ)."""
    m = structure.m
    return Polarization(0.5 * (np.eye(m) - 1j * structure.J),
                        structure.metric)


def from_frames(image_frame, kernel_frame, metric, tol=DEFAULT_TOLERANCE):
    """The projection with the given image and kernel frames."""
    image_frame = np.asarray(image_frame, dtype=complex)
    kernel_frame = np.asarray(kernel_frame, dtype=complex)
    frame = np.hstack([image_frame, kernel_frame])
    try:
        coframe = linalg.inv(frame)
    except linalg.LinAlgError:
        raise exceptions.InvalidPolarization(
            "image and kernel are not transverse")
    n = image_frame.shape[1]
    P = np.dot(image_frame, coframe[:n])
    return Polarization(P, metric, image_frame, kernel_frame, tol)


def kp_lambda(polarization):
    """(K_P, Lambda_P) with K_P = (1-P) q# P^T - P q# (1-P)^T."""
    P = polarization.P
    qsharp = polarization.metric.qsharp
    complement = np.eye(polarization.m) - P
    lower = np.dot(complement, np.dot(qsharp, P.T))
    upper = np.dot(P, np.dot(qsharp, complement.T))
    return tensors.Bivector(lower - upper), 2.0 * lower


def retraction(polarization):
    """J = i (P (P - Pbar)^{-1} (1 - Pbar) + Pbar (P - Pbar)^{-1} (1 - P))."""
    P = polarization.P
    Pbar = np.conj(P)
    identity = np.eye(polarization.m)
    try:
        inverse = linalg.inv(P - Pbar)
    except linalg.LinAlgError:
        raise exceptions.InvalidPolarization("P - conj(P) is singular")
    J = 1j * (np.dot(P, np.dot(inverse, identity - Pbar)) +
              np.dot(Pbar, np.dot(inverse, identity - P)))
    return ComplexStructure(J, polarization.metric, polarization.tol)


def retraction_prime(polarization):
    """r'(P) = r(1 - P): the complex structure of the kernel."""
    return retraction(polarization.complement())


def transversal(structure, other, tol=DEFAULT_TOLERANCE):
    """Whether conj(L_J) and L_J' are transverse: det(J + J') != 0."""
    return bool(abs(linalg.det(structure.J + other.J)) > tol)


def polarization_from_pair(structure, other):
    """The polarisation with image L_J' and kernel conj(L_J)."""
    if not transversal(structure, other):
        raise exceptions.InvalidPolarization(
            "complex structures are not transversal")
    image = linalg.orth(from_complex_structure(other).P)
    kernel = linalg.orth(np.conj(from_complex_structure(structure).P))
    return from_frames(image, kernel, structure.metric)


def is_in_j(polarization, tol=DEFAULT_TOLERANCE):
    """Whether conj(P) = 1 - P, i.e. P = P_J for J = r(P)."""
    return _residual(np.conj(polarization.P) + polarization.P -
                     np.eye(polarization.m)) <= tol


class TangentVector(object):

    """A validated tangent vector delta P at a polarisation."""

    def __init__(self, polarization, delta):
        self.polarization = polarization
        self.delta = np.array(delta, dtype=complex)
        self.delta.setflags(write=False)

    @property
    def delta_k(self):
        """delta K_P = -2 delta P q#."""
        return tensors.Bivector(-2.0 * np.dot(
            self.delta, self.polarization.metric.qsharp))

    @property
    def contravariant(self):
        """(delta P (x) 1) q# in adapted coordinates."""
        coframe = self.polarization.coframe
        tensor = np.dot(self.delta, self.polarization.metric.qsharp)
        return np.dot(coframe, np.dot(tensor, coframe.T))

    @property
    def image_block(self):
        """(delta P)^{ij}."""
        n = self.polarization.n
        return self.contravariant[:n, :n]

    @property
    def kernel_block(self):
        """(delta P)^{i'j'}."""
        n = self.polarization.n
        return self.contravariant[n:, n:]


def tangent_residuals(polarization, delta):
    """Residuals of the four tangent constraints, by name."""
    P = polarization.P
    qsharp = polarization.metric.qsharp
    complement = np.eye(polarization.m) - P
    delta = np.asarray(delta, dtype=complex)
    return (
        ('P dP = dP (1-P)', np.dot(P, delta) - np.dot(delta, complement)),
        ('(1-P) dP = dP P', np.dot(complement, delta) - np.dot(delta, P)),
        ('(dP (x) P + P (x) dP) q# = 0',
         np.dot(delta, np.dot(qsharp, P.T)) +
         np.dot(P, np.dot(qsharp, delta.T))),
        ('(dP (x) (1-P) + (1-P) (x) dP) q# = 0',
         np.dot(delta, np.dot(qsharp, complement.T)) +
         np.dot(complement, np.dot(qsharp, delta.T))),
    )


def validate_tangent(polarization, delta, tol=DEFAULT_TOLERANCE):
    """Return a TangentVector or raise TangentError."""
    scale = _scale(delta) * _scale(polarization.P) * \
        _scale(polarization.metric.qsharp)
    for name, matrix in tangent_residuals(polarization, delta):
        if _residual(matrix) > tol * scale:
            raise exceptions.TangentError(name, _residual(matrix))
    return TangentVector(polarization, delta)


def _null_space(blocks, real=False):
    system = np.vstack(blocks)
    if real:
        system = np.vstack([system.real, system.imag])
    return linalg.null_space(system, rcond=1e-10)


def _vec_operator(left, right):
    """Matrix of X -> left X right acting on row-major vec(X)."""
    return np.kron(left, right.T)


def _transpose_operator(m):
    operator = np.zeros((m * m, m * m))
    for i in range(m):
        for j in range(m):
            operator[i * m + j, j * m + i] = 1.0
    return operator


def tangent_space(polarization):
    """A basis of the tangent space of the polarisations at P.

    The complex dimension is n(n - 1).
    """
    m = polarization.m
    P = polarization.P
    qsharp = polarization.metric.qsharp
    identity = np.eye(m)
    complement = identity - P
    flip = _transpose_operator(m)
    blocks = [
        _vec_operator(P, identity) - _vec_operator(identity, complement),
        _vec_operator(complement, identity) - _vec_operator(identity, P),
        _vec_operator(identity, np.dot(qsharp, P.T)) +
        np.dot(_vec_operator(np.dot(P, qsharp), identity), flip),
        _vec_operator(identity, np.dot(qsharp, complement.T)) +
        np.dot(_vec_operator(np.dot(complement, qsharp), identity), flip),
    ]
    basis = _null_space(blocks)
    return [column.reshape(m, m) for column in basis.T]


def complex_structure_tangents(structure):
    """A real basis of the tangent space of the complex structures at J.

    Tangent vectors satisfy J dJ + dJ J = 0 and dJ^T q J + J^T q dJ = 0;
    the real dimension is n(n - 1).
    """
    m = structure.m
    J = structure.J
    q = structure.metric.q
    identity = np.eye(m)
    flip = _transpose_operator(m)
    blocks = [
        _vec_operator(J, identity) + _vec_operator(identity, J),
        np.dot(_vec_operator(identity, np.dot(q, J)), flip) +
        _vec_operator(np.dot(J.T, q), identity),
    ]
    basis = _null_space(blocks, real=True)
    return [column.reshape(m, m) for column in basis.T]


def _check_structure_tangent(structure, delta, tol):
    J = structure.J
    q = structure.metric.q
    scale = _scale(delta)
    anticommutes = np.dot(J, delta) + np.dot(delta, J)
    if _residual(anticommutes) > tol * scale:
        raise exceptions.TangentError('J dJ + dJ J = 0',
                                      _residual(anticommutes))
    preserves = np.dot(delta.T, np.dot(q, J)) + np.dot(J.T, np.dot(q, delta))
    if _residual(preserves) > tol * scale * _scale(q):
        raise exceptions.TangentError('dJ^T q J + J^T q dJ = 0',
                                      _residual(preserves))


def kahler_form(structure, first, second, tol=DEFAULT_TOLERANCE):
    """omega_q(dJ_1, dJ_2) = -(i/4)[tr(P dJ1 dJ2 P) - tr(P dJ2 dJ1 P)]."""
    first = np.asarray(first, dtype=complex)
    second = np.asarray(second, dtype=complex)
    _check_structure_tangent(structure, first, tol)
    _check_structure_tangent(structure, second, tol)
    P = from_complex_structure(structure).P
    value = -0.25j * (np.trace(np.dot(P, np.dot(first, np.dot(second, P)))) -
                      np.trace(np.dot(P, np.dot(second, np.dot(first, P)))))
    return complex(value)


def kahler_form_projective(polarization, first, second):
    """i [tr(P dP1 dP2 P) - tr(P dP2 dP1 P)] on projection tangents."""
    P = polarization.P
    value = 1j * (np.trace(np.dot(P, np.dot(first, np.dot(second, P)))) -
                  np.trace(np.dot(P, np.dot(second, np.dot(first, P)))))
    return complex(value)


def frame_curvature(polarization, first, second):
    """F^V(d1, d2) = P (d1 d2 - d2 d1) P on the tautological bundle."""
    P = polarization.P
    return np.dot(P, np.dot(np.dot(first, second) - np.dot(second, first),
                            P))


def section_curvature(polarization, first, second):
    """F^H(d1, d2) = -1/2 tr(P (d1 d2 - d2 d1) P)."""
    return complex(-0.5 * np.trace(frame_curvature(polarization, first,
                                                   second)))


class ConjugationPath(object):

    """P(t) = exp(Y(t)) P_0 exp(-Y(t)) with Y affine in t on [0, 1].

    Y(t) = (1 - t) Y_start + t Y_end, each Y in so(V_C, q).
    """

    def __init__(self, base, start=None, end=None):
        m = base.m
        self.base = base
        self.start = np.zeros((m, m), complex) if start is None else \
            np.asarray(start, dtype=complex)
        self.end = np.zeros((m, m), complex) if end is None else \
            np.asarray(end, dtype=complex)
        q = base.metric.q
        for generator in (self.start, self.end):
            residual = _residual(np.dot(generator.T, q) + np.dot(q, generator))
            if residual > DEFAULT_TOLERANCE * _scale(generator) * _scale(q):
                raise exceptions.InvalidTensor('generator',
                                               'not in so(V, q)', residual)

    @property
    def rate(self):
        """dY/dt."""
        return self.end - self.start

    def generator(self, t):
        """Y(t)."""
        return (1.0 - t) * self.start + t * self.end

    def group_element(self, t):
        """exp(Y(t))."""
        return linalg.expm(self.generator(t))

    def at(self, t):
        """The polarisation P(t) with conjugated frames."""
        return self.base.conjugated_by(self.group_element(t))

    def projection(self, t):
        """The matrix P(t) without validation."""
        group = self.group_element(t)
        return np.dot(group, np.dot(self.base.P, linalg.inv(group)))

    def velocity(self, t):
        """dP/dt = [G' G^{-1}, P(t)] with G' from the Frechet derivative."""
        group, derivative = linalg.expm_frechet(self.generator(t), self.rate)
        flow = np.dot(derivative, linalg.inv(group))
        P = np.dot(group, np.dot(self.base.P, linalg.inv(group)))
        return np.dot(flow, P) - np.dot(P, flow)

    def sample(self, steps):
        """Polarisations at t = k/steps, k = 0..steps."""
        return [self.at(float(k) / steps) for k in range(steps + 1)]

    def reversed(self):
        """The same path run backwards."""
        return ConjugationPath(self.base, self.end, self.start)


def geodesic_path(structure, generator, steps):
    """Samples of P_{J_t} with J_t = exp(tX) J exp(-tX), t in [0, 1]."""
    generator = np.asarray(generator, dtype=float)
    tensors.check_so_generator(generator, structure.metric)
    path = ConjugationPath(from_complex_structure(structure), None, generator)
    return path.sample(steps)


def loop_segments(base, corners):
    """Closed path through generator corners Y_0, Y_1, ..., Y_0."""
    corners = list(corners)
    return [ConjugationPath(base, left, right)
            for left, right in zip(corners, corners[1:] + corners[:1])]
