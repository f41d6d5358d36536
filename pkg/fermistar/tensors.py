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

"""Metric, bivector and rotation tensors on the phase space V.

Index conventions: generators theta^mu are coordinate functions (covectors),
so the metric q_{mu nu} lowers and q^{mu nu} (``qsharp``) raises. Bivectors
K^{mu nu} are contravariant and transform as gamma K gamma^T.
"""

import logging

import numpy as np
from scipy import linalg

from fermistar import exceptions
from fermistar import multivector

LOG = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-12


def _scaled(tol, matrix):
    return tol * max(1.0, float(np.max(np.abs(matrix))) if matrix.size
                     else 1.0)


class Metric(object):

    """Real symmetric positive-definite form q with its inverse."""

    def __init__(self, q, tol=DEFAULT_TOLERANCE):
        """Validate and store q.

        :raises InvalidTensor: if q is not real, symmetric and positive
            definite
        """
        q = np.array(q, dtype=complex)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise exceptions.InvalidTensor('metric', 'not a square matrix')
        multivector.check_generator_count(q.shape[0])
        imag = float(np.max(np.abs(q.imag)))
        if imag > 0:
            raise exceptions.InvalidTensor('metric', 'not real', imag)
        q = q.real
        asym = float(np.max(np.abs(q - q.T)))
        if asym > 0:
            raise exceptions.InvalidTensor('metric', 'not symmetric', asym)
        try:
            self._cholesky = linalg.cholesky(q, lower=True)
        except linalg.LinAlgError:
            raise exceptions.InvalidTensor('metric', 'not positive definite')
        self.q = q
        # exact for diagonal dyadic q
        self.qsharp = linalg.inv(q)
        self.qsharp = 0.5 * (self.qsharp + self.qsharp.T)
        residual = float(np.max(np.abs(np.dot(q, self.qsharp) -
                                       np.eye(len(q)))))
        if residual > _scaled(tol, q) * len(q):
            raise exceptions.InvalidTensor(
                'metric', 'inverse is inaccurate', residual)
        self.q.setflags(write=False)
        self.qsharp.setflags(write=False)

    @classmethod
    def identity(cls, m):
        """The orthonormal metric delta_{mu nu}."""
        return cls(np.eye(m))

    @property
    def m(self):
        """Dimension of V."""
        return len(self.q)

    def is_orthonormal(self, tol=DEFAULT_TOLERANCE):
        """Whether q is the identity to tolerance."""
        return float(np.max(np.abs(self.q - np.eye(self.m)))) <= tol

    def lower(self, vector):
        """Covector components (q v)_nu of a vector v."""
        return np.dot(self.q, vector)

    def raise_(self, covector):
        """Vector components q^{mu nu} a_nu of a covector a."""
        return np.dot(self.qsharp, covector)

    def pairing(self, left, right):
        """q^sharp(a, b) for covectors a, b (complex bilinear)."""
        return complex(np.dot(left, np.dot(self.qsharp, right)))

    def orthonormal_frame(self):
        """Matrix T with q = T^T T; new coordinates are y = T x."""
        return self._cholesky.T

    def to_orthonormal(self, f):
        """Rewrite f in the orthonormal coordinates of orthonormal_frame."""
        return multivector.linear_substitution(
            f, linalg.inv(self.orthonormal_frame()))

    def from_orthonormal(self, f):
        """Inverse of to_orthonormal."""
        return multivector.linear_substitution(f, self.orthonormal_frame())

    def bivector_to_orthonormal(self, bivector):
        """Components of K in the orthonormal coordinates."""
        frame = self.orthonormal_frame()
        return Bivector(np.dot(frame, np.dot(bivector.K, frame.T)))

    def __eq__(self, other):
        return isinstance(other, Metric) and other.m == self.m and \
            np.array_equal(other.q, self.q)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return 'Metric(m=%d)' % self.m


class Bivector(object):

    """Complex antisymmetric contravariant 2-tensor K^{mu nu}."""

    def __init__(self, K, tol=DEFAULT_TOLERANCE):
        K = np.array(K, dtype=complex)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise exceptions.InvalidTensor('bivector', 'not a square matrix')
        asym = float(np.max(np.abs(K + K.T)))
        if asym > _scaled(tol, K):
            raise exceptions.InvalidTensor('bivector', 'not antisymmetric',
                                           asym)
        # exact antisymmetry after validation
        K = 0.5 * (K - K.T)
        K.setflags(write=False)
        self.K = K

    @classmethod
    def zero(cls, m):
        """The bivector K = 0 (the Moyal product)."""
        return cls(np.zeros((m, m)))

    @property
    def m(self):
        """Dimension of V."""
        return len(self.K)

    def lam(self, metric):
        """Lambda = q^sharp + K."""
        self.check_metric(metric)
        return metric.qsharp + self.K

    def lowered(self, metric):
        """K^flat_{mu nu} = q_{mu a} K^{ab} q_{b nu}."""
        self.check_metric(metric)
        return np.dot(metric.q, np.dot(self.K, metric.q))

    def transformed(self, rotation):
        """(gamma (x) gamma) K = gamma K gamma^T."""
        gamma = rotation.matrix
        return Bivector(np.dot(gamma, np.dot(self.K, gamma.T)))

    def check_metric(self, metric):
        """Raise DimensionError unless the metric has matching dimension."""
        if metric.m != self.m:
            raise exceptions.DimensionError(
                "bivector on %d generators, metric on %d" % (self.m,
                                                             metric.m))

    def __add__(self, other):
        return Bivector(self.K + other.K)

    def __sub__(self, other):
        return Bivector(self.K - other.K)

    def __neg__(self):
        return Bivector(-self.K)

    def __mul__(self, value):
        return Bivector(self.K * value)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Bivector) and \
            np.array_equal(other.K, self.K)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return 'Bivector(m=%d)' % self.m


class Rotation(object):

    """An element gamma of SO(V, q).

    A rotation built from a generator (gamma = exp(Y)) remembers Y; the
    generator fixes the spin lift used by the metaplectic representation.
    """

    def __init__(self, gamma, metric, generator=None,
                 tol=DEFAULT_TOLERANCE):
        gamma = np.array(gamma, dtype=complex)
        if gamma.shape != (metric.m, metric.m):
            raise exceptions.DimensionError(
                "rotation has shape %s, expected (%d, %d)"
                % (gamma.shape, metric.m, metric.m))
        imag = float(np.max(np.abs(gamma.imag)))
        if imag > _scaled(tol, gamma.real):
            raise exceptions.InvalidTensor('rotation', 'not real', imag)
        gamma = gamma.real
        residual = float(np.max(np.abs(
            np.dot(gamma.T, np.dot(metric.q, gamma)) - metric.q)))
        if residual > _scaled(tol, metric.q) * metric.m:
            raise exceptions.InvalidTensor('rotation', 'does not preserve q',
                                           residual)
        det = float(linalg.det(gamma))
        if abs(det - 1.0) > tol * metric.m * 10:
            raise exceptions.InvalidTensor('rotation', 'determinant is not 1',
                                           abs(det - 1.0))
        gamma.setflags(write=False)
        self.matrix = gamma
        self.metric = metric
        self.generator = generator

    @classmethod
    def identity(cls, metric):
        """The identity rotation."""
        return cls(np.eye(metric.m), metric,
                   generator=np.zeros((metric.m, metric.m)))

    @classmethod
    def from_generator(cls, generator, metric, tol=DEFAULT_TOLERANCE):
        """gamma = exp(Y) for Y in so(V, q), i.e. Y^T q + q Y = 0."""
        generator = np.array(generator, dtype=float)
        check_so_generator(generator, metric, tol)
        return cls(linalg.expm(generator), metric, generator=generator)

    @property
    def m(self):
        """Dimension of V."""
        return self.metric.m

    @property
    def inverse_matrix(self):
        """gamma^{-1} = q^sharp gamma^T q."""
        return np.dot(self.metric.qsharp, np.dot(self.matrix.T,
                                                 self.metric.q))

    def inverse(self):
        """The inverse rotation."""
        generator = None if self.generator is None else -self.generator
        return Rotation(self.inverse_matrix, self.metric,
                        generator=generator)

    def compose(self, other):
        """gamma gamma' (no recorded generator unless one is trivial)."""
        generator = None
        if self.generator is not None and other.generator is not None:
            if not np.any(self.generator):
                generator = other.generator
            elif not np.any(other.generator):
                generator = self.generator
        return Rotation(np.dot(self.matrix, other.matrix), self.metric,
                        generator=generator)

    def log(self):
        """A generator Y with exp(Y) = gamma (recorded one if present)."""
        if self.generator is not None:
            return self.generator
        return np.real(linalg.logm(self.matrix))

    def __repr__(self):
        return 'Rotation(m=%d)' % self.m


def check_so_generator(generator, metric, tol=DEFAULT_TOLERANCE):
    """Raise InvalidTensor unless Y^T q + q Y = 0."""
    generator = np.asarray(generator)
    if generator.shape != (metric.m, metric.m):
        raise exceptions.DimensionError(
            "generator has shape %s, expected (%d, %d)"
            % (generator.shape, metric.m, metric.m))
    residual = float(np.max(np.abs(np.dot(generator.T, metric.q) +
                                   np.dot(metric.q, generator))))
    if residual > _scaled(tol, generator):
        raise exceptions.InvalidTensor('generator', 'not in so(V, q)',
                                       residual)
