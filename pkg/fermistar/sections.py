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

"""Sections of the prequantum line bundle and polarised states.

Sections are written in the global trivialisation where

    nabla_mu = d_mu - hbar^{-1} q_{mu nu} theta^nu ^

so the connection has curvature {nabla_mu, nabla_nu} = -2 hbar^{-1} q_{mu nu}.
The hbar^{-1} makes every section computation numeric.
"""

import logging
import numbers

import numpy as np
from scipy import linalg

from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import tensors

LOG = logging.getLogger(__name__)

POLARIZATION_TOLERANCE = 1e-9


class Section(mv.Multivector):

    """A section psi of the prequantum line bundle at a numeric hbar."""

    def __init__(self, m, coeffs, hbar=None, low=0, metric=None):
        if hbar is None:
            raise exceptions.FormalModeError(
                "sections carry hbar^-1 and need a numeric hbar")
        metric = metric or tensors.Metric.identity(m)
        if metric.m != m:
            raise exceptions.DimensionError(
                "metric on %d generators, section on %d" % (metric.m, m))
        self.metric = metric
        super(Section, self).__init__(m, coeffs, hbar=hbar, low=low)

    @classmethod
    def from_multivector(cls, f, metric=None):
        """Wrap a numeric Multivector."""
        if f.is_formal:
            raise exceptions.FormalModeError(
                "sections carry hbar^-1 and need a numeric hbar")
        return cls(f.m, f.coeffs, hbar=f.hbar, metric=metric)


def as_section(psi, metric=None):
    """Return psi as a Section (keeping its metric when it has one)."""
    if isinstance(psi, PolarizedState):
        psi = psi.section
    if isinstance(psi, Section) and metric is None:
        return psi
    metric = metric or getattr(psi, 'metric', None)
    return Section.from_multivector(psi, metric)


def _direction(mu, m):
    if isinstance(mu, numbers.Integral):
        if not 1 <= mu <= m:
            raise exceptions.DimensionError(
                "direction index %d out of range 1..%d" % (mu, m))
        vector = np.zeros(m, complex)
        vector[mu - 1] = 1.0
        return vector
    vector = np.asarray(mu, dtype=complex)
    if vector.shape != (m,):
        raise exceptions.DimensionError(
            "direction has %d components, expected %d" % (len(vector), m))
    return vector


def covariant_derivative(mu, psi):
    """nabla_mu psi for a 1-based index or a complex frame vector."""
    psi = as_section(psi)
    vector = _direction(mu, psi.m)
    return (psi.derivative_along(vector) -
            psi.left_multiply_linear(psi.metric.lower(vector)) / psi.hbar)


def connection_matrices(metric, hbar):
    """Array (m, 2^m, 2^m) of the matrices of nabla_mu on coefficients."""
    m = metric.m
    identity = np.eye(1 << m, dtype=complex)
    derivatives = np.array([mv.derivative_kernel(identity, m, k).T
                            for k in range(m)])
    products = np.array([mv.left_generator_kernel(identity, m, k).T
                         for k in range(m)])
    return derivatives - np.einsum('mn,nij->mij', metric.q, products) / hbar


def _slot_covariant(F, vector, metric, hbar):
    """nabla' along a vector on the second slot of a doubled element."""
    return (F.slot_derivative(1, vector) -
            F.slot_left_multiply(1, metric.lower(vector)) / hbar)


def gaussian(polarization, hbar):
    """exp(hbar^{-1} q_{i'j} theta^{i'} theta^j) = exp(hbar^{-1} M theta theta).

    M = (1-P)^T q P, independent of the adapted frame.
    """
    P = polarization.P
    metric = polarization.metric
    m = metric.m
    M = np.dot((np.eye(m) - P).T, np.dot(metric.q, P))
    exponent = mv.Multivector.zero(m, hbar=hbar)
    for mu in range(m):
        for nu in range(mu + 1, m):
            value = (M[mu, nu] - M[nu, mu]) / hbar
            if value != 0:
                exponent = exponent + mv.Multivector.monomial(
                    m, [mu + 1, nu + 1], coeff=value, hbar=hbar)
    return Section.from_multivector(mv.exp_even(exponent), metric)


def polarization_residual(psi, polarization):
    """max_k |nabla_{e_k'} psi| over kernel directions, relative to |psi|."""
    psi = as_section(psi, polarization.metric)
    worst = 0.0
    for vector in polarization.kernel_frame.T:
        worst = max(worst, covariant_derivative(vector, psi).norm())
    return worst / max(1.0, psi.norm())


def is_polarized(psi, polarization, tol=POLARIZATION_TOLERANCE):
    """Whether nabla_{i'} psi = 0 for every kernel direction."""
    return polarization_residual(psi, polarization) <= tol


class PolarizedState(object):

    """A section in H_P together with its polarisation."""

    def __init__(self, section, polarization, tol=POLARIZATION_TOLERANCE):
        section = as_section(section, polarization.metric)
        residual = polarization_residual(section, polarization)
        if residual > tol:
            raise exceptions.NotPolarized(
                "section is not covariantly constant along ker P "
                "(residual %.3g)" % residual)
        self.section = section
        self.polarization = polarization

    @property
    def hbar(self):
        """The value of hbar."""
        return self.section.hbar

    @property
    def phi(self):
        """Coefficients of the holomorphic factor on polarized_basis."""
        basis = polarized_basis(self.polarization, self.hbar)
        matrix = np.array([state.section.coeffs for state in basis]).T
        solution = linalg.lstsq(matrix, self.section.coeffs)[0]
        return solution

    def __repr__(self):
        return 'PolarizedState(%r)' % self.section


def image_linear_forms(polarization, hbar):
    """The adapted image coordinates theta^j as Multivectors."""
    return [mv.Multivector.linear(row, hbar=hbar)
            for row in polarization.image_coordinates]


def kernel_linear_forms(polarization, hbar):
    """The adapted kernel coordinates theta^{j'} as Multivectors."""
    return [mv.Multivector.linear(row, hbar=hbar)
            for row in polarization.kernel_coordinates]


def polarized_basis(polarization, hbar):
    """The 2^n states theta^S ^ Gaussian, S ordered by bitmask."""
    n = polarization.n
    forms = image_linear_forms(polarization, hbar)
    ground = gaussian(polarization, hbar)
    basis = []
    for mask in range(1 << n):
        factor = mv.Multivector.one(polarization.m, hbar=hbar)
        for index in mv.indices_of(mask):
            factor = mv.wedge(factor, forms[index - 1])
        section = Section.from_multivector(mv.wedge(factor, ground),
                                           polarization.metric)
        basis.append(PolarizedState(section, polarization))
    return basis


def _check_function(f, psi):
    if f.is_formal:
        raise exceptions.FormalModeError(
            "functions acting on sections need a numeric hbar")
    if f.m != psi.m:
        raise exceptions.DimensionError(
            "function on %d generators, section on %d" % (f.m, psi.m))


def prequantum_op(f, psi):
    """f^ psi = Delta^*(F - (hbar/2) q^{mu nu} d_mu (x) nabla_nu F), F = f (x) psi.

    This is f ^ psi + (hbar/2) nabla_{H_f} psi with the Koszul signs of the
    doubled algebra.
    """
    psi = as_section(psi)
    _check_function(f, psi)
    metric = psi.metric
    F = mv.tensor_embed(f, psi)
    total = F
    for nu in range(f.m):
        column = metric.qsharp[:, nu]
        step = _slot_covariant(F, np.eye(f.m)[nu], metric, psi.hbar)
        total = total + step.slot_derivative(0, column) * (-0.5 * psi.hbar)
    return Section.from_multivector(mv.diagonal_pullback(total), metric)


def star_on_state(f, psi, polarization):
    """f *_P psi = Delta^*(exp(-(hbar/2) q^{i'j} d_{i'} (x) nabla_j) f (x) psi).

    With u = 2 (1-P) q# C^T (C the image coordinates) the exponential is
    prod_j (1 - (hbar/4) D_{u_j} (x) nabla_{e_j}).
    """
    psi = as_section(psi, polarization.metric)
    _check_function(f, psi)
    metric = polarization.metric
    complement = np.eye(metric.m) - polarization.P
    columns = 2.0 * np.dot(complement, np.dot(
        metric.qsharp, polarization.image_coordinates.T))
    F = mv.tensor_embed(f, psi)
    for k, vector in enumerate(polarization.image_frame.T):
        step = _slot_covariant(F, vector, metric, psi.hbar)
        F = F + step.slot_derivative(0, columns[:, k]) * (-0.25 * psi.hbar)
    return Section.from_multivector(mv.diagonal_pullback(F), metric)


def hermitian_pairing(left, right):
    """sum_A hbar^{|A|} conj(a_A) b_A in q-orthonormal coordinates."""
    left = as_section(left)
    right = as_section(right)
    left._check_compatible(right)
    metric = left.metric
    a = metric.to_orthonormal(left).coeffs
    b = metric.to_orthonormal(right).coeffs
    weights = float(left.hbar) ** mv.tables(left.m).popcount
    return complex(np.sum(np.conj(a) * b * weights))


def complement_span(polarization, hbar):
    """Orthonormal columns spanning H'_P = span{nabla_{e_i} chi}."""
    matrices = connection_matrices(polarization.metric, hbar)
    blocks = [np.einsum('m,mij->ij', vector, matrices)
              for vector in polarization.image_frame.T]
    return linalg.orth(np.hstack(blocks))


def decompose(psi, polarization):
    """Split psi = h + h' with h in H_P and h' in H'_P.

    :raises InvalidPolarization: when the splitting system is singular
    """
    psi = as_section(psi, polarization.metric)
    basis = polarized_basis(polarization, psi.hbar)
    holomorphic = np.array([state.section.coeffs for state in basis]).T
    complement = complement_span(polarization, psi.hbar)
    system = np.hstack([holomorphic, complement])
    if system.shape[1] != system.shape[0]:
        raise exceptions.InvalidPolarization(
            "H_P and H'_P do not span the sections (%d of %d)"
            % (system.shape[1], system.shape[0]))
    singular = linalg.svdvals(system)
    if singular[-1] <= 1e-10 * singular[0]:
        raise exceptions.InvalidPolarization(
            "H_P and H'_P are not transverse")
    solution = linalg.solve(system, psi.coeffs)
    size = holomorphic.shape[1]
    part = np.dot(holomorphic, solution[:size])
    rest = psi.coeffs - part
    h = Section(psi.m, part, hbar=psi.hbar, metric=psi.metric)
    h_prime = Section(psi.m, rest, hbar=psi.hbar, metric=psi.metric)
    return PolarizedState(h, polarization), h_prime


def so_action_section(rotation, psi):
    """gamma^H psi = psi o gamma^{-1} in the fixed gauge."""
    psi = as_section(psi)
    if rotation.m != psi.m:
        raise exceptions.DimensionError(
            "rotation on %d generators, section on %d" % (rotation.m, psi.m))
    image = mv.linear_substitution(psi, rotation.inverse_matrix)
    return Section.from_multivector(image, psi.metric)


def basis_coordinates(section, basis):
    """Least-squares coordinates of a section on a list of states."""
    matrix = np.array([state.section.coeffs for state in basis]).T
    solution, _, _, _ = linalg.lstsq(matrix, as_section(section).coeffs)
    return solution
