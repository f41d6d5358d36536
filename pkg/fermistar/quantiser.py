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

"""Stratonovich-Weyl quantiser and Berezin-integral forms of *_K.

Everything here works in the orthonormal oriented gauge (q = identity) and
at a numeric hbar; use Metric.to_orthonormal to move there first.

Elements of Cl (x) Lambda are tables T[alpha, y] standing for
sum T[alpha, y] hat-theta^alpha (x) theta^y, multiplied with the graded
tensor sign (-1)^{|y||beta|}.
"""

import logging

import numpy as np
from scipy import linalg

from fermistar import clifford
from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import star
from fermistar import tensors

LOG = logging.getLogger(__name__)


def require_orthonormal(metric):
    """Raise BasisError unless q is the identity."""
    if not metric.is_orthonormal():
        raise exceptions.BasisError(
            "kernel formulas need q = identity; orthonormalise first")


def require_numeric(*elements):
    """Raise FormalModeError for formal elements."""
    for element in elements:
        if element.is_formal:
            raise exceptions.FormalModeError(
                "kernel formulas need a numeric hbar")


class CliffordGrassmann(object):

    """Element of Cl(V, q) (x) Lambda(theta, theta', ...) at a numeric hbar."""

    def __init__(self, metric, grassmann_m, hbar, table=None):
        self.metric = metric
        self.algebra = clifford.clifford_algebra(metric)
        self.grassmann_m = grassmann_m
        self.hbar = float(hbar)
        shape = (self.algebra.size, 1 << grassmann_m)
        if table is None:
            table = np.zeros(shape, complex)
            table[0, 0] = 1.0
        table = np.asarray(table, dtype=complex)
        if table.shape != shape:
            raise exceptions.DimensionError(
                "table has shape %s, expected %s" % (table.shape, shape))
        self.table = table

    def _like(self, table):
        return CliffordGrassmann(self.metric, self.grassmann_m, self.hbar,
                                 table)

    @classmethod
    def from_clifford(cls, x, metric, grassmann_m):
        """x (x) 1."""
        table = np.zeros((x.size, 1 << grassmann_m), complex)
        table[:, 0] = x.coeffs
        return cls(metric, grassmann_m, x.hbar, table)

    def __add__(self, other):
        return self._like(self.table + other.table)

    def __sub__(self, other):
        return self._like(self.table - other.table)

    def __mul__(self, value):
        return self._like(self.table * value)

    __rmul__ = __mul__

    def _clifford_right(self, beta):
        """Matrix of (.) hat-theta^beta on the Clifford axis."""
        matrix = np.eye(self.algebra.size, dtype=complex)
        for a in mv.indices_of(beta):
            generator = self.algebra.numeric_matrix(
                self.algebra.right[a - 1], self.hbar)
            matrix = np.dot(generator, matrix)
        return matrix

    def times(self, other):
        """Graded tensor product of two Cl (x) Lambda elements."""
        gm = self.grassmann_m
        parity = mv.tables(gm).parity_sign
        out = np.zeros_like(self.table)
        for beta in range(other.table.shape[0]):
            column = other.table[beta]
            if not np.any(column):
                continue
            signed = self.table
            if bin(beta).count('1') % 2:
                signed = self.table * parity
            products = np.array([mv.wedge_kernel(row, column, gm)
                                 for row in signed])
            out += np.dot(self._clifford_right(beta), products)
        return self._like(out)

    def right_grassmann(self, k):
        """self (1 (x) theta^(k+1))."""
        return self._like(mv.right_generator_kernel(self.table,
                                                    self.grassmann_m, k))

    def right_clifford(self, a):
        """self (hat-theta^(a+1) (x) 1)."""
        signed = self.table * mv.tables(self.grassmann_m).parity_sign
        generator = self.algebra.numeric_matrix(self.algebra.right[a],
                                                self.hbar)
        return self._like(np.dot(generator, signed))

    def map_grassmann(self, kernel):
        """Apply an even operator to the Grassmann factor."""
        return self._like(kernel(self.table))

    def supertrace(self):
        """Grassmann function str(T) (Clifford factor traced)."""
        m = self.metric.m
        if m % 2:
            raise exceptions.DimensionError(
                "the supertrace needs an even generator count, got %d" % m)
        factor = (0.5j * self.hbar) ** (m // 2)
        return mv.Multivector(self.grassmann_m, factor * self.table[-1],
                              hbar=self.hbar)

    def integrate_against(self, f):
        """Clifford element of the Berezin integral of self (1 (x) f)."""
        gm = self.grassmann_m
        if f.m != gm:
            raise exceptions.DimensionError(
                "function on %d generators, quantiser on %d" % (f.m, gm))
        t = mv.tables(gm)
        full = t.size - 1
        complement = full ^ t.masks
        signs = np.array([t.pair_sign(int(y), int(full ^ y))
                          for y in t.masks])
        weights = signs * f.coeffs[complement]
        return clifford.CliffordElement(self.metric.m,
                                        np.dot(self.table, weights),
                                        hbar=self.hbar)


def omega(metric, bivector, hbar, slots=1, slot=0):
    """Omega_K on the Grassmann copy `slot` out of `slots` copies.

    Omega_0 = (theta^1 - hat-theta^1) ... (theta^m - hat-theta^m) and
    Omega_K = exp((hbar/8) K^{mu nu} d_mu d_nu) Omega_0.
    """
    require_orthonormal(metric)
    bivector.check_metric(metric)
    m = metric.m
    result = CliffordGrassmann(metric, slots * m, hbar)
    for mu in range(m):
        result = (result.right_grassmann(slot * m + mu) -
                  result.right_clifford(mu))
    if np.any(bivector.K):
        result = result.map_grassmann(
            lambda arr: star.second_order_kernel(
                arr, slots * m, bivector.K, 0.125 * hbar, offset=slot * m))
    return result


def quantize_via_sw(f, bivector, metric):
    """Q_K(f) as the Berezin integral of Omega_K(theta) f(theta)."""
    require_numeric(f)
    return omega(metric, bivector, f.hbar).integrate_against(f)


def symbol_via_supertrace(x, bivector, metric):
    """Q_K^{-1}(x) = (2/(i hbar))^n str(Omega_{-K}(theta) x)."""
    require_numeric(x)
    require_orthonormal(metric)
    m = metric.m
    if m % 2:
        raise exceptions.DimensionError(
            "the supertrace needs an even generator count, got %d" % m)
    kernel = omega(metric, -bivector, x.hbar)
    embedded = CliffordGrassmann.from_clifford(x, metric, m)
    traced = kernel.times(embedded).supertrace()
    return traced * (2.0 / (1j * x.hbar)) ** (m // 2)


def delta_function(m, hbar=None):
    """delta(theta - theta') = prod_mu (theta^mu - theta'^mu) on 2m generators."""
    result = mv.DoubledMultivector(2 * m, np.eye(1, 1 << (2 * m))[0],
                                   hbar=hbar)
    for mu in range(m):
        vector = np.zeros(2 * m, complex)
        vector[mu], vector[m + mu] = 1.0, -1.0
        factor = mv.Multivector.linear(vector, hbar=hbar)
        result = mv.wedge(result, factor)
    return result


def pair_supertrace(metric, bivector, hbar):
    """str(Omega_{-K}(theta) Omega_K(theta')) on two Grassmann copies."""
    first = omega(metric, -bivector, hbar, slots=2, slot=0)
    second = omega(metric, bivector, hbar, slots=2, slot=1)
    return first.times(second).supertrace()


def triple_supertrace(metric, hbar):
    """str(Omega_0(theta') Omega_0(theta'') Omega_0(theta)).

    Copies are ordered (theta, theta', theta'') on 3m generators.
    """
    zero = tensors.Bivector.zero(metric.m)
    theta = omega(metric, zero, hbar, slots=3, slot=0)
    theta1 = omega(metric, zero, hbar, slots=3, slot=1)
    theta2 = omega(metric, zero, hbar, slots=3, slot=2)
    return theta1.times(theta2).times(theta).supertrace()


def triple_closed_form(metric, hbar):
    """(i hbar)^{3n} / 2^{5n} exp[(4/hbar)(q(t,t') + q(t',t'') + q(t'',t))]."""
    require_orthonormal(metric)
    m = metric.m
    n = m // 2
    exponent = mv.Multivector.zero(3 * m, hbar=hbar)
    for left, right in ((0, 1), (1, 2), (2, 0)):
        for mu in range(m):
            exponent = exponent + mv.Multivector.monomial(
                3 * m, [left * m + mu + 1, right * m + mu + 1],
                coeff=4.0 / hbar, hbar=hbar)
    return mv.exp_even(exponent) * ((1j * hbar) ** (3 * n) / 2.0 ** (5 * n))


def star_via_kernel(f, g, bivector, metric):
    """f *_K g as a Berezin integral over two auxiliary copies.

    (-1)^n det(Lambda) integral dtheta' dtheta''
    f(theta + sqrt(hbar)/2 theta') g(theta + sqrt(hbar)/2 theta'')
    exp[A(theta', theta'')] with A = (Lambda^T)^{-1}, Lambda = q# + K.

    Integrating the Gaussian turns A into the propagator (A^{-1})^T = Lambda
    of *_K; at K = 0 the kernel is exp[q(theta', theta'')].

    :raises InvalidTensor: when q# + K is singular
    """
    f._check_compatible(g)
    require_numeric(f)
    require_orthonormal(metric)
    bivector.check_metric(metric)
    m = f.m
    if 3 * m > 12:
        raise exceptions.DimensionError(
            "kernel star products run on up to 4 generators, got %d" % m)
    lam = bivector.lam(metric)
    try:
        form = linalg.inv(lam.T)
        normalisation = linalg.det(lam)
    except linalg.LinAlgError:
        raise exceptions.InvalidTensor('bivector', "q# + K is singular")
    if abs(normalisation) < 1e-12:
        raise exceptions.InvalidTensor('bivector', "q# + K is singular")
    scale = np.sqrt(f.hbar) / 2.0
    shift_f = np.zeros((m, 3 * m), complex)
    shift_g = np.zeros((m, 3 * m), complex)
    for mu in range(m):
        shift_f[mu, mu] = shift_g[mu, mu] = 1.0
        shift_f[mu, m + mu] = scale
        shift_g[mu, 2 * m + mu] = scale
    exponent = mv.Multivector.zero(3 * m, hbar=f.hbar)
    for mu in range(m):
        for nu in range(m):
            if form[mu, nu] != 0:
                exponent = exponent + mv.Multivector.monomial(
                    3 * m, [m + mu + 1, 2 * m + nu + 1], coeff=form[mu, nu],
                    hbar=f.hbar)
    integrand = mv.wedge(mv.wedge(mv.linear_substitution(f, shift_f),
                                  mv.linear_substitution(g, shift_g)),
                         mv.exp_even(exponent))
    full = (1 << m) - 1
    auxiliary = (full << m) | (full << (2 * m))
    coeffs = integrand.coeffs[np.arange(1 << m) | auxiliary]
    return mv.Multivector(m, coeffs * ((-1.0) ** (m // 2) * normalisation),
                          hbar=f.hbar)


def transform_omega(rotation, kernel):
    """(gamma^C (x) gamma^O) applied to a single-copy quantiser table."""
    m = kernel.metric.m
    grassmann = mv.substitution_images(rotation.inverse_matrix)
    basis = clifford.CliffordElement.zero(m, hbar=kernel.hbar)
    images = np.array([
        clifford.so_action_clifford(rotation, basis.basis_like(alpha),
                                    kernel.metric).coeffs
        for alpha in range(1 << m)])
    table = np.dot(images.T, np.dot(kernel.table, grassmann))
    return kernel._like(table)
