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

"""Clifford algebra Cl(V, q) and its quantisation maps.

Clifford elements use the ordered-monomial basis of the Grassmann engine:
mask A stands for the product hat-theta^{a_1} ... hat-theta^{a_p} with
a_1 < ... < a_p. The defining relation

    hat-theta^a hat-theta^b + hat-theta^b hat-theta^a = 1/2 hbar q^{ab}

makes multiplication by a generator a matrix with an hbar^0 part and an
hbar^1 part, so the same tables serve the numeric and the formal mode.
"""

import logging

import numpy as np

from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import scalar as scalars
from fermistar import star

LOG = logging.getLogger(__name__)

MAX_GENERATORS = 8


class CliffordElement(mv.GradedElement):

    """Element of Cl(V, q) in the ordered-monomial basis."""

    algebra = 'clifford'

    @classmethod
    def zero(cls, m, hbar=None):
        """The zero element."""
        return cls(m, np.zeros(1 << m, complex), hbar=hbar)

    @classmethod
    def one(cls, m, hbar=None):
        """The unit."""
        return cls.zero(m, hbar=hbar).one_like()

    @classmethod
    def monomial(cls, m, indices, coeff=1.0, hbar=None):
        """coeff * hat-theta^{i_1} ... hat-theta^{i_p}, increasing indices."""
        indices = [int(i) for i in indices]
        if sorted(set(indices)) != indices:
            raise exceptions.DimensionError(
                "Clifford monomials take strictly increasing indices")
        for index in indices:
            if not 1 <= index <= m:
                raise exceptions.DimensionError(
                    "generator index %d out of range 1..%d" % (index, m))
        return cls.zero(m, hbar=hbar).basis_like(mv.mask_of(indices), coeff)

    @classmethod
    def generator(cls, m, index, hbar=None):
        """hat-theta^index (1-based)."""
        return cls.monomial(m, [index], hbar=hbar)


def recast(element, cls):
    """Same coefficients viewed as an element of another graded class."""
    new = cls.__new__(cls)
    new.m = element.m
    new.hbar = element.hbar
    new._layers = element.layers
    new.low = element.low
    return new


def as_clifford(f):
    """Read Grassmann coefficients as Clifford coefficients."""
    return recast(f, CliffordElement)


def as_multivector(x):
    """Read Clifford coefficients as Grassmann coefficients."""
    return recast(x, mv.Multivector)


class CliffordAlgebra(object):

    """Multiplication tables of Cl(V, q) for one metric.

    ``left[k]`` and ``right[k]`` are pairs (hbar^0 part, hbar^1 part) of the
    matrices of hat-theta^(k+1) (.) and (.) hat-theta^(k+1).
    """

    def __init__(self, metric):
        if metric.m > MAX_GENERATORS:
            raise exceptions.DimensionError(
                "Clifford tables support up to %d generators, got %d"
                % (MAX_GENERATORS, metric.m))
        self.metric = metric
        self.m = metric.m
        self.size = 1 << self.m
        self.left = [self._left_tables(a) for a in range(self.m)]
        self.right = [self._right_tables(a) for a in range(self.m)]
        LOG.debug("Built Clifford tables for m=%d", self.m)

    def _left_tables(self, a):
        qsharp = self.metric.qsharp
        n = self.size
        plain = np.zeros((n, n), complex)
        shifted = np.zeros((n, n), complex)
        bit = 1 << a
        for mask in range(n):
            if mask == 0:
                plain[bit, 0] = 1.0
                continue
            lowest = (mask & -mask).bit_length() - 1
            rest = mask ^ (1 << lowest)
            if a < lowest:
                plain[mask | bit, mask] = 1.0
            elif a == lowest:
                shifted[rest, mask] = 0.25 * qsharp[a, a]
            else:
                # a b rest = -b (a rest) + 1/2 hbar q^{ab} rest; every mask
                # in (a rest) lies above b, so b prepends without a sign
                rows0 = np.flatnonzero(plain[:, rest])
                rows1 = np.flatnonzero(shifted[:, rest])
                plain[rows0 | (1 << lowest), mask] -= plain[rows0, rest]
                shifted[rows1 | (1 << lowest), mask] -= shifted[rows1, rest]
                shifted[rest, mask] += 0.5 * qsharp[a, lowest]
        return plain, shifted

    def _right_tables(self, a):
        qsharp = self.metric.qsharp
        n = self.size
        plain = np.zeros((n, n), complex)
        shifted = np.zeros((n, n), complex)
        bit = 1 << a
        for mask in range(n):
            if mask == 0:
                plain[bit, 0] = 1.0
                continue
            highest = mask.bit_length() - 1
            rest = mask ^ (1 << highest)
            if a > highest:
                plain[mask | bit, mask] = 1.0
            elif a == highest:
                shifted[rest, mask] = 0.25 * qsharp[a, a]
            else:
                # rest b a = -(rest a) b + 1/2 hbar q^{ab} rest
                rows0 = np.flatnonzero(plain[:, rest])
                rows1 = np.flatnonzero(shifted[:, rest])
                plain[rows0 | (1 << highest), mask] -= plain[rows0, rest]
                shifted[rows1 | (1 << highest), mask] -= \
                    shifted[rows1, rest]
                shifted[rest, mask] += 0.5 * qsharp[a, highest]
        return plain, shifted

    def numeric_matrix(self, tables, hbar):
        """Collapse an (hbar^0, hbar^1) pair at a numeric hbar."""
        plain, shifted = tables
        return plain + hbar * shifted

    def check(self, x):
        """Raise DimensionError unless x lives on this algebra."""
        if x.m != self.m:
            raise exceptions.DimensionError(
                "element on %d generators, algebra on %d" % (x.m, self.m))

    def _apply(self, tables, x):
        plain, shifted = tables
        result = x.map_layers(lambda arr: np.dot(arr, plain.T))
        part = x.map_layers(lambda arr: np.dot(arr, shifted.T))
        return result + part.scale_hbar(1)

    def left_generator(self, a, x):
        """hat-theta^(a+1) x."""
        return self._apply(self.left[a], x)

    def right_generator(self, a, x):
        """x hat-theta^(a+1)."""
        return self._apply(self.right[a], x)

    def left_linear(self, covector, x):
        """(sum_a covector[a] hat-theta^(a+1)) x."""
        total = x.zero_like()
        for a in np.flatnonzero(covector):
            total = total + self.left_generator(a, x) * complex(covector[a])
        return total

    def right_linear(self, covector, x):
        """x (sum_a covector[a] hat-theta^(a+1))."""
        total = x.zero_like()
        for a in np.flatnonzero(covector):
            total = total + self.right_generator(a, x) * complex(covector[a])
        return total

    def basis_products(self, x):
        """Dict mask B -> x hat-theta^B for every basis monomial."""
        products = {0: x}
        for mask in range(1, self.size):
            highest = mask.bit_length() - 1
            products[mask] = self.right_generator(
                highest, products[mask ^ (1 << highest)])
        return products

    def mul(self, x, y):
        """Clifford product x y."""
        x._check_compatible(y)
        self.check(x)
        return y.combine(self.basis_products(x)) or x.zero_like()

    def varrho0_generator(self, a, x):
        """rho_0(theta^(a+1)) x = 1/2 (a x + x' a), x' the grade involution."""
        return (self.left_generator(a, x) +
                self.right_generator(a, x.grade_involution())) * 0.5

    def varrho0(self, f, x):
        """rho_0(f) x, multiplicative over theta^A = theta^low ^ theta^rest."""
        f_clifford = as_clifford(f)
        f_clifford._check_compatible(x)
        self.check(x)
        images = {0: x}
        for mask in range(1, self.size):
            lowest = (mask & -mask).bit_length() - 1
            images[mask] = self.varrho0_generator(
                lowest, images[mask ^ (1 << lowest)])
        result = f.combine(images)
        return x.zero_like() if result is None else result

    def left_basis_products(self, x):
        """Dict mask A -> hat-theta^A x for every basis monomial."""
        images = {0: x}
        for mask in range(1, self.size):
            lowest = (mask & -mask).bit_length() - 1
            images[mask] = self.left_generator(lowest,
                                               images[mask ^ (1 << lowest)])
        return images


_ALGEBRAS = {}


def clifford_algebra(metric):
    """Cached CliffordAlgebra for a metric."""
    key = (metric.m, metric.q.tobytes())
    if key not in _ALGEBRAS:
        _ALGEBRAS[key] = CliffordAlgebra(metric)
    return _ALGEBRAS[key]


def clifford_mul(x, y, metric):
    """Product in Cl(V, q)."""
    return clifford_algebra(metric).mul(x, y)


def clifford_commutator(x, y, metric):
    """Graded commutator [x, y] = x y - (-1)^{|x||y|} y x."""
    algebra = clifford_algebra(metric)
    x_even, x_odd = x.even(), x.odd()
    swapped = (algebra.mul(y, x_even) + algebra.mul(y.even(), x_odd) -
               algebra.mul(y.odd(), x_odd))
    return algebra.mul(x, y) - swapped


def varrho0_apply(f, x, metric):
    """rho_0(f) x."""
    return clifford_algebra(metric).varrho0(f, x)


def varrho_k_apply(f, x, bivector, metric):
    """rho_K(f) x = rho_0(U^O_{0,K} f) x."""
    zero = bivector * 0
    return varrho0_apply(star.intertwiner(bivector, zero, f), x, metric)


def quantize(f, bivector, metric):
    """Q_K(f) = rho_0(U^O_{0,K} f) 1."""
    one = CliffordElement.zero(f.m, hbar=f.hbar).one_like()
    return varrho_k_apply(f, one, bivector, metric)


def symbol(x, bivector, metric):
    """Q_K^{-1}(x) by inverting the degree-triangular map Q_K.

    Q_K is the identity plus terms lowering the degree by two, so the
    fixed-point iteration f <- f + (x - Q_K f) ends after m/2 + 1 rounds.
    """
    f = as_multivector(x)
    for _ in range(x.m // 2 + 1):
        residual = x - quantize(f, bivector, metric)
        if residual.is_zero():
            break
        f = f + as_multivector(residual)
    return f


def supertrace(x):
    """str(x) = (i hbar/2)^n times the top coefficient; m = 2n."""
    if x.m % 2:
        raise exceptions.DimensionError(
            "the supertrace needs an even generator count, got %d" % x.m)
    n = x.m // 2
    top = x.top()
    if x.is_formal:
        return top * scalars.Laurent.hbar_power(n, (0.5j) ** n)
    return top * (0.5j * x.hbar) ** n


def inner_derivation(vector, x, metric):
    """d_v x = (2/hbar) ad_z x with z = sum (q v)_nu hat-theta^nu."""
    algebra = clifford_algebra(metric)
    covector = metric.lower(np.asarray(vector, dtype=complex))
    ad = (algebra.left_linear(covector, x) -
          algebra.right_linear(covector, x.grade_involution()))
    return ad.scale_hbar(-1) * 2.0


def so_action_clifford(rotation, x, metric=None):
    """gamma^C: the automorphism with hat-theta^mu -> (gamma^{-1})^mu_nu hat-theta^nu."""
    metric = metric or rotation.metric
    algebra = clifford_algebra(metric)
    algebra.check(x)
    images_of = rotation.inverse_matrix
    one = x.one_like()
    images = {0: one}
    for mask in range(1, algebra.size):
        lowest = (mask & -mask).bit_length() - 1
        images[mask] = algebra.left_linear(images_of[lowest],
                                           images[mask ^ (1 << lowest)])
    return x.combine(images) or x.zero_like()
