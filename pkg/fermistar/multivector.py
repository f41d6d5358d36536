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

"""Grassmann algebra engine.

Elements of the complexified exterior algebra on m generators are stored
densely: coefficient ``mask`` belongs to the ordered monomial
theta^{mu_1}...theta^{mu_p} with mu_1 < ... < mu_p the set bits of ``mask``
(bit k is generator k+1). Every sign in the package reduces to counting
transpositions between bitmasks.

Two scalar modes share one storage layout, a 2-D array of "layers":

- numeric: a single layer of complex coefficients at a fixed ``hbar``;
- formal: layer ``k`` holds the coefficient of hbar^(low + k), so the
  coefficients are Laurent polynomials in hbar.

Formal layers are complex doubles, not rationals. Formal arithmetic is exact
only while every coefficient stays a Gaussian integer over a power of two;
other inputs round like numeric mode.

A :class:`DoubledMultivector` is a Multivector on ``slots * m`` generators
whose generators are grouped into slots (theta, theta', theta'', ...).
Placing the slots one after the other makes the Koszul signs of slot
operators come out of the ordinary sign rules.
"""

import copy
import logging
import numbers

import numpy as np

from fermistar import exceptions
from fermistar import scalar as scalars

LOG = logging.getLogger(__name__)

MAX_GENERATORS = 16
NUMERIC = 'numeric'
FORMAL = 'formal'
PRUNE_RELATIVE = 1e-14
# disjoint-pair tables hold 3^m entries
_PAIR_TABLE_LIMIT = 12

_CACHED_TABLES = {}


class _Tables(object):

    """Per-m lookup tables of popcounts and transposition signs."""

    def __init__(self, m):
        self.m = m
        self.size = 1 << m
        masks = np.arange(self.size, dtype=np.int64)
        self.masks = masks
        below = np.zeros((m + 1, self.size), dtype=np.int16)
        for k in range(m):
            below[k + 1] = below[k] + ((masks >> k) & 1)
        self.below = below
        self.popcount = below[m].astype(np.int64)
        self.parity_sign = 1.0 - 2.0 * (self.popcount & 1)
        self.below_sign = 1.0 - 2.0 * (below[:m] & 1)
        self.with_bit = [masks[((masks >> k) & 1) == 1] for k in range(m)]
        self.without_bit = [masks[((masks >> k) & 1) == 0] for k in range(m)]
        self._pairs = None

    def pair_sign(self, left, right):
        """Sign of theta^left theta^right -> theta^(left|right)."""
        count = np.zeros(np.shape(right), dtype=np.int64)
        for k in range(self.m):
            if (left >> k) & 1:
                count += self.below[k][right]
        return 1.0 - 2.0 * (count & 1)

    def pairs(self):
        """All disjoint (left, right) mask pairs with their signs."""
        if self._pairs is None:
            lefts, rights, signs = [], [], []
            for left in range(self.size):
                right = self.masks[(self.masks & left) == 0]
                lefts.append(np.full(len(right), left, dtype=np.int64))
                rights.append(right)
                signs.append(self.pair_sign(left, right))
            self._pairs = (np.concatenate(lefts), np.concatenate(rights),
                           np.concatenate(signs))
            LOG.debug("Built %d disjoint pairs for m=%d",
                      len(self._pairs[0]), self.m)
        return self._pairs


def tables(m):
    """Return the cached lookup tables for m generators."""
    key = ('grassmann', m)
    if key not in _CACHED_TABLES:
        _CACHED_TABLES[key] = _Tables(m)
    return _CACHED_TABLES[key]


def check_generator_count(m):
    """Raise DimensionError unless 1 <= m <= MAX_GENERATORS."""
    if not isinstance(m, numbers.Integral) or not 1 <= m <= MAX_GENERATORS:
        raise exceptions.DimensionError(
            "generator count must be an integer in 1..%d, got %r"
            % (MAX_GENERATORS, m))


def mask_of(indices):
    """Bitmask of a collection of 1-based generator indices."""
    mask = 0
    for index in indices:
        mask |= 1 << (int(index) - 1)
    return mask


def indices_of(mask):
    """Sorted 1-based generator indices of a bitmask."""
    indices, k = [], 0
    while mask:
        if mask & 1:
            indices.append(k + 1)
        mask >>= 1
        k += 1
    return indices


#
# Array kernels. They act on the last axis, so they apply to a single
# coefficient vector, to a stack of hbar layers, or to the rows of a
# Clifford-valued table alike.
#

def derivative_kernel(arr, m, k):
    """Left derivative d/dtheta^(k+1) on coefficient arrays."""
    t = tables(m)
    bit = 1 << k
    src = t.with_bit[k]
    out = np.zeros_like(arr)
    out[..., src ^ bit] = arr[..., src] * t.below_sign[k][src]
    return out


def left_generator_kernel(arr, m, k):
    """Left multiplication theta^(k+1) ^ (.) on coefficient arrays."""
    t = tables(m)
    src = t.without_bit[k]
    out = np.zeros_like(arr)
    out[..., src | (1 << k)] = arr[..., src] * t.below_sign[k][src]
    return out


def right_generator_kernel(arr, m, k):
    """Right multiplication (.) ^ theta^(k+1) on coefficient arrays."""
    t = tables(m)
    src = t.without_bit[k]
    above = t.popcount[src] - t.below[k + 1][src]
    out = np.zeros_like(arr)
    out[..., src | (1 << k)] = arr[..., src] * (1.0 - 2.0 * (above & 1))
    return out


def monomial_wedge_kernel(arr, m, mask):
    """theta^mask ^ (.) on coefficient arrays."""
    t = tables(m)
    src = t.masks[(t.masks & mask) == 0]
    out = np.zeros_like(arr)
    out[..., src | mask] = arr[..., src] * t.pair_sign(mask, src)
    return out


def _accumulate(target, values, size):
    """Scatter-add complex values into a vector of the given size."""
    return (np.bincount(target, weights=values.real, minlength=size) +
            1j * np.bincount(target, weights=values.imag, minlength=size))


def wedge_kernel(left, right, m):
    """Wedge product of two coefficient vectors."""
    t = tables(m)
    if m <= _PAIR_TABLE_LIMIT:
        lefts, rights, signs = t.pairs()
        values = signs * left[lefts] * right[rights]
        return _accumulate(lefts | rights, values, t.size)
    out = np.zeros(t.size, dtype=complex)
    for mask in np.flatnonzero(left):
        src = t.masks[(t.masks & mask) == 0]
        out[src | mask] += left[mask] * right[src] * t.pair_sign(mask, src)
    return out


class GradedElement(object):

    """Dense storage shared by Grassmann and Clifford elements.

    Values are immutable once built; every operation returns a new element
    of the same class (subclass attributes are carried along).
    """

    algebra = 'grassmann'

    def __init__(self, m, coeffs, hbar=None, low=0):
        """Build an element.

        :param m: generator count (1..16)
        :param coeffs: numeric mode: 2^m coefficients; formal mode: an
            array of shape (layers, 2^m), row k multiplying hbar^(low+k)
        :param hbar: the value of hbar (numeric mode) or None (formal mode)
        :param low: exponent of the first layer in formal mode
        """
        check_generator_count(m)
        self.m = int(m)
        if hbar is not None:
            hbar = float(hbar)
            if not hbar > 0:
                raise exceptions.DimensionError(
                    "hbar must be positive, got %r" % hbar)
        self.hbar = hbar
        layers = np.array(coeffs, dtype=complex)
        if hbar is not None:
            if layers.ndim == 2 and layers.shape[0] == 1:
                layers = layers[0]
            if layers.ndim != 1:
                raise exceptions.DimensionError(
                    "numeric elements take a single coefficient vector")
            low = 0
        layers = np.atleast_2d(layers)
        if layers.ndim != 2 or layers.shape[1] != 1 << self.m:
            raise exceptions.DimensionError(
                "expected %d coefficients per layer, got shape %s"
                % (1 << self.m, layers.shape))
        self._set_layers(layers, low)

    def _set_layers(self, layers, low):
        if self.hbar is not None:
            peak = np.max(np.abs(layers)) if layers.size else 0.0
            if peak > 0:
                layers = np.where(np.abs(layers) > PRUNE_RELATIVE * peak,
                                  layers, 0)
            low = 0
        else:
            rows = np.flatnonzero(np.any(layers != 0, axis=1))
            if not len(rows):
                layers, low = np.zeros((1, layers.shape[1]), complex), 0
            else:
                low += int(rows[0])
                layers = layers[rows[0]:rows[-1] + 1]
        layers = np.array(layers, dtype=complex)
        layers.setflags(write=False)
        self._layers = layers
        self.low = int(low)

    def _derive(self, layers, low=0, m=None):
        """New element of the same class and mode from raw layers."""
        new = copy.copy(self)
        if m is not None:
            new.m = m
        new._set_layers(np.atleast_2d(layers), low)
        return new

    #
    # Mode and shape
    #
    @property
    def mode(self):
        """'numeric' or 'formal'."""
        return FORMAL if self.hbar is None else NUMERIC

    @property
    def is_formal(self):
        """Whether coefficients are Laurent polynomials in hbar."""
        return self.hbar is None

    @property
    def size(self):
        """Number of basis monomials, 2^m."""
        return 1 << self.m

    @property
    def layers(self):
        """Read-only array of hbar layers (one row in numeric mode)."""
        return self._layers

    @property
    def coeffs(self):
        """Coefficient vector (numeric) or layer array (formal)."""
        if self.is_formal:
            return self._layers
        return self._layers[0]

    def _check_compatible(self, other):
        if not isinstance(other, GradedElement):
            raise TypeError("expected a graded element, got %r"
                            % type(other))
        if other.algebra != self.algebra:
            raise exceptions.DimensionError(
                "cannot combine %s and %s elements"
                % (self.algebra, other.algebra))
        if other.m != self.m:
            raise exceptions.DimensionError(
                "generator counts differ: %d != %d" % (self.m, other.m))
        if other.hbar != self.hbar:
            raise exceptions.DimensionError(
                "scalar modes differ: hbar=%r vs hbar=%r"
                % (self.hbar, other.hbar))

    def zero_like(self):
        """The zero element of the same algebra and mode."""
        return self._derive(np.zeros((1, self.size), complex))

    def one_like(self):
        """The unit of the same algebra and mode."""
        layers = np.zeros((1, self.size), complex)
        layers[0, 0] = 1.0
        return self._derive(layers)

    def basis_like(self, mask, value=1.0):
        """value * (basis monomial at mask) in the same algebra and mode."""
        layers = np.zeros((1, self.size), complex)
        layers[0, mask] = 1.0
        return self._derive(layers) * value

    #
    # Linear structure
    #
    def __add__(self, other):
        if isinstance(other, numbers.Number) or isinstance(other,
                                                           scalars.Laurent):
            return self + self.one_like() * other
        self._check_compatible(other)
        low = min(self.low, other.low)
        high = max(self.low + len(self._layers),
                   other.low + len(other._layers))
        out = np.zeros((high - low, self.size), complex)
        out[self.low - low:self.low - low + len(self._layers)] += \
            self._layers
        out[other.low - low:other.low - low + len(other._layers)] += \
            other._layers
        return self._derive(out, low)

    __radd__ = __add__

    def __neg__(self):
        return self._derive(-self._layers, self.low)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, value):
        if isinstance(value, scalars.Laurent):
            if not self.is_formal:
                return self * value.evaluate(self.hbar)
            out = np.zeros((len(self._layers) + len(value.coeffs) - 1,
                            self.size), complex)
            for k, coeff in enumerate(value.coeffs):
                out[k:k + len(self._layers)] += coeff * self._layers
            return self._derive(out, self.low + value.low)
        if isinstance(value, numbers.Number):
            return self._derive(self._layers * complex(value), self.low)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, value):
        return self * (1.0 / value)

    __div__ = __truediv__

    def scale_hbar(self, power):
        """Multiply by hbar^power."""
        if self.is_formal:
            return self._derive(self._layers, self.low + power)
        return self._derive(self._layers * self.hbar ** power)

    def map_layers(self, kernel):
        """Apply a linear array kernel (acting on the last axis)."""
        return self._derive(kernel(self._layers), self.low)

    def combine(self, elements):
        """Return sum_A self[A] * elements[A].

        `elements` maps basis masks to elements of any graded class with a
        matching mode; the coefficients of self act as scalars.
        """
        total = None
        for layer_index, layer in enumerate(self._layers):
            acc = None
            for mask in np.flatnonzero(layer):
                term = elements[int(mask)] * complex(layer[mask])
                acc = term if acc is None else acc + term
            if acc is None:
                continue
            if self.is_formal:
                acc = acc.scale_hbar(self.low + layer_index)
            total = acc if total is None else total + acc
        return total

    #
    # Coefficients
    #
    def coefficient(self, mask):
        """Coefficient of a basis monomial (complex or Laurent)."""
        if self.is_formal:
            return scalars.Laurent(self._layers[:, mask], self.low)
        return complex(self._layers[0, mask])

    def terms(self):
        """Dict of mask -> nonzero coefficient."""
        masks = np.flatnonzero(np.any(self._layers != 0, axis=0))
        return {int(mask): self.coefficient(int(mask)) for mask in masks}

    def top(self):
        """Coefficient of the top monomial."""
        return self.coefficient(self.size - 1)

    def evaluate(self, hbar):
        """Numeric element obtained by substituting hbar."""
        if not self.is_formal:
            if hbar != self.hbar:
                raise exceptions.DimensionError(
                    "element is fixed at hbar=%r" % self.hbar)
            return self
        powers = float(hbar) ** np.arange(self.low,
                                          self.low + len(self._layers))
        new = copy.copy(self)
        new.hbar = float(hbar)
        new._set_layers(np.atleast_2d(np.dot(powers, self._layers)), 0)
        return new

    def to_formal(self):
        """Formal element with the same coefficients (hbar^0 only)."""
        if self.is_formal:
            return self
        new = copy.copy(self)
        new.hbar = None
        new._set_layers(self._layers, 0)
        return new

    def hbar_coefficient(self, power):
        """Formal element holding the coefficient of hbar^power."""
        if not self.is_formal:
            raise exceptions.FormalModeError(
                "hbar coefficients are defined for formal elements only")
        idx = power - self.low
        layer = np.zeros(self.size, complex)
        if 0 <= idx < len(self._layers):
            layer = self._layers[idx]
        return self._derive(np.atleast_2d(layer), 0)

    def hbar_degree(self):
        """Highest power of hbar present (None for zero)."""
        if not self.is_formal:
            raise exceptions.FormalModeError(
                "hbar degree is defined for formal elements only")
        if self.is_zero():
            return None
        return self.low + len(self._layers) - 1

    def hbar_valuation(self):
        """Lowest power of hbar present (None for zero)."""
        if not self.is_formal:
            raise exceptions.FormalModeError(
                "hbar valuation is defined for formal elements only")
        if self.is_zero():
            return None
        return self.low

    def norm(self):
        """Largest coefficient magnitude over all layers."""
        return float(np.max(np.abs(self._layers))) if self._layers.size \
            else 0.0

    def is_zero(self, tol=0.0):
        """Whether every coefficient is within tol of zero."""
        return self.norm() <= tol

    def equals(self, other, tol=0.0):
        """Coefficientwise comparison within an absolute tolerance."""
        return (self - other).norm() <= tol

    def distance(self, other):
        """Largest coefficient difference."""
        return (self - other).norm()

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return False
        try:
            return self.equals(other)
        except exceptions.DimensionError:
            return False

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    #
    # Grading
    #
    def _masked(self, keep):
        return self._derive(np.where(keep, self._layers, 0), self.low)

    def homogeneous(self, degree):
        """Component of a given degree."""
        return self._masked(tables(self.m).popcount == degree)

    def even(self):
        """Even part."""
        return self._masked((tables(self.m).popcount & 1) == 0)

    def odd(self):
        """Odd part."""
        return self._masked((tables(self.m).popcount & 1) == 1)

    def parity(self):
        """0 or 1 for homogeneous parity, None when mixed (0 for zero)."""
        has_even = not self.even().is_zero()
        has_odd = not self.odd().is_zero()
        if has_even and has_odd:
            return None
        return 1 if has_odd else 0

    def degrees(self):
        """Sorted degrees that carry nonzero coefficients."""
        present = np.any(self._layers != 0, axis=0)
        return sorted(set(tables(self.m).popcount[present].tolist()))

    def grade_involution(self):
        """Multiply degree-p terms by (-1)^p."""
        return self._derive(self._layers * tables(self.m).parity_sign,
                            self.low)

    def __repr__(self):
        terms = []
        for mask, value in sorted(self.terms().items()):
            name = ''.join('e%d' % i for i in indices_of(mask)) or '1'
            terms.append('%s*%s' % (value, name))
        body = ' + '.join(terms) or '0'
        mode = 'formal' if self.is_formal else 'hbar=%g' % self.hbar
        return '%s(m=%d, %s: %s)' % (type(self).__name__, self.m, mode, body)


class Multivector(GradedElement):

    """Element of the complexified exterior algebra on m generators."""

    @classmethod
    def zero(cls, m, hbar=None):
        """The zero element."""
        return cls(m, np.zeros(1 << m, complex), hbar=hbar)

    @classmethod
    def one(cls, m, hbar=None):
        """The unit."""
        return cls.monomial(m, (), hbar=hbar)

    @classmethod
    def monomial(cls, m, indices, coeff=1.0, hbar=None):
        """coeff * theta^{i_1} ... theta^{i_p} for sorted distinct indices.

        Unsorted indices are reordered with the matching sign; repeated
        indices give zero.
        """
        indices = [int(i) for i in indices]
        for index in indices:
            if not 1 <= index <= m:
                raise exceptions.DimensionError(
                    "generator index %d out of range 1..%d" % (index, m))
        sign = 1.0
        if len(set(indices)) != len(indices):
            sign = 0.0
        else:
            for i, left in enumerate(indices):
                for right in indices[i + 1:]:
                    if left > right:
                        sign = -sign
        element = cls(m, np.zeros(1 << m, complex), hbar=hbar)
        layers = np.zeros((1, 1 << m), complex)
        layers[0, mask_of(indices)] = sign
        return element._derive(layers) * coeff

    @classmethod
    def generator(cls, m, index, hbar=None):
        """theta^index (1-based)."""
        return cls.monomial(m, [index], hbar=hbar)

    @classmethod
    def linear(cls, vector, hbar=None):
        """sum_mu vector[mu] theta^(mu+1)."""
        vector = np.asarray(vector, dtype=complex)
        m = len(vector)
        coeffs = np.zeros(1 << m, complex)
        coeffs[1 << np.arange(m)] = vector
        if hbar is None:
            return cls(m, coeffs[np.newaxis, :])
        return cls(m, coeffs, hbar=hbar)

    @classmethod
    def from_terms(cls, m, terms, hbar=None):
        """Build from {mask or index tuple: scalar}.

        Formal elements accept Laurent coefficients.
        """
        result = cls.zero(m, hbar=hbar)
        for key, value in terms.items():
            if isinstance(key, numbers.Integral):
                term = result.basis_like(int(key))
            else:
                term = cls.monomial(m, key, hbar=hbar)
            result = result + term * value
        return result

    def __xor__(self, other):
        return wedge(self, other)

    def wedge(self, other):
        """Graded-commutative product."""
        return wedge(self, other)

    def derivative(self, k):
        """Left derivative along generator k (0-based)."""
        return self.map_layers(
            lambda arr: derivative_kernel(arr, self.m, k))

    def derivative_along(self, vector, offset=0):
        """sum_mu vector[mu] d/dtheta^(offset+mu+1)."""
        total = np.zeros_like(self._layers)
        for mu, value in enumerate(np.asarray(vector, dtype=complex)):
            if value != 0:
                total = total + value * derivative_kernel(
                    self._layers, self.m, offset + mu)
        return self._derive(total, self.low)

    def left_multiply_linear(self, vector, offset=0):
        """(sum_mu vector[mu] theta^(offset+mu+1)) ^ self."""
        total = np.zeros_like(self._layers)
        for mu, value in enumerate(np.asarray(vector, dtype=complex)):
            if value != 0:
                total = total + value * left_generator_kernel(
                    self._layers, self.m, offset + mu)
        return self._derive(total, self.low)


class DoubledMultivector(Multivector):

    """A Multivector on slots * m generators grouped into slots.

    Slot s owns generators s*m+1 .. (s+1)*m. Two slots hold f (x) g with
    theta in the first slot and theta' (or the section) in the second.
    """

    def __init__(self, m, coeffs, hbar=None, low=0, slots=2):
        """Build from coefficients on slots * m generators."""
        if slots < 2 or m % slots:
            raise exceptions.DimensionError(
                "%d generators do not split into %d slots" % (m, slots))
        self.slots = slots
        super(DoubledMultivector, self).__init__(m, coeffs, hbar=hbar,
                                                 low=low)

    @property
    def base_m(self):
        """Generators per slot."""
        return self.m // self.slots

    def slot_derivative(self, slot, vector):
        """Derivative along a base-space vector acting on one slot."""
        return self.derivative_along(vector, offset=slot * self.base_m)

    def slot_left_multiply(self, slot, vector):
        """Left multiplication by a linear form placed in one slot."""
        return self.left_multiply_linear(vector, offset=slot * self.base_m)


def _check_index(mu, m):
    if not isinstance(mu, numbers.Integral) or not 1 <= mu <= m:
        raise exceptions.DimensionError(
            "generator index %r out of range 1..%d" % (mu, m))


def _bilinear(left, right, kernel):
    left._check_compatible(right)
    out = np.zeros((len(left.layers) + len(right.layers) - 1, left.size),
                   complex)
    for i, row in enumerate(left.layers):
        if not np.any(row):
            continue
        for j, col in enumerate(right.layers):
            if np.any(col):
                out[i + j] += kernel(row, col)
    return out, left.low + right.low


def wedge(f, g):
    """Wedge product f ^ g."""
    if not isinstance(f, Multivector) or not isinstance(g, Multivector):
        raise TypeError("wedge takes two Multivectors")
    out, low = _bilinear(f, g, lambda a, b: wedge_kernel(a, b, f.m))
    return f._derive(out, low)


def fermi_derivative(mu, f):
    """Left derivative d_mu (1-based index)."""
    _check_index(mu, f.m)
    return f.derivative(mu - 1)


def signed_derivative(mu, f):
    """d'_mu f = (-1)^(|f|-1) d_mu f, per homogeneous component."""
    _check_index(mu, f.m)
    # on degree p the sign is (-1)^(p-1); after differentiation the degree
    # is p-1, so it is the parity sign of the result
    return f.derivative(mu - 1).grade_involution()


def derivative_along(vector, f):
    """d_v f for a complex vector v."""
    if len(vector) != f.m:
        raise exceptions.DimensionError(
            "vector has %d components, expected %d" % (len(vector), f.m))
    return f.derivative_along(vector)


def berezin_integral(f):
    """Coefficient of theta^1 ... theta^m."""
    return f.top()


def exp_even(f):
    """Exponential of an even element.

    The non-scalar part is a sum of commuting nilpotent monomials, so the
    exponential is the product of the factors (1 + c_A theta^A); no
    factorials appear.
    """
    if not f.odd().is_zero():
        raise exceptions.ParityError(
            "exp_even needs an even element; odd degrees %s present"
            % [d for d in f.degrees() if d % 2])
    scalar_part = f.coefficient(0)
    if f.is_formal and not scalar_part.is_zero():
        raise exceptions.FormalModeError(
            "exp of a formal scalar part is not a Laurent polynomial")
    result = f.one_like()
    for mask, value in sorted(f.terms().items()):
        if mask == 0:
            continue
        step = result.map_layers(
            lambda arr, mask=mask: monomial_wedge_kernel(arr, f.m, mask))
        result = result + step * value
    if f.is_formal:
        return result
    return result * np.exp(scalar_part)


def tensor_embed(f, g):
    """f (x) g as a DoubledMultivector; theta^A (x) theta^B -> theta^A theta'^B."""
    f._check_compatible(g)
    n = f.size
    out = np.zeros((len(f.layers) + len(g.layers) - 1, n * n), complex)
    for i, row in enumerate(f.layers):
        for j, col in enumerate(g.layers):
            out[i + j] += np.outer(col, row).ravel()
    if f.is_formal:
        return DoubledMultivector(2 * f.m, out, low=f.low + g.low)
    return DoubledMultivector(2 * f.m, out[0], hbar=f.hbar)


def triple_embed(f, g, h):
    """f (x) g (x) h on three slots."""
    f._check_compatible(g)
    f._check_compatible(h)
    n = f.size
    depth = len(f.layers) + len(g.layers) + len(h.layers) - 2
    out = np.zeros((depth, n ** 3), complex)
    for i, a in enumerate(f.layers):
        for j, b in enumerate(g.layers):
            for k, c in enumerate(h.layers):
                out[i + j + k] += np.einsum('c,b,a->cba', c, b, a).ravel()
    if f.is_formal:
        return DoubledMultivector(3 * f.m, out, low=f.low + g.low + h.low,
                                  slots=3)
    return DoubledMultivector(3 * f.m, out[0], hbar=f.hbar, slots=3)


def _merge_table(m, slots, slot):
    key = ('merge', m, slots, slot)
    if key not in _CACHED_TABLES:
        t = tables(m)
        full = np.arange(1 << (m * slots), dtype=np.int64)
        parts = [(full >> (k * m)) & (t.size - 1) for k in range(slots)]
        left, right = parts[slot], parts[slot + 1]
        valid = (left & right) == 0
        count = np.zeros(len(full), dtype=np.int64)
        for k in range(m):
            count += ((left >> k) & 1) * t.below[k][right]
        merged = parts[:slot] + [left | right] + parts[slot + 2:]
        target = np.zeros(len(full), dtype=np.int64)
        for k, part in enumerate(merged):
            target |= part << (k * m)
        sign = 1.0 - 2.0 * (count & 1)
        _CACHED_TABLES[key] = (np.flatnonzero(valid), target[valid],
                               sign[valid])
    return _CACHED_TABLES[key]


def merge_slots(F, slot=0):
    """Identify slot+1 with slot (a partial diagonal pullback)."""
    if not isinstance(F, DoubledMultivector):
        raise exceptions.DimensionError("merge_slots needs slot structure")
    if not 0 <= slot < F.slots - 1:
        raise exceptions.DimensionError(
            "cannot merge slot %d of %d" % (slot, F.slots))
    m = F.base_m
    source, target, sign = _merge_table(m, F.slots, slot)
    size = 1 << (m * (F.slots - 1))
    out = np.zeros((len(F.layers), size), complex)
    for k, layer in enumerate(F.layers):
        out[k] = _accumulate(target, sign * layer[source], size)
    if F.slots - 1 == 1:
        if F.is_formal:
            return Multivector(m, out, low=F.low)
        return Multivector(m, out[0], hbar=F.hbar)
    if F.is_formal:
        return DoubledMultivector(m * (F.slots - 1), out, low=F.low,
                                  slots=F.slots - 1)
    return DoubledMultivector(m * (F.slots - 1), out[0], hbar=F.hbar,
                              slots=F.slots - 1)


def diagonal_pullback(F):
    """Delta^*: substitute theta' -> theta and reduce."""
    if not isinstance(F, DoubledMultivector) or F.slots != 2:
        raise exceptions.DimensionError(
            "diagonal_pullback needs a two-slot element")
    return merge_slots(F, 0)


def graded_flip(F):
    """sigma_2: theta^A theta'^B -> (-1)^(|A||B|) theta^B theta'^A."""
    if not isinstance(F, DoubledMultivector) or F.slots != 2:
        raise exceptions.DimensionError(
            "graded_flip needs a two-slot element")
    m = F.base_m
    key = ('flip', m)
    if key not in _CACHED_TABLES:
        t = tables(m)
        full = np.arange(1 << (2 * m), dtype=np.int64)
        first, second = full & (t.size - 1), full >> m
        target = second | (first << m)
        sign = 1.0 - 2.0 * ((t.popcount[first] * t.popcount[second]) & 1)
        _CACHED_TABLES[key] = (target, sign)
    target, sign = _CACHED_TABLES[key]
    out = np.zeros_like(F.layers)
    out[:, target] = F.layers * sign
    return F._derive(out, F.low)


def substitution_images(matrix):
    """Rows: images of every basis monomial under theta^mu -> M[mu] . theta.

    :param matrix: complex array of shape (m, target_m)
    :returns: array of shape (2^m, 2^target_m)
    """
    matrix = np.asarray(matrix, dtype=complex)
    m, target_m = matrix.shape
    check_generator_count(m)
    check_generator_count(target_m)
    images = np.zeros((1 << m, 1 << target_m), complex)
    images[0, 0] = 1.0
    for mask in range(1, 1 << m):
        lowest = (mask & -mask).bit_length() - 1
        rest = images[mask ^ (1 << lowest)]
        row = images[mask]
        for a in np.flatnonzero(matrix[lowest]):
            row += matrix[lowest, a] * left_generator_kernel(rest, target_m,
                                                             a)
    return images


def linear_substitution(f, matrix, target_m=None):
    """Algebra morphism theta^mu -> sum_a matrix[mu, a] theta^a.

    :param matrix: complex array of shape (f.m, target_m)
    :returns: a Multivector on target_m generators in f's mode
    """
    matrix = np.asarray(matrix, dtype=complex)
    target_m = target_m or matrix.shape[1]
    if matrix.shape != (f.m, target_m):
        raise exceptions.DimensionError(
            "substitution matrix has shape %s, expected (%d, %d)"
            % (matrix.shape, f.m, target_m))
    layers = np.dot(f.layers, substitution_images(matrix))
    if f.is_formal:
        return Multivector(target_m, layers, low=f.low)
    return Multivector(target_m, layers[0], hbar=f.hbar)
