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

"""Scalars in both modes.

A numeric scalar is a Python complex number at a fixed hbar > 0. A formal
scalar is a :class:`Laurent` polynomial in hbar with complex coefficients.
Coefficients are stored as complex doubles; sums and products of dyadic
Gaussian rationals are exact in that representation, which is what the
formal identities rely on.
"""

import numbers

import numpy as np


class Laurent(object):

    """A Laurent polynomial sum_k c_k hbar^k, k >= low.

    Values are immutable; arithmetic returns new instances.
    """

    __slots__ = ('coeffs', 'low')

    def __init__(self, coeffs, low=0):
        """Store coefficients of hbar^low, hbar^(low+1), ..."""
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        nonzero = np.flatnonzero(coeffs)
        if not len(nonzero):
            coeffs, low = np.zeros(1, dtype=complex), 0
        else:
            low += int(nonzero[0])
            coeffs = coeffs[nonzero[0]:nonzero[-1] + 1]
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        self.low = int(low)

    @classmethod
    def constant(cls, value):
        """Embed a complex number."""
        return cls([value])

    @classmethod
    def hbar_power(cls, k, value=1.0):
        """Return value * hbar^k."""
        return cls([value], low=k)

    @classmethod
    def from_dict(cls, terms):
        """Build from {exponent: complex} pairs."""
        if not terms:
            return cls([0])
        low = min(terms)
        coeffs = np.zeros(max(terms) - low + 1, dtype=complex)
        for power, value in terms.items():
            coeffs[power - low] += value
        return cls(coeffs, low)

    def to_dict(self):
        """Return {exponent: complex} for the nonzero coefficients."""
        return {self.low + k: complex(c) for k, c in enumerate(self.coeffs)
                if c != 0}

    def is_zero(self):
        """Whether every coefficient vanishes."""
        return not np.any(self.coeffs)

    @property
    def valuation(self):
        """Lowest exponent with a nonzero coefficient (None for 0)."""
        return None if self.is_zero() else self.low

    @property
    def degree(self):
        """Highest exponent with a nonzero coefficient (None for 0)."""
        return None if self.is_zero() else self.low + len(self.coeffs) - 1

    def coefficient(self, k):
        """Coefficient of hbar^k."""
        idx = k - self.low
        if 0 <= idx < len(self.coeffs):
            return complex(self.coeffs[idx])
        return 0j

    def evaluate(self, hbar):
        """Substitute a numeric hbar."""
        powers = float(hbar) ** np.arange(self.low,
                                          self.low + len(self.coeffs))
        return complex(np.dot(self.coeffs, powers))

    def shift(self, k):
        """Multiply by hbar^k."""
        return Laurent(self.coeffs, self.low + k)

    def conjugate(self):
        """Complex conjugate of every coefficient (hbar is real)."""
        return Laurent(np.conj(self.coeffs), self.low)

    def _coerce(self, other):
        if isinstance(other, Laurent):
            return other
        if isinstance(other, numbers.Number):
            return Laurent.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        low = min(self.low, other.low)
        high = max(self.low + len(self.coeffs), other.low + len(other.coeffs))
        out = np.zeros(high - low, dtype=complex)
        out[self.low - low:self.low - low + len(self.coeffs)] += self.coeffs
        out[other.low - low:other.low - low + len(other.coeffs)] += \
            other.coeffs
        return Laurent(out, low)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(-self.coeffs, self.low)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Laurent(np.convolve(self.coeffs, other.coeffs),
                       self.low + other.low)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return (self - other).is_zero()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items())))

    def __repr__(self):
        if self.is_zero():
            return 'Laurent(0)'
        terms = ['(%s)h^%d' % (c, k) for k, c in sorted(self.to_dict().items())]
        return 'Laurent(%s)' % ' + '.join(terms)


def scale(value, factor, hbar_power=0, hbar=None):
    """Return factor * hbar^hbar_power * value for either scalar mode.

    Numeric scalars need `hbar`; Laurent scalars shift their exponents.
    """
    if isinstance(value, Laurent):
        return (value * factor).shift(hbar_power)
    if hbar_power and hbar is None:
        raise ValueError("numeric scaling by hbar needs a value of hbar")
    return complex(value) * factor * (hbar ** hbar_power if hbar_power
                                      else 1.0)


def evaluate(value, hbar):
    """Evaluate a scalar of either mode at a numeric hbar."""
    if isinstance(value, Laurent):
        return value.evaluate(hbar)
    return complex(value)


def is_close(left, right, tol=0.0, hbar=None):
    """Compare two scalars, exactly for Laurent pairs when tol is 0."""
    if isinstance(left, Laurent) and isinstance(right, Laurent):
        diff = left - right
        return bool(np.all(np.abs(diff.coeffs) <= tol))
    if hbar is not None:
        left, right = evaluate(left, hbar), evaluate(right, hbar)
    return abs(complex(left) - complex(right)) <= tol
