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

"""Seeded random inputs.

Every check draws from its own stream,
Generator(PCG64(SeedSequence([seed, crc32(name)]))), so results depend only
on the seed and the check name.
"""

import zlib

import numpy as np
from scipy import linalg

from fermistar import multivector as mv
from fermistar import polarization as pol
from fermistar import tensors


def stream(seed, name):
    """The named random stream for a seed."""
    key = zlib.crc32(name.encode('utf-8')) & 0xffffffff
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([int(seed), key])))


def gaussian_integers(rng, size, bound=3):
    """Complex numbers with integer parts in -bound..bound."""
    real = rng.integers(-bound, bound + 1, size=size)
    imag = rng.integers(-bound, bound + 1, size=size)
    return real + 1j * imag


def random_multivector(rng, m, hbar=None, degrees=None, density=1.0):
    """A random element; formal (hbar=None) elements are Gaussian integers.

    :param degrees: restrict to these degrees (e.g. (0, 2, 4) for even)
    :param density: probability that a coefficient is kept
    """
    size = 1 << m
    if hbar is None:
        coeffs = gaussian_integers(rng, size).astype(complex)
    else:
        coeffs = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    if density < 1.0:
        coeffs = np.where(rng.random(size) < density, coeffs, 0)
    if degrees is not None:
        keep = np.isin(mv.tables(m).popcount, list(degrees))
        coeffs = np.where(keep, coeffs, 0)
    if hbar is None:
        return mv.Multivector(m, coeffs[np.newaxis, :])
    return mv.Multivector(m, coeffs, hbar=hbar)


def random_homogeneous(rng, m, parity, hbar=None):
    """A random element of one parity."""
    degrees = [d for d in range(m + 1) if d % 2 == parity]
    return random_multivector(rng, m, hbar=hbar, degrees=degrees)


def random_bivector(rng, m, dyadic=False):
    """A random antisymmetric K; dyadic entries are multiples of 1/4."""
    if dyadic:
        upper = gaussian_integers(rng, (m, m), bound=4) / 4.0
    else:
        upper = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    upper = np.triu(upper, 1)
    return tensors.Bivector(upper - upper.T)


def random_metric(rng, m):
    """A random real symmetric positive-definite q."""
    a = rng.standard_normal((m, m))
    q = np.dot(a, a.T) + m * np.eye(m)
    return tensors.Metric(0.5 * (q + q.T))


def random_generator(rng, metric, scale=1.0):
    """A random Y in so(V, q): Y = q# S with S antisymmetric."""
    m = metric.m
    upper = np.triu(rng.standard_normal((m, m)), 1) * scale
    return np.dot(metric.qsharp, upper - upper.T)


def random_rotation(rng, metric, scale=1.0):
    """exp(Y) for a random generator (the generator is recorded)."""
    return tensors.Rotation.from_generator(
        random_generator(rng, metric, scale), metric)


def random_complex_structure(rng, metric, scale=1.0):
    """A rotated copy of the standard structure in the orthonormal frame."""
    frame = metric.orthonormal_frame()
    standard = pol.ComplexStructure.standard(
        tensors.Metric.identity(metric.m)).J
    J = linalg.solve(frame, np.dot(standard, frame))
    structure = pol.ComplexStructure(J, metric)
    return structure.transformed(random_rotation(rng, metric, scale))


def random_polarization(rng, metric, in_j=True, scale=1.0, spread=0.3):
    """P_J for a random J, or a complex-orthogonal conjugate outside J."""
    structure = random_complex_structure(rng, metric, scale)
    polarization = pol.from_complex_structure(structure)
    if in_j:
        return polarization
    twist = 1j * random_generator(rng, metric, spread)
    return polarization.conjugated_by(linalg.expm(twist))
