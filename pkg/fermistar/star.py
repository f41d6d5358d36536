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

"""Poisson superalgebra and the star products *_K.

The value of hbar comes from the operands: numeric elements carry it, formal
elements make every hbar power an exact Laurent coefficient.

Exponentials of bidifferential operators are products of commuting
nilpotent factors: with lambda_nu the nu-th column of Lambda,

    exp(-(hbar/4) Lambda^{mu nu} d_mu (x) d_nu)
        = prod_nu (1 - (hbar/4) D_{lambda_nu} (x) d_nu)

and each factor is applied once in the doubled algebra.
"""

import logging

import numpy as np

from fermistar import exceptions
from fermistar import multivector as mv
from fermistar import tensors

LOG = logging.getLogger(__name__)


def _check(f, *tensors_):
    for tensor in tensors_:
        if tensor.m != f.m:
            raise exceptions.DimensionError(
                "%r does not match %d generators" % (tensor, f.m))


def _unit(m, nu):
    vector = np.zeros(m, dtype=complex)
    vector[nu] = 1.0
    return vector


def hbar_term(element, factor, power=1):
    """factor * hbar^power * element in either scalar mode."""
    return element.scale_hbar(power) * factor


def poisson_bracket(f, g, metric):
    """{f, g} = 1/2 q^{mu nu} d'_mu f ^ d_nu g."""
    f._check_compatible(g)
    _check(f, metric)
    total = f.zero_like()
    for nu in range(f.m):
        column = metric.qsharp[:, nu]
        if not np.any(column):
            continue
        left = sum((mv.signed_derivative(mu + 1, f) * column[mu]
                    for mu in np.flatnonzero(column)), f.zero_like())
        total = total + mv.wedge(left, mv.fermi_derivative(nu + 1, g)) * 0.5
    return total


def hamiltonian_field(f, metric):
    """Coefficients c^nu = q^{mu nu} d'_mu f of H_f = c^nu d_nu."""
    _check(f, metric)
    derivatives = [mv.signed_derivative(mu + 1, f) for mu in range(f.m)]
    field = []
    for nu in range(f.m):
        coeff = f.zero_like()
        for mu in np.flatnonzero(metric.qsharp[:, nu]):
            coeff = coeff + derivatives[mu] * metric.qsharp[mu, nu]
        field.append(coeff)
    return field


def apply_field(field, g):
    """sum_nu c^nu ^ d_nu g for a list of coefficient functions."""
    total = g.zero_like()
    for nu, coeff in enumerate(field):
        if not coeff.is_zero():
            total = total + mv.wedge(coeff, mv.fermi_derivative(nu + 1, g))
    return total


def apply_bidifferential(F, columns, factor, power=1, slot=0):
    """prod_nu (1 + factor hbar^power D_{columns[:, nu]} (x) d_nu) F.

    The first derivative acts on `slot`, the second on the next slot.
    """
    m = F.base_m
    for nu in range(m):
        column = columns[:, nu]
        if not np.any(column):
            continue
        step = F.slot_derivative(slot + 1, _unit(m, nu))
        step = step.slot_derivative(slot, column)
        F = F + hbar_term(step, factor, power)
    return F


def star_k(f, g, metric, bivector):
    """f *_K g = Delta^*(exp(-(hbar/4) Lambda d (x) d)(f (x) g))."""
    f._check_compatible(g)
    _check(f, metric, bivector)
    F = mv.tensor_embed(f, g)
    F = apply_bidifferential(F, bivector.lam(metric), -0.25)
    return mv.diagonal_pullback(F)


def moyal(f, g, metric):
    """The fermionic Moyal product *_0."""
    return star_k(f, g, metric, tensors.Bivector.zero(f.m))


def _homogeneous_parts(f):
    return [(degree, f.homogeneous(degree)) for degree in f.degrees()]


def star_k_direct(f, g, metric, bivector):
    """Independent nested-sum evaluation of f *_K g.

    Applies (-hbar/4)^r sum Lambda^{mu_1 nu_1} ... Lambda^{mu_r nu_r}
    (d_{mu_1} (x) d_{nu_1}) ... (d_{mu_r} (x) d_{nu_r}) to pairs (f_i, g_i)
    kept as separate Multivectors, with the Koszul sign (-1)^{|f_i|} of every
    pair operator written out. The pair operators commute and square to
    zero, so the sum runs over strictly increasing pairs and no 1/r! weight
    appears. Cost grows like m^(2r); meant for m <= 4.
    """
    f._check_compatible(g)
    _check(f, metric, bivector)
    lam = bivector.lam(metric)
    m = f.m
    result = mv.wedge(f, g)
    level = [(degree, part, g, 1.0, -1)
             for degree, part in _homogeneous_parts(f)]
    order = 0
    while level:
        order += 1
        following = []
        for degree, left, right, weight, last in level:
            sign = -1.0 if degree % 2 else 1.0
            for pair in range(last + 1, m * m):
                mu, nu = divmod(pair, m)
                if lam[mu, nu] == 0:
                    continue
                d_left = mv.fermi_derivative(mu + 1, left)
                if d_left.is_zero():
                    continue
                d_right = mv.fermi_derivative(nu + 1, right)
                if d_right.is_zero():
                    continue
                following.append((degree - 1, d_left, d_right,
                                  weight * sign * lam[mu, nu], pair))
        for _, left, right, weight, _ in following:
            term = mv.wedge(left, right) * weight
            result = result + hbar_term(term, (-0.25) ** order, order)
        level = following
    return result


def _second_order(f, columns, factor):
    """prod_nu (1 + factor hbar D_{columns[:, nu]} d_nu) f."""
    for nu in range(f.m):
        column = columns[:, nu]
        if not np.any(column):
            continue
        step = f.derivative(nu).derivative_along(column)
        f = f + hbar_term(step, factor)
    return f


def intertwiner(source, target, f):
    """U^O_{target, source} f = exp(-(hbar/8)(K' - K)^{mu nu} d_mu d_nu) f.

    Maps the *_source algebra onto the *_target algebra.
    """
    _check(f, source, target)
    return _second_order(f, target.K - source.K, -0.125)


def second_order_kernel(arr, m, columns, coeff, offset=0):
    """Numeric array form of intertwiner: prod_nu (1 + coeff D d_nu).

    `m` is the generator count of the arrays; the operator acts on the
    generators offset+1 .. offset+len(columns).
    """
    for nu in range(len(columns)):
        column = columns[:, nu]
        if not np.any(column):
            continue
        step = mv.derivative_kernel(arr, m, offset + nu)
        total = np.zeros_like(step)
        for mu in np.flatnonzero(column):
            total = total + column[mu] * mv.derivative_kernel(
                step, m, offset + mu)
        arr = arr + coeff * total
    return arr


def o_transport(path, f):
    """Parallel transport of f along a sequence of bivectors."""
    path = list(path)
    if not path:
        raise exceptions.DimensionError("o_transport needs a nonempty path")
    for source, target in zip(path, path[1:]):
        f = intertwiner(source, target, f)
    return f


def so_action_function(rotation, f):
    """gamma^O(f) = f o gamma^{-1}."""
    _check(f, rotation)
    return mv.linear_substitution(f, rotation.inverse_matrix)
