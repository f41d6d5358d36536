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

"""Parallel transport of polarised states.

Along P(t) a state moves by

    d psi / dt = (hbar/4) (P Pdot q# P^T)^{mu nu} nabla_mu nabla_nu psi

(the projectively flat connection nabla^H). The metaplectic correction
transports an image frame by v' = Pdot v alongside and multiplies the state
by the continuously tracked square root of det(C^dagger q V), C the
reference frame of the endpoint, normalised to the given root at the start.

The factor multiplies; it is not inverted. A half-form written against the
transported frame V carries det(C^dagger q V)^(-1/2) relative to the
reference frame, so expressing the state in the reference frame brings in
the positive power.
"""

import cmath
import logging

import numpy as np
from scipy import linalg

from fermistar import exceptions
from fermistar import polarization as pol
from fermistar import sections

LOG = logging.getLogger(__name__)

DEFAULT_STEPS = 200
HALVING_TOLERANCE = 1e-8


class TransportResult(object):

    """Outcome of a transport.

    `metaplectic_phase` is the correction factor (1 without correction);
    it has modulus one along paths inside the complex structures.
    """

    def __init__(self, state, endpoint, steps, metaplectic_phase=1.0,
                 residual=0.0, halving_residual=None):
        self.state = state
        self.endpoint = endpoint
        self.steps = steps
        self.metaplectic_phase = complex(metaplectic_phase)
        self.residual = residual
        self.halving_residual = halving_residual

    def __repr__(self):
        return ('TransportResult(steps=%d, phase=%s, residual=%.3g)'
                % (self.steps, self.metaplectic_phase, self.residual))


def _segments(path):
    if isinstance(path, pol.ConjugationPath):
        return [path]
    segments = list(path)
    if not segments:
        raise exceptions.DimensionError("transport needs a nonempty path")
    return segments


def generator_matrix(segment, t, packed):
    """Matrix of (hbar/4) (P Pdot q# P^T)^{mu nu} nabla_mu nabla_nu at t."""
    P = segment.projection(t)
    velocity = segment.velocity(t)
    qsharp = segment.base.metric.qsharp
    A = np.dot(P, np.dot(velocity, np.dot(qsharp, P.T)))
    hbar = packed['hbar']
    combined = np.einsum('mn,nij->mij', A, packed['nabla'])
    return 0.25 * hbar * np.einsum('mij,mjk->ik', packed['nabla'],
                                   combined)


def connection(metric, hbar):
    """Matrices of nabla_mu packed for generator_matrix."""
    return {'hbar': hbar,
            'nabla': sections.connection_matrices(metric, hbar)}


def _rk4(field, y, t, h):
    k1 = field(t, y)
    k2 = field(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = field(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = field(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _integrate_segment(segment, coeffs, steps, packed):
    cache = {}

    def field(t, y):
        if t not in cache:
            cache[t] = generator_matrix(segment, t, packed)
        return np.dot(cache[t], y)

    h = 1.0 / steps
    for k in range(steps):
        coeffs = _rk4(field, coeffs, k * h, h)
    return coeffs


def _integrate(segments, coeffs, steps, packed):
    for index, segment in enumerate(segments):
        coeffs = _integrate_segment(segment, coeffs, steps, packed)
        LOG.debug("Transported across segment %d", index,
                  extra={'data': {'steps': steps,
                                  'norm': float(np.linalg.norm(coeffs))}})
    return coeffs


def h_transport(path, state, steps=DEFAULT_STEPS, check=True):
    """Transport a polarised state along ConjugationPath segments.

    :param path: a ConjugationPath or a sequence of them
    :param state: PolarizedState (or Section) polarised at the path start
    :param steps: RK4 steps per segment
    :param check: also integrate with half the steps and warn on mismatch
    :raises NotPolarized: when the state is not in H_P at the start
    """
    segments = _segments(path)
    start = segments[0].at(0.0)
    section = sections.as_section(state, start.metric)
    residual = sections.polarization_residual(section, start)
    if residual > sections.POLARIZATION_TOLERANCE:
        raise exceptions.NotPolarized(
            "transport input is not polarised at the path start "
            "(residual %.3g)" % residual)
    packed = connection(start.metric, section.hbar)
    coeffs = _integrate(segments, section.coeffs, steps, packed)
    halving = None
    if check and steps >= 4:
        coarse = _integrate(segments, section.coeffs, steps // 2, packed)
        halving = float(np.max(np.abs(coarse - coeffs)))
        scale = max(1.0, float(np.max(np.abs(coeffs))))
        if halving > HALVING_TOLERANCE * scale:
            LOG.warning("Step-halving check disagrees by %.3g; refine the "
                        "path or raise --steps", halving,
                        extra={'data': {'steps': steps, 'scale': scale}})
    endpoint = segments[-1].at(1.0)
    result = sections.Section(section.m, coeffs, hbar=section.hbar,
                              metric=section.metric)
    return TransportResult(
        result, endpoint, steps,
        residual=sections.polarization_residual(result, endpoint),
        halving_residual=halving)


def reference_frame(P, basis, metric):
    """C(P): q-orthonormalised QR of P B with positive real R diagonal."""
    frame = metric.orthonormal_frame()
    Q, R = linalg.qr(np.dot(frame, np.dot(P, basis)), mode='economic')
    diagonal = np.diag(R)
    if np.min(np.abs(diagonal)) < 1e-10:
        raise exceptions.RefinementError(
            "reference frame degenerates (P B loses rank)")
    Q = Q * (diagonal / np.abs(diagonal))
    return linalg.solve(frame, Q)


def frame_determinant(P, frame, basis, metric):
    """det(C(P)^dagger q V)."""
    reference = reference_frame(P, basis, metric)
    return complex(linalg.det(np.dot(np.conj(reference).T,
                                     np.dot(metric.q, frame))))


class _RootTracker(object):

    """Continuous square root of a sampled determinant."""

    def __init__(self, value, root=1.0):
        self.value = complex(value)
        self.root = complex(root)
        self.step = 0

    def advance(self, value):
        value = complex(value)
        self.step += 1
        if abs(value) < 1e-300:
            raise exceptions.RefinementError("frame determinant vanished",
                                             self.step)
        ratio = value / self.value
        if abs(cmath.phase(ratio)) > np.pi / 2:
            raise exceptions.RefinementError(
                "square-root branch jumps by more than pi/2", self.step)
        self.root *= cmath.sqrt(ratio)
        self.value = value


def _transport_frame(segment, frame, steps, tracker, basis, metric):
    def field(t, v):
        return np.dot(segment.velocity(t), v)

    h = 1.0 / steps
    for k in range(steps):
        frame = _rk4(field, frame, k * h, h)
        tracker.advance(frame_determinant(segment.projection((k + 1) * h),
                                          frame, basis, metric))
    return frame


def metaplectic_transport(path, state, steps=DEFAULT_STEPS, frame=None,
                          root=1.0, basis=None, check=True):
    """h_transport followed by the half-form correction.

    :param frame: initial image frame (default: C(P_0))
    :param root: square root already accumulated before the path
    :param basis: vectors B defining the reference frames C(P) = qr(P B)
    """
    segments = _segments(path)
    transported = h_transport(segments, state, steps, check=check)
    start = segments[0].at(0.0)
    metric = start.metric
    if basis is None:
        basis = start.image_frame
    if frame is None:
        frame = reference_frame(start.P, basis, metric)
    tracker = _RootTracker(frame_determinant(start.P, frame, basis, metric),
                           root)
    for segment in segments:
        frame = _transport_frame(segment, frame, steps, tracker, basis,
                                 metric)
    phase = tracker.root
    section = transported.state * phase
    LOG.debug("Metaplectic correction applied",
              extra={'data': {'factor': phase, 'steps': tracker.step}})
    return TransportResult(section, transported.endpoint, steps,
                           metaplectic_phase=phase,
                           residual=transported.residual,
                           halving_residual=transported.halving_residual)


def holonomy_matrix(segments, hbar, steps=DEFAULT_STEPS, metaplectic=False):
    """Matrix of transport around a closed path on the basis of H_P."""
    segments = _segments(segments)
    start = segments[0].at(0.0)
    basis = sections.polarized_basis(start, hbar)
    transport = metaplectic_transport if metaplectic else h_transport
    columns = []
    for state in basis:
        result = transport(segments, state, steps, check=False)
        columns.append(sections.basis_coordinates(result.state, basis))
    return np.array(columns).T


def square_loop(polarization, first, second, delta):
    """Four segments around the square of side delta centred on P.

    Corners are (s, t) = (+-delta/2, +-delta/2) in the plane s X_1 + t X_2,
    visited counter-clockwise from (-delta/2, -delta/2).
    """
    half = 0.5 * delta
    first = np.asarray(first, dtype=complex)
    second = np.asarray(second, dtype=complex)
    corners = [-half * first - half * second, half * first - half * second,
               half * first + half * second, -half * first + half * second]
    return pol.loop_segments(polarization, corners)


def expected_holonomy(polarization, first, second, delta):
    """exp(-delta^2 F^H(d_1, d_2)) with d_i = [X_i, P]."""
    P = polarization.P
    d1 = np.dot(first, P) - np.dot(P, first)
    d2 = np.dot(second, P) - np.dot(P, second)
    return np.exp(-delta ** 2 * pol.section_curvature(polarization, d1, d2))


def group_leg_root(polarization, rotation, steps=DEFAULT_STEPS):
    """Square root of det(C(gamma P gamma^-1)^dagger q gamma C(P)).

    The branch follows s -> exp(s Y) from the identity, Y the generator
    recorded on the rotation (or its principal logarithm).
    """
    metric = polarization.metric
    basis = polarization.image_frame
    generator = np.asarray(rotation.log(), dtype=complex)
    frame = reference_frame(polarization.P, basis, metric)
    tracker = _RootTracker(1.0)
    moved = frame
    for k in range(1, steps + 1):
        group = linalg.expm(generator * (float(k) / steps))
        moved = np.dot(group, frame)
        projection = np.dot(group, np.dot(polarization.P,
                                          linalg.inv(group)))
        tracker.advance(frame_determinant(projection, moved, basis, metric))
    return tracker.root, moved


def rho_matrix(polarization, rotation, hbar, steps=DEFAULT_STEPS,
               metaplectic=False):
    """rho_P(gamma) (or its corrected version) on the basis of H_P.

    gamma^H moves a state to H_{gamma P gamma^-1}; transport along
    exp((1 - t) log gamma) P exp(-(1 - t) log gamma) brings it back.
    """
    basis = sections.polarized_basis(polarization, hbar)
    generator = np.asarray(rotation.log(), dtype=complex)
    path = pol.ConjugationPath(polarization, generator, None)
    root, frame = (None, None)
    if metaplectic:
        root, frame = group_leg_root(polarization, rotation, steps)
    columns = []
    for state in basis:
        moved = sections.so_action_section(rotation, state.section)
        if metaplectic:
            result = metaplectic_transport(
                path, moved, steps, frame=frame, root=root,
                basis=polarization.image_frame, check=False)
        else:
            result = h_transport(path, moved, steps, check=False)
        columns.append(sections.basis_coordinates(result.state, basis))
    return np.array(columns).T
