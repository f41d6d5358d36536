# Copyright (c) 2011-2015 Rackspace US, Inc.
#
# All Rights Reserved.
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.
"""Fermistar exceptions.

Every error raised by the package derives from FermistarException so that
callers (and the command line) can tell library failures apart from
programming errors.
"""

__all__ = (
    'FermistarException',
    'DimensionError',
    'ParityError',
    'FormalModeError',
    'InvalidTensor',
    'BasisError',
    'InvalidPolarization',
    'TangentError',
    'NotPolarized',
    'RefinementError',
    'SchemaError',
    'ConfigError',
    'UnknownOption',
)


class FermistarException(Exception):

    """Base exception for all exceptions raised by the fermistar package."""


class DimensionError(FermistarException):

    """Operands live in different algebras.

    Raised for mismatched generator counts, mismatched scalar modes (or
    mismatched values of hbar) and generator indices out of range.
    """


class ParityError(FermistarException):

    """An operation restricted to even elements received odd terms."""


class FormalModeError(FermistarException):

    """The operation needs a numeric value of hbar."""


class InvalidTensor(FermistarException):

    """A metric, bivector, rotation or complex structure is malformed."""

    def __init__(self, kind, reason, residual=None):
        """Customize Exception Constructor."""
        super(InvalidTensor, self).__init__(kind, reason)
        self.kind = kind
        self.reason = reason
        self.residual = residual

    def __str__(self):
        """Include custom data in string."""
        if self.residual is None:
            return "Invalid %s: %s" % (self.kind, self.reason)
        return ("Invalid %s: %s (residual %.3g)"
                % (self.kind, self.reason, self.residual))


class BasisError(FermistarException):

    """A kernel formula was used outside the orthonormal gauge."""


class InvalidPolarization(FermistarException):

    """A matrix does not define a polarisation."""


class TangentError(FermistarException):

    """A matrix is not tangent to the space of polarisations."""

    def __init__(self, constraint, residual):
        """Customize Exception Constructor."""
        super(TangentError, self).__init__(constraint, residual)
        self.constraint = constraint
        self.residual = residual

    def __str__(self):
        """Include custom data in string."""
        return ("Tangent constraint '%s' violated (residual %.3g)"
                % (self.constraint, self.residual))


class NotPolarized(FermistarException):

    """A section is not covariantly constant along the kernel of P."""


class RefinementError(FermistarException):

    """A path integration needs a finer step.

    The step index is stored in the `step` attribute.
    """

    def __init__(self, message, step=None):
        """Customize Exception Constructor."""
        super(RefinementError, self).__init__(message)
        self.message = message
        self.step = step

    def __str__(self):
        """Include custom data in string."""
        if self.step is None:
            return self.message
        return "%s (at step %d)" % (self.message, self.step)


class SchemaError(FermistarException):

    """A JSON document does not match the expected schema.

    `path` holds the location of the offending element.
    """

    def __init__(self, message, path=None):
        """Customize Exception Constructor."""
        super(SchemaError, self).__init__(message)
        self.message = message
        self.path = list(path or [])

    @property
    def location(self):
        """Render the path as `terms[2].mask`."""
        rendered = ''
        for part in self.path:
            if isinstance(part, int):
                rendered += '[%d]' % part
            else:
                rendered += ('.%s' % part) if rendered else str(part)
        return rendered or '<document>'

    def __str__(self):
        """Include custom data in string."""
        return "%s @ %s" % (self.message, self.location)


class ConfigError(FermistarException):

    """Errors raised by fermistar/config."""


class UnknownOption(ConfigError):

    """An option defined in the specified source has no match.

    For example, a specified ini file has an option with no corresponding
    config.Option.
    """
