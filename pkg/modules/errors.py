#!/usr/bin/env python
# vim: set ts=4 sw=4 et:
#
# This program is free software; you can redistribute it and/or
# modify it under the terms of the GNU General Public License
# as published by the Free Software Foundation; either version 2
# of the License, or (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA  02110-1301, USA.
#

def _rebuild(cls, state):
    e = Exception.__new__(cls)
    e.__dict__.update(state)
    return e

class Error(Exception):
    status = 3

    def __init__(self, message=None, detail=None):
        super(Error, self).__init__(message)
        self.message = message
        self.detail = detail

    # subclasses take their own arguments, pickle by state for worker pools
    def __reduce__(self):
        return (_rebuild, (self.__class__, self.__dict__.copy()))

    def __str__(self):
        return "Failed(other errors)"

class ConfigError(Error):
    """ Scenario could not be built from its configuration """
    status = 2

    def __str__(self):
        return "Failed(config)"

class ParseError(ConfigError):
    def __init__(self, source, lineno, colno, line):
        super(ParseError, self).__init__("%s:%d:%d: cannot parse %r"
                % (source, lineno, colno, line))
        self.lineno = lineno
        self.colno = colno

    def __str__(self):
        return "Failed(parse)"

class MissingKeyError(ConfigError):
    def __init__(self, section, key):
        super(MissingKeyError, self).__init__("missing key '%s' in section [%s]"
                % (key, section))
        self.section = section
        self.key = key

    def __str__(self):
        return "Failed(missing %s)" % self.key

class UnknownKeyError(ConfigError):
    def __init__(self, section, key=None):
        if key is None:
            msg = "unknown section [%s]" % section
        else:
            msg = "unknown key '%s' in section [%s]" % (key, section)
        super(UnknownKeyError, self).__init__(msg)
        self.section = section
        self.key = key

    def __str__(self):
        return "Failed(unknown %s)" % (self.key or self.section)

class ChannelError(ConfigError):
    def __init__(self, channel, kind):
        super(ChannelError, self).__init__("control channel %s does not apply to %s"
                % (channel, kind))
        self.channel = channel
        self.kind = kind

    def __str__(self):
        return "Failed(channel)"

class DomainError(ConfigError):
    def __str__(self):
        return "Failed(domain)"

class NumericalError(Error):
    """ A numerical operation could not deliver its result """
    def __str__(self):
        return "Failed(numerics)"

class IntegrationDivergedError(NumericalError):
    def __init__(self, tau, state):
        super(IntegrationDivergedError, self).__init__(
                "integration diverged after tau=%.17g" % tau, state)
        self.tau = tau
        self.state = state

    def __str__(self):
        return "Failed(integrate)"

class EventLocalizationError(NumericalError):
    def __init__(self, iterations):
        super(EventLocalizationError, self).__init__(
                "surface crossing not localized in %d iterations" % iterations)

    def __str__(self):
        return "Failed(event)"

class NoOrbitError(NumericalError):
    def __init__(self, residual, iterations):
        super(NoOrbitError, self).__init__(
                "Newton did not converge in %d iterations (residual %.3g)"
                % (iterations, residual))
        self.residual = residual
        self.iterations = iterations

    def __str__(self):
        return "Failed(shoot)"

class BracketError(NumericalError):
    def __init__(self, f_lo, f_hi):
        super(BracketError, self).__init__(
                "indicator does not change sign (%.6g, %.6g)" % (f_lo, f_hi))

    def __str__(self):
        return "Failed(bracket)"

class OrbitClosureError(NumericalError):
    def __init__(self, closure):
        super(OrbitClosureError, self).__init__(
                "target orbit does not close (error %.3g)" % closure)
        self.closure = closure

    def __str__(self):
        return "Failed(orbit table)"

class AttractorNotFoundError(NumericalError):
    def __init__(self, name, known):
        super(AttractorNotFoundError, self).__init__(
                "attractor %s not found, have: %s" % (name, " ".join(known) or "none"))
        self.name = name

    def __str__(self):
        return "Failed(attractor %s)" % self.name
