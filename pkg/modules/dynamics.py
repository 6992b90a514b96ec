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
# DESCRIPTION
#  The two forced oscillators the toolkit works on, their vector fields for
#  every control channel and the analytic partial derivatives used by the
#  switching controllers.
#

import math
from collections import namedtuple

import numpy as np

from errors import ChannelError, DomainError

SOFT_IMPACT = "SoftImpact"
DUFFING = "Duffing"

ADDITIVE_FORCE = "AdditiveForce"
FORCING_AMPLITUDE = "ForcingAmplitude"
GAP = "Gap"
CUBIC_STIFFNESS = "CubicStiffness"

CHANNELS = {
    SOFT_IMPACT: (ADDITIVE_FORCE, FORCING_AMPLITUDE, GAP),
    DUFFING: (CUBIC_STIFFNESS,),
}

# within this distance of x = e_eff the derivative uses the H=0 branch
SURFACE_TOL = 1e-12

ImpactParams = namedtuple('ImpactParams', 'zeta e a beta omega')
DuffingParams = namedtuple('DuffingParams', 'Gamma omega p1 p2')

PARAMS = {
    SOFT_IMPACT: ImpactParams,
    DUFFING: DuffingParams,
}

Partials = namedtuple('Partials', 'dF_du dF_dY dF_dtau on_surface')

def _check_params(kind, params):
    if not math.isfinite(params.omega) or params.omega <= 0:
        raise DomainError("omega must be > 0, got %r" % params.omega)
    if kind == SOFT_IMPACT:
        if not params.e > 0:
            raise DomainError("gap e must be > 0, got %r" % params.e)
        if not params.beta >= 0:
            raise DomainError("stiffness ratio beta must be >= 0, got %r" % params.beta)
    for name, value in params._asdict().items():
        if not math.isfinite(value):
            raise DomainError("parameter %s is not finite" % name)

class SystemDef(object):
    """
    A forced oscillator together with the channel through which the control
    enters it. Instances are immutable, with_param() and with_channel()
    return modified copies.
    """
    def __init__(self, kind, params, channel=None):
        if kind not in CHANNELS:
            raise DomainError("unknown system kind %s" % kind)
        if isinstance(params, dict):
            params = PARAMS[kind](**params)
        if channel is None:
            channel = CHANNELS[kind][0]
        if channel not in CHANNELS[kind]:
            raise ChannelError(channel, kind)
        params = PARAMS[kind](*[float(p) for p in params])
        _check_params(kind, params)

        self.kind = kind
        self.params = params
        self.channel = channel
        self.period = 2 * math.pi / params.omega
        super(SystemDef, self).__init__()

    def __repr__(self):
        return "SystemDef(%s, %r, %s)" % (self.kind, self.params, self.channel)

    def __eq__(self, other):
        return isinstance(other, SystemDef) and \
            (self.kind, self.params, self.channel) == \
            (other.kind, other.params, other.channel)

    def __hash__(self):
        return hash((self.kind, self.params, self.channel))

    @property
    def has_surface(self):
        return self.kind == SOFT_IMPACT and self.params.beta > 0

    def param(self, name):
        try:
            return getattr(self.params, name)
        except AttributeError:
            raise DomainError("%s has no parameter %s" % (self.kind, name))

    def with_param(self, name, value):
        if name not in self.params._fields:
            raise DomainError("%s has no parameter %s" % (self.kind, name))
        return SystemDef(self.kind, self.params._replace(**{name: value}),
                         self.channel)

    def with_channel(self, channel):
        return SystemDef(self.kind, self.params, channel)

    def gap(self, u):
        if self.channel == GAP:
            return self.params.e + u
        return self.params.e

    def acceleration(self, tau, x, v, u):
        """
        Second component of the vector field; accepts numpy arrays for every
        argument so many trajectories advance in lock-step.

        Unused channel terms enter as 0.0, which keeps the result bitwise
        identical across channels when u=0.
        """
        p = self.params
        if self.kind == DUFFING:
            return p.Gamma * np.sin(p.omega * tau) + x - p.p1 * v - \
                (p.p2 + u) * x**3

        u_lin = u if self.channel == ADDITIVE_FORCE else 0.0
        u_a = u if self.channel == FORCING_AMPLITUDE else 0.0
        u_e = u if self.channel == GAP else 0.0
        return ((p.a + u_a) * p.omega**2) * np.sin(p.omega * tau) + u_lin - x \
            - 2.0 * p.zeta * v - p.beta * np.maximum(x - (p.e + u_e), 0.0)

def eval_rhs(sys, tau, Y, u):
    if not math.isfinite(u):
        raise DomainError("control value is not finite")
    x, v = Y[0], Y[1]
    return np.array([v, sys.acceleration(tau, x, v, u)], dtype=float)

def rhs_partials(sys, tau, Y, u):
    """
    Analytic partials of the vector field at (tau, Y, u).

    The Heaviside factor is treated as locally constant. Within SURFACE_TOL
    of the switching surface the below-surface branch is used and the result
    is flagged on_surface.
    """
    x, v = float(Y[0]), float(Y[1])
    p = sys.params
    on_surface = False

    if sys.kind == DUFFING:
        k = p.p2 + u
        dF_dY = np.array([[0.0, 1.0], [1.0 - 3.0 * k * x * x, -p.p1]])
        dF_dtau = np.array([0.0, p.Gamma * p.omega * math.cos(p.omega * tau)])
        dF_du = np.array([0.0, -x**3])
        return Partials(dF_du, dF_dY, dF_dtau, on_surface)

    s = x - sys.gap(u)
    if abs(s) < SURFACE_TOL:
        on_surface = True
    H = 1.0 if s > SURFACE_TOL else 0.0

    a_eff = p.a + (u if sys.channel == FORCING_AMPLITUDE else 0.0)
    dF_dY = np.array([[0.0, 1.0], [-1.0 - p.beta * H, -2.0 * p.zeta]])
    dF_dtau = np.array([0.0, a_eff * p.omega**3 * math.cos(p.omega * tau)])
    if sys.channel == ADDITIVE_FORCE:
        dF_du = np.array([0.0, 1.0])
    elif sys.channel == FORCING_AMPLITUDE:
        dF_du = np.array([0.0, p.omega**2 * math.sin(p.omega * tau)])
    else:
        # d/du of -beta*(x - e - u)*H
        dF_du = np.array([0.0, p.beta * H])
    return Partials(dF_du, dF_dY, dF_dtau, on_surface)

def nondimensionalize(m, k1, k2, c, g, A, Omega, y0):
    for name, value in (("mass m", m), ("stiffness k1", k1), ("length y0", y0)):
        if not value > 0:
            raise DomainError("%s must be > 0, got %r" % (name, value))

    omega_n = math.sqrt(k1 / m)
    params = ImpactParams(zeta=c / (2.0 * m * omega_n),
                          e=g / y0,
                          a=A / y0,
                          beta=k2 / k1,
                          omega=Omega / omega_n)
    _check_params(SOFT_IMPACT, params)
    return params
