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
#  Fixed-step classical Runge-Kutta integration with localization of the
#  crossings of the impact surface x = e_eff. The batch routines advance
#  numpy arrays of states in lock-step; the scalar ones are thin wrappers.
#

import math
from collections import namedtuple

import numpy as np

from logging import debug as D

from errors import DomainError, EventLocalizationError, IntegrationDivergedError

DEFAULT_H = 0.002

class StepSpec(namedtuple('StepSpec', 'h surface_tol max_bisect')):
    __slots__ = ()

    def __new__(cls, h=DEFAULT_H, surface_tol=1e-10, max_bisect=80):
        if not h > 0:
            raise DomainError("step size h must be > 0, got %r" % h)
        if not surface_tol > 0:
            raise DomainError("surface_tol must be > 0, got %r" % surface_tol)
        if int(max_bisect) < 1:
            raise DomainError("max_bisect must be >= 1, got %r" % max_bisect)
        return super(StepSpec, cls).__new__(cls, float(h), float(surface_tol),
                                            int(max_bisect))

Crossings = namedtuple('Crossings', 'index theta x v entering')

OrbitMeasures = namedtuple('OrbitMeasures',
                           'impacts contact_time peak_to_peak max_x maxima')

class Trajectory(object):
    def __init__(self, times, states, controls):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float).reshape(-1, 2)
        self.controls = np.asarray(controls, dtype=float)
        if not len(self.times) == len(self.states) == len(self.controls):
            raise DomainError("trajectory columns differ in length")
        for a in (self.times, self.states, self.controls):
            a.setflags(write=False)

    def __len__(self):
        return len(self.times)

    @property
    def final(self):
        return self.states[-1].copy()

    def rows(self):
        for t, (x, v), u in zip(self.times, self.states, self.controls):
            yield (t, x, v, u)

def time_grid(tau0, tau1, h):
    """ (tau, dt) pairs covering [tau0, tau1]; the last step may be shorter. """
    n = int(math.floor((tau1 - tau0) / h + 1e-9))
    for k in range(n):
        yield tau0 + k * h, h
    rest = tau1 - (tau0 + n * h)
    if rest > 1e-9 * h:
        yield tau0 + n * h, rest

def _rk4(sys, tau, x, v, u, h):
    k1x = v
    k1v = sys.acceleration(tau, x, v, u)
    k2x = v + 0.5 * h * k1v
    k2v = sys.acceleration(tau + 0.5 * h, x + 0.5 * h * k1x, k2x, u)
    k3x = v + 0.5 * h * k2v
    k3v = sys.acceleration(tau + 0.5 * h, x + 0.5 * h * k2x, k3x, u)
    k4x = v + h * k3v
    k4v = sys.acceleration(tau + h, x + h * k3x, k4x, u)
    return (x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v))

def _take(a, index):
    if np.ndim(a) == 0:
        return a
    return a[index]

def _locate(fn, width, f_lo, f_hi, tol, max_iter):
    """
    Root of fn on [0, width] for every entry of a batch, given the sign
    change f_lo/f_hi at the ends. Regula falsi with the Illinois
    modification, falling back to bisection when the secant point leaves
    the bracket.
    """
    f_lo = np.array(f_lo, dtype=float)
    f_hi = np.array(f_hi, dtype=float)
    lo = np.zeros_like(f_lo)
    hi = np.zeros_like(f_lo) + width
    theta = 0.5 * (lo + hi)
    side = np.zeros(f_lo.shape, dtype=int)
    done = np.zeros(f_lo.shape, dtype=bool)

    for it in range(max_iter):
        with np.errstate(divide='ignore', invalid='ignore'):
            trial = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        inside = (trial > lo) & (trial < hi)
        trial = np.where(inside, trial, 0.5 * (lo + hi))
        theta = np.where(done, theta, trial)

        f = fn(theta)
        done = done | (np.abs(f) <= tol) | ((hi - lo) <= tol)
        if done.all():
            return theta

        same = (f > 0) == (f_lo > 0)
        move_lo = same & ~done
        move_hi = ~same & ~done
        f_hi = np.where(move_lo & (side == 1), 0.5 * f_hi, f_hi)
        f_lo = np.where(move_hi & (side == -1), 0.5 * f_lo, f_lo)
        lo = np.where(move_lo, theta, lo)
        f_lo = np.where(move_lo, f, f_lo)
        hi = np.where(move_hi, theta, hi)
        f_hi = np.where(move_hi, f, f_hi)
        side = np.where(move_lo, 1, np.where(move_hi, -1, side))

    raise EventLocalizationError(max_iter)

def advance(sys, tau, x, v, u, h, spec, crossings=False):
    """
    One step for a batch of states, holding u over the step. A step in which
    s = x - e_eff changes sign is split at the localized crossing so the
    Heaviside branch is constant on each part.

    Returns (x, v), or (x, v, Crossings) when crossings is set.
    """
    xn, vn = _rk4(sys, tau, x, v, u, h)
    hits = None

    if sys.has_surface:
        e = sys.gap(u)
        s0 = x - e
        s1 = xn - e
        cross = (s0 > 0) != (s1 > 0)
        if cross.any():
            i = np.flatnonzero(cross)
            ti, xi, vi, ui, hi, ei = [_take(a, i) for a in (tau, x, v, u, h, e)]

            def surface(theta):
                xm, _ = _rk4(sys, ti, xi, vi, ui, theta)
                return xm - ei

            theta = _locate(surface, hi, s0[i], s1[i], spec.surface_tol,
                            spec.max_bisect)
            xm, vm = _rk4(sys, ti, xi, vi, ui, theta)
            xr, vr = _rk4(sys, ti + theta, xm, vm, ui, hi - theta)
            xn[i] = xr
            vn[i] = vr
            if crossings:
                hits = Crossings(i, theta, xm, vm, s0[i] <= 0)

    if not (np.isfinite(xn).all() and np.isfinite(vn).all()):
        bad = np.flatnonzero(~(np.isfinite(xn) & np.isfinite(vn)))[0]
        raise IntegrationDivergedError(float(_take(tau, bad)),
                                       (float(x[bad]), float(v[bad])))
    if crossings:
        return xn, vn, hits
    return xn, vn

def rk4_step(sys, tau, Y, u, h):
    """ Plain classical step, no event handling. """
    if not h > 0:
        raise DomainError("step size h must be > 0, got %r" % h)
    x, v = _rk4(sys, tau, np.array([float(Y[0])]), np.array([float(Y[1])]), u, h)
    if not (np.isfinite(x[0]) and np.isfinite(v[0])):
        raise IntegrationDivergedError(tau, (float(Y[0]), float(Y[1])))
    return np.array([x[0], v[0]])

def event_step(sys, tau, Y, u, h, spec):
    x, v = advance(sys, tau, np.array([float(Y[0])]), np.array([float(Y[1])]),
                   u, h, spec)
    return np.array([x[0], v[0]])

def integrate(sys, Y0, tau0, tau1, spec, control=None):
    """
    Integrate from (tau0, Y0) to tau1 with step spec.h. control maps the
    start time of each step to the value held over it; None means u=0.
    """
    if not tau1 > tau0:
        raise DomainError("tau1 must be > tau0")

    x = np.array([float(Y0[0])])
    v = np.array([float(Y0[1])])
    times = [tau0]
    states = [(x[0], v[0])]
    controls = []
    for tau, dt in time_grid(tau0, tau1, spec.h):
        u = 0.0 if control is None else float(control(tau))
        x, v = advance(sys, tau, x, v, u, dt, spec)
        controls.append(u)
        times.append(tau + dt)
        states.append((x[0], v[0]))
    controls.append(controls[-1])

    return Trajectory(times, states, controls)

def integrate_batch(sys, x, v, tau0, n_steps, h, spec, u=0.0):
    """ Advance arrays of states n_steps steps of length h from tau0. """
    x = np.array(x, dtype=float)
    v = np.array(v, dtype=float)
    for k in range(n_steps):
        x, v = advance(sys, tau0 + k * h, x, v, u, h, spec)
    return x, v

def _extremum(sys, tau, x, v, dt, vn, spec, maxima, minima):
    if (v[0] > 0) == (vn[0] > 0):
        return

    def velocity(theta):
        return _rk4(sys, tau, x, v, 0.0, theta)[1]

    theta = _locate(velocity, dt, v, vn, spec.surface_tol, spec.max_bisect)
    xm, _ = _rk4(sys, tau, x, v, 0.0, theta)
    if v[0] > 0:
        maxima.append(float(xm[0]))
    else:
        minima.append(float(xm[0]))

def measure_orbit(sys, Y0, tau0, tau1, h, spec):
    """
    Integrate uncontrolled over [tau0, tau1] and report surface entries,
    time spent beyond the surface, peak-to-peak amplitude and the localized
    local maxima of x (sorted, largest first).
    """
    x = np.array([float(Y0[0])])
    v = np.array([float(Y0[1])])
    impacts = 0
    contact = 0.0
    maxima = []
    minima = []
    lo = hi = x[0]
    e = sys.params.e if sys.has_surface else None

    for tau, dt in time_grid(tau0, tau1, h):
        xn, vn, hits = advance(sys, tau, x, v, 0.0, dt, spec, crossings=True)
        if hits is not None:
            theta = float(hits.theta[0])
            if hits.entering[0]:
                impacts += 1
                contact += dt - theta
            else:
                contact += theta
            _extremum(sys, tau, x, v, theta, hits.v, spec, maxima, minima)
            _extremum(sys, tau + theta, hits.x, hits.v, dt - theta, vn, spec,
                      maxima, minima)
        else:
            if e is not None and x[0] > e:
                contact += dt
            _extremum(sys, tau, x, v, dt, vn, spec, maxima, minima)
        x, v = xn, vn
        lo = min(lo, x[0])
        hi = max(hi, x[0])

    maxima.sort(reverse=True)
    top = max([hi] + maxima)
    bottom = min([lo] + minima)
    D("measure_orbit: impacts=%d contact=%.6g maxima=%d" % (impacts, contact, len(maxima)))
    return OrbitMeasures(impacts, contact, top - bottom, top, tuple(maxima))
