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
#  Distance-reducing feedback that moves a trajectory from one coexisting
#  attractor to another through a bounded control input: the additive
#  force law and the parametric law, feasible-rate selection under the
#  amplitude and rate bounds, and one-step expansion bookkeeping.
#

import math
from collections import namedtuple

import numpy as np

from logging import debug as D
from logging import info as I

from errors import DomainError, OrbitClosureError
from dynamics import ADDITIVE_FORCE, eval_rhs, rhs_partials
from integrator import StepSpec, event_step, time_grid
from continuation import shoot

ENGAGE_PERIODS = 80
EPSILON = 1e-3
DEG_TOL = 1e-9
MAX_PERIODS = 200
VERIFY_PERIODS = 50
TRACE_EVERY = 10
CLOSURE_TOL = 1e-6

class ControlBounds(namedtuple('ControlBounds', 'M1 M2')):
    __slots__ = ()

    def __new__(cls, M1, M2):
        if not (M1 > 0 and M2 > 0):
            raise DomainError("control bounds must be > 0, got M1=%r M2=%r" % (M1, M2))
        return super(ControlBounds, cls).__new__(cls, float(M1), float(M2))

def distance(Y_d, Y_u):
    d = np.asarray(Y_d, dtype=float) - np.asarray(Y_u, dtype=float)
    return float(d @ d)

class StepCondition(object):
    """
    One-step condition coef * udot >= rhs on the control rate. The
    truncated prediction of the change of Delta over the step is
    h * (rhs - coef * udot).
    """
    def __init__(self, coef, rhs, h, deg_tol=DEG_TOL):
        self.coef = float(coef)
        self.rhs = float(rhs)
        self.h = h
        self.degenerate = abs(self.coef) <= deg_tol * h

    def __repr__(self):
        if self.degenerate:
            return "StepCondition(degenerate)"
        return "StepCondition(%s)" % (self.interval(),)

    def interval(self):
        if self.degenerate:
            return None
        bound = self.rhs / self.coef
        if self.coef > 0:
            return (bound, math.inf)
        return (-math.inf, bound)

    def feasible(self, rate):
        return not self.degenerate and self.coef * rate >= self.rhs

    def predicted_change(self, rate):
        return self.h * (self.rhs - self.coef * rate)

    @property
    def decreasing(self):
        return self.predicted_change(0.0) < 0

def feasible_rate_linear(d, F_d, F_u, U, h, deg_tol=DEG_TOL):
    """ F_u is the uncontrolled field at Y_u, U = (0, u) the control term. """
    G = np.asarray(F_d) - np.asarray(F_u) - np.asarray(U)
    d = np.asarray(d, dtype=float)
    rhs = 2.0 * (d @ G) + (G @ G) * h
    return StepCondition(d[1] * h, rhs, h, deg_tol)

def feasible_rate_parametric(d, F_d, F_u, partials, Y_u_dot, h, literal=False,
                             deg_tol=DEG_TOL):
    """
    Condition for a parametric channel. The state coupling term is
    <d, dF/dY . Ydot_u>; literal=True uses <d, dF/dx> instead.
    """
    d = np.asarray(d, dtype=float)
    G = np.asarray(F_d) - np.asarray(F_u)
    if literal:
        coupling = d @ partials.dF_dY[:, 0]
    else:
        coupling = d @ (partials.dF_dY @ np.asarray(Y_u_dot))
    rhs = 2.0 * (d @ G) - (d @ partials.dF_dtau) * h + (G @ G) * h - coupling * h
    return StepCondition((d @ partials.dF_du) * h, rhs, h, deg_tol)

def select_rate(condition, bounds, u, h, delta_decreasing=False):
    """
    Smallest |udot| in the feasible set that keeps |udot| <= M2 and
    |u + udot*h| <= M1; the attainable rate closest to the feasible set
    when there is none.
    """
    if delta_decreasing or condition.degenerate:
        return 0.0

    box_lo = max(-bounds.M2, (-bounds.M1 - u) / h)
    box_hi = min(bounds.M2, (bounds.M1 - u) / h)
    lo, hi = condition.interval()
    lo, hi = max(lo, box_lo), min(hi, box_hi)
    if lo <= hi:
        if lo <= 0.0 <= hi:
            return 0.0
        return lo if lo > 0 else hi

    if condition.interval()[1] < box_lo:
        return box_lo
    return box_hi

class OrbitTable(object):
    """
    The target orbit sampled every h from its anchor at tau_ref. at() gives
    the target at any time from the preceding sample and one sub-step.
    """
    def __init__(self, sys, anchor, p, h, spec=None, tau_ref=0.0, polish=True,
                 closure_tol=CLOSURE_TOL):
        self.system = sys
        self.p = p
        self.h = h
        self.tau_ref = tau_ref
        self.span = p * sys.period
        self.spec = StepSpec(h) if spec is None else StepSpec(h, spec.surface_tol,
                                                              spec.max_bisect)
        if polish:
            steps = int(math.ceil(sys.period / h))
            anchor = shoot(sys, anchor, p, steps_per_period=steps, spec=self.spec,
                           measure=False).anchor

        grid = list(time_grid(tau_ref, tau_ref + self.span, h))
        self.samples = np.empty((len(grid), 2))
        Y = np.array(anchor, dtype=float)
        for k, (tau, dt) in enumerate(grid):
            self.samples[k] = Y
            Y = event_step(sys, tau, Y, 0.0, dt, self.spec)

        self.closure = float(np.linalg.norm(Y - self.samples[0]))
        D("OrbitTable: p=%d, %d samples, closure %.3g" % (p, len(grid), self.closure))
        if not self.closure < closure_tol:
            raise OrbitClosureError(self.closure)

    def __len__(self):
        return len(self.samples)

    def at(self, tau):
        phase = math.fmod(tau - self.tau_ref, self.span)
        if phase < 0:
            phase += self.span
        k = min(int(phase // self.h), len(self.samples) - 1)
        dt = phase - k * self.h
        if dt <= 1e-12 * self.h:
            return self.samples[k].copy()
        return event_step(self.system, self.tau_ref + k * self.h, self.samples[k],
                          0.0, dt, self.spec)

StepRecord = namedtuple('StepRecord', 'tau u delta rate lower upper predicted residual')

class ControllerState(object):
    def __init__(self, bounds, epsilon=EPSILON):
        self.u = 0.0
        self.active = False
        self.bounds = bounds
        self.epsilon = epsilon
        self.tau_engaged = None
        self.tau_off = None
        self.delta_engaged = None
        self.delta_off = None
        self.history = []

    def record(self, *args):
        self.history.append(StepRecord(*args))

def step_expansion(sys, tau, Y_u, Y_d, u, h):
    """
    Second-order Taylor prediction of Delta(tau+h) - Delta(tau) with the
    control held at u and the target uncontrolled.
    """
    d = np.asarray(Y_d) - np.asarray(Y_u)
    F_d = eval_rhs(sys, tau, Y_d, 0.0)
    F_u = eval_rhs(sys, tau, Y_u, u)
    P_d = rhs_partials(sys, tau, Y_d, 0.0)
    P_u = rhs_partials(sys, tau, Y_u, u)
    G = F_d - F_u
    G_dot = (P_d.dF_dtau + P_d.dF_dY @ F_d) - (P_u.dF_dtau + P_u.dF_dY @ F_u)
    return 2.0 * (d @ G) * h + ((G @ G) + (d @ G_dot)) * h * h

def step_residual(sys, target, tau, Y_u, u, h, spec):
    """ |actual change of Delta over one step - step_expansion|. """
    Y_d = target.at(tau)
    Y_next = event_step(sys, tau, Y_u, u, h, spec)
    actual = distance(target.at(tau + h), Y_next) - distance(Y_d, Y_u)
    return abs(actual - step_expansion(sys, tau, Y_u, Y_d, u, h))

class _Trace(object):
    def __init__(self, every):
        self.every = max(1, int(every))
        self.rows = []
        self.count = 0

    def add(self, tau, Y, u, delta_fn, force=False):
        if force or self.count % self.every == 0:
            self.rows.append((tau, Y[0], Y[1], u, math.sqrt(delta_fn())))
        self.count += 1

class SwitchResult(object):
    def __init__(self, success, state, tau_engage, period, trace, max_verify):
        self.success = success
        self.converged = state.tau_off is not None
        self.tau_engaged = tau_engage
        self.tau_off = state.tau_off
        self.periods_to_converge = None
        if self.converged:
            self.periods_to_converge = (state.tau_off - tau_engage) / period
        us = [abs(r.u) for r in state.history]
        self.max_abs_u = max(us) if us else 0.0
        self.max_verify = max_verify
        self.trace = trace
        self.state = state

    def __repr__(self):
        return "SwitchResult(success=%s, tau_off=%s)" % (self.success, self.tau_off)

    def to_dict(self):
        return {'success': self.success, 'converged': self.converged,
                'tau_engaged': self.tau_engaged, 'tau_off': self.tau_off,
                'periods_to_converge': self.periods_to_converge,
                'max_abs_u': self.max_abs_u,
                'delta_engaged': math.sqrt(self.state.delta_engaged)
                    if self.state.delta_engaged is not None else None,
                'delta_off': math.sqrt(self.state.delta_off)
                    if self.state.delta_off is not None else None,
                'max_verify_delta': self.max_verify,
                'control_steps': len(self.state.history)}

def run_switch(sys, Y_start, target, bounds, channel=None, epsilon=EPSILON,
               tau_engage=None, max_periods=MAX_PERIODS, verify_periods=VERIFY_PERIODS,
               literal=False, trace_every=TRACE_EVERY, spec=None):
    """
    Drive the trajectory started at Y_start (tau=0, on the source attractor)
    onto target. Runs uncontrolled until tau_engage, controls until the
    2-norm distance reaches epsilon, ramps u back to zero at the rate bound
    and then watches verify_periods uncontrolled periods.
    """
    if channel is not None:
        sys = sys.with_channel(channel)
    h = target.h
    T = sys.period
    spec = target.spec if spec is None else StepSpec(h, spec.surface_tol, spec.max_bisect)
    if tau_engage is None:
        tau_engage = ENGAGE_PERIODS * T
    if tau_engage < 0:
        raise DomainError("tau_engage must be >= 0")
    linear = sys.channel == ADDITIVE_FORCE

    state = ControllerState(bounds, epsilon)
    trace = _Trace(trace_every)
    Y = np.array(Y_start, dtype=float)

    for tau, dt in time_grid(0.0, tau_engage, h):
        trace.add(tau, Y, 0.0, lambda: distance(target.at(tau), Y))
        Y = event_step(sys, tau, Y, 0.0, dt, spec)

    n_max = int(round(max_periods * T / h))
    tau = tau_engage
    Y_d = target.at(tau)
    delta = distance(Y_d, Y)
    state.delta_engaged = delta
    I("  engaged at tau=%.6g, distance %.6g" % (tau, math.sqrt(delta)))

    u = 0.0
    i = 0
    while math.sqrt(delta) > epsilon and i < n_max:
        if not state.active:
            state.active = True
            state.tau_engaged = tau
        trace.add(tau, Y, u, lambda: delta)

        d = Y_d - Y
        F_d = eval_rhs(sys, tau, Y_d, 0.0)
        if linear:
            cond = feasible_rate_linear(d, F_d, eval_rhs(sys, tau, Y, 0.0),
                                        (0.0, u), h)
        else:
            F_u = eval_rhs(sys, tau, Y, u)
            cond = feasible_rate_parametric(d, F_d, F_u, rhs_partials(sys, tau, Y, u),
                                            F_u, h, literal)
        rate = select_rate(cond, bounds, u, h, cond.decreasing)
        u_next = min(max(u + rate * h, -bounds.M1), bounds.M1)

        Y_next = event_step(sys, tau, Y, u_next, h, spec)
        tau_next = tau_engage + (i + 1) * h
        Y_d_next = target.at(tau_next)
        delta_next = distance(Y_d_next, Y_next)
        residual = abs(delta_next - delta - step_expansion(sys, tau, Y, Y_d, u_next, h))

        interval = cond.interval() or (math.nan, math.nan)
        state.record(tau, u_next, delta, rate, interval[0], interval[1],
                     cond.predicted_change(rate), residual)

        u, Y, Y_d, delta, tau = u_next, Y_next, Y_d_next, delta_next, tau_next
        i += 1
        if i % 20000 == 0:
            I("  tau=%.6g distance %.6g u=%.4g" % (tau, math.sqrt(delta), u))

    state.u = u
    if math.sqrt(delta) <= epsilon:
        state.tau_off = tau
        state.delta_off = delta
        I("  converged at tau=%.6g after %d control steps" % (tau, i))
    else:
        I("  no convergence within %g periods, distance %.6g" % (max_periods,
          math.sqrt(delta)))
    state.active = False

    # return the control to zero without breaking the rate bound
    while u != 0.0:
        trace.add(tau, Y, u, lambda: distance(target.at(tau), Y))
        u = math.copysign(max(abs(u) - bounds.M2 * h, 0.0), u)
        Y = event_step(sys, tau, Y, u, h, spec)
        tau += h

    max_verify = 0.0
    for tau_k, dt in time_grid(tau, tau + verify_periods * T, h):
        dist = math.sqrt(distance(target.at(tau_k), Y))
        max_verify = max(max_verify, dist)
        trace.add(tau_k, Y, 0.0, lambda: dist * dist)
        Y = event_step(sys, tau_k, Y, 0.0, dt, spec)
        tau = tau_k + dt
    trace.add(tau, Y, 0.0, lambda: distance(target.at(tau), Y), force=True)

    success = state.tau_off is not None and max_verify < 10.0 * epsilon
    return SwitchResult(success, state, tau_engage, T, trace.rows, max_verify)

TheoremReport = namedtuple('TheoremReport', 'lhs c1 median_residual max_residual steps')

def theorem_residual(state, h):
    """
    Left side |Delta_0 + sum of predicted one-step changes|, the constant
    c1 = Delta(tau_off)/h^2 and statistics of the per-step difference
    between the actual change of Delta and its second-order expansion.
    """
    steps = state.history
    if not steps:
        delta = state.delta_off if state.delta_off is not None else \
            (state.delta_engaged or 0.0)
        return TheoremReport(delta, delta / h**2, 0.0, 0.0, 0)

    lhs = abs(steps[0].delta + sum(r.predicted for r in steps))
    final = state.delta_off if state.delta_off is not None else steps[-1].delta
    residuals = np.array([r.residual for r in steps])
    return TheoremReport(lhs, final / h**2, float(np.median(residuals)),
                         float(residuals.max()), len(steps))
