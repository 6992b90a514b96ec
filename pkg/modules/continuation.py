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
#  Periodic orbits of the stroboscopic map by Newton shooting, their Floquet
#  multipliers, pseudo-arclength branches in one parameter with detection
#  and refinement of folds, period doublings and grazings, and grid scans
#  of those events over a second parameter.
#

import math

import numpy as np
from numpy.linalg import norm
from scipy import linalg

from logging import debug as D
from logging import info as I
from logging import warning as W

from errors import BracketError, NoOrbitError, NumericalError
from integrator import StepSpec, integrate_batch, measure_orbit
from attractors import SettleSettings, discover, initial_grid, settle
from utils.workers import pool_map

FOLD = "Fold"
PERIOD_DOUBLING = "PeriodDoubling"
GRAZING = "Grazing"
EVENT_KINDS = (FOLD, PERIOD_DOUBLING, GRAZING)

STEPS_PER_PERIOD = 512
SHOOT_TOL = 1e-10
SHOOT_MAX_ITER = 30
FD_DELTA = 1e-6
FD_DELTA_SMALL = 1e-7
PARAM_DELTA = 1e-6
CORRECTOR_MAX_ITER = 8
REFINE_TOL = 1e-7
REFINE_HALVINGS = 6
MIN_STATE_WEIGHT = 1e-3

def _spec(sys, steps_per_period, spec):
    h = sys.period / steps_per_period
    if spec is None:
        return StepSpec(h)
    return StepSpec(h, spec.surface_tol, spec.max_bisect)

def strobe_map(sys, Z, p, steps_per_period=STEPS_PER_PERIOD, spec=None):
    """ P^p for a batch of section points Z (n x 2), starting at tau=0. """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    spec = _spec(sys, steps_per_period, spec)
    x, v = integrate_batch(sys, Z[:, 0], Z[:, 1], 0.0, p * steps_per_period,
                           spec.h, spec)
    return np.column_stack([x, v])

def _central_differences(sys, z, p, delta, steps_per_period, spec):
    Z = np.array([z, z + [delta, 0.0], z - [delta, 0.0],
                  z + [0.0, delta], z - [0.0, delta]])
    P = strobe_map(sys, Z, p, steps_per_period, spec)
    forward = ((P[[1, 3]] - P[0]) / delta).T
    backward = ((P[0] - P[[2, 4]]) / delta).T
    J = ((P[[1, 3]] - P[[2, 4]]) / (2.0 * delta)).T
    return P[0], J, forward, backward

def map_jacobian(sys, z, p, delta=FD_DELTA, steps_per_period=STEPS_PER_PERIOD,
                 spec=None):
    """
    (P^p(z), DP^p(z)) by central differences. When one-sided differences
    disagree in sign somewhere, the step is reduced once.
    """
    z = np.asarray(z, dtype=float)
    Pz, J, fwd, bwd = _central_differences(sys, z, p, delta, steps_per_period, spec)
    floor = 1e-8 * max(1.0, np.abs(J).max())
    split = (np.sign(fwd) != np.sign(bwd)) & \
        (np.abs(fwd) > floor) & (np.abs(bwd) > floor)
    if split.any() and delta > FD_DELTA_SMALL:
        D("map_jacobian: one-sided differences disagree, delta=%g" % FD_DELTA_SMALL)
        Pz, J, _, _ = _central_differences(sys, z, p, FD_DELTA_SMALL,
                                           steps_per_period, spec)
    return Pz, J

def param_derivative(sys, z, p, name, delta=PARAM_DELTA,
                     steps_per_period=STEPS_PER_PERIOD, spec=None):
    value = sys.param(name)
    up = strobe_map(sys.with_param(name, value + delta), z, p, steps_per_period, spec)[0]
    down = strobe_map(sys.with_param(name, value - delta), z, p, steps_per_period, spec)[0]
    return (up - down) / (2.0 * delta)

def multipliers_of(J):
    mu = linalg.eigvals(J)
    return mu[np.argsort(-np.abs(mu))]

def fold_indicator(mu):
    if abs(mu[0].imag) > 1e-12:
        return abs(mu[0]) - 1.0
    return mu.real.max() - 1.0

def pd_indicator(mu):
    if abs(mu[0].imag) > 1e-12:
        return 1.0 - abs(mu[0])
    return mu.real.min() + 1.0

def grazing_indicator(measures, k, e):
    """
    Distance to the surface of the (k+1)-th highest local maximum, the one
    that touches x = e when the impact count leaves k.
    """
    if len(measures.maxima) <= k:
        return -np.inf
    return measures.maxima[k] - e

def orbit_measures(sys, z, p, steps_per_period=STEPS_PER_PERIOD, spec=None):
    spec = _spec(sys, steps_per_period, spec)
    return measure_orbit(sys, z, 0.0, p * sys.period, spec.h, spec)

class PeriodicOrbit(object):
    def __init__(self, system, anchor, p, jacobian, residual=0.0, iterations=0,
                 measures=None, param=None):
        self.system = system
        self.anchor = np.asarray(anchor, dtype=float)
        self.p = p
        self.jacobian = jacobian
        self.multipliers = multipliers_of(jacobian)
        self.residual = residual
        self.iterations = iterations
        self.measures = measures
        self.param = param
        self.tangent = None
        self.dP = None

    def __repr__(self):
        return "PeriodicOrbit(p=%d, z=%s, |mu|=%s)" % (self.p, self.anchor,
                np.abs(self.multipliers))

    @property
    def stable(self):
        return bool(np.abs(self.multipliers).max() < 1.0)

    @property
    def w(self):
        return np.array([self.anchor[0], self.anchor[1],
                         self.system.param(self.param)])

    def value(self):
        return self.system.param(self.param)

def shoot(sys, z_guess, p, param=None, steps_per_period=STEPS_PER_PERIOD,
          tol=SHOOT_TOL, max_iter=SHOOT_MAX_ITER, spec=None, measure=True):
    """
    Newton iteration on G(z) = P^p(z) - z with a finite-difference Jacobian
    and a backtracking line search.

    param is an optional (name, value) applied to sys first.
    """
    name = None
    if param is not None:
        name, value = param
        sys = sys.with_param(name, value)

    z = np.array(z_guess, dtype=float)
    I2 = np.eye(2)
    for it in range(max_iter + 1):
        Pz, J = map_jacobian(sys, z, p, steps_per_period=steps_per_period, spec=spec)
        G = Pz - z
        r = norm(G, np.inf)
        D("shoot: iteration %d residual %.3g" % (it, r))
        if r < tol:
            break
        if it == max_iter or not np.isfinite(r):
            raise NoOrbitError(r, it)

        try:
            dz = linalg.solve(J - I2, -G)
        except linalg.LinAlgError:
            A = J - I2
            dz = linalg.solve(A.T @ A + 1e-8 * I2, -A.T @ G)

        lam = 1.0
        r0 = norm(G)
        for _ in range(8):
            z_try = z + lam * dz
            r_try = norm(strobe_map(sys, z_try, p, steps_per_period, spec)[0] - z_try)
            if r_try < 0.7 * r0 or r_try < tol:
                z = z_try
                break
            lam *= 0.5
        else:
            z = z + dz

    measures = orbit_measures(sys, z, p, steps_per_period, spec) if measure else None
    return PeriodicOrbit(sys, z, p, J, r, it, measures, name)

class Event(object):
    def __init__(self, kind, bracket, value):
        self.kind = kind
        self.bracket = bracket
        self.value = value
        self.refined = None
        self.iterations = 0
        self.indicator = None
        self.multipliers = None

    def __repr__(self):
        return "Event(%s, %.8g)" % (self.kind, self.refined if
                self.refined is not None else self.value)

    def to_dict(self):
        mu = None
        if self.multipliers is not None:
            mu = [[m.real, m.imag] for m in self.multipliers]
        return {'kind': self.kind, 'bracket': list(self.bracket),
                'estimate': self.value, 'refined': self.refined,
                'iterations': self.iterations, 'indicator': self.indicator,
                'multipliers': mu}

class Branch(object):
    """
    Points along one branch. weight is the state weight of the arclength
    metric the branch was traced with, refinement reuses it. origin is the
    index of the point the branch was started from.
    """
    def __init__(self, param, points, events=None, status="range exhausted",
                 weight=1.0, origin=0):
        self.param = param
        self.points = points
        self.events = events if events is not None else []
        self.status = status
        self.weight = weight
        self.origin = origin

    def __len__(self):
        return len(self.points)

    def values(self):
        return np.array([pt.value() for pt in self.points])

    def stable(self):
        return [pt.stable for pt in self.points]

    def rows(self, measure):
        for pt in self.points:
            mu = pt.multipliers
            yield (pt.value(), getattr(pt.measures, measure),
                   mu[0].real, mu[0].imag, mu[1].real, mu[1].imag,
                   int(pt.stable))

def _extended_system(sys, name, w, p, steps_per_period, spec):
    s = sys.with_param(name, w[2])
    Pz, J = map_jacobian(s, w[:2], p, steps_per_period=steps_per_period, spec=spec)
    dP = param_derivative(s, w[:2], p, name, steps_per_period=steps_per_period,
                          spec=spec)
    return s, Pz - w[:2], J, dP

# Arclength metric on w = (x, v, param): the state enters with weight
# theta, |w|^2 = theta*(x^2 + v^2) + param^2.

def _weigh(t, weight):
    return np.array([weight * t[0], weight * t[1], t[2]])

def _wdot(a, b, weight):
    return float(_weigh(a, weight) @ b)

def _wnorm(a, weight):
    return math.sqrt(_wdot(a, a, weight))

def state_weight(J, dP):
    """
    Weight that makes the first step move the parameter by ds/sqrt(2),
    whatever the scale of the state.
    """
    M = np.column_stack([J - np.eye(2), dP])
    t = np.cross(M[0], M[1])
    t = t / norm(t)
    state = t[0]**2 + t[1]**2
    if state == 0.0:
        return 1.0
    return min(max(t[2]**2 / state, MIN_STATE_WEIGHT), 1.0)

def _tangent(J, dP, previous=None, direction=1, weight=1.0):
    M = np.column_stack([J - np.eye(2), dP])
    t = np.cross(M[0], M[1])
    t = t / _wnorm(t, weight)
    if previous is not None:
        if _wdot(t, previous, weight) < 0:
            t = -t
    elif t[2] * direction < 0:
        t = -t
    return t

def _correct(sys, name, w_pred, t, p, tol, steps_per_period, spec, weight=1.0,
             max_iter=CORRECTOR_MAX_ITER):
    """ Newton on (P^p(z) - z, <t, w - w_pred>) = 0 from the predictor. """
    w = np.array(w_pred, dtype=float)
    row = _weigh(t, weight)
    r = np.inf
    for it in range(max_iter):
        s, R, J, dP = _extended_system(sys, name, w, p, steps_per_period, spec)
        r = norm(R, np.inf)
        if r < tol:
            return s, w, J, dP, r, it
        if not np.isfinite(r):
            break
        A = np.zeros((3, 3))
        A[:2, :2] = J - np.eye(2)
        A[:2, 2] = dP
        A[2] = row
        try:
            w = w + linalg.solve(A, -np.append(R, row @ (w - w_pred)))
        except linalg.LinAlgError:
            break
    raise NoOrbitError(r, max_iter)

def _branch_point(s, name, w, p, J, dP, t, r, it, steps_per_period, spec, measure=True):
    measures = orbit_measures(s, w[:2], p, steps_per_period, spec) if measure else None
    pt = PeriodicOrbit(s, w[:2], p, J, r, it, measures, name)
    pt.tangent = t
    pt.dP = dP
    return pt

def sweep(sys, orbit, name, param_range, ds=0.01, direction=1, ds_min=1e-6,
          ds_max=0.05, max_points=400, tol=SHOOT_TOL,
          steps_per_period=STEPS_PER_PERIOD, spec=None, weight=None):
    """
    Follow the branch through orbit in parameter name by pseudo-arclength
    steps, starting towards increasing (direction=1) or decreasing values.
    The state is weighted in the arclength (state_weight() at the start
    unless weight is given), so ds is a parameter step away from folds.
    Stops when the parameter leaves param_range, after max_points points or
    when the step falls below ds_min.
    """
    lo, hi = min(param_range), max(param_range)
    p = orbit.p
    base = sys.with_param(name, orbit.system.param(name))
    w = np.append(orbit.anchor, base.param(name))
    s, R, J, dP = _extended_system(base, name, w, p, steps_per_period, spec)
    if weight is None:
        weight = state_weight(J, dP)
    D("sweep: state weight %.3g" % weight)
    t = _tangent(J, dP, direction=direction, weight=weight)
    points = [_branch_point(s, name, w, p, J, dP, t, norm(R, np.inf), 0,
                            steps_per_period, spec)]
    status = "max points"

    while len(points) < max_points:
        w_pred = w + ds * t
        try:
            s, w_new, J, dP, r, it = _correct(base, name, w_pred, t, p, tol,
                                              steps_per_period, spec, weight)
            moved = _wnorm(w_new - w_pred, weight)
            if moved > ds:
                raise NoOrbitError(moved, it)
        except (NumericalError, linalg.LinAlgError) as e:
            ds *= 0.5
            D("sweep: corrector failed (%s), ds=%.3g" % (e, ds))
            if ds < ds_min:
                status = "step underflow"
                break
            continue

        if not lo <= w_new[2] <= hi:
            status = "range exhausted"
            break
        t = _tangent(J, dP, previous=t, weight=weight)
        w = w_new
        points.append(_branch_point(s, name, w, p, J, dP, t, r, it,
                                    steps_per_period, spec))
        if len(points) % 20 == 0:
            I("  %s: %d points, %s=%.6g" % (name, len(points), name, w[2]))
        ds = min(ds * 1.3, ds_max)

    branch = Branch(name, points, status=status, weight=weight)
    branch.events = detect_events(branch)
    return branch

def sweep_both(sys, orbit, name, param_range, **opts):
    """ Sweep down and up from orbit and join the halves along arclength. """
    down = sweep(sys, orbit, name, param_range, direction=-1, **opts)
    opts['weight'] = down.weight
    up = sweep(sys, orbit, name, param_range, direction=1, **opts)
    head = list(reversed(down.points[1:]))
    for pt in head:
        pt.tangent = -pt.tangent
    branch = Branch(name, head + up.points,
                    status="%s/%s" % (down.status, up.status), weight=up.weight,
                    origin=len(head))
    branch.events = detect_events(branch)
    return branch

def _sign_change(a, b):
    return (a > 0) != (b > 0)

def detect_events(branch):
    events = []
    pts = branch.points
    for i in range(len(pts) - 1):
        A, B = pts[i], pts[i + 1]
        mid = 0.5 * (A.value() + B.value())
        if _sign_change(A.tangent[2], B.tangent[2]) or \
                _sign_change(fold_indicator(A.multipliers), fold_indicator(B.multipliers)):
            events.append(Event(FOLD, (i, i + 1), mid))
        if _sign_change(pd_indicator(A.multipliers), pd_indicator(B.multipliers)):
            events.append(Event(PERIOD_DOUBLING, (i, i + 1), mid))
        if A.system.has_surface and A.measures and B.measures and \
                A.measures.impacts != B.measures.impacts:
            events.append(Event(GRAZING, (i, i + 1), mid))
    for ev in events:
        D(" %s: %s near %s=%.6g" % (branch.param, ev.kind, branch.param, ev.value))
    return events

def bisect_indicator(fn, lo, hi, tol, f_lo=None, f_hi=None, max_iter=200):
    """
    Bisection for a sign change of fn on [lo, hi] down to width tol.
    Returns (midpoint, iterations).
    """
    if f_lo is None:
        f_lo = fn(lo)
    if f_hi is None:
        f_hi = fn(hi)
    if not _sign_change(f_lo, f_hi):
        raise BracketError(f_lo, f_hi)

    it = 0
    while abs(hi - lo) > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if _sign_change(f_lo, f_mid):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
        it += 1
    return 0.5 * (lo + hi), it

def _indicator(kind, A, B):
    if kind == PERIOD_DOUBLING:
        return lambda pt: pd_indicator(pt.multipliers)
    if kind == GRAZING:
        k = min(A.measures.impacts, B.measures.impacts)
        e = A.system.params.e
        return lambda pt: grazing_indicator(pt.measures, k, e)
    if _sign_change(fold_indicator(A.multipliers), fold_indicator(B.multipliers)):
        return lambda pt: fold_indicator(pt.multipliers)
    return lambda pt: pt.tangent[2]

def refine_event(branch, event, tol=REFINE_TOL, steps_per_period=STEPS_PER_PERIOD,
                 spec=None):
    """
    Bisect the event's indicator along the branch between its bracketing
    points A and B. The bisection variable sigma is the arclength along
    A's tangent; the branch point at sigma lies on the hyperplane
    <tA, w - wA> = sigma. Each is predicted from the nearest point already
    corrected, along that point's own tangent. When the corrector fails
    the gap is halved, up to REFINE_HALVINGS times.
    """
    i, j = event.bracket
    A, B = branch.points[i], branch.points[j]
    name = branch.param
    weight = branch.weight
    fn = _indicator(event.kind, A, B)
    wA, tA = A.w, A.tangent
    sigma_B = _wdot(tA, B.w - wA, weight)
    need_measures = event.kind == GRAZING
    known = [(0.0, A), (sigma_B, B)]

    def predict(sigma, pt):
        w0, t0 = pt.w, pt.tangent
        gap = sigma - _wdot(tA, w0 - wA, weight)
        along = _wdot(tA, t0, weight)
        if abs(along) < 0.1:
            return w0 + gap * tA
        return w0 + (gap / along) * t0

    def correct(sigma, halvings):
        s0, pt0 = min(known, key=lambda k: abs(k[0] - sigma))
        try:
            s, w, J, dP, r, it = _correct(A.system, name, predict(sigma, pt0), tA,
                                          A.p, SHOOT_TOL, steps_per_period, spec,
                                          weight, max_iter=SHOOT_MAX_ITER)
        except NumericalError:
            if halvings == 0:
                raise
            D("refine_event: corrector failed at sigma=%.6g, halving" % sigma)
            correct(0.5 * (s0 + sigma), halvings - 1)
            return correct(sigma, halvings - 1)
        pt = _branch_point(s, name, w, A.p, J, dP,
                           _tangent(J, dP, previous=tA, weight=weight),
                           r, it, steps_per_period, spec, measure=need_measures)
        known.append((sigma, pt))
        return pt

    def at(sigma):
        return correct(sigma, REFINE_HALVINGS)

    sigma, iterations = bisect_indicator(lambda sg: fn(at(sg)), 0.0, sigma_B, tol,
                                         fn(A), fn(B))
    pt = at(sigma)
    event.refined = pt.value()
    event.iterations = iterations
    event.indicator = float(fn(pt))
    event.multipliers = pt.multipliers
    I("  %s %s refined to %.8g in %d iterations" % (name, event.kind,
      event.refined, iterations))
    return event.refined

def _dedupe(values, tol):
    out = []
    for value in sorted(values):
        if not out or value - out[-1] > tol:
            out.append(value)
    return out

def _window(branch):
    """
    The param1 interval around the branch origin bounded by the events
    nearest to it along the branch on either side, or by the branch ends.
    """
    lo, hi = branch.points[0].value(), branch.points[-1].value()
    below = [ev for ev in branch.events if ev.bracket[1] <= branch.origin]
    above = [ev for ev in branch.events if ev.bracket[0] >= branch.origin]
    value = lambda ev: ev.refined if ev.refined is not None else ev.value
    if below:
        lo = value(max(below, key=lambda ev: ev.bracket[0]))
    if above:
        hi = value(min(above, key=lambda ev: ev.bracket[0]))
    return (min(lo, hi), max(lo, hi))

def _trace_slice(job):
    seed, kinds, name, param_range, refine_tol, opts = job
    found = dict((kind, []) for kind in kinds)
    if seed is None:
        return found, None
    branch = sweep_both(seed.system, seed, name, param_range, **opts)
    for ev in branch.events:
        if ev.kind not in kinds:
            continue
        try:
            value = refine_event(branch, ev, refine_tol, steps_per_period=opts.get(
                'steps_per_period', STEPS_PER_PERIOD), spec=opts.get('spec'))
        except NumericalError as e:
            W("  %s refinement failed near %.6g: %s" % (ev.kind, ev.value, e.message))
            continue
        found[ev.kind].append(value)
    for kind in kinds:
        found[kind] = _dedupe(found[kind], 1e-5)
    return found, _window(branch)

class RegionLocus(object):
    """
    Event values per param2 slice. windows[k] is the param1 interval the
    traced attractor occupies on slice k, None where it could not be seeded.
    """
    def __init__(self, kinds, param1, param2, values2, slices, windows=None):
        self.kinds = kinds
        self.param1 = param1
        self.param2 = param2
        self.values2 = list(values2)
        self.slices = slices
        self.windows = list(windows) if windows is not None else [None] * len(slices)
        self.truncated = False
        self.truncated_at = None
        self.cusp = None
        self._check_truncation()
        self._estimate_cusp()

    def _check_truncation(self):
        first = self.slices[0]
        for v2, found in zip(self.values2, self.slices):
            for kind in self.kinds:
                if len(found[kind]) < len(first[kind]):
                    self.truncated = True
                    self.truncated_at = v2
                    W(" %s locus truncated at %s=%.6g" % (kind, self.param2, v2))
                    return

    def _estimate_cusp(self):
        if FOLD not in self.kinds:
            return
        two = [k for k, found in enumerate(self.slices) if len(found[FOLD]) >= 2]
        if not two or two[-1] + 1 >= len(self.slices):
            return
        j = two[-1]
        if self.slices[j + 1][FOLD]:
            return
        f = self.slices[j][FOLD]
        v = self.values2
        p2c = 0.5 * (v[j] + v[j + 1])
        p1c = 0.5 * (f[0] + f[-1])
        if j >= 1 and j - 1 in two:
            g = self.slices[j - 1][FOLD]
            wj, wg = (f[-1] - f[0])**2, (g[-1] - g[0])**2
            if wg > wj:
                # squared fold separation vanishes linearly at the cusp
                p2c = v[j] + wj * (v[j] - v[j - 1]) / (wg - wj)
                p2c = min(max(p2c, v[j]), v[j + 1])
                mj, mg = 0.5 * (f[0] + f[-1]), 0.5 * (g[0] + g[-1])
                p1c = mj + (mj - mg) * (p2c - v[j]) / (v[j] - v[j - 1])
        self.cusp = (p1c, p2c)
        I(" cusp estimated at %s=%.6g %s=%.6g" % (self.param1, p1c, self.param2, p2c))

    def rows(self):
        for v2, found in zip(self.values2, self.slices):
            for kind in self.kinds:
                for v1 in found[kind]:
                    yield (v2, kind, v1)

def coexistence(loci):
    """
    Intersection of the loci's windows slice by slice: the param1 interval
    on which every traced attractor exists, or None.
    """
    out = []
    for windows in zip(*[locus.windows for locus in loci]):
        if any(w is None for w in windows):
            out.append(None)
            continue
        lo = max(w[0] for w in windows)
        hi = min(w[1] for w in windows)
        out.append((lo, hi) if lo < hi else None)
    return out

def _seed(sys, z, p, settings, steps_per_period, spec):
    try:
        return shoot(sys, z, p, steps_per_period=steps_per_period, spec=spec,
                     measure=False)
    except NumericalError:
        fp = settle(sys, z, settings)
        if fp.aperiodic:
            raise NoOrbitError(np.inf, 0)
        return shoot(sys, fp.anchor, fp.p, steps_per_period=steps_per_period,
                     spec=spec, measure=False)

def trace_codim1_region(sys, orbit, kinds, param1, range1, param2, end2, slices=40,
                        workers=1, settings=SettleSettings(), refine_tol=REFINE_TOL,
                        **opts):
    """
    Loci of codimension-one events in the (param1, param2) plane by grid
    scan: slices are seeded one after the other along param2 from orbit,
    then each slice is swept in param1 and its events refined.
    """
    values2 = np.linspace(sys.param(param2), end2, slices)
    steps = opts.get('steps_per_period', STEPS_PER_PERIOD)
    spec = opts.get('spec')

    seeds = []
    z, p = orbit.anchor, orbit.p
    for k, v2 in enumerate(values2):
        try:
            seed = _seed(sys.with_param(param2, v2), z, p, settings, steps, spec)
        except NumericalError as e:
            W(" slice %s=%.6g has no seed orbit: %s" % (param2, v2, e.message))
            seeds.extend([None] * (len(values2) - k))
            break
        seed.param = param1
        seeds.append(seed)
        z, p = seed.anchor, seed.p
    I(" Seeded %d/%d slices" % (sum(s is not None for s in seeds), len(values2)))

    jobs = [(seed, tuple(kinds), param1, range1, refine_tol, opts) for seed in seeds]
    traced = pool_map(_trace_slice, jobs, workers)
    return RegionLocus(tuple(kinds), param1, param2, values2,
                       [found for found, _ in traced], [window for _, window in traced])

class PointSample(object):
    def __init__(self, label, value1, value2, registry):
        self.label = label
        self.value1 = value1
        self.value2 = value2
        self.registry = registry

    def to_dict(self):
        return {'label': self.label, 'values': [self.value1, self.value2],
                'attractors': [fp.to_dict() for fp in self.registry]}

def sample_coexistence(sys, param1, param2, points, settings=SettleSettings(),
                       grid=((-2.0, 2.0), (-2.0, 2.0), 10)):
    """ Attractors found by settling a grid of initial states at each point. """
    x_range, v_range, n = grid
    x0, v0 = initial_grid(x_range, v_range, n, n)
    samples = []
    for label, value1, value2 in points:
        s = sys.with_param(param1, value1).with_param(param2, value2)
        registry = discover(s, x0, v0, settings)
        I(" %s (%s=%g, %s=%g): %d attractors" % (label, param1, value1, param2,
          value2, len(registry)))
        samples.append(PointSample(label, value1, value2, registry))
    return samples
