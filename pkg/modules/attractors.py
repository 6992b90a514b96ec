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
#  Attractor identification on the stroboscopic (Poincare) section: settling
#  transients, period detection, fingerprints, naming and basins of
#  attraction.
#

from collections import namedtuple

import numpy as np

from logging import debug as D
from logging import info as I

from errors import AttractorNotFoundError, DomainError
from integrator import StepSpec, advance, measure_orbit
from utils.workers import pool_map

UNCLASSIFIED = -1

N_TRANSIENT = 300
N_SAMPLE = 64
P_MAX = 16
MATCH_TOL = 1e-6
CLASSIFY_TOL = 1e-3
STEPS_PER_PERIOD = 400

SettleSettings = namedtuple('SettleSettings',
        'n_transient n_sample p_max match_tol steps_per_period classify_tol')
SettleSettings.__new__.__defaults__ = (N_TRANSIENT, N_SAMPLE, P_MAX, MATCH_TOL,
                                       STEPS_PER_PERIOD, CLASSIFY_TOL)

class Fingerprint(object):
    """
    Periodicity and shape of an attractor.

    points[j] is the Poincare point seen at absolute times m*T with
    m mod p == j, so fingerprints taken from different runs share phase.
    A fingerprint with p None is aperiodic and has no points.
    """
    def __init__(self, p, points, measures=None, name=None):
        self.p = p
        self.points = np.asarray(points, dtype=float).reshape(-1, 2)
        self.measures = measures
        self.name = name

    def __repr__(self):
        return "Fingerprint(%s, p=%s)" % (self.name, self.p)

    @property
    def aperiodic(self):
        return self.p is None

    @property
    def anchor(self):
        return self.points[0].copy()

    @property
    def impacts_per_period(self):
        return self.measures.impacts if self.measures else None

    @property
    def contact_time(self):
        return self.measures.contact_time if self.measures else None

    @property
    def peak_to_peak(self):
        return self.measures.peak_to_peak if self.measures else None

    def to_dict(self):
        d = {'name': self.name, 'p': self.p,
             'poincare_points': self.points.tolist()}
        if self.measures:
            d['impacts_per_period'] = self.measures.impacts
            d['contact_time'] = self.measures.contact_time
            d['peak_to_peak'] = self.measures.peak_to_peak
            d['max_x'] = self.measures.max_x
        return d

def _detect_periods(samples, p_max, match_tol):
    n = samples.shape[1]
    periods = np.zeros(n, dtype=int)
    for p in range(1, p_max + 1):
        if p >= samples.shape[0]:
            break
        gap = np.linalg.norm(samples[p:] - samples[:-p], axis=2).max(axis=0)
        periods = np.where((periods == 0) & (gap < match_tol), p, periods)
    return periods

def measure_attractor(sys, fp, settings=SettleSettings(), spec=None):
    h = sys.period / settings.steps_per_period
    spec = spec or StepSpec(h)
    fp.measures = measure_orbit(sys, fp.anchor, 0.0, fp.p * sys.period, h, spec)
    return fp

def settle_batch(sys, x0, v0, settings=SettleSettings(), spec=None, measure=True):
    """
    settle() for arrays of initial conditions, all started at tau=0.
    Returns one Fingerprint per initial condition.
    """
    s = settings
    if s.n_transient < 1:
        raise DomainError("n_transient must be >= 1")
    if s.n_sample < 2 * s.p_max:
        raise DomainError("n_sample must be >= 2*p_max")

    N = s.steps_per_period
    h = sys.period / N
    spec = spec or StepSpec(h)
    x = np.atleast_1d(np.array(x0, dtype=float))
    v = np.atleast_1d(np.array(v0, dtype=float))

    k = 0
    for m in range(s.n_transient):
        for j in range(N):
            x, v = advance(sys, k * h, x, v, 0.0, h, spec)
            k += 1

    samples = np.empty((s.n_sample, len(x), 2))
    for m in range(s.n_sample):
        for j in range(N):
            x, v = advance(sys, k * h, x, v, 0.0, h, spec)
            k += 1
        samples[m, :, 0] = x
        samples[m, :, 1] = v

    periods = _detect_periods(samples, s.p_max, s.match_tol)
    D("settle_batch: %d states, periods %s" % (len(x), np.unique(periods).tolist()))

    fps = []
    for i, p in enumerate(periods):
        if p == 0:
            fps.append(Fingerprint(None, np.empty((0, 2))))
            continue
        points = np.empty((p, 2))
        for m in range(s.n_sample - p, s.n_sample):
            points[(s.n_transient + m + 1) % p] = samples[m, i]
        fp = Fingerprint(int(p), points)
        if measure:
            measure_attractor(sys, fp, settings, spec)
        fps.append(fp)
    return fps

def settle(sys, Y0, settings=SettleSettings(), spec=None):
    return settle_batch(sys, [Y0[0]], [Y0[1]], settings, spec)[0]

def point_distance(fp, other):
    """ Largest point distance under the best cyclic alignment. """
    best = np.inf
    for shift in range(fp.p):
        rolled = np.roll(other.points, -shift, axis=0)
        best = min(best, np.linalg.norm(fp.points - rolled, axis=1).max())
    return best

def classify(fp, registry, tol=CLASSIFY_TOL):
    if not registry:
        raise DomainError("cannot classify against an empty registry")
    if fp.aperiodic:
        return UNCLASSIFIED

    best, index = np.inf, UNCLASSIFIED
    for i, ref in enumerate(registry):
        if ref.p != fp.p:
            continue
        dist = point_distance(fp, ref)
        if dist < tol and dist < best:
            best, index = dist, i
    return index

def name_attractors(registry):
    """
    Order a registry by period and amplitude and name its entries: p<p>
    when the period is unique, p<p>-large/-small for two of a period and
    p<p>-<rank> beyond that.
    """
    ordered = sorted(registry, key=lambda fp: (fp.p, -(fp.peak_to_peak or 0.0)))
    for p in sorted(set(fp.p for fp in ordered)):
        group = [fp for fp in ordered if fp.p == p]
        if len(group) == 1:
            group[0].name = "p%d" % p
        elif len(group) == 2:
            group[0].name = "p%d-large" % p
            group[1].name = "p%d-small" % p
        else:
            for rank, fp in enumerate(group):
                fp.name = "p%d-%d" % (p, rank + 1)
    return ordered

def initial_grid(x_range, v_range, nx, nv):
    """ Grid points, x varying fastest. """
    xs = np.linspace(x_range[0], x_range[1], nx)
    vs = np.linspace(v_range[0], v_range[1], nv)
    X, V = np.meshgrid(xs, vs)
    return X.ravel(), V.ravel()

def discover(sys, x0, v0, settings=SettleSettings(), spec=None):
    """ Distinct periodic attractors reached from the given initial states. """
    found = []
    for fp in settle_batch(sys, x0, v0, settings, spec, measure=False):
        if fp.aperiodic:
            continue
        if not found or classify(fp, found, settings.classify_tol) == UNCLASSIFIED:
            found.append(fp)
    for fp in found:
        measure_attractor(sys, fp, settings, spec)
    registry = name_attractors(found)
    I(" Attractors found: %s" % ", ".join(fp.name for fp in registry))
    return registry

def find(registry, name):
    for fp in registry:
        if fp.name == name:
            return fp
    raise AttractorNotFoundError(name, [fp.name for fp in registry])

class GridSpec(namedtuple('GridSpec', 'x_range v_range nx nv')):
    __slots__ = ()

    def points(self):
        return initial_grid(self.x_range, self.v_range, self.nx, self.nv)

DEFAULT_GRID = GridSpec((-2.0, 2.0), (-2.0, 2.0), 500, 500)

class BasinGrid(object):
    def __init__(self, grid, labels, registry):
        self.grid = grid
        self.labels = np.asarray(labels, dtype=int).reshape(grid.nv, grid.nx)
        self.registry = registry

    def counts(self):
        counts = {}
        for label in [UNCLASSIFIED] + list(range(len(self.registry))):
            n = int((self.labels == label).sum())
            if label == UNCLASSIFIED:
                counts['unclassified'] = n
            else:
                counts[self.registry[label].name] = n
        return counts

    def rows(self):
        xs, vs = self.grid.points()
        for x, v, label in zip(xs, vs, self.labels.ravel()):
            yield (x, v, int(label))

def _basin_chunk(job):
    sys, x0, v0, registry, settings, spec = job
    fps = settle_batch(sys, x0, v0, settings, spec, measure=False)
    return np.array([classify(fp, registry, settings.classify_tol) for fp in fps],
                    dtype=int)

def basin_grid(sys, grid, registry, settings=SettleSettings(), spec=None,
               workers=1, chunk_size=2500):
    """ settle + classify for every grid cell; chunks run in a worker pool. """
    xs, vs = grid.points()
    jobs = []
    for start in range(0, len(xs), chunk_size):
        jobs.append((sys, xs[start:start + chunk_size], vs[start:start + chunk_size],
                     registry, settings, spec))
    I(" Basin grid %dx%d in %d chunks" % (grid.nx, grid.nv, len(jobs)))
    labels = np.concatenate(pool_map(_basin_chunk, jobs, workers))
    return BasinGrid(grid, labels, registry)
