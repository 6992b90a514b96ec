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
#  The steps each scenario action is made of. Every step has the signature
#  step(opts, ctx): opts holds run options, ctx the state shared by the
#  steps of one scenario run.
#

import os

from logging import debug as D
from logging import info as I
from logging import warning as W

from errors import *
from attractors import GridSpec, basin_grid, discover, find, initial_grid, settle
from continuation import coexistence, refine_event, sample_coexistence, shoot, \
    sweep_both, trace_codim1_region
from control import ControlBounds, OrbitTable, run_switch, theorem_residual
from integrator import integrate
from utils.artifacts import write_csv, write_json

def _output(ctx, filename):
    ctx['outputs'].append(filename)
    return os.path.join(ctx['workdir'], filename)

def resolve_attractors(opts, ctx):
    sc = ctx['scenario']
    if sc.attractors:
        registry = []
        for name, (x, v) in sorted(sc.attractors.items()):
            fp = settle(sc.system, (x, v), sc.settle, sc.spec)
            if fp.aperiodic:
                raise AttractorNotFoundError(name, [])
            fp.name = name
            registry.append(fp)
    else:
        x_range, v_range, n = sc.discover_grid
        x0, v0 = initial_grid(x_range, v_range, n, n)
        registry = discover(sc.system, x0, v0, sc.settle, sc.spec)

    for fp in registry:
        I(" %s: %s p=%d impacts=%s peak-to-peak=%s" % (sc.name, fp.name, fp.p,
          fp.impacts_per_period, fp.peak_to_peak))
        ctx['stats'].update("attractor", fp.name, "p=%d" % fp.p, None)
    ctx['registry'] = registry

def run_simulation(opts, ctx):
    sc = ctx['scenario']
    st = sc.settings
    u = st['u']
    ctx['trajectory'] = integrate(sc.system, (st['x0'], st['v0']), st['tau0'],
                                  st['tau1'], sc.spec, control=lambda tau: u)
    ctx['stats'].update("trajectory", sc.name, "%d samples" % len(ctx['trajectory']),
                        None)

def write_trajectory(opts, ctx):
    every = ctx['scenario'].settings['trace_every']
    rows = list(ctx['trajectory'].rows())
    keep = rows[::every]
    if (len(rows) - 1) % every:
        keep.append(rows[-1])
    write_csv(_output(ctx, "trajectory.csv"), ("tau", "x", "v", "u"), keep)

def compute_basin(opts, ctx):
    sc = ctx['scenario']
    st = sc.settings
    grid = GridSpec(st['x_range'], st['v_range'], st['nx'], st['nv'])
    ctx['basin'] = basin_grid(sc.system, grid, ctx['registry'], sc.settle, sc.spec,
                              workers=opts['workers'], chunk_size=st['chunk_size'])
    for name, count in sorted(ctx['basin'].counts().items()):
        ctx['stats'].update("basin", name, "%d cells" % count, None)

def write_basin(opts, ctx):
    basin = ctx['basin']
    write_csv(_output(ctx, "basin.csv"), ("x", "v", "label"), basin.rows())
    write_json(_output(ctx, "basin.json"),
               {'registry': [fp.to_dict() for fp in basin.registry],
                'counts': basin.counts(),
                'grid': {'x_range': basin.grid.x_range, 'v_range': basin.grid.v_range,
                         'nx': basin.grid.nx, 'nv': basin.grid.nv}})

def build_tables(opts, ctx):
    sc = ctx['scenario']
    ctx['tables'] = {}
    for name in sc.settings['path'][1:]:
        if name in ctx['tables']:
            continue
        fp = find(ctx['registry'], name)
        ctx['tables'][name] = OrbitTable(sc.system, fp.anchor, fp.p, sc.spec.h, sc.spec)
        D(" %s: table for %s has %d samples" % (sc.name, name, len(ctx['tables'][name])))

def run_switches(opts, ctx):
    sc = ctx['scenario']
    st = sc.settings
    path = st['path']
    bounds = ControlBounds(st['m1'], st['m2'])
    ctx['legs'] = []
    for i, (src, dst) in enumerate(zip(path[:-1], path[1:])):
        leg = "%s->%s" % (src, dst)
        I(" %s: leg %d/%d %s" % (sc.name, i + 1, len(path) - 1, leg))
        result = run_switch(sc.system, find(ctx['registry'], src).anchor,
                            ctx['tables'][dst], bounds, epsilon=st['epsilon'],
                            tau_engage=st['engage_periods'] * sc.system.period,
                            max_periods=st['max_periods'],
                            verify_periods=st['verify_periods'],
                            literal=st['literal_condition'],
                            trace_every=st['trace_every'], spec=sc.spec)
        report = theorem_residual(result.state, sc.spec.h)
        ctx['legs'].append((i + 1, src, dst, result, report))
        if result.success:
            ctx['stats'].update("switch", leg, "tau_off=%.6g" % result.tau_off, None)
        else:
            W(" %s: leg %s did not switch" % (sc.name, leg))
            ctx['stats'].update("switch", leg, "distance %.3g" % result.max_verify,
                                "Failed(no switch)")

def write_switches(opts, ctx):
    summary = []
    for i, src, dst, result, report in ctx['legs']:
        filename = "switch-%d-%s-to-%s.csv" % (i, src, dst)
        write_csv(_output(ctx, filename), ("tau", "x", "v", "u", "delta2norm"),
                  result.trace)
        d = result.to_dict()
        d.update({'leg': i, 'source': src, 'target': dst, 'trace': filename,
                  'theorem': report._asdict()})
        summary.append(d)
    write_json(_output(ctx, "switch.json"), {'legs': summary})

def _seed_orbit(sc, ctx, name, steps):
    fp = find(ctx['registry'], name)
    return shoot(sc.system, fp.anchor, fp.p, steps_per_period=steps, spec=sc.spec)

def continue_branch(opts, ctx):
    sc = ctx['scenario']
    st = sc.settings
    orbit = _seed_orbit(sc, ctx, st['attractor'], st['steps_per_period'])
    orbit.param = st['param']
    ctx['branch'] = sweep_both(sc.system, orbit, st['param'], st['range'],
                               ds=st['ds'], ds_max=st['ds_max'],
                               max_points=st['max_points'],
                               steps_per_period=st['steps_per_period'], spec=sc.spec)
    I(" %s: %d branch points, %d events (%s)" % (sc.name, len(ctx['branch']),
      len(ctx['branch'].events), ctx['branch'].status))

def refine_events(opts, ctx):
    sc = ctx['scenario']
    st = sc.settings
    branch = ctx['branch']
    for ev in branch.events:
        try:
            refine_event(branch, ev, st['refine_tol'], st['steps_per_period'], sc.spec)
            ctx['stats'].update("event", ev.kind, "%s=%.8g" % (branch.param, ev.refined),
                                None)
        except NumericalError as e:
            W(" %s: %s near %.6g not refined: %s" % (sc.name, ev.kind, ev.value,
              e.message))
            ctx['stats'].update("event", ev.kind, "%s~%.6g" % (branch.param, ev.value), e)

def write_branch(opts, ctx):
    sc = ctx['scenario']
    branch = ctx['branch']
    write_csv(_output(ctx, "branch.csv"),
              ("param", "measure", "lambda1_re", "lambda1_im", "lambda2_re",
               "lambda2_im", "stable"), branch.rows(sc.settings['measure']))
    write_json(_output(ctx, "events.json"),
               {'param': branch.param, 'measure': sc.settings['measure'],
                'status': branch.status,
                'events': [ev.to_dict() for ev in branch.events]})

def trace_region(opts, ctx):
    sc = ctx['scenario']
    st = sc.settings
    ctx['loci'] = []
    for name in st['attractor']:
        orbit = _seed_orbit(sc, ctx, name, st['steps_per_period'])
        orbit.param = st['param1']
        locus = trace_codim1_region(sc.system, orbit, st['kinds'], st['param1'],
                                    st['range1'], st['param2'], st['end2'],
                                    slices=st['slices'], workers=opts['workers'],
                                    settings=sc.settle, refine_tol=st['refine_tol'],
                                    ds=st['ds'], ds_max=st['ds_max'],
                                    max_points=st['max_points'],
                                    steps_per_period=st['steps_per_period'],
                                    spec=sc.spec)
        for v2, found in zip(locus.values2, locus.slices):
            for kind in locus.kinds:
                ctx['stats'].update("slice", "%s %s=%.6g" % (name, locus.param2, v2),
                                    "%d %s" % (len(found[kind]), kind), None)
        ctx['loci'].append((name, locus))
    ctx['coexistence'] = coexistence([locus for _, locus in ctx['loci']])

def sample_points(opts, ctx):
    sc = ctx['scenario']
    st = sc.settings
    ctx['samples'] = []
    if not st['test_points']:
        return
    x_range, v_range, _ = sc.discover_grid
    ctx['samples'] = sample_coexistence(sc.system, st['param1'], st['param2'],
                                        st['test_points'], sc.settle,
                                        (x_range, v_range, st['sample_n']))
    for sample in ctx['samples']:
        ctx['stats'].update("point", sample.label, "%d attractors: %s" % (
            len(sample.registry), " ".join(fp.name for fp in sample.registry)), None)

def write_region(opts, ctx):
    st = ctx['scenario'].settings
    loci = ctx['loci']
    rows = [(v2, name, kind, v1) for name, locus in loci
            for v2, kind, v1 in locus.rows()]
    write_csv(_output(ctx, "locus.csv"), (st['param2'], "attractor", "kind",
              st['param1']), rows)

    summary = {}
    for name, locus in loci:
        summary[name] = {
            'truncated': locus.truncated, 'truncated_at': locus.truncated_at,
            'cusp': locus.cusp,
            'slices': [{'value': v2, 'events': found, 'window': window}
                       for v2, found, window in
                       zip(locus.values2, locus.slices, locus.windows)]}
    values2 = loci[0][1].values2
    write_json(_output(ctx, "region.json"),
               {'param1': st['param1'], 'param2': st['param2'],
                'kinds': list(st['kinds']), 'loci': summary,
                'coexistence': [{'value': v2, 'window': window} for v2, window in
                                zip(values2, ctx['coexistence'])],
                'points': [sample.to_dict() for sample in ctx['samples']]})

def write_attractors(opts, ctx):
    sc = ctx['scenario']
    every = sc.settings['trace_every']
    T = sc.system.period
    write_json(_output(ctx, "attractors.json"),
               {'registry': [fp.to_dict() for fp in ctx['registry']]})
    for fp in ctx['registry']:
        rows = [row[:3] for row in integrate(sc.system, fp.anchor, 0.0, fp.p * T,
                                             sc.spec).rows()]
        keep = rows[::every]
        if (len(rows) - 1) % every:
            keep.append(rows[-1])
        write_csv(_output(ctx, "orbit-%s.csv" % fp.name), ("tau", "x", "v"), keep)
        ctx['stats'].update("orbit", fp.name, "p=%d, %d samples" % (fp.p, len(keep)),
                            None)

simulate_steps = [
    (run_simulation, "Integrating trajectory ..."),
    (write_trajectory, None),
]

basin_steps = [
    (resolve_attractors, "Resolving attractors ..."),
    (compute_basin, "Computing basins of attraction ..."),
    (write_basin, None),
]

switch_steps = [
    (resolve_attractors, "Resolving attractors ..."),
    (build_tables, "Building target orbit tables ..."),
    (run_switches, "Switching ..."),
    (write_switches, None),
]

sweep_steps = [
    (resolve_attractors, "Resolving attractors ..."),
    (continue_branch, "Continuing periodic orbit branch ..."),
    (refine_events, "Refining bifurcation events ..."),
    (write_branch, None),
]

region_steps = [
    (resolve_attractors, "Resolving attractors ..."),
    (trace_region, "Tracing bifurcation loci ..."),
    (sample_points, "Settling at test points ..."),
    (write_region, None),
]

discover_steps = [
    (resolve_attractors, "Resolving attractors ..."),
    (write_attractors, None),
]

action_steps = {
    'simulate': simulate_steps,
    'basin': basin_steps,
    'switch': switch_steps,
    'sweep': sweep_steps,
    'region': region_steps,
    'discover': discover_steps,
}
