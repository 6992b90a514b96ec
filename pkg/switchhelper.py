#!/usr/bin/env python3
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
#  Attractor switching helper: runs named scenarios (basins, switching
#  experiments, branch sweeps, bifurcation regions) and records their
#  outputs in a manifest that can be verified later.
#  Use 'switchhelper.py -h' for more help.
#

import argparse
import os
import shutil
import signal
import sys
import tempfile
from datetime import datetime

import logging as log
from logging import debug as D
from logging import info as I
from logging import warning as W
from logging import error as E

sys.path.insert(1, os.path.join(os.path.abspath(
    os.path.dirname(__file__)), 'modules'))

from errors import *

from utils.artifacts import read_json, sha256sum, versions, write_json
from utils.config import load_scenario, scenario_from_dict
from utils.workers import worker_count

from scenarios import builtin_scenario, list_scenarios
from statistics import Statistics
from steps import action_steps

help_text = """Usage examples:
* To see which scenarios are built in:
    $ switchhelper.py list

* To run a built-in scenario, outputs go to $SWITCHHELPER_WORKDIR:
    $ switchhelper.py run switch-p5-to-p2-linear

* To run a scenario file into a given directory, with 4 worker processes:
    $ SWITCHHELPER_WORKERS=4 switchhelper.py run my-basin.conf -o out

* To re-run a finished scenario and check its CSV outputs are identical:
    $ switchhelper.py verify out/manifest.json
"""

WORKDIR_ENV = "SWITCHHELPER_WORKDIR"
DEFAULT_WORKDIR = "switchhelper-work"
MANIFEST = "manifest.json"

def parse_cmdline(argv=None):
    parser = argparse.ArgumentParser(description='Attractor Switching Helper',
                                     formatter_class=argparse.RawTextHelpFormatter,
                                     epilog=help_text)
    parser.add_argument("-d", "--debug-level", type=int, default=4, choices=range(1, 6),
                        help="set the debug level: CRITICAL=1, ERROR=2, WARNING=3, INFO=4, DEBUG=5")

    sub = parser.add_subparsers(dest="command")
    sub.required = True

    run = sub.add_parser("run", help="run a scenario file or a built-in scenario")
    run.add_argument("scenario", help="scenario file, or the name of a built-in scenario")
    run.add_argument("-o", "--output", default=None,
                     help="output directory. Default is $SWITCHHELPER_WORKDIR/<name>-<timestamp>")

    sub.add_parser("list", help="list the built-in scenarios")

    verify = sub.add_parser("verify", help="re-run a manifest and compare CSV checksums")
    verify.add_argument("manifest", help="manifest.json written by a previous run")
    return parser.parse_args(argv)

def load(target):
    if os.path.exists(target):
        D("Reading scenario file %s" % target)
        return load_scenario(target)
    return builtin_scenario(target)

class Runner(object):
    def __init__(self, scenario, output=None, workers=1):
        self.scenario = scenario
        self.opts = {'workers': workers}
        self.statistics = Statistics()
        self._make_dirs(output)

    def _make_dirs(self, output):
        if output:
            self.work_dir = output
            if not os.path.exists(self.work_dir):
                os.makedirs(self.work_dir)
            return

        base_work_dir = os.getenv(WORKDIR_ENV, '') or DEFAULT_WORKDIR
        if not os.path.exists(base_work_dir):
            os.makedirs(base_work_dir)
        self.work_dir = tempfile.mkdtemp(prefix="%s-%s-" % (self.scenario.name,
                datetime.now().strftime("%Y%m%d%H%M%S")), dir=base_work_dir)

    def _add_file_logger(self):
        fh = log.FileHandler(os.path.join(self.work_dir, "switchhelper.log"))
        fh.setFormatter(log.Formatter('%(levelname)s:%(message)s'))
        logger = log.getLogger()
        logger.addHandler(fh)
        return fh

    def _write_manifest(self, ctx, status):
        outputs = dict((name, sha256sum(os.path.join(self.work_dir, name)))
                       for name in ctx['outputs'])
        manifest = {
            'scenario': self.scenario.name,
            'figure': self.scenario.figure,
            'description': self.scenario.description,
            'action': self.scenario.action,
            'config': self.scenario.to_dict(),
            'versions': versions(),
            'outputs': outputs,
            'status': status,
        }
        return write_json(os.path.join(self.work_dir, MANIFEST), manifest)

    def run(self):
        sc = self.scenario
        fh = self._add_file_logger()
        ctx = {'scenario': sc, 'workdir': self.work_dir, 'stats': self.statistics,
               'outputs': []}
        error = None
        try:
            I(" %s: %s %s (%s)" % (sc.name, sc.action, sc.kind, sc.figure or "no figure"))
            try:
                for step, msg in action_steps[sc.action]:
                    if msg is not None:
                        I(" %s: %s" % (sc.name, msg))
                    step(self.opts, ctx)
            except Exception as e:
                if not isinstance(e, Error):
                    import traceback
                    msg = "Failed(unknown error)\n" + traceback.format_exc()
                    e = Error(message=msg)
                E(" %s: %s" % (sc.name, e.message))
                error = e

            statistics_summary = self.statistics.get_summary(sc.name, self.work_dir)
            statistics_file = os.path.join(self.work_dir, "statistics_summary")
            with open(statistics_file, "w+") as f:
                f.write(statistics_summary)
            I(" %s" % statistics_summary)

            self._write_manifest(ctx, str(error) if error else "Succeeded")
        finally:
            log.getLogger().removeHandler(fh)
            fh.close()

        self.outputs = ctx['outputs']
        if error is not None:
            return error.status
        return 0

def verify(manifest_file, workers=1):
    """ Re-run a manifest into a scratch directory; 1 when any CSV differs. """
    try:
        manifest = read_json(manifest_file)
        config = manifest['config']
    except (IOError, OSError, ValueError, KeyError) as e:
        raise ConfigError("cannot read manifest %s: %s" % (manifest_file, e))
    scenario = scenario_from_dict(config, manifest_file)
    scratch = tempfile.mkdtemp(prefix="switchhelper-verify-")
    status = Runner(scenario, scratch, workers).run()
    if status:
        E(" %s: re-run failed, see %s" % (scenario.name, scratch))
        return status

    mismatched = []
    for name, digest in sorted(manifest['outputs'].items()):
        if not name.endswith(".csv"):
            continue
        path = os.path.join(scratch, name)
        if not os.path.exists(path) or sha256sum(path) != digest:
            mismatched.append(name)

    if mismatched:
        for name in mismatched:
            E(" %s: %s differs from the manifest" % (scenario.name, name))
        E(" %s: re-run kept in %s" % (scenario.name, scratch))
        return 1

    I(" %s: all CSV outputs match the manifest" % scenario.name)
    shutil.rmtree(scratch)
    return 0

def print_scenarios():
    print("%-28s %-16s %-8s %-28s %s" % ("NAME", "FIGURE", "ACTION", "SETTINGS",
                                         "DESCRIPTION"))
    for name, figure, action, settings, description in list_scenarios():
        print("%-28s %-16s %-8s %-28s %s" % (name, figure, action, settings,
                                             description))

def close_child_processes(signal_id, frame):
    pid = os.getpgrp()
    os.killpg(pid, signal.SIGKILL)

def main(argv=None):
    debug_levels = [log.CRITICAL, log.ERROR, log.WARNING, log.INFO, log.DEBUG]
    args = parse_cmdline(argv)
    log.basicConfig(format='%(levelname)s:%(message)s',
                    level=debug_levels[args.debug_level - 1])

    if args.command == "list":
        print_scenarios()
        return 0

    workers = worker_count()
    try:
        if args.command == "run":
            runner = Runner(load(args.scenario), args.output, workers)
            status = runner.run()
            if status == 0 and not runner.statistics.all_succeeded:
                W(" Some items failed, see %s" % os.path.join(runner.work_dir,
                  "statistics_summary"))
            return status
        return verify(args.manifest, workers)
    except Error as e:
        E(" %s" % e.message)
        return e.status

if __name__ == "__main__":
    signal.signal(signal.SIGINT, close_child_processes)
    sys.exit(main())
