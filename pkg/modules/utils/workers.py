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

import os
from multiprocessing import Pool

from logging import debug as D
from logging import warning as W

WORKERS_ENV = "SWITCHHELPER_WORKERS"

def worker_count(default=1):
    value = os.getenv(WORKERS_ENV, "")
    if not value:
        return default
    try:
        n = int(value)
    except ValueError:
        W(" Ignoring %s=%r, not an integer" % (WORKERS_ENV, value))
        return default
    return max(1, n)

def pool_map(func, jobs, workers=1):
    """ Ordered map over jobs; in-process when one worker is asked for. """
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]

    D("pool_map: %d jobs on %d workers" % (len(jobs), workers))
    with Pool(min(workers, len(jobs))) as p:
        return p.map(func, jobs)
