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

import hashlib
import json
import os
import platform

import numpy as np
import scipy

from logging import debug as D

from utils.git import Git

FLOAT_FORMAT = "%.17g"

def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)

def _replace(path, write):
    tmp = path + ".tmp"
    with open(tmp, "w") as f:
        write(f)
    os.rename(tmp, path)
    D("Wrote %s" % path)
    return path

def write_csv(path, header, rows):
    def write(f):
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(v) for v in row) + "\n")
    return _replace(path, write)

def _plain(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError("cannot serialize %r" % type(obj))

def write_json(path, obj):
    def write(f):
        json.dump(obj, f, indent=2, sort_keys=True, default=_plain)
        f.write("\n")
    return _replace(path, write)

def read_json(path):
    with open(path) as f:
        return json.load(f)

def sha256sum(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            h.update(block)
    return h.hexdigest()

def versions():
    repo = Git(os.path.dirname(os.path.dirname(os.path.dirname(
        os.path.abspath(__file__)))))
    return {'python': platform.python_version(),
            'numpy': np.__version__,
            'scipy': scipy.__version__,
            'switchhelper': repo.describe()}
