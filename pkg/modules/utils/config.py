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
#  Scenario files: INI sections parsed with configparser into a fully
#  resolved Scenario. Every default is written back into the resolved
#  sections so a run can be re-created from its manifest alone.
#

import configparser as cp

from logging import debug as D

from errors import ConfigError, DomainError, MissingKeyError, ParseError, \
    UnknownKeyError
from dynamics import CHANNELS, DUFFING, PARAMS, SOFT_IMPACT, SystemDef
from integrator import StepSpec
from attractors import SettleSettings

REQUIRED = object()

ACTIONS = ("simulate", "basin", "switch", "sweep", "region", "discover")
EVENT_KINDS = ("Fold", "PeriodDoubling", "Grazing")

def _bool(value):
    v = value.strip().lower()
    if v in ("yes", "true", "on", "1"):
        return True
    if v in ("no", "false", "off", "0"):
        return False
    raise ValueError("not a boolean: %r" % value)

def _pair(value):
    parts = value.split()
    if len(parts) != 2:
        raise ValueError("expected two numbers, got %r" % value)
    return (float(parts[0]), float(parts[1]))

def _words(value):
    words = value.split()
    if not words:
        raise ValueError("empty list")
    return words

def _points(value):
    """ 'P1 0.68 1.26; P2 1.1 2.05' -> [('P1', 0.68, 1.26), ...] """
    points = []
    for item in value.split(";"):
        if not item.strip():
            continue
        parts = item.split()
        if len(parts) != 3:
            raise ValueError("expected 'label value1 value2', got %r" % item)
        points.append((parts[0], float(parts[1]), float(parts[2])))
    return points

SCHEMA = {
    'scenario': {
        'name': (str, REQUIRED),
        'figure': (str, ""),
        'description': (str, ""),
        'action': (str, REQUIRED),
        'system': (str, REQUIRED),
    },
    'integrator': {
        'h': (float, "0.002"),
        'surface_tol': (float, "1e-10"),
        'max_bisect': (int, "80"),
    },
    'settle': {
        'n_transient': (int, "300"),
        'n_sample': (int, "64"),
        'p_max': (int, "16"),
        'match_tol': (float, "1e-6"),
        'steps_per_period': (int, "400"),
        'classify_tol': (float, "1e-3"),
        'discover_x': (_pair, "-2 2"),
        'discover_v': (_pair, "-2 2"),
        'discover_n': (int, "10"),
    },
    'simulate': {
        'channel': (str, ""),
        'x0': (float, REQUIRED),
        'v0': (float, REQUIRED),
        'tau0': (float, "0"),
        'tau1': (float, REQUIRED),
        'u': (float, "0"),
        'trace_every': (int, "1"),
    },
    'basin': {
        'x_range': (_pair, "-2 2"),
        'v_range': (_pair, "-2 2"),
        'nx': (int, "500"),
        'nv': (int, "500"),
        'chunk_size': (int, "2500"),
    },
    'switch': {
        'channel': (str, REQUIRED),
        'path': (_words, REQUIRED),
        'm1': (float, REQUIRED),
        'm2': (float, REQUIRED),
        'epsilon': (float, "0.001"),
        'engage_periods': (float, "80"),
        'max_periods': (float, "200"),
        'verify_periods': (float, "50"),
        'literal_condition': (_bool, "no"),
        'trace_every': (int, "10"),
    },
    'sweep': {
        'attractor': (str, REQUIRED),
        'param': (str, REQUIRED),
        'range': (_pair, REQUIRED),
        'measure': (str, ""),
        'ds': (float, "0.01"),
        'ds_max': (float, "0.05"),
        'max_points': (int, "400"),
        'steps_per_period': (int, "512"),
        'refine_tol': (float, "1e-7"),
    },
    'discover': {
        'trace_every': (int, "1"),
    },
    'region': {
        'attractor': (_words, REQUIRED),
        'kinds': (_words, REQUIRED),
        'param1': (str, REQUIRED),
        'range1': (_pair, REQUIRED),
        'param2': (str, REQUIRED),
        'end2': (float, REQUIRED),
        'slices': (int, "40"),
        'ds': (float, "0.01"),
        'ds_max': (float, "0.05"),
        'max_points': (int, "400"),
        'steps_per_period': (int, "512"),
        'refine_tol': (float, "1e-7"),
        'test_points': (_points, ""),
        'sample_n': (int, "10"),
    },
}

class Scenario(object):
    """
    A resolved scenario. sections holds every setting as text, defaults
    included; the typed values live in the attributes.
    """
    def __init__(self, sections, source):
        self.sections = sections
        self.source = source

        head = self._typed('scenario')
        self.name = head['name']
        self.figure = head['figure']
        self.description = head['description']
        self.action = head['action']
        self.kind = head['system']

        params = self._converted('params', float)
        channel = None
        if self.action in ('simulate', 'switch') and sections[self.action]['channel']:
            channel = sections[self.action]['channel']
        self.system = SystemDef(self.kind, params, channel)

        i = self._typed('integrator')
        self.spec = StepSpec(i['h'], i['surface_tol'], i['max_bisect'])

        s = self._typed('settle')
        self.settle = SettleSettings(s['n_transient'], s['n_sample'], s['p_max'],
                                     s['match_tol'], s['steps_per_period'],
                                     s['classify_tol'])
        self.discover_grid = (s['discover_x'], s['discover_v'], s['discover_n'])
        if self.settle.n_sample < 2 * self.settle.p_max:
            raise DomainError("n_sample must be >= 2*p_max")

        self.attractors = self._converted('attractors', _pair)
        self.settings = self._typed(self.action)
        self._validate()

    def __repr__(self):
        return "Scenario(%s, %s)" % (self.name, self.action)

    def _converted(self, section, conv):
        """ Every key of a free-form section through conv. """
        out = {}
        for key, raw in self.sections.get(section, {}).items():
            try:
                out[key] = conv(raw)
            except ValueError as e:
                raise ConfigError("[%s] %s: %s" % (section, key, e))
        return out

    def _typed(self, section):
        typed = {}
        for key, (conv, _) in SCHEMA[section].items():
            raw = self.sections[section][key]
            if raw == "" and conv not in (str, _points):
                typed[key] = None
                continue
            try:
                typed[key] = conv(raw)
            except ValueError as e:
                raise ConfigError("[%s] %s: %s" % (section, key, e))
        return typed

    def _validate(self):
        st = self.settings
        if self.action in ('sweep', 'region'):
            for key in ('param',) if self.action == 'sweep' else ('param1', 'param2'):
                if st[key] not in self.system.params._fields:
                    raise ConfigError("[%s] %s: %s has no parameter %s"
                                      % (self.action, key, self.kind, st[key]))
        if self.action == 'region':
            for kind in st['kinds']:
                if kind not in EVENT_KINDS:
                    raise ConfigError("[region] kinds: unknown event kind %s" % kind)
        if self.action == 'sweep' and st['measure'] not in \
                ('contact_time', 'peak_to_peak', 'impacts', 'max_x'):
            raise ConfigError("[sweep] measure: unknown measure %s" % st['measure'])

    def to_dict(self):
        return dict((section, dict(values)) for section, values in self.sections.items())

def _parser():
    cfg = cp.ConfigParser(interpolation=None)
    cfg.optionxform = str
    return cfg

def _column(line, header=False):
    """
    1-based column of the offending character: the first one of a line
    outside any section, else where the '=' was expected.
    """
    indent = len(line) - len(line.lstrip())
    if header:
        return indent + 1
    words = line.split()
    if len(words) < 2:
        return len(line.rstrip()) + 1
    return indent + len(words[0]) + 1

def _resolve(cfg, source):
    if not cfg.has_section('scenario'):
        raise MissingKeyError('scenario', 'name')

    sections = {}
    head = dict(cfg.items('scenario'))
    action = head.get('action')
    kind = head.get('system')
    if action is not None and action not in ACTIONS:
        raise ConfigError("[scenario] action: unknown action %s" % action)
    if kind is not None and kind not in CHANNELS:
        raise ConfigError("[scenario] system: unknown system %s" % kind)

    allowed = ('scenario', 'params', 'integrator', 'settle', 'attractors', action)
    for section in cfg.sections():
        if section not in allowed:
            raise UnknownKeyError(section)

    for section in ('scenario', 'integrator', 'settle', action):
        if section is None:
            continue
        given = dict(cfg.items(section)) if cfg.has_section(section) else {}
        schema = SCHEMA[section]
        for key in given:
            if key not in schema:
                raise UnknownKeyError(section, key)
        resolved = {}
        for key, (_, default) in schema.items():
            if key in given:
                resolved[key] = given[key].strip()
            elif default is REQUIRED:
                raise MissingKeyError(section, key)
            else:
                resolved[key] = default
        sections[section] = resolved

    given = dict(cfg.items('params')) if cfg.has_section('params') else {}
    fields = PARAMS[kind]._fields
    for key in given:
        if key not in fields:
            raise UnknownKeyError('params', key)
    for key in fields:
        if key not in given:
            raise MissingKeyError('params', key)
    sections['params'] = dict((key, given[key].strip()) for key in fields)

    if cfg.has_section('attractors'):
        sections['attractors'] = dict((k, v.strip()) for k, v in cfg.items('attractors'))

    if action == 'sweep' and not sections['sweep']['measure']:
        sections['sweep']['measure'] = 'contact_time' if kind == SOFT_IMPACT \
            else 'peak_to_peak'

    D("Resolved scenario %s from %s" % (sections['scenario']['name'], source))
    return Scenario(sections, source)

def parse_scenario(text, source="<string>"):
    cfg = _parser()
    try:
        cfg.read_string(text, source)
    except cp.MissingSectionHeaderError as e:
        raise ParseError(source, e.lineno, _column(e.line, header=True), e.line.strip())
    except cp.ParsingError as e:
        lineno = e.errors[0][0]
        line = text.splitlines()[lineno - 1]
        raise ParseError(source, lineno, _column(line), line.strip())
    except (cp.DuplicateSectionError, cp.DuplicateOptionError) as e:
        raise ParseError(source, e.lineno or 0, 1, e.message)
    return _resolve(cfg, source)

def scenario_from_dict(sections, source="<manifest>"):
    cfg = _parser()
    cfg.read_dict(sections, source)
    return _resolve(cfg, source)

def load_scenario(path):
    with open(path) as f:
        return parse_scenario(f.read(), path)
