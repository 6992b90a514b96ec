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
#  Built-in scenarios, one per reproduced figure, kept as scenario file text
#  so they go through the same parser as user files.
#

from errors import ConfigError
from utils.config import parse_scenario

IMPACT_AT = """
[params]
zeta = 0.01
e = 1.26
a = %s
beta = 28
omega = 0.85
"""

IMPACT = IMPACT_AT % "0.7"

IMPACT_THREE = """
[params]
zeta = 0.01
e = 1.28
a = 0.49
beta = 28
omega = 0.8528

[settle]
discover_n = 16
"""

DUFFING = """
[params]
Gamma = 1.9
omega = 1.2
p1 = %s
p2 = 1
"""

def _head(name, figure, action, system, description):
    return """
[scenario]
name = %s
figure = %s
action = %s
system = %s
description = %s
""" % (name, figure, action, system, description)

def _switch(channel, path, m1, m2):
    return """
[switch]
channel = %s
path = %s
m1 = %s
m2 = %s
""" % (channel, path, m1, m2)

BUILTIN = {}

def _add(name, figure, action, system, description, body):
    BUILTIN[name] = _head(name, figure, action, system, description) + body

_add("basin-impact-default", "Fig. 2", "basin", "SoftImpact",
     "basins of the coexisting period-2 and period-5 attractors", IMPACT)

_add("trajectory-impact", "Fig. 2", "simulate", "SoftImpact",
     "uncontrolled trajectory from the origin, about 100 periods", IMPACT + """
[simulate]
x0 = 0
v0 = 0
tau1 = 740
trace_every = 10
""")

for src, dst, fig in (("p5", "p2", "Fig. 3"), ("p2", "p5", "Fig. 4")):
    _add("switch-%s-to-%s-linear" % (src, dst), fig, "switch", "SoftImpact",
         "additive force switch %s to %s" % (src, dst),
         IMPACT + _switch("AdditiveForce", "%s %s" % (src, dst), 5, 3))

for src, dst, fig in (("p5", "p2", "Fig. 5"), ("p2", "p5", "Fig. 6")):
    _add("switch-%s-to-%s-amp" % (src, dst), fig, "switch", "SoftImpact",
         "forcing amplitude switch %s to %s" % (src, dst),
         IMPACT + _switch("ForcingAmplitude", "%s %s" % (src, dst), 0.3, 5))

for src, dst, fig in (("p5", "p2", "Fig. 7"), ("p2", "p5", "Fig. 8")):
    _add("switch-%s-to-%s-gap" % (src, dst), fig, "switch", "SoftImpact",
         "gap switch %s to %s" % (src, dst),
         IMPACT + _switch("Gap", "%s %s" % (src, dst), 0.3, 5))

_add("basin-three-attractors", "Fig. 9", "basin", "SoftImpact",
     "basins of two period-7 attractors and a period-3 attractor", IMPACT_THREE)

_add("three-cycle-amp", "Fig. 10", "switch", "SoftImpact",
     "forcing amplitude cycle through three coexisting attractors",
     IMPACT_THREE + _switch("ForcingAmplitude", "p7-large p7-small p3 p7-large",
                            0.2, 10))

_add("basin-duffing", "Fig. 11", "basin", "Duffing",
     "basins of the two period-1 Duffing attractors", DUFFING % "0.9")

_add("duffing-switch", "Figs. 12-13", "switch", "Duffing",
     "cubic stiffness switch large to small and back",
     DUFFING % "0.9" + _switch("CubicStiffness", "p1-large p1-small p1-large",
                               0.3, 10))

_add("sweep-impact-p2-a", "Fig. 6", "sweep", "SoftImpact",
     "period-2 branch in the forcing amplitude (PD1, GR1)", IMPACT + """
[sweep]
attractor = p2
param = a
range = 0.55 1.6
""")

_add("sweep-impact-p5-a", "Fig. 6", "sweep", "SoftImpact",
     "period-5 branch in the forcing amplitude (PD2, GR2)", IMPACT + """
[sweep]
attractor = p5
param = a
range = 0.6 0.8
ds = 0.002
ds_max = 0.005
""")

_add("region-impact-a-e", "Fig. 7", "region", "SoftImpact",
     "period-2 and period-5 loci and their coexistence region in the amplitude-gap plane",
     IMPACT + """
[region]
attractor = p2 p5
kinds = PeriodDoubling Grazing
param1 = a
range1 = 0.5 1.7
param2 = e
end2 = 3.0
slices = 16
ds = 0.002
ds_max = 0.01
test_points = P1 0.68 1.26; P2 1.1 2.05; P3 1.5 2.8
""")

for p, a, fig in ((4, "0.63", "Fig. 6f"), (10, "0.645", "Fig. 6d")):
    _add("daughter-p%d" % p, fig, "discover", "SoftImpact",
         "period-%d orbit born in a period doubling" % p, IMPACT_AT % a + """
[settle]
n_transient = 20000
match_tol = 1e-5
discover_n = 8

[discover]
trace_every = 4
""")

_add("sweep-duffing-p1", "Fig. 12a", "sweep", "Duffing",
     "large-amplitude period-1 branch in the damping (F1, F2)",
     DUFFING % "0.8" + """
[sweep]
attractor = p1-large
param = p1
range = 0.4 1.4
""")

_add("region-duffing-p1-p2", "Fig. 12d", "region", "Duffing",
     "fold loci and cusp in the damping-stiffness plane", DUFFING % "0.8" + """
[region]
attractor = p1-large
kinds = Fold
param1 = p1
range1 = 0.4 1.6
param2 = p2
end2 = 1.7
slices = 40
ds_max = 0.02
test_points = inside 0.8 1; outside 1.2 1
""")

def builtin_scenario(name):
    if name not in BUILTIN:
        raise ConfigError("no built-in scenario named %s" % name)
    return parse_scenario(BUILTIN[name], "builtin:%s" % name)

def list_scenarios():
    """ (name, figure, action, settings, description) for every built-in. """
    table = []
    for name in sorted(BUILTIN):
        sc = builtin_scenario(name)
        settings = ""
        if sc.action == "switch":
            settings = "%s M1=%g M2=%g" % (sc.system.channel, sc.settings["m1"],
                                           sc.settings["m2"])
        elif sc.action in ("sweep", "region"):
            settings = sc.sections[sc.action]["attractor"]
        table.append((sc.name, sc.figure, sc.action, settings, sc.description))
    return table
