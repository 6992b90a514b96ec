import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(1, os.path.join(ROOT, 'modules'))
sys.path.insert(1, ROOT)

# modules/statistics.py shadows the stdlib module of the same name
if not hasattr(sys.modules.get("statistics"), "Statistics"):
    sys.modules.pop("statistics", None)

from dynamics import DUFFING, SOFT_IMPACT, SystemDef

IMPACT = dict(zeta=0.01, e=1.26, a=0.7, beta=28.0, omega=0.85)
IMPACT_THREE = dict(zeta=0.01, e=1.28, a=0.49, beta=28.0, omega=0.8528)

@pytest.fixture
def impact():
    return SystemDef(SOFT_IMPACT, IMPACT)

@pytest.fixture
def duffing():
    # strongly damped: both period-1 attractors settle within a few dozen periods
    return SystemDef(DUFFING, dict(Gamma=1.9, omega=1.2, p1=0.8, p2=1.0))

@pytest.fixture
def harmonic():
    return SystemDef(SOFT_IMPACT, dict(zeta=0.0, e=1.0, a=0.0, beta=0.0, omega=1.0))
