import math

import numpy as np
import pytest

from errors import DomainError, OrbitClosureError
from dynamics import ADDITIVE_FORCE, CUBIC_STIFFNESS, DUFFING, FORCING_AMPLITUDE, \
    GAP, SOFT_IMPACT, Partials, SystemDef, rhs_partials
from integrator import StepSpec
from attractors import SettleSettings, discover, find, initial_grid
from control import ControlBounds, OrbitTable, StepCondition, distance, \
    feasible_rate_linear, feasible_rate_parametric, run_switch, select_rate, \
    step_residual, theorem_residual
from continuation import shoot
from scenarios import builtin_scenario
from utils.artifacts import read_json

import switchhelper

from conftest import IMPACT

FAST = SettleSettings(n_transient=80, n_sample=8, p_max=4, steps_per_period=200)

@pytest.fixture(scope="module")
def duffing_targets():
    sys = SystemDef(DUFFING, dict(Gamma=1.9, omega=1.2, p1=0.8, p2=1.0))
    x0, v0 = initial_grid((-2.0, 2.0), (-2.0, 2.0), 6, 6)
    registry = discover(sys, x0, v0, FAST)
    return sys, find(registry, "p1-large"), find(registry, "p1-small")

def test_distance():
    assert distance((0.0, 0.0), (0.0, 0.0)) == 0.0
    assert distance((3.0, 4.0), (0.0, 0.0)) == 25.0
    assert distance((1.03, 0.0), (0.0, 0.0)) == pytest.approx(1.0609)

def test_bounds_validation():
    assert ControlBounds(5, 3) == (5.0, 3.0)
    for m1, m2 in ((0, 1), (1, 0), (-1, 1)):
        with pytest.raises(DomainError):
            ControlBounds(m1, m2)

def test_linear_condition_examples():
    h = 0.002
    cond = feasible_rate_linear((0.0, 1.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), h)
    assert cond.interval() == (0.0, math.inf)

    assert feasible_rate_linear((1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0),
                                h).degenerate

    cond = feasible_rate_linear((0.0, 1.0), (0.0, 2.0), (0.0, 0.0), (0.0, 0.0), h)
    assert cond.rhs == pytest.approx(4.008)
    assert cond.interval()[0] == pytest.approx(2004.0)
    assert cond.interval()[1] == math.inf
    assert select_rate(cond, ControlBounds(5.0, 3.0), 0.0, h) == 3.0

def test_linear_condition_sign():
    cond = feasible_rate_linear((0.0, -1.0), (0.0, 2.0), (0.0, 0.0), (0.0, 0.0), 0.002)
    lo, hi = cond.interval()
    assert lo == -math.inf
    assert hi == pytest.approx(1996.0)

def test_select_rate_examples():
    h = 0.002
    bounds = ControlBounds(5.0, 3.0)
    assert select_rate(StepCondition(h, -5.0 * h, h), bounds, 0.0, h) == 0.0
    assert select_rate(StepCondition(h, 2004.0 * h, h), bounds, 0.0, h) == 3.0
    assert select_rate(StepCondition(h, 1.0 * h, h), bounds, 5.0, h) == 0.0
    assert select_rate(StepCondition(-h, 2.0 * h, h), bounds, 0.0, h) == -2.0
    assert select_rate(StepCondition(h, 2.0 * h, h), bounds, 0.0, h,
                       delta_decreasing=True) == 0.0
    assert select_rate(StepCondition(0.0, 1.0, h), bounds, 0.0, h) == 0.0

def test_select_rate_near_amplitude_bound():
    h = 0.01
    bounds = ControlBounds(1.0, 10.0)
    # only 0.5/h of rate is left before |u| reaches M1
    rate = select_rate(StepCondition(h, 100.0 * h, h), bounds, 0.995, h)
    assert rate == pytest.approx(0.5)
    rate = select_rate(StepCondition(-h, 100.0 * h, h), bounds, -0.995, h)
    assert rate == pytest.approx(-0.5)

def test_parametric_degenerate_cases(duffing):
    h = 0.002
    Y = np.array([0.0, 0.7])
    part = rhs_partials(duffing, 0.4, Y, 0.0)
    cond = feasible_rate_parametric((0.3, -0.2), (0.1, 0.2), (0.0, 0.5), part, Y, h)
    assert cond.degenerate

    Y = np.array([1.2, -0.4])
    F = np.array([-0.4, 0.3])
    part = rhs_partials(duffing, 0.4, Y, 0.0)
    cond = feasible_rate_parametric((0.0, 0.0), F, F, part, F, h)
    assert cond.degenerate
    assert cond.rhs == 0.0
    assert select_rate(cond, ControlBounds(0.3, 10.0), 0.0, h) == 0.0

def test_parametric_prediction_is_truncated_expansion():
    rng = np.random.default_rng(3)
    h = 0.002
    bounds = ControlBounds(0.3, 5.0)
    for _ in range(200):
        d, G, F_tau, F_u, Y_dot = rng.normal(size=(5, 2))
        F_Y = rng.normal(size=(2, 2))
        u = rng.uniform(-0.3, 0.3)
        part = Partials(F_u, F_Y, F_tau, False)
        cond = feasible_rate_parametric(d, G, np.zeros(2), part, Y_dot, h)
        rate = select_rate(cond, bounds, u, h)

        expected = 2.0 * (d @ G) * h + h * h * ((G @ G) - d @ F_tau
                                               - d @ (F_Y @ Y_dot) - (d @ F_u) * rate)
        assert cond.predicted_change(rate) == pytest.approx(expected, rel=1e-9, abs=1e-15)
        assert abs(rate) <= bounds.M2
        assert abs(u + rate * h) <= bounds.M1 + 1e-12
        if cond.feasible(rate):
            assert cond.predicted_change(rate) <= 0.0

def test_parametric_literal_coupling():
    h = 0.002
    F_Y = np.array([[0.0, 1.0], [-3.0, -0.5]])
    part = Partials(np.array([0.0, 1.0]), F_Y, np.zeros(2), False)
    d = np.array([0.0, 1.0])
    Y_dot = np.array([2.0, 0.0])
    full = feasible_rate_parametric(d, np.zeros(2), np.zeros(2), part, Y_dot, h)
    literal = feasible_rate_parametric(d, np.zeros(2), np.zeros(2), part, Y_dot, h,
                                       literal=True)
    assert full.rhs == pytest.approx(6.0 * h)
    assert literal.rhs == pytest.approx(3.0 * h)

def test_orbit_table(duffing_targets):
    sys, large, _ = duffing_targets
    table = OrbitTable(sys, large.anchor, 1, 0.01)
    assert len(table) == int(math.ceil(sys.period / 0.01))
    assert table.closure < 1e-6
    for tau in (0.0, 0.013, 2.5, 4.0):
        assert np.linalg.norm(table.at(tau + table.span) - table.at(tau)) < 1e-8
        assert np.linalg.norm(table.at(tau + 7 * table.span) - table.at(tau)) < 1e-8
    assert np.linalg.norm(table.at(0.03) - table.samples[3]) < 1e-12

def test_orbit_table_closure_check(duffing):
    with pytest.raises(OrbitClosureError) as e:
        OrbitTable(duffing, (0.0, 0.0), 1, 0.01, polish=False)
    assert e.value.status == 3

def test_controller_stays_off_on_target(duffing_targets):
    sys, large, _ = duffing_targets
    table = OrbitTable(sys, large.anchor, 1, 0.01)
    result = run_switch(sys, table.samples[0], table, ControlBounds(0.3, 10.0),
                        CUBIC_STIFFNESS, tau_engage=2 * sys.period, verify_periods=2)
    assert result.success
    assert result.state.history == []
    assert result.max_abs_u == 0.0
    assert result.tau_off == pytest.approx(2 * sys.period)
    assert result.max_verify < 1e-4
    assert all(row[3] == 0.0 for row in result.trace)

    report = theorem_residual(result.state, 0.01)
    assert report.steps == 0
    assert report.c1 * 0.01**2 == pytest.approx(result.state.delta_off)

def test_control_respects_bounds(duffing_targets):
    sys, large, small = duffing_targets
    h = 0.01
    bounds = ControlBounds(0.3, 10.0)
    table = OrbitTable(sys, small.anchor, 1, h)
    result = run_switch(sys, large.anchor, table, bounds, CUBIC_STIFFNESS,
                        tau_engage=0.0, max_periods=3, verify_periods=1,
                        trace_every=5)
    history = result.state.history
    assert len(history) > 0
    us = [0.0] + [r.u for r in history]
    assert max(abs(u) for u in us) <= bounds.M1
    steps = np.abs(np.diff(us))
    assert steps.max() <= h * bounds.M2 * (1 + 1e-12)
    for r in history:
        if not math.isnan(r.lower) and r.lower <= r.rate <= r.upper:
            assert r.predicted <= 1e-15

    assert result.trace[0][0] == 0.0
    assert all(len(row) == 5 for row in result.trace)
    d = result.to_dict()
    assert d['control_steps'] == len(history)
    assert d['max_abs_u'] == result.max_abs_u
    if not result.converged:
        assert not result.success
        assert result.tau_off is None

    report = theorem_residual(result.state, h)
    assert report.steps == len(history)
    assert report.max_residual >= report.median_residual >= 0.0

def test_one_step_expansion_is_third_order(duffing_targets):
    sys, large, _ = duffing_targets
    table = OrbitTable(sys, large.anchor, 1, 0.001)
    hs = [0.004, 0.002, 0.001]
    for tau in (0.5, 1.7, 3.1):
        Y_u = table.at(tau) + [0.3, -0.2]
        residuals = [step_residual(sys, table, tau, Y_u, 0.2, h, table.spec) for h in hs]
        slope = np.polyfit(np.log(hs), np.log(residuals), 1)[0]
        assert slope >= 2.7

def test_engagement_one_period_later_shifts_history(duffing_targets):
    sys, large, small = duffing_targets
    h = sys.period / 200
    source = shoot(sys, large.anchor, 1, steps_per_period=200, measure=False).anchor
    table = OrbitTable(sys, small.anchor, 1, h)
    runs = [run_switch(sys, source, table, ControlBounds(0.3, 10.0), CUBIC_STIFFNESS,
                       tau_engage=k * sys.period, max_periods=20, verify_periods=1)
            for k in (2, 3)]
    early, late = [r.state.history for r in runs]
    assert len(early) == len(late) > 0
    for a, b in zip(early, late):
        assert b.tau - a.tau == pytest.approx(sys.period, abs=1e-9)
        assert abs(a.u - b.u) < 1e-6


def _impact_switch(source, target, channel, m1, m2, **params):
    sys = SystemDef(SOFT_IMPACT, dict(IMPACT, **params), channel)
    x0, v0 = initial_grid((-2.0, 2.0), (-2.0, 2.0), 10, 10)
    registry = discover(sys, x0, v0)
    fp = find(registry, target)
    table = OrbitTable(sys, fp.anchor, fp.p, 0.002)
    return run_switch(sys, find(registry, source).anchor, table,
                      ControlBounds(m1, m2))

@pytest.mark.slow
@pytest.mark.parametrize("source,target,channel,m1,m2", [
    ("p5", "p2", ADDITIVE_FORCE, 5.0, 3.0),
    ("p2", "p5", ADDITIVE_FORCE, 5.0, 3.0),
    ("p5", "p2", FORCING_AMPLITUDE, 0.3, 5.0),
    ("p2", "p5", FORCING_AMPLITUDE, 0.3, 5.0),
    ("p5", "p2", GAP, 0.3, 5.0),
    ("p2", "p5", GAP, 0.3, 5.0),
])
def test_impact_switching(source, target, channel, m1, m2):
    result = _impact_switch(source, target, channel, m1, m2)
    assert result.success
    assert result.max_abs_u <= m1
    # convergence within a few hundred periods of engagement
    assert result.periods_to_converge < 150

@pytest.mark.slow
def test_duffing_switching():
    sys = SystemDef(DUFFING, dict(Gamma=1.9, omega=1.2, p1=0.9, p2=1.0), CUBIC_STIFFNESS)
    x0, v0 = initial_grid((-2.0, 2.0), (-2.0, 2.0), 10, 10)
    registry = discover(sys, x0, v0)
    table = OrbitTable(sys, find(registry, "p1-small").anchor, 1, 0.002)
    result = run_switch(sys, find(registry, "p1-large").anchor, table,
                        ControlBounds(0.3, 10.0))
    assert result.success
    report = theorem_residual(result.state, 0.002)
    assert report.c1 * 0.002**2 <= 1e-6

@pytest.mark.slow
@pytest.mark.parametrize("name,legs", [("three-cycle-amp", 3), ("duffing-switch", 2)])
def test_builtin_switch_cycles(tmp_path, name, legs):
    runner = switchhelper.Runner(builtin_scenario(name), str(tmp_path / "out"))
    assert runner.run() == 0
    summary = read_json(str(tmp_path / "out" / "switch.json"))
    assert len(summary['legs']) == legs
    assert all(leg['success'] for leg in summary['legs'])
