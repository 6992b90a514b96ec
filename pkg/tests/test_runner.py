import logging
import os
import pickle

import numpy as np
import pytest

from errors import ChannelError, ConfigError, DomainError, MissingKeyError, \
    NoOrbitError, ParseError, UnknownKeyError
from statistics import Statistics
from scenarios import BUILTIN, builtin_scenario, list_scenarios
from utils.artifacts import fmt, read_json, sha256sum, write_csv, write_json
from utils.config import parse_scenario, scenario_from_dict
from utils.workers import pool_map, worker_count

import switchhelper

PARAMS = """
[params]
zeta = 0.01
e = 1.26
a = 0.7
beta = 28
omega = 0.85
"""

TINY = """
[scenario]
name = tiny
figure = none
action = simulate
system = SoftImpact
""" + PARAMS + """
[integrator]
h = 0.01

[simulate]
x0 = 1.2
v0 = 0.5
tau1 = 1
trace_every = 10
"""

def test_missing_key_names_it():
    text = TINY.replace("omega = 0.85\n", "")
    with pytest.raises(MissingKeyError) as e:
        parse_scenario(text)
    assert e.value.status == 2
    assert e.value.key == "omega"
    assert "omega" in e.value.message

def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_scenario("[scenario]\nname = x\nnot a setting\n", "bad.conf")
    assert (e.value.lineno, e.value.colno) == (3, 4)
    assert e.value.message.startswith("bad.conf:3:4:")
    assert e.value.status == 2

    with pytest.raises(ParseError) as e:
        parse_scenario("[scenario]\n  lonely\n", "bad.conf")
    assert (e.value.lineno, e.value.colno) == (2, 9)

    with pytest.raises(ParseError) as e:
        parse_scenario("name = x\n")
    assert e.value.lineno == 1
    assert e.value.colno == 1

    with pytest.raises(ParseError):
        parse_scenario("[scenario]\nname = a\nname = b\n")

def test_unknown_keys_and_sections():
    with pytest.raises(UnknownKeyError) as e:
        parse_scenario(TINY.replace("h = 0.01", "h = 0.01\nstep = 2"))
    assert e.value.key == "step"
    assert "unknown key 'step' in section [integrator]" == e.value.message

    with pytest.raises(UnknownKeyError) as e:
        parse_scenario(TINY + "\n[plotting]\ncolor = red\n")
    assert e.value.section == "plotting"

    with pytest.raises(UnknownKeyError):
        parse_scenario(TINY.replace("beta = 28", "beta = 28\np1 = 0.9"))

    with pytest.raises(UnknownKeyError):
        parse_scenario(TINY + "\n[basin]\nnx = 3\n")

def test_bad_values():
    with pytest.raises(ConfigError) as e:
        parse_scenario(TINY.replace("h = 0.01", "h = fast"))
    assert "[integrator] h" in e.value.message
    with pytest.raises(DomainError):
        parse_scenario(TINY.replace("h = 0.01", "h = -0.01"))
    with pytest.raises(ChannelError):
        parse_scenario(TINY.replace("x0 = 1.2", "x0 = 1.2\nchannel = CubicStiffness"))
    with pytest.raises(ConfigError):
        parse_scenario(TINY.replace("action = simulate", "action = plot"))
    with pytest.raises(ConfigError):
        parse_scenario(TINY.replace("system = SoftImpact", "system = Pendulum"))

def test_bad_free_form_values():
    with pytest.raises(ConfigError) as e:
        parse_scenario(TINY.replace("omega = 0.85", "omega = fast"))
    assert e.value.message.startswith("[params] omega:")
    with pytest.raises(ConfigError) as e:
        parse_scenario(TINY + "\n[attractors]\np2 = 0.5\n")
    assert e.value.message.startswith("[attractors] p2:")

@pytest.mark.parametrize("text", [
    TINY.replace("omega = 0.85", "omega = fast"),
    TINY + "\n[attractors]\np2 = 0.5\n",
])
def test_cli_bad_values_exit_two(tmp_path, text):
    conf = tmp_path / "bad.conf"
    conf.write_text(text)
    assert switchhelper.main(["run", str(conf), "-o", str(tmp_path / "out")]) == 2


def test_defaults_are_resolved():
    sc = parse_scenario(TINY)
    sections = sc.to_dict()
    assert sections['integrator'] == {'h': '0.01', 'surface_tol': '1e-10',
                                      'max_bisect': '80'}
    assert sections['simulate']['u'] == '0'
    assert sections['settle']['n_transient'] == '300'
    assert sc.spec.h == 0.01
    assert sc.settle.match_tol == 1e-6
    assert sc.settings['tau1'] == 1.0
    assert sc.system.channel == "AdditiveForce"

    again = scenario_from_dict(sections)
    assert again.to_dict() == sections
    assert again.system == sc.system

def test_named_initial_conditions():
    sc = parse_scenario(TINY + "\n[attractors]\np2 = 0.5 -1.0\np5 = 1.5 0.25\n")
    assert sc.attractors == {'p2': (0.5, -1.0), 'p5': (1.5, 0.25)}

def test_builtin_scenarios():
    table = list_scenarios()
    assert len(table) >= 12
    rows = dict((name, (figure, action, settings)) for name, figure, action,
                settings, _ in table)
    assert rows['three-cycle-amp'] == ("Fig. 10", "switch", "ForcingAmplitude M1=0.2 M2=10")
    assert rows['duffing-switch'][2] == "CubicStiffness M1=0.3 M2=10"
    assert rows['switch-p5-to-p2-linear'][2] == "AdditiveForce M1=5 M2=3"
    assert rows['basin-impact-default'][:2] == ("Fig. 2", "basin")
    assert rows['region-impact-a-e'][2] == "p2 p5"
    assert rows['daughter-p10'] == ("Fig. 6d", "discover", "")
    for action in ("simulate", "basin", "switch", "sweep", "region", "discover"):
        assert action in [r[1] for r in rows.values()]
    assert all(figure for figure, _, _ in rows.values())

def test_builtin_settings():
    sc = builtin_scenario("sweep-duffing-p1")
    assert sc.settings['measure'] == 'peak_to_peak'
    assert builtin_scenario("sweep-impact-p2-a").settings['measure'] == 'contact_time'

    sc = builtin_scenario("region-impact-a-e")
    assert sc.settings['kinds'] == ['PeriodDoubling', 'Grazing']
    assert sc.settings['attractor'] == ['p2', 'p5']
    assert sc.settings['test_points'][1] == ('P2', 1.1, 2.05)

    sc = builtin_scenario("three-cycle-amp")
    assert sc.settings['path'] == ['p7-large', 'p7-small', 'p3', 'p7-large']
    assert sc.system.params.omega == 0.8528
    assert sc.discover_grid[2] == 16

    with pytest.raises(ConfigError):
        builtin_scenario("no-such-scenario")

def test_errors_survive_pickling():
    for e in (MissingKeyError('params', 'omega'), NoOrbitError(1.0, 30)):
        copy = pickle.loads(pickle.dumps(e))
        assert type(copy) is type(e)
        assert copy.message == e.message
        assert str(copy) == str(e)

def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(np.float64(1.0)) == "1"
    assert fmt(True) == "1"
    assert fmt(np.int64(7)) == "7"
    assert fmt("p2") == "p2"
    assert float(fmt(2.0 / 3.0)) == 2.0 / 3.0

def test_atomic_writes(tmp_path):
    path = str(tmp_path / "out.csv")
    write_csv(path, ("a", "b"), [(1, 0.5), (2, np.float64(0.25))])
    with open(path) as f:
        assert f.read() == "a,b\n1,0.5\n2,0.25\n"
    assert os.listdir(str(tmp_path)) == ["out.csv"]

    path = str(tmp_path / "out.json")
    write_json(path, {'b': np.arange(2), 'a': np.float64(0.5), 'c': 1 + 2j})
    assert read_json(path) == {'a': 0.5, 'b': [0, 1], 'c': [1.0, 2.0]}
    assert len(sha256sum(path)) == 64

def test_worker_count(monkeypatch):
    monkeypatch.delenv("SWITCHHELPER_WORKERS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("SWITCHHELPER_WORKERS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("SWITCHHELPER_WORKERS", "many")
    assert worker_count() == 1
    monkeypatch.setenv("SWITCHHELPER_WORKERS", "0")
    assert worker_count() == 1

def test_pool_map_keeps_order():
    assert pool_map(abs, [-3, 2, -1], workers=2) == [3, 2, 1]
    assert pool_map(abs, [-3, 2, -1]) == [3, 2, 1]

def test_statistics_summary():
    stats = Statistics()
    stats.update("switch", "p5->p2", "tau_off=640", None)
    stats.update("switch", "p2->p5", "distance 0.5", "Failed(no switch)")
    stats.update("event", "Fold", "p1=0.9", NoOrbitError(1.0, 8))
    assert not stats.all_succeeded
    summary = stats.get_summary("demo", "/tmp/demo")
    assert "Scenario demo finished" in summary
    assert "* Succeeded: 1" in summary
    assert "* Failed(no switch): 1" in summary
    assert "* Failed(shoot): 1" in summary
    assert "TOTAL: attempted=3 succeeded=1(33.33%) failed=2(66.67%)" in summary
    assert "switch: attempted=2 succeeded=1(50.00%)" in summary

@pytest.fixture
def tiny_run(tmp_path):
    conf = tmp_path / "tiny.conf"
    conf.write_text(TINY)
    out = tmp_path / "out"
    status = switchhelper.main(["-d", "3", "run", str(conf), "-o", str(out)])
    return status, out

def test_simulate_run(tiny_run):
    status, out = tiny_run
    assert status == 0
    assert sorted(os.listdir(str(out))) == ["manifest.json", "statistics_summary",
                                            "switchhelper.log", "trajectory.csv"]
    with open(str(out / "trajectory.csv")) as f:
        lines = f.read().splitlines()
    assert lines[0] == "tau,x,v,u"
    assert len(lines) == 12
    assert lines[1] == "0,1.2,0.5,0"
    assert float(lines[-1].split(",")[0]) == pytest.approx(1.0)

    manifest = read_json(str(out / "manifest.json"))
    assert manifest['scenario'] == "tiny"
    assert manifest['status'] == "Succeeded"
    assert manifest['config']['params']['omega'] == "0.85"
    assert set(manifest['versions']) == {'python', 'numpy', 'scipy', 'switchhelper'}
    assert manifest['outputs'] == {'trajectory.csv': sha256sum(str(out / "trajectory.csv"))}

def test_verify_reproduces(tiny_run):
    status, out = tiny_run
    manifest = str(out / "manifest.json")
    assert switchhelper.main(["verify", manifest]) == 0

    data = read_json(manifest)
    data['outputs']['trajectory.csv'] = "0" * 64
    write_json(manifest, data)
    assert switchhelper.verify(manifest) == 1

def test_cli_config_errors(tmp_path, caplog):
    conf = tmp_path / "broken.conf"
    conf.write_text(TINY.replace("omega = 0.85\n", ""))
    with caplog.at_level(logging.ERROR):
        assert switchhelper.main(["run", str(conf)]) == 2
    assert "missing key 'omega' in section [params]" in caplog.text
    assert switchhelper.main(["run", "no-such-scenario"]) == 2

def test_cli_list(capsys):
    assert switchhelper.main(["list"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("NAME")
    assert "three-cycle-amp" in out
    assert len(out.splitlines()) == len(BUILTIN) + 1

def test_failing_step_sets_status(tmp_path, monkeypatch):
    def broken(opts, ctx):
        raise NoOrbitError(1.0, 30)
    monkeypatch.setitem(switchhelper.action_steps, "simulate", [(broken, None)])
    runner = switchhelper.Runner(parse_scenario(TINY), str(tmp_path / "out"))
    assert runner.run() == 3
    manifest = read_json(str(tmp_path / "out" / "manifest.json"))
    assert manifest["status"] == "Failed(shoot)"
    assert manifest['outputs'] == {}

def test_verify_missing_manifest(tmp_path, caplog):
    with caplog.at_level(logging.ERROR):
        assert switchhelper.main(["verify", str(tmp_path / "missing.json")]) == 2
    assert "cannot read manifest" in caplog.text

    broken = tmp_path / "broken.json"
    broken.write_text("{}")
    assert switchhelper.main(["verify", str(broken)]) == 2

def test_runs_get_distinct_work_dirs(tmp_path, monkeypatch):
    monkeypatch.setenv("SWITCHHELPER_WORKDIR", str(tmp_path))
    first = switchhelper.Runner(parse_scenario(TINY))
    second = switchhelper.Runner(parse_scenario(TINY))
    assert first.work_dir != second.work_dir
    for runner in (first, second):
        assert os.path.isdir(runner.work_dir)
        assert os.path.dirname(runner.work_dir) == str(tmp_path)
        assert os.path.basename(runner.work_dir).startswith("tiny-")

DUFFING_RUN = """
[scenario]
name = duffing-%s
action = %s
system = Duffing

[params]
Gamma = 1.9
omega = 1.2
p1 = 0.8
p2 = 1

[integrator]
h = 0.01

[settle]
n_transient = 80
n_sample = 8
p_max = 4
steps_per_period = 200
discover_n = 6
"""

def _run(tmp_path, action, body):
    out = tmp_path / "out"
    runner = switchhelper.Runner(parse_scenario(DUFFING_RUN % (action, action) + body),
                                 str(out))
    assert runner.run() == 0
    manifest = read_json(str(out / "manifest.json"))
    assert manifest['status'] == "Succeeded"
    for name, digest in manifest['outputs'].items():
        assert sha256sum(str(out / name)) == digest
    return out, manifest

def test_basin_run(tmp_path):
    out, manifest = _run(tmp_path, "basin", "\n[basin]\nnx = 4\nnv = 4\n")
    assert sorted(manifest['outputs']) == ["basin.csv", "basin.json"]
    basin = read_json(str(out / "basin.json"))
    assert [fp['name'] for fp in basin['registry']] == ["p1-large", "p1-small"]
    assert sum(basin['counts'].values()) == 16

def test_switch_run(tmp_path):
    out, manifest = _run(tmp_path, "switch", """
[switch]
channel = CubicStiffness
path = p1-large p1-small
m1 = 0.3
m2 = 10
engage_periods = 1
max_periods = 3
verify_periods = 1
""")
    summary = read_json(str(out / "switch.json"))
    assert len(summary['legs']) == 1
    leg = summary['legs'][0]
    assert (leg['source'], leg['target']) == ("p1-large", "p1-small")
    assert leg['trace'] in manifest['outputs']
    assert leg['max_abs_u'] <= 0.3

def test_sweep_run(tmp_path):
    out, manifest = _run(tmp_path, "sweep", """
[sweep]
attractor = p1-small
param = p1
range = 0.78 0.82
ds = 0.01
ds_max = 0.01
max_points = 10
steps_per_period = 128
""")
    assert sorted(manifest['outputs']) == ["branch.csv", "events.json"]
    with open(str(out / "branch.csv")) as f:
        lines = f.read().splitlines()
    assert lines[0] == "param,measure,lambda1_re,lambda1_im,lambda2_re,lambda2_im,stable"
    assert len(lines) > 2
    events = read_json(str(out / "events.json"))
    assert events['measure'] == "peak_to_peak"

def test_region_run(tmp_path):
    out, manifest = _run(tmp_path, "region", """
[region]
attractor = p1-small
kinds = Fold
param1 = p1
range1 = 0.78 0.82
param2 = p2
end2 = 1.02
slices = 2
ds = 0.01
ds_max = 0.01
max_points = 10
steps_per_period = 128
""")
    assert sorted(manifest['outputs']) == ["locus.csv", "region.json"]
    with open(str(out / "locus.csv")) as f:
        assert f.readline().strip() == "p2,attractor,kind,p1"
    region = read_json(str(out / "region.json"))
    assert list(region['loci']) == ["p1-small"]
    slices = region['loci']['p1-small']['slices']
    assert [s['value'] for s in slices] == pytest.approx([1.0, 1.02])
    lo, hi = slices[0]['window']
    assert 0.78 <= lo < 0.8 < hi <= 0.82
    assert [c['window'] for c in region['coexistence']] == [s['window'] for s in slices]
    assert region['points'] == []

def test_discover_run(tmp_path):
    out, manifest = _run(tmp_path, "discover", "\n[discover]\ntrace_every = 5\n")
    assert sorted(manifest['outputs']) == ["attractors.json", "orbit-p1-large.csv",
                                           "orbit-p1-small.csv"]
    registry = read_json(str(out / "attractors.json"))['registry']
    assert [fp['name'] for fp in registry] == ["p1-large", "p1-small"]
    with open(str(out / "orbit-p1-large.csv")) as f:
        lines = f.read().splitlines()
    assert lines[0] == "tau,x,v"
    assert float(lines[1].split(",")[1]) == pytest.approx(registry[0]['poincare_points'][0][0])

@pytest.mark.slow
def test_linear_switch_builtin(tmp_path):
    runner = switchhelper.Runner(builtin_scenario("switch-p5-to-p2-linear"),
                                 str(tmp_path / "out"))
    assert runner.run() == 0
    assert runner.statistics.all_succeeded
    summary = read_json(str(tmp_path / "out" / "switch.json"))
    assert [leg['success'] for leg in summary['legs']] == [True]

@pytest.mark.slow
def test_impact_basin_builtin(tmp_path):
    sections = builtin_scenario("basin-impact-default").to_dict()
    sections['basin']['nx'] = sections['basin']['nv'] = "20"
    runner = switchhelper.Runner(scenario_from_dict(sections), str(tmp_path / "out"))
    assert runner.run() == 0
    basin = read_json(str(tmp_path / "out" / "basin.json"))
    assert [fp['name'] for fp in basin['registry']] == ["p2", "p5"]
    assert basin['counts']['p2'] > 0 and basin['counts']['p5'] > 0
