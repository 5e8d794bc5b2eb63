import json
import random
from fractions import Fraction

import pytest

from simtheta import cli, suites
from simtheta.config import (InvalidConfig, RunConfig, SUITE_NAMES, UnknownSuite, battery_configs, from_mapping,
                             parse_config)
from simtheta.exact import QuadExtField
from simtheta.local import Mu8
from simtheta.suites import Instance, decode, encode, replay, run_suite

BASIC = """
# small run
p = 3
delta = 2
m = 1
gram_V = 1
r = 1
trials = 3
suites = gamma-props, h-plus
"""


def test_parse_config():
    cfg = parse_config(BASIC)
    assert cfg.p == 3 and cfg.delta == 2 and cfg.gram_V == (Fraction(1),)
    assert cfg.suites == ("gamma-props", "h-plus") and cfg.trials == 3
    assert parse_config(BASIC.replace("gamma-props, h-plus", "all")).suites == SUITE_NAMES
    assert from_mapping(cfg.as_dict()) == cfg


@pytest.mark.parametrize("edit, message", [
    (("trials = 3", "trials = 0"), "trials"),
    (("delta = 2", "delta = 4"), "square"),
    (("p = 3", "p = 9"), "odd prime"),
    (("gram_V = 1", "gram_V = 1, 2"), "gram_V"),
    (("gram_V = 1", "gram_V = 0"), "nonzero"),
    (("r = 1", "r = 0"), "r must"),
    (("m = 1", "m = 1\nm = 2"), "duplicate"),
    (("m = 1", "m = one"), "integer"),
    (("r = 1", "colour = red\nr = 1"), "unknown keys"),
    (("r = 1", ""), "missing"),
    (("r = 1", "r 1"), "key = value"),
])
def test_invalid_configs(edit, message):
    with pytest.raises(InvalidConfig, match=message):
        parse_config(BASIC.replace(*edit))


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        parse_config(BASIC.replace("gamma-props", "nope"))
    with pytest.raises(UnknownSuite):
        suites.get_suite("nope")


def test_battery_shape():
    cfgs = battery_configs()
    assert len(cfgs) == 18
    assert {(c.p, c.delta) for c in cfgs} == {(3, 2), (5, 2), (7, 3)}


def test_encode_decode_roundtrip():
    cfg = RunConfig(p=5, delta=Fraction(2), m=2, gram_V=(Fraction(1), Fraction(1)), r=1)
    inst = Instance(cfg)
    rng = random.Random(0)
    case = {"g": inst.rand_g(rng), "h": inst.rand_h(rng), "s": inst.rand_gsp(rng),
            "y": Fraction(-3, 5), "k": 7, "flag": True, "z": Mu8(3), "e": QuadExtField(2)(1, -1),
            "seq": [Fraction(1), 2]}
    data = json.loads(json.dumps(encode(case)))
    back = decode(data, inst.E)
    assert back == case


def test_run_suite_is_deterministic():
    cfg = parse_config(BASIC).with_(trials=5)
    a = run_suite("prop-32-G", cfg)
    b = run_suite("prop-32-G", cfg)
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert a == b and a["failures"] == "0"
    c = run_suite("prop-32-G", cfg.with_(seed=1))
    assert c["trials"] == "5"


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_cli_pass_and_report(tmp_path, capsys):
    cfg = write(tmp_path, BASIC)
    out = tmp_path / "rep.json"
    assert cli.main(["--config", cfg, "--report", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["status"] == "pass"
    assert rep["leray_convention"] == {"sign": "-1", "scale": "1"}
    assert [s["suite"] for s in rep["runs"][0]["suites"]] == ["gamma-props", "h-plus"]
    assert "PASS gamma-props" in capsys.readouterr().err


def test_cli_overrides(tmp_path, capsys):
    cfg = write(tmp_path, BASIC)
    assert cli.main(["--config", cfg, "--suite", "lemma-31-1", "--trials", "2", "--seed", "9"]) == 0
    rep = json.loads(capsys.readouterr().out)
    run = rep["runs"][0]
    assert run["config"]["seed"] == "9" and run["suites"][0]["trials"] == "2"


def test_cli_usage_errors(tmp_path):
    assert cli.main([]) == 2
    assert cli.main(["--bogus"]) == 2
    assert cli.main(["--config", str(tmp_path / "missing.cfg")]) == 2
    assert cli.main(["--config", write(tmp_path, BASIC.replace("trials = 3", "trials = 0"))]) == 2
    assert cli.main(["--config", write(tmp_path, BASIC), "--suite", "nope"]) == 2
    assert cli.main(["--battery", "--suite", "nope"]) == 2
    # odd m needs an unramified extension for chi
    ram = BASIC.replace("delta = 2", "delta = 3").replace("gamma-props, h-plus", "relation-3")
    assert cli.main(["--config", write(tmp_path, ram)]) == 2
    (tmp_path / "bad.json").write_text("{not json")
    assert cli.main(["--replay", str(tmp_path / "bad.json")]) == 2


def test_cli_failure_exit_and_replay(tmp_path, monkeypatch, capsys):
    # force a wrong closed form inside a suite: the run must report failures
    monkeypatch.setattr(suites, "weil_index_scalar", lambda y, ctx: Mu8(1))
    cfg = write(tmp_path, BASIC.replace("gamma-props, h-plus", "gamma-props"))
    out = tmp_path / "rep.json"
    assert cli.main(["--config", cfg, "--report", str(out)]) == 1
    rep = json.loads(out.read_text())
    dumps = rep["runs"][0]["suites"][0]["counterexamples"]
    assert rep["status"] == "fail" and dumps
    assert dumps[0]["suite"] == "gamma-props" and dumps[0]["inputs"]
    # replaying under the broken closed form still fails; restored, it passes
    assert cli.main(["--replay", str(out)]) == 1
    monkeypatch.undo()
    (tmp_path / "one.json").write_text(json.dumps(dumps[0]))
    assert cli.main(["--replay", str(tmp_path / "one.json")]) == 0
    assert all(c.ok for c in replay(dumps[0]))


def test_cli_internal_error(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("boom")
    monkeypatch.setattr(cli, "run_suite", boom)
    assert cli.main(["--config", write(tmp_path, BASIC)]) == 3


def test_cli_calibration_mismatch(monkeypatch):
    monkeypatch.setattr(cli, "calibrate_leray", lambda: ([], []))
    assert cli.main(["--check-calibration"]) == 3


def test_dump_limit_caps_counterexamples(monkeypatch):
    monkeypatch.setattr(suites, "weil_index_scalar", lambda y, ctx: Mu8(1))
    cfg = parse_config(BASIC).with_(trials=6, dump_limit=2)
    rep = run_suite("gamma-props", cfg)
    assert int(rep["failures"]) >= 6 and len(rep["counterexamples"]) == 2


def test_prop33_suite_witness_replay():
    # m odd: the suite-level witness check replays from the config alone
    cfg = parse_config(BASIC).with_(trials=20, suites=("prop-33",))
    rep = run_suite("prop-33", cfg)
    assert rep["failures"] == "0"
    dump = {"suite": "prop-33", "trial": "suite", "check": "", "inputs": None, "config": cfg.as_dict()}
    (check,) = replay(dump)
    assert check.ok
