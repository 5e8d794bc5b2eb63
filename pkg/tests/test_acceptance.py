"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line; the lines
are collected again at the end of the pytest run (see conftest.py).

The default battery (p in {3, 5, 7}, (m, r) in {1,2,3} x {1,2}) is run once
per session, timed, and shared by criteria 2-10.
"""

import io
import json
import time
from fractions import Fraction

import pytest

from simtheta import local
from simtheta.cli import run_configs
from simtheta.config import BATTERY_TRIALS, battery_configs
from simtheta.local import square_class_reps, weil_index_gauss_oracle

LINES = []
BUDGET_S = 15 * 60


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {detail}"
    LINES.append(line)
    print(line)
    return ok


def run_battery():
    t0 = time.perf_counter()
    rep = run_configs(battery_configs(seed=0), trials_for=BATTERY_TRIALS.__getitem__, log=io.StringIO())
    return rep, time.perf_counter() - t0


@pytest.fixture(scope="session")
def battery():
    return run_battery()


def suite_rows(rep, name):
    for run in rep["runs"]:
        cfg = run["config"]
        for s in run["suites"]:
            if s["suite"] == name:
                yield cfg, s


def tag(cfg):
    return f"p={cfg['p']} m={cfg['m']} r={cfg['r']}"


def zero_failures(rep, names, keep=lambda cfg: True):
    rows = [(cfg, s) for name in names for cfg, s in suite_rows(rep, name) if keep(cfg)]
    bad = [f"{s['suite']} {tag(cfg)} failures={s['failures']}" for cfg, s in rows if s["failures"] != "0"]
    trials = sum(int(s["trials"]) for _, s in rows)
    return rows, bad, trials


def check_zero(n, rep, names, keep=lambda cfg: True):
    rows, bad, trials = zero_failures(rep, names, keep)
    detail = f"{'/'.join(names)}: {len(rows)} suite runs, {trials} trials"
    detail += "; failing: " + ", ".join(bad) if bad else ", 0 failures"
    assert report(n, rows and not bad, detail), detail


def test_criterion_01_weil_calibration():
    local._gauss_sum_phase.cache_clear()  # time the Gauss sums from cold
    t0 = time.perf_counter()
    mismatches = []
    for p in (3, 5, 7):
        for c in (Fraction(1), Fraction(1, 2)):
            local.calibrate_weil_index.__wrapped__(p, c)
            for a in square_class_reps(p):
                if local._weil_index_closed(a * c, p) != weil_index_gauss_oracle(a, p, c, tol=1e-6):
                    mismatches.append((p, c, a))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 10
    detail = f"closed form = Gauss-sum oracle on 4 square classes x p in {{3,5,7}} x c in {{1, 1/2}}, {elapsed:.2f} s"
    if mismatches:
        detail += f"; mismatches {mismatches}"
    assert report(1, ok, detail), detail


def test_criterion_02_gamma_props(battery):
    check_zero(2, battery[0], ["gamma-props"])


def test_criterion_03_bruhat_roundtrip(battery):
    check_zero(3, battery[0], ["bruhat-roundtrip"])


def test_criterion_04_lemma_31(battery):
    check_zero(4, battery[0], ["lemma-31-1", "lemma-31-2"])


def test_criterion_05_cocycle_identity(battery):
    check_zero(5, battery[0], ["cocycle-identity"])


def test_criterion_06_relation_3(battery):
    # m even: all configs; m odd: the unramified ones (every battery Delta is a unit non-residue)
    def keep(cfg):
        p, delta = int(cfg["p"]), Fraction(cfg["delta"])
        return int(cfg["m"]) % 2 == 0 or local.valuation(delta, p) == 0
    check_zero(6, battery[0], ["relation-3"], keep)


def test_criterion_07_prop_32(battery):
    check_zero(7, battery[0], ["prop-32-H", "prop-32-G"])


def test_criterion_08_prop_33(battery):
    rep = battery[0]
    even, odd = [], []
    for cfg, s in suite_rows(rep, "prop-33"):
        (even if int(cfg["m"]) % 2 == 0 else odd).append((cfg, s))
    even_bad = [tag(cfg) for cfg, s in even if s["failures"] != "0"]
    no_witness = [tag(cfg) for cfg, s in odd
                  if any(d["trial"] == "suite" for d in s["counterexamples"])]
    other_bad = [tag(cfg) for cfg, s in odd
                 if any(d["trial"] != "suite" for d in s["counterexamples"])]
    ok = even and odd and not (even_bad or no_witness or other_bad)
    detail = (f"m=2 all +1 on {len(even)} configs{' (failing: ' + ', '.join(even_bad) + ')' if even_bad else ''}; "
              f"m odd witness in 100 samples on {len(odd) - len(no_witness)}/{len(odd)} configs")
    if no_witness:
        detail += f" (none at {', '.join(no_witness)})"
    if other_bad:
        detail += f"; other failures at {', '.join(other_bad)}"
    assert report(8, ok, detail), detail


def test_criterion_09_dichotomy_and_h_plus(battery):
    check_zero(9, battery[0], ["space-dichotomy", "h-plus"])


def strip_timing(rep):
    rep = json.loads(json.dumps(rep))
    for run in rep["runs"]:
        for s in run["suites"]:
            s.pop("elapsed_ms")
    return json.dumps(rep, sort_keys=True)


def test_criterion_10_runtime_and_determinism(battery):
    rep, elapsed = battery
    again, elapsed2 = run_battery()
    same = strip_timing(rep) == strip_timing(again)
    ok = elapsed < BUDGET_S and same
    detail = (f"battery {elapsed:.0f} s (second run {elapsed2:.0f} s, budget {BUDGET_S} s); "
              f"reports {'identical' if same else 'DIFFER'} modulo elapsed_ms")
    assert report(10, ok, detail), detail
