"""verify: run identity suites from a config file and write a JSON report.

Exit codes: 0 all suites pass, 1 some suite failed, 2 configuration or usage
error, 3 internal error (including a Weil index calibration mismatch).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .cocycle import LERAY_CONVENTION, ChiUnavailable, calibrate_leray
from .config import (BATTERY_TRIALS, InvalidConfig, SUITE_NAMES, battery_configs, load_config)
from .hermitian import NotFound
from .local import CalibrationError, InvalidContext
from .suites import Instance, replay, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="verify", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="flat key = value run configuration")
    ap.add_argument("--suite", action="append", dest="suites", metavar="NAME",
                    help=f"suite to run (repeatable); one of: {', '.join(SUITE_NAMES)}")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--trials", type=int, help="override the config trial count")
    ap.add_argument("--replay", metavar="FILE",
                    help="re-check a counterexample file (one dump, a list, or a whole report)")
    ap.add_argument("--report", metavar="PATH", help="write the JSON report here instead of stdout")
    ap.add_argument("--battery", action="store_true",
                    help="run the default battery: p in {3,5,7}, (m,r) in {1,2,3}x{1,2}")
    ap.add_argument("--check-calibration", action="store_true",
                    help="re-derive the Leray convention and compare it with the frozen constant")
    return ap


def _header() -> dict:
    return {"leray_convention": {"sign": str(LERAY_CONVENTION.sign),
                                 "scale": str(LERAY_CONVENTION.scale)}}


def _summary(cfg, rep) -> str:
    status = "PASS" if rep["failures"] == "0" else "FAIL"
    return (f"{status} {rep['suite']:<17} p={cfg.p} delta={cfg.delta} m={cfg.m} r={cfg.r} "
            f"trials={rep['trials']} failures={rep['failures']} ({rep['elapsed_ms']} ms)")


def run_configs(configs, suites=None, trials_for=None, log=None) -> dict:
    log = log or sys.stderr
    runs = []
    for cfg in configs:
        inst = Instance(cfg)
        reps = []
        for name in suites or cfg.suites:
            c = cfg.with_(trials=trials_for(name)) if trials_for else cfg
            rep = run_suite(name, c, inst)
            print(_summary(c, rep), file=log, flush=True)
            reps.append(rep)
        runs.append({"config": cfg.as_dict(), "suites": reps})
    ok = all(r["failures"] == "0" for run in runs for r in run["suites"])
    return {**_header(), "status": "pass" if ok else "fail", "runs": runs}


def _write(report: dict, path) -> None:
    text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _replay_file(path) -> int:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "runs" in data:
        dumps = [d for run in data["runs"] for s in run["suites"] for d in s["counterexamples"]]
    elif isinstance(data, dict):
        dumps = [data]
    else:
        dumps = list(data)
    still_failing = 0
    for d in dumps:
        checks = replay(d)
        target = [c for c in checks if c.label == d.get("check")] or checks
        for c in target:
            print(f"{'PASS' if c.ok else 'FAIL'} {d['suite']} trial={d.get('trial')} {c.label}: "
                  f"expected {c.expected!r} actual {c.actual!r}")
            still_failing += not c.ok
    return EXIT_FAIL if still_failing else EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.check_calibration:
            stage1, stage2 = calibrate_leray()
            print(f"relation (3) survivors: {stage1}", file=sys.stderr)
            print(f"cocycle-identity survivors: {stage2}", file=sys.stderr)
            if stage2 != [LERAY_CONVENTION]:
                raise CalibrationError(f"calibration gives {stage2}, frozen {LERAY_CONVENTION}")
            if not (args.config or args.battery or args.replay):
                return EXIT_OK
        if args.replay:
            return _replay_file(args.replay)
        if args.battery:
            seed = args.seed if args.seed is not None else 0
            if args.suites:
                unknown = [s for s in args.suites if s not in SUITE_NAMES]
                if unknown:
                    raise InvalidConfig(f"unknown suite {unknown[0]!r}")
            trials_for = (lambda name: args.trials) if args.trials else BATTERY_TRIALS.__getitem__
            t0 = time.perf_counter()
            report = run_configs(battery_configs(seed), args.suites, trials_for)
            print(f"battery finished in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
        elif args.config:
            cfg = load_config(args.config)
            over = {}
            if args.seed is not None:
                over["seed"] = args.seed
            if args.trials is not None:
                over["trials"] = args.trials
            if args.suites:
                over["suites"] = tuple(args.suites)
            cfg = cfg.with_(**over) if over else cfg
            report = run_configs([cfg])
        else:
            raise UsageError("one of --config, --battery, --replay or --check-calibration is required")
        _write(report, args.report)
        return EXIT_OK if report["status"] == "pass" else EXIT_FAIL
    except (UsageError, InvalidConfig, InvalidContext, ChiUnavailable, NotFound, OSError,
            json.JSONDecodeError) as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - internal failures map to exit code 3
        print(f"verify: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
