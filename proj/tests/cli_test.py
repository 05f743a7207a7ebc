#!/usr/bin/env python3
"""Integration tests for the loewner_lab command-line tool.

Usage: cli_test.py /path/to/loewner_lab
Checks exit codes, summary contents, and byte-level determinism of reruns.
"""
import json
import math
import pathlib
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
FAILED = []


def run(args, cwd):
    return subprocess.run([BIN] + args, cwd=cwd, capture_output=True, text=True)


def check(name, cond, detail=""):
    print(f"{'ok' if cond else 'FAIL'}  {name}  {detail}")
    if not cond:
        FAILED.append(name)


def write_config(d, name, obj):
    p = pathlib.Path(d) / name
    p.write_text(json.dumps(obj))
    return str(p)


def summary(d, out, cmd):
    return json.loads((pathlib.Path(d) / out / f"{cmd}_summary.json").read_text())


def main():
    with tempfile.TemporaryDirectory() as d:
        # Exit code 64: unknown command, missing config.
        check("unknown command exits 64", run(["frobnicate"], d).returncode == 64)
        check("missing config exits 64",
              run(["energy", "--config", "nope.json", "--out", "x"], d).returncode == 64)

        # energy: zero driver has zero energy.
        cfg = write_config(d, "e.json", {"driver": {"type": "zero", "horizon": 1.0}})
        r = run(["energy", "--config", cfg, "--out", "e", "--quiet"], d)
        check("energy exits 0", r.returncode == 0, r.stderr.strip())
        s = summary(d, "e", "energy")
        check("zero driver has zero energy", s["total"] == 0.0)
        check("schema version stamped", s["schema_version"] == 1)

        # reverse-check: linear driver, forward energy 1/2, small final error.
        cfg = write_config(d, "rc.json", {
            "driver": {"type": "linear", "slope": 1.0, "horizon": 1.0}, "T": 1.0})
        r = run(["reverse-check", "--config", cfg, "--out", "rc", "--quiet"], d)
        check("reverse-check exits 0", r.returncode == 0, r.stderr.strip())
        s = summary(d, "rc", "reverse-check")
        check("forward energy is 1/2", abs(s["forward_energy"] - 0.5) < 1e-12)
        check("reversal error below 1%", s["table"][-1]["rel_err"] < 0.01,
              str(s["table"][-1]["rel_err"]))

        # ld-rate quadrature: reference is 4 ln 2 for the pi/4 point.
        w = math.cos(math.pi / 4)
        cfg = write_config(d, "lr.json", {
            "kappas": [1.0, 0.5], "method": "quadrature",
            "constraints": [{"re": w, "im": w, "side": -1}]})
        r = run(["ld-rate", "--config", cfg, "--out", "lr", "--quiet"], d)
        check("ld-rate exits 0", r.returncode == 0, r.stderr.strip())
        s = summary(d, "lr", "ld-rate")
        ref = 4.0 * math.log(2.0)
        check("ld-rate reference is 4 ln 2",
              all(abs(row["reference"] - ref) < 1e-12 for row in s["rows"]))
        check("rates exceed the limit", all(row["rate"] > ref for row in s["rows"]))

        # Domain errors exit 1: constraint below the real axis.
        cfg = write_config(d, "bad.json", {
            "kappa": 2.0, "samples": 100, "seed": 1, "dt": 1e-2,
            "constraints": [{"re": 0.5, "im": -1.0, "side": -1}]})
        r = run(["sle-passage", "--config", cfg, "--out", "bad", "--quiet"], d)
        check("bad geometry exits 1", r.returncode == 1, str(r.returncode))

        # sle-passage requires a seed for reproducibility.
        cfg = write_config(d, "p.json", {
            "kappa": 2.0, "samples": 2000, "seed": 42, "dt": 1e-3,
            "constraints": [{"re": 0.5, "im": 0.8660254, "side": -1}]})
        for out in ("p1", "p2"):
            r = run(["sle-passage", "--config", cfg, "--out", out, "--quiet"], d)
            check(f"sle-passage exits 0 ({out})", r.returncode == 0, r.stderr.strip())
        b1 = (pathlib.Path(d) / "p1" / "sle-passage_summary.json").read_bytes()
        b2 = (pathlib.Path(d) / "p2" / "sle-passage_summary.json").read_bytes()
        check("seeded reruns are byte-identical", b1 == b2)

        # minimizer: energy of the pi/2 hitter is 0 (the axis itself).
        cfg = write_config(d, "m.json", {"theta": math.pi / 2})
        r = run(["minimizer", "--config", cfg, "--out", "m", "--quiet"], d)
        check("minimizer exits 0", r.returncode == 0, r.stderr.strip())
        s = summary(d, "m", "minimizer")
        check("axis hitter has zero energy", abs(s["energy"]) < 1e-3, str(s["energy"]))

    if FAILED:
        print(f"{len(FAILED)} CLI check(s) failed")
        return 1
    print("all CLI checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
