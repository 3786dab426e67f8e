#!/usr/bin/env python3
"""CLI checks: exit codes, output files, schema, byte-identical reruns.

usage: test_cli.py PINGD_EXE SUMMARY_SCHEMA
"""

import csv
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

EXE = sys.argv[1]
SCHEMA = json.loads(Path(sys.argv[2]).read_text())
failures = []


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f"  ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def pingd(*args):
    return subprocess.run([EXE, *map(str, args)], capture_output=True, text=True)


def run_into(out, *extra):
    return pingd("run", "--fn", "euclid", "--dim", 3, "--eps", 0.25, "--delta", 0.05, "--replicas", 4,
                 "--seed", 21, "--trace", "full", "--verify", "--out", out, *extra)


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    r = run_into(tmp / "a")
    check("run exits 0", r.returncode == 0, r.stderr)
    files = sorted(p.name for p in (tmp / "a").iterdir())
    check("run writes csv, summary, traces",
          files == ["results.csv", "summary.json"] + [f"trace_{i}.jsonl" for i in range(4)], str(files))

    summary = json.loads((tmp / "a" / "summary.json").read_text())
    try:
        jsonschema.validate(summary, SCHEMA)
        check("summary.json matches schema", True)
    except jsonschema.ValidationError as e:
        check("summary.json matches schema", False, e.message)
    check("summary echoes config", summary["config"]["function"] == "euclid" and summary["config"]["master_seed"] == 21)
    check("summary carries rng identity", summary["rng"].startswith("mt19937_64"))

    raw = (tmp / "a" / "results.csv").read_bytes()
    check("csv uses CRLF records", raw.count(b"\r\n") == 5)
    rows = list(csv.DictReader(raw.decode().splitlines()))
    check("csv has one row per replica", [r["replica"] for r in rows] == ["0", "1", "2", "3"])
    check("csv rows are stationary and certified",
          all(r["status"] == "Stationary" and r["certified"] == "true" for r in rows))

    lines = (tmp / "a" / "trace_0.jsonl").read_text().splitlines()
    header = json.loads(lines[0])
    check("trace header", header.get("trace_header") is True and header["rng"] == summary["rng"])
    events = [json.loads(l) for l in lines[1:]]
    check("trace ends in Terminate", events and events[-1]["kind"] == "Terminate")

    r = run_into(tmp / "b")
    same = all((tmp / "a" / n).read_bytes() == (tmp / "b" / n).read_bytes() for n in files if n != "summary.json")
    check("rerun is byte-identical", r.returncode == 0 and same)

    r = run_into(tmp / "c", "--serial")
    same = all((tmp / "a" / n).read_bytes() == (tmp / "c" / n).read_bytes() for n in files if n != "summary.json")
    check("serial loop matches parallel output", r.returncode == 0 and same)

    cfg = tmp / "run.cfg"
    cfg.write_text("[run]\nfn = euclid\ndim = 3\neps = 0.25\ndelta = 0.05\nreplicas = 4\nseed = 21\ntrace = full\nverify = true\n")
    r = pingd("run", "--config", cfg, "--out", tmp / "d")
    same = r.returncode == 0 and (tmp / "a" / "results.csv").read_bytes() == (tmp / "d" / "results.csv").read_bytes()
    check("config file equals flags", same, r.stderr)

    r = pingd("run", "--fn", "nosuch")
    check("unknown function exits 1", r.returncode == 1, str(r.returncode))
    r = pingd("run", "--eps", -1)
    check("negative eps exits 1", r.returncode == 1, str(r.returncode))
    r = pingd("run", "--trace", "loud")
    check("bad trace level exits 1", r.returncode == 1, str(r.returncode))
    r = pingd("run", "--fn", "abs1d", "--start", 0)
    check("nondifferentiable start exits 1", r.returncode == 1, str(r.returncode))
    r = pingd("run", "--bogus")
    check("unknown flag exits 1", r.returncode == 1, str(r.returncode))

    r = pingd("run", "--fn", "abs1d", "--replicas", 3, "--max-oracle-calls", 3, "--out", tmp / "e")
    check("exhausted budget exits 3", r.returncode == 3, str(r.returncode))
    rows = list(csv.DictReader((tmp / "e" / "results.csv").read_text().splitlines()))
    check("exhausted rows report BudgetExhausted", all(r["status"] == "BudgetExhausted" for r in rows))

    r = pingd("schedule", "--eps", 0.1, "--delta", 0.01, "--lipschitz", 1, "--gap", 1)
    sched = json.loads(r.stdout) if r.returncode == 0 else {}
    check("schedule K and T", sched.get("K") == 8000 and sched.get("T") == 4000, r.stdout)

    r = pingd("certify", "--fn", "abs1d", "--point", "0.001", "--eps", 0.1, "--delta", 0.01, "--out", tmp / "cert.json")
    cert = json.loads((tmp / "cert.json").read_text()) if r.returncode == 0 else {}
    check("certify near the kink", cert.get("verdict") == "Certified" and cert.get("min_norm_value", 1) <= 0.1, r.stderr)
    r = pingd("certify", "--fn", "abs1d", "--point", "1", "--eps", 0.1, "--delta", 0.01)
    cert = json.loads(r.stdout) if r.returncode == 0 else {}
    check("certify far from the kink", cert.get("verdict") == "NotCertified", r.stdout)
    r = pingd("certify", "--fn", "abs1d", "--point", "1,2")
    check("certify dimension mismatch exits 1", r.returncode == 1, str(r.returncode))

    r = pingd("corpus")
    ids = [l.split("\t")[0] for l in r.stdout.splitlines()]
    check("corpus lists functions", r.returncode == 0 and ids == ["abs1d", "l1norm", "euclid", "maxlin", "chebrosen"])

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
