import csv
import json
import math
import os

import pytest

from findist import cli

BASE_I = {"construction": "I", "p": 1, "s": 1, "eps": 0.5, "M": 64, "c2": 1.0}

CASES = {
    "build": {**BASE_I, "levels": 1},
    "eval": {**BASE_I, "depth": 3, "seed": 7, "n_points": 20},
    "audit": {**BASE_I, "N": 20},
    "spectra": {**BASE_I, "segment_levels": 4},
    "modulus": {"preset": "ring", "resolution": 64},
    "measure": {"construction": "II", "p": 1, "s": 1, "eps": 0.5, "r": 0.25,
                "gauges": ["powerlog:2", "power:1"], "level_range": [1, 6]},
}


def _run(tmp_path, command, cfg, name="out", extra=()):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / name
    code = cli.main([command, "--config", str(path), "--out", str(out), "--no-timestamp", *extra])
    return code, out


def _read_all(d):
    return {f: (d / f).read_bytes() for f in sorted(os.listdir(d))}


@pytest.mark.parametrize("command", sorted(CASES))
def test_commands_are_deterministic(tmp_path, command):
    c1, d1 = _run(tmp_path, command, CASES[command], "a")
    c2, d2 = _run(tmp_path, command, CASES[command], "b")
    assert c1 == c2 == 0
    a, b = _read_all(d1), _read_all(d2)
    assert a and a == b
    for name, data in a.items():
        text = data.decode()
        assert "config_sha256" in text, name


def test_audit_ratio_column(tmp_path):
    code, d = _run(tmp_path, "audit", {**CASES["audit"], "c2": 0.0})
    assert code == 0
    rows = list(csv.DictReader(line for line in (d / "audit.csv").read_text().splitlines() if not line.startswith("#")))
    ratios = [float(r["ratio"]) for r in rows if r["ratio"]]
    assert len(ratios) == 19
    assert all(abs(x - 0.125) <= 0.01 * 0.125 for x in ratios)


def test_modulus_ring_json(tmp_path):
    code, d = _run(tmp_path, "modulus", {"preset": "ring", "resolution": 256})
    assert code == 0
    val = json.loads((d / "modulus.json").read_text())["result"]["value"]
    assert val == pytest.approx(2 * math.pi, rel=0.05)


def test_validation_error_writes_nothing(tmp_path, capsys):
    code, d = _run(tmp_path, "build", {**BASE_I, "s": 2.5})
    assert code == 2 and not d.exists()
    err = capsys.readouterr().err.strip()
    assert err == "error: s out of (0,2)" and "\n" not in err


@pytest.mark.parametrize("cfg", [
    {**BASE_I, "eps": 1.5},
    {**BASE_I, "p": -1},
    {**BASE_I, "construction": "III"},
    {**BASE_I, "s": 1.9, "eps": 0.05, "M": None},
    {"preset": "ring", "resolution": 4},
])
def test_other_validation_errors(tmp_path, cfg):
    command = "modulus" if "preset" in cfg else "build"
    cfg = {k: v for k, v in cfg.items() if v is not None}
    assert _run(tmp_path, command, cfg)[0] == 2


def test_set_override_changes_hash(tmp_path):
    _, a = _run(tmp_path, "audit", CASES["audit"], "a")
    _, b = _run(tmp_path, "audit", CASES["audit"], "b", ["--set", "N=5"])
    ha = (a / "audit.csv").read_text().splitlines()[0]
    hb = (b / "audit.csv").read_text().splitlines()[0]
    assert ha != hb and len((b / "audit.csv").read_text().splitlines()) == 2 + 5


def test_svg_timestamp_only_difference(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(CASES["build"]))
    assert cli.main(["build", "--config", str(path), "--out", str(tmp_path / "t")]) == 0
    svg = (tmp_path / "t" / "geometry.svg").read_text()
    assert "generated" in svg.splitlines()[1]


def test_missing_config(tmp_path):
    assert cli.main(["audit", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2
