import csv
import json

import pytest

from qrepseal.cli import main
from qrepseal.config import parse_config
from qrepseal.errors import ConfigError
from qrepseal.runner import dumps_report


def _write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def _report(path):
    data = json.loads((path / "report.json").read_text())
    data["provenance"].pop("wall_time")
    return data


def test_unknown_key_rejected_no_files(tmp_path, capsys):
    cfg = _write(tmp_path, {"scenario": "device", "device": {"builtin": "breidbart"}, "colour": 1})
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 1
    assert "colour" in capsys.readouterr().err
    assert not out.exists()


def test_json_syntax_error_reports_position(tmp_path, capsys):
    cfg = _write(tmp_path, '{"scenario": "device",\n  "device": }')
    assert main(["run", "--config", cfg]) == 1
    assert "line 2" in capsys.readouterr().err


def test_nested_field_diagnostic():
    with pytest.raises(ConfigError, match=r"sampling\.n"):
        parse_config('{"scenario": "paper-table", "sampling": {"n": 0}}')
    with pytest.raises(ConfigError, match="requires"):
        parse_config('{"scenario": "bounds"}')


def test_frontier_csv(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--scenario", "weak-frontier", "--out", str(out)]) == 0
    raw = (out / "report_frontier_weak_family.csv").read_bytes()
    assert b"\r" not in raw
    rows = list(csv.DictReader(raw.decode().splitlines()))
    assert len(rows) == 101
    assert all(float(r["saturation"]) <= 1e-10 for r in rows)
    assert any(r["on_envelope"] == "true" for r in rows)


def _payload(path):
    text = (path / "report.json").read_text()
    data = json.loads(text)
    assert dumps_report(data) == text  # lossless round trip
    data["provenance"]["wall_time"] = 0.0
    return dumps_report(data).encode()


def test_mc_report_byte_identical(tmp_path):
    cfg = {"scenario": "device", "device": {"builtin": "weak_family", "params": {"lam": 0.3}},
           "modes": ["exact", "mc"], "sampling": {"n": 20000, "seed": 9, "workers": 3}}
    path = _write(tmp_path, cfg)
    out = tmp_path / "o"
    assert main(["run", "--config", path, "--out", str(out)]) == 0
    first = _payload(out)
    assert main(["run", "--config", path, "--out", str(out)]) == 0
    assert _payload(out) == first


def test_every_number_tagged(tmp_path):
    cfg = {"scenario": "device", "device": {"builtin": "weak_family", "params": {"lam": 0.1}},
           "modes": ["exact", "mc"], "sampling": {"n": 5000}}
    out = tmp_path / "o"
    assert main(["run", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 0
    pts = json.loads((out / "report.json").read_text())["results"]["points"]
    modes = set()
    for p in pts:
        for key in ("F", "G"):
            modes.add(p[key]["mode"])
            if p[key]["mode"] == "mc":
                assert p[key]["n"] == 5000 and p[key]["stderr"] > 0
    assert modes == {"exact", "mc"}


def test_seed_override_changes_mc_only(tmp_path):
    cfg = _write(tmp_path, {"scenario": "device", "device": {"builtin": "weak_family", "params": {"lam": 0.2}},
                            "modes": ["exact", "mc"], "sampling": {"n": 5000}})
    a, b = tmp_path / "a", tmp_path / "b"
    main(["run", "--config", cfg, "--out", str(a), "--seed", "1"])
    main(["run", "--config", cfg, "--out", str(b), "--seed", "2"])
    pa, pb = _report(a)["results"]["points"], _report(b)["results"]["points"]
    assert pa[0] == pb[0]
    assert pa[1]["F"]["value"] != pb[1]["F"]["value"]


def test_bounds_violation_exit_code(tmp_path):
    cfg = {"scenario": "bounds", "point": {"F": 0.75, "G": 0.8535533905932737}, "d": 2,
           "bounds": ["TradeoffD2"], "assert_bounds": True}
    assert main(["run", "--config", _write(tmp_path, cfg)]) == 2
    cfg["assert_bounds"] = False
    assert main(["run", "--config", _write(tmp_path, cfg)]) == 0


def test_bridge_scenario_inline_seal(tmp_path, capsys):
    cfg = {"scenario": "bridge", "seal": {"inline": {
        "dim_alice": 1, "dim_bob": 2,
        "encodings": [[{"state": [[1, 0], [0, 0]], "prob": 1}], [{"state": [[0, 0], [1, 0]], "prob": 1}]],
        "decoder": [{"label": 0, "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]], "decode": 0},
                    {"label": 1, "matrix": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]], "decode": 1}]}}}
    assert main(["run", "--config", _write(tmp_path, cfg)]) == 0
    report = json.loads(capsys.readouterr().out)
    rt = report["results"]["round_trip"]
    assert rt["passed"]
    assert rt["after"]["alpha"]["value"] == pytest.approx(1.0, abs=1e-12)


def test_inline_device(tmp_path, capsys):
    cfg = {"scenario": "device", "device": {"inline": {"kind": "quantum", "kraus": [
        {"label": "a", "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]], "estimate": [[1, 0], [0, 0]]},
        {"label": "b", "matrix": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]], "estimate": [[0, 0], [1, 0]]}]}}}
    assert main(["run", "--config", _write(tmp_path, cfg)]) == 0
    pt = json.loads(capsys.readouterr().out)["results"]["points"][0]
    assert pt["F"]["value"] == pytest.approx(2 / 3, abs=1e-12)


def test_reference_table(capsys):
    assert main(["run", "--scenario", "paper-table"]) == 0
    rows = json.loads(capsys.readouterr().out)["results"]["rows"]
    names = {r["row"] for r in rows}
    assert {"do_nothing", "measure_reprepare", "breidbart", "simplified", "optimal_qbs", "perfect_seal"} <= names


def test_list_and_describe(capsys):
    assert main(["list-builtins"]) == 0
    cat = json.loads(capsys.readouterr().out)
    assert "breidbart" in cat["devices"] and "optimal_qbs" in cat["seals"]
    for group in cat.values():
        for name in group:
            assert main(["describe", name]) == 0
            assert json.loads(capsys.readouterr().out)["name"] == name
    assert main(["describe", "nope"]) == 1


def test_verify_all_lines_and_exit(capsys):
    assert main(["verify-all"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("criterion")]
    assert len(lines) == 11 and all("PASS" in l for l in lines)


def test_verify_all_tight_mc_is_tolerance_failure(capsys):
    assert main(["verify-all", "--tol-mc", "1e-15"]) == 2
    fails = [l for l in capsys.readouterr().out.splitlines() if "FAIL" in l]
    assert fails and all("[tolerance]" in l for l in fails)


def test_verify_all_seed_leaves_exact_unchanged(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["verify-all", "--seed", "1", "--out", str(a)])
    main(["verify-all", "--seed", "77", "--out", str(b)])
    ca, cb = _report(a)["results"]["criteria"], _report(b)["results"]["criteria"]
    for x, y in zip(ca, cb):
        for cx, cy in zip(x["checks"], y["checks"]):
            if cx["mode"] == "exact":
                assert cx["value"] == cy["value"], cx["label"]


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "qrepseal", "list-builtins"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "weak_family" in json.loads(proc.stdout)["families"]


def test_mc_points_on_saturating_device_not_asserted(tmp_path, capsys):
    # the weak family sits on the tradeoff boundary, so half of all MC estimates land outside it
    cfg = {"scenario": "device", "device": {"builtin": "weak_family", "params": {"lam": 0.3}},
           "modes": ["exact", "mc"], "sampling": {"n": 100000, "seed": 7, "workers": 4}, "assert_bounds": True}
    assert main(["run", "--config", _write(tmp_path, cfg)]) == 0
    exact_pt, mc_pt = json.loads(capsys.readouterr().out)["results"]["points"]
    assert exact_pt["bounds"]["asserted"] and exact_pt["bounds"]["mode"] == "exact"
    assert not mc_pt["bounds"]["asserted"] and mc_pt["bounds"]["mode"] == "mc"
