import json
import math
import subprocess
import sys

import pytest

from kappamap.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, UsageError, fmt, main, parse_vector


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt():
    assert fmt(0.0) == "0" and fmt(-0.0) == "0"
    assert fmt(1.0) == "1" and fmt(-2.0) == "-2"
    assert fmt(0.36787944117144233) == "0.36787944117144233"
    assert float(fmt(1 / 3)) == 1 / 3


def test_parse_vector():
    assert parse_vector("1, -0.5,2e-3", "point") == [1.0, -0.5, 0.002]
    for bad in ("1,,2", "", "1,nan", "1,x"):
        with pytest.raises(UsageError):
            parse_vector(bad, "point")


def test_map_worked_point(capsys):
    code, out, _ = run(capsys, "map", "--metric", "minkowski4", "--kappa", "1", "--point", "1,0.6,0,0")
    assert code == EXIT_PASS
    vals = [float(x) for x in out.strip().split(",")]
    assert abs(vals[0] - math.log(10 / 3)) < 1e-15 and vals[1:] == [0.3, 0.0, 0.0]
    assert out.startswith("1.2039728")


def test_map_origin(capsys):
    assert run(capsys, "map", "--point", "0,0,0,0")[1].strip() == "0,0,0,0"


def test_map_domain_error(capsys):
    code, out, err = run(capsys, "map", "--point", "-2,0,0,0")
    assert code == EXIT_USAGE and out == ""
    assert "P0 + C must be positive" in err


def test_map_inverse(capsys):
    code, out, _ = run(capsys, "map", "--inverse", "--m2", "0.64", "--point", f"{math.log(10 / 3)!r},0.3,0,0")
    assert code == EXIT_PASS
    assert max(abs(a - b) for a, b in zip(map(float, out.split(",")), [1, 0.6, 0, 0])) < 1e-12


def test_map_dimension_mismatch(capsys):
    assert run(capsys, "map", "--point", "1,0")[0] == EXIT_USAGE


def test_map_json(capsys):
    code, out, _ = run(capsys, "map", "--point", "1,0.6,0,0", "--json")
    doc = json.loads(out)
    assert code == EXIT_PASS and doc["direction"] == "forward"
    assert doc["point"] == [1.0, 0.6, 0.0, 0.0] and doc["result"][1] == 0.3


def test_add_examples(capsys):
    code, out, _ = run(capsys, "add", "--left", "0,1", "--right", "1,0")
    assert code == EXIT_PASS and out.strip() == "1,0.36787944117144233"
    code, out, _ = run(capsys, "add", "--left", "0.25,-1.5,3", "--right", "0,0,0")
    assert out.strip() == "0.25,-1.5,3"


def test_add_both_orders(capsys):
    code, out, _ = run(capsys, "add", "--left", "0,1", "--right", "1,0", "--both-orders")
    lines = dict(line.split(None, 1) for line in out.strip().splitlines())
    assert abs(float(lines["gap"]) - (1 - math.exp(-1))) < 1e-12
    assert lines["q+p"] == "1,1"


def test_add_mismatch(capsys):
    assert run(capsys, "add", "--left", "0,1", "--right", "1,0,0")[0] == EXIT_USAGE


def test_casimir(capsys):
    code, out, _ = run(capsys, "casimir", "--point", "1,0.6,0,0", "--json")
    doc = json.loads(out)
    assert code == EXIT_PASS
    assert abs(doc["deformed_mass_squared"] - 4 / 3) < 1e-12
    code, out, _ = run(capsys, "casimir", "--deformed", "--point", f"{math.log(10 / 3)!r},0.3,0,0", "--json")
    assert abs(json.loads(out)["mass_squared"] - 0.64) < 1e-12


def test_limits(capsys):
    code, out, _ = run(capsys, "limits", "--point", "0.3,0.2,0.1,0", "--json")
    doc = json.loads(out)
    assert code == EXIT_PASS
    assert doc["kappas"] == [10, 20, 40, 80]
    assert all(1.8 <= r <= 2.2 for r in doc["ratios"]["map"])
    assert doc["gaps"]["action Rotation(1,2)"] == [0.0] * 4


def test_list_metrics(capsys):
    code, out, _ = run(capsys, "list-metrics", "--json")
    names = [m["name"] for m in json.loads(out)]
    assert code == EXIT_PASS and {"minkowski4", "lightcone2", "offdiag5"} <= set(names)


def test_verify_default(capsys):
    code, out, _ = run(capsys, "verify", "--metric", "minkowski4", "--kappa", "1")
    assert code == EXIT_PASS
    assert "FAIL" not in out and "PASS" in out


def test_verify_weyl_on_lightcone(capsys):
    assert run(capsys, "verify", "--metric", "lightcone2", "--suites", "weyl", "--kappa", "1")[0] == EXIT_PASS


def test_verify_weyl_on_minkowski(capsys):
    code, _, err = run(capsys, "verify", "--metric", "minkowski4", "--suites", "weyl")
    assert code == EXIT_USAGE and "g00" in err


def test_verify_failure_exit(capsys):
    code, out, _ = run(capsys, "verify", "--suites", "closure", "--perturb-kappa", "1e-3", "--samples", "50")
    assert code == EXIT_FAIL and "closure.deformed" in out


def test_verify_json_schema_and_stability(capsys):
    argv = ["verify", "--metric", "offdiag5", "--samples", "40", "--suites", "closure,casimir,coproduct", "--json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    a, b = json.loads(first), json.loads(second)
    assert {"schema_version", "config", "suites", "pass"} <= set(a)
    for s in a["suites"]:
        assert {"name", "samples", "accepted", "max_residual", "worst_point", "pass"} <= set(s)
    a.pop("wall_time")
    b.pop("wall_time")
    assert json.dumps(a) == json.dumps(b)
    assert "NaN" not in first


def test_verify_config_file_with_overrides(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"metric": {"n": 2, "rows": [[0, 1], [1, 0]]}, "kappa": 2.0, "samples": 30, "suites": ["weyl"]}))
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--kappa", "0.5", "--json")
    doc = json.loads(out)
    assert code == EXIT_PASS
    assert doc["config"]["kappa"] == 0.5 and doc["config"]["samples"] == 30
    assert doc["config"]["metric"] == {"n": 2, "rows": [[0.0, 1.0], [1.0, 0.0]]}


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--kappa", "-1"],
        ["verify", "--suites", "nosuch"],
        ["verify", "--config", "/nonexistent/cfg.json"],
        ["verify", "--metric", "nosuch"],
        ["map", "--point", "a,b"],
        ["map"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert run(capsys, "verify", "--config", str(cfg))[0] == EXIT_USAGE
    cfg.write_text(json.dumps({"kappa": 1.0, "colour": "red"}))
    code, _, err = run(capsys, "verify", "--config", str(cfg))
    assert code == EXIT_USAGE and "colour" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kappamap", "add", "--left", "0,1", "--right", "1,0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "1,0.36787944117144233"
