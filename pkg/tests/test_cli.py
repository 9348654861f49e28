import json
import subprocess
import sys

import jsonschema
import pytest

from logcap.cli import main

CIRCLE = '{"kind": "full_circle", "radius": 1}'
SEGMENT = '{"kind": "segment", "a": [0, 0], "b": [1, 0]}'
CANTOR6 = '{"kind": "cantor_stage", "epsilons": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333, 0.3333333333333333, 0.3333333333333333, 0.3333333333333333], "depth": 6}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cap_circle(capsys, schema, tmp_path):
    spec = tmp_path / "circle.json"
    spec.write_text(CIRCLE)
    code, out, err = run(capsys, "cap", "--spec", str(spec), "--resolution", "0.01")
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("capacity_result"))
    assert d["capacity"] == pytest.approx(1.0, abs=0.01)
    assert d["method"] == "qp"
    assert err.count("\n") == 1 and "capacity=1" in err


@pytest.mark.parametrize("method", ["leja", "closed_form"])
def test_cap_other_methods(capsys, schema, method):
    code, out, _ = run(capsys, "cap", "--spec", SEGMENT, "--method", method, "--resolution", "0.002")
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("capacity_result"))
    assert d["method"] == method
    assert d["capacity"] == pytest.approx(0.25, rel=0.05)


def test_cap_csv_and_measure_export(capsys, tmp_path):
    out_path, m_path = tmp_path / "cap.csv", tmp_path / "measure.csv"
    code, out, _ = run(
        capsys, "cap", "--spec", SEGMENT, "--format", "csv", "--output", str(out_path), "--measure-csv", str(m_path)
    )
    assert code == 0
    assert out.startswith("cap: capacity=") and out.count("\n") == 1
    assert out_path.read_text().splitlines()[0] == "capacity,energy,frostman_residual,method,n_points"
    assert m_path.read_text().splitlines()[0] == "x,y,weight"
    assert not list(tmp_path.glob(".*.tmp"))


def test_cap_closed_form_unavailable(capsys):
    code, _, err = run(capsys, "cap", "--spec", CANTOR6, "--method", "closed_form")
    assert code == 1 and "closed form" in err


def test_cap_non_convergence_exit_code(capsys, monkeypatch):
    import logcap.cli as cli
    from logcap.potential import equilibrium_measure

    # starve the solver so the budget runs out; the result is still printed
    monkeypatch.setattr(cli, "equilibrium_measure", lambda A, solver: equilibrium_measure(A, solver="pgd", max_iter=2))
    code, out, _ = run(capsys, "cap", "--spec", SEGMENT)
    assert code == 2
    assert json.loads(out)["frostman_residual"] > 1e-6


@pytest.mark.parametrize(
    "spec, field",
    [
        ('{"kind": "arc_family", "n": 8, "L": 4}', "L"),
        ('{"kind": "cantor_stage", "epsilons": [0.3], "depth": 3}', "depth"),
        ('{"kind": "segment", "a": [0, 0]}', "b"),
        ('{"kind": "nope"}', "kind"),
    ],
)
def test_bad_spec_names_field(capsys, spec, field):
    code, out, err = run(capsys, "cap", "--spec", spec)
    assert code == 1
    assert f"field '{field}'" in err
    assert out == ""


def test_malformed_json_and_missing_spec(capsys, tmp_path):
    code, _, err = run(capsys, "cap", "--spec", '{"kind": ')
    assert code == 1 and "malformed JSON" in err
    code, _, err = run(capsys, "cap", "--spec", str(tmp_path / "missing.json"))
    assert code == 1 and "cannot read" in err
    code, _, err = run(capsys, "cap")
    assert code == 1 and "--spec" in err
    code, _, _ = run(capsys, "frobnicate")
    assert code == 1


def test_numeric_failure_exit_code(capsys):
    spec = '{"kind": "point_cloud", "points": [[0, 0], [5e-324, 0]]}'
    code, _, err = run(capsys, "cap", "--spec", spec, "--resolution", "5e-324")
    assert code == 2 and "numeric failure" in err


def test_hausdorff(capsys, schema):
    arcs = '{"kind": "arc_family", "n": 8, "L": 1}'
    code, out, _ = run(capsys, "hausdorff", "--spec", arcs, "--other", CIRCLE, "--resolution", "0.002")
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("hausdorff_result"))
    assert abs(d["d_h"] - 0.26690046) <= 2 * d["slack"]


def test_alpha(capsys, schema):
    code, out, _ = run(capsys, "alpha", "--spec", SEGMENT)
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("up_estimate"))
    assert d["alpha_lower"] <= 0.5 <= d["alpha_upper"]
    code, out, _ = run(capsys, "alpha", "--spec", SEGMENT, "--format", "csv")
    assert out.splitlines()[0] == "alpha_lower,alpha_upper,slack,witness_x,witness_y,witness_r"


def test_green(capsys, schema, tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("x,y\n0,2\n")
    code, out, _ = run(capsys, "green", "--spec", CIRCLE, "--z", "3,0", "--points", str(pts))
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("green_values"))
    assert d[0]["g"] == pytest.approx(1.0986, abs=0.01)
    assert d[1]["g"] == pytest.approx(0.6931, abs=0.01)
    code, _, err = run(capsys, "green", "--spec", CIRCLE)
    assert code == 1
    code, _, err = run(capsys, "green", "--spec", CIRCLE, "--z", "3;0")
    assert code == 1 and "x,y" in err


def test_check_holder(capsys, schema):
    code, out, _ = run(capsys, "check", "holder", "--spec", CANTOR6, "--resolution", "0.001", "--samples")
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("bound_report"))
    assert d["alpha"] == pytest.approx(1 / 6)
    assert d["n_samples"] + d["n_skipped"] == 200
    assert d["n_violations"] == 0
    assert len(d["samples"]) == d["n_samples"]


def test_check_pommerenke(capsys, schema, tmp_path):
    trials = tmp_path / "trials.csv"
    trials.write_text("x,y,r\n0.5,0,0.5\n0.5,0,0\n")
    code, out, _ = run(capsys, "check", "pommerenke", "--spec", CANTOR6, "--resolution", "0.002", "--probes", str(trials))
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("bound_report"))
    assert d["n_samples"] == 1 and d["n_skipped"] == 1 and d["n_violations"] == 0
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n0.5,0\n")
    code, _, err = run(capsys, "check", "pommerenke", "--spec", CANTOR6, "--probes", str(bad))
    assert code == 1 and "'r' column" in err


def test_check_needs_alpha_for_uncertified_kinds(capsys):
    code, _, err = run(capsys, "check", "holder", "--spec", SEGMENT)
    assert code == 1 and "--alpha" in err
    code, _, _ = run(capsys, "check", "holder", "--spec", SEGMENT, "--alpha", "0.5", "--center", "0,0", "--random", "20")
    assert code == 0


def test_arcs_csv(capsys, schema, tmp_path):
    out_path = tmp_path / "arcs.csv"
    code, out, _ = run(capsys, "arcs", "--lseq", "exp", "--nmax", "10", "--output", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "n,d_h,alpha,rate,loglog_ok,cap_numeric,cap_closed,green_sup_dev"
    assert len(lines) == 11
    summary = json.loads((tmp_path / "arcs.summary.json").read_text())
    jsonschema.validate(summary, schema("experiment_summary"))
    assert summary["verdict"] == "capacity-not-converging"
    assert "verdict=capacity-not-converging" in out


def test_arcs_json_and_custom(capsys, schema):
    code, out, _ = run(capsys, "arcs", "--lseq", "custom", "--values", "0.5", "1.0", "--nmax", "2", "--format", "json")
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("experiment_output"))
    assert [r["n"] for r in d["rows"]] == [1, 2]
    code, _, err = run(capsys, "arcs", "--lseq", "custom", "--nmax", "2")
    assert code == 1
    code, _, err = run(capsys, "arcs", "--lseq", "custom", "--values", "0.5", "5", "--nmax", "2")
    assert code == 1 and "L_2" in err


def test_cantor(capsys, schema, tmp_path):
    summary = tmp_path / "s.json"
    code, out, _ = run(
        capsys, "cantor", "--eps", "0.3333", "--nmax", "4", "--C", "0.06", "--resolution", str(2.0**-9),
        "--summary", str(summary),
    )
    assert code == 0
    assert out.splitlines()[0] == "n,d_h,alpha,rate,loglog_ok,cap_numeric,cap_closed,green_sup_dev"
    s = json.loads(summary.read_text())
    jsonschema.validate(s, schema("experiment_summary"))
    code, _, err = run(capsys, "cantor", "--C", "0.07", "--nmax", "3")
    assert code == 1 and "24 log 2" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"lseq": "reciprocal", "nmax": 3, "resolution": 0.05, "format": "json"}))
    code, out, _ = run(capsys, "arcs", "--config", str(cfg))
    assert code == 0
    d = json.loads(out)
    assert len(d["rows"]) == 3
    # flags override the config file
    code, out, _ = run(capsys, "arcs", "--config", str(cfg), "--nmax", "2")
    assert len(json.loads(out)["rows"]) == 2
    cfg.write_text(json.dumps({"spec": json.loads(SEGMENT), "method": "closed_form"}))
    code, out, _ = run(capsys, "cap", "--config", str(cfg))
    assert code == 0 and json.loads(out)["capacity"] == 0.25
    cfg.write_text(json.dumps({"nmax": 3, "bogus": 1}))
    code, _, err = run(capsys, "arcs", "--config", str(cfg))
    assert code == 1 and "bogus" in err


def test_deterministic_output(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        argv = ["cantor", "--nmax", "3", "--resolution", str(2.0**-8), "--output", str(path), "--workers", str(1 + 2 * k)]
        assert main(argv) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    capsys.readouterr()
    outs = []
    for _ in range(2):
        assert main(["check", "holder", "--spec", CANTOR6, "--format", "csv", "--seed", "7", "--resolution", "0.002"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_module_entry_point_and_threads(tmp_path):
    env = {"LOGCAP_THREADS": "1", "PATH": "/usr/bin:/bin"}
    proc = subprocess.run(
        [sys.executable, "-m", "logcap", "cap", "--spec", SEGMENT, "--method", "closed_form"],
        capture_output=True, text=True, env=env, cwd=tmp_path,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["capacity"] == 0.25


def test_csv_cells_are_plain_numbers(capsys):
    code, out, _ = run(capsys, "check", "holder", "--spec", CANTOR6, "--format", "csv", "--random", "10")
    assert code == 0
    assert "np." not in out and "float64" not in out
