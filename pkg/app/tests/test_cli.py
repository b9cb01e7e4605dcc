"""End-to-end tests of the command-line front end"""
import json

from app.main import main


def run_json(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_toda_solve_type_a(capsys, tmp_path):
    report_path = tmp_path / "report.json"
    code, report = run_json(
        capsys, "toda-solve", "--type", "A", "--n", "3", "--dim", "2", "--orders", "6,6", "--seed", "42",
        "--report", str(report_path),
    )
    assert code == 0
    assert report["status"] == "pass"
    names = [c["certificate"] for c in report["certificates"]]
    assert names == sorted(names)
    assert "toda-residual" in names
    tags = {c["certificate"]: c["paper_tag"] for c in report["certificates"]}
    assert tags["delta-identity"] == "Thm 2.3 proof, Delta' = Delta Theta"
    assert json.loads(report_path.read_text()) == report


def test_reruns_are_byte_identical(capsys, tmp_path):
    outputs = []
    for run in ("first", "second"):
        report, dump = tmp_path / f"{run}.json", tmp_path / f"{run}.dump"
        code = main([
            "toda-solve", "--type", "C", "--n", "2", "--dim", "1", "--orders", "5,5", "--seed", "7",
            "--report", str(report), "--dump", str(dump),
        ])
        capsys.readouterr()
        assert code == 0
        outputs.append((report.read_bytes(), dump.read_bytes()))
    assert outputs[0] == outputs[1]
    assert outputs[0][1].startswith(b"n=1 type=C dim=1")


def test_vieta_single_root(capsys):
    code, report = run_json(capsys, "vieta", "--n", "1", "--seed", "3")
    assert code == 0
    assert "linear-coefficient" in [c["certificate"] for c in report["certificates"]]


def test_factorize_and_kp_check(capsys):
    code, _ = run_json(capsys, "factorize", "--n", "2", "--dim", "1", "--orders", "6", "--degree", "2")
    assert code == 0
    code, report = run_json(capsys, "kp-check", "--n", "2", "--dim", "1", "--orders", "6", "--floor", "-3")
    assert code == 0
    assert report["config"]["floor"] == -3
    tags = {c["certificate"]: c["paper_tag"] for c in report["certificates"]}
    assert tags["kp-tangency"] == "Eq (A2) order <= -1"
    assert tags["monic-inverse"] == "§A1 calculus, monic inverse"


def test_flow_and_liouville(capsys):
    code, _ = run_json(capsys, "toda-flow", "--n", "2", "--dim", "1", "--orders", "4,5", "--degree", "2")
    assert code == 0
    code, _ = run_json(capsys, "liouville", "--dim", "2", "--orders", "4,4", "--degree", "2")
    assert code == 0


def test_sech_check_writes_full_grid(capsys, tmp_path):
    csv = tmp_path / "grid.csv"
    code, report = run_json(capsys, "sech-check", "--csv", str(csv))
    assert code == 0
    assert report["config"]["dim"] == 1
    lines = csv.read_text().splitlines()
    assert lines[0] == "x,t,u_11"
    assert len(lines) == 122


def test_sech_check_grid_extent(capsys):
    code, report = run_json(capsys, "sech-check", "--alpha", "1", "--a", "1", "--radius", "0.5", "--points", "3")
    assert code == 0
    assert report["config"]["radius"] == 0.5
    assert report["config"]["half_width"] == 0.25
    closed = next(c for c in report["certificates"] if c["certificate"] == "closed-form")
    assert closed["detail"]["half_width"] == 0.25
    code, report = run_json(capsys, "sech-check", "--half-width", "0.1", "--points", "3")
    assert code == 0
    assert report["config"]["half_width"] == 0.1
    code, _ = run_json(capsys, "sech-check", "--radius", "0.5", "--half-width", "0.5")
    assert code == 3


def test_empty_grid_gives_header_only(capsys, tmp_path):
    csv = tmp_path / "grid.csv"
    code, _ = run_json(capsys, "sech-check", "--points", "0", "--csv", str(csv))
    assert code == 0
    assert csv.read_text() == "x,t,u_11\n"


def test_kdv_soliton_and_tau_check(capsys, tmp_path):
    csv = tmp_path / "u.csv"
    code, report = run_json(
        capsys, "kdv-soliton", "--N", "1", "--dim", "1", "--orders", "8,4", "--points", "3", "--csv", str(csv),
    )
    assert code == 0
    assert "kdv-residual" in [c["certificate"] for c in report["certificates"]]
    flow = next(c for c in report["certificates"] if c["certificate"] == "flow")
    assert flow["paper_tag"].startswith("Eq (A2) t_")
    assert len(csv.read_text().splitlines()) == 10
    code, _ = run_json(capsys, "tau-check", "--N", "2", "--orders", "8,4", "--seed", "4")
    assert code == 0


def test_degenerate_generators_exit_code(capsys):
    code, report = run_json(
        capsys, "kdv-soliton", "--dim", "1", "--orders", "6,4",
        "--alphas", "1; 1 ;", "1; 1 ;", "--amps", "1; 1 ;", "1; 1 ;",
    )
    assert code == 2
    assert report["status"] == "degenerate"
    assert report["error"]["error"] == "DegenerateGenerators"


def test_config_errors(capsys):
    code, report = run_json(capsys, "toda-solve", "--type", "C", "--n", "3")
    assert code == 3
    assert report["status"] == "config-error"
    code, _ = run_json(capsys, "sech-check", "--dim", "2")
    assert code == 3
    code, _ = run_json(capsys, "vieta", "--no-such-flag")
    assert code == 3
    code, _ = run_json(capsys, "sech-check", "--a", "-1")
    assert code == 3


def test_config_file_with_flag_override(capsys, tmp_path):
    path = tmp_path / "job.json"
    path.write_text(json.dumps({"n": 4, "seed": 5, "dim": 1}))
    code, report = run_json(capsys, "vieta", "--config", str(path), "--n", "1")
    assert code == 0
    assert report["config"]["n"] == 1
    assert report["config"]["seed"] == 5
    code, _ = run_json(capsys, "vieta", "--config", str(tmp_path / "missing.json"))
    assert code == 3
