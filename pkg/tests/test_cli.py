import json

from flagsos.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_enumerate_mantel(capsys):
    code, payload = run(capsys, "enumerate", "--m", "3", "--f", "2", "--t", "1")
    assert code == 0
    assert payload["counts"] == {"hosts": 3, "flags": 2}


def test_enumerate_single_flag(capsys):
    code, payload = run(capsys, "enumerate", "--m", "3", "--f", "1", "--t", "1")
    assert code == 0
    assert payload["counts"]["flags"] == 1


def test_enumerate_m4(capsys):
    code, payload = run(capsys, "enumerate", "--m", "4", "--f", "2", "--t", "1")
    assert code == 0
    assert payload["counts"]["hosts"] == 7


def test_table_matches_published(capsys):
    code, payload = run(capsys, "table", "--m", "3", "--f", "2", "--t", "1")
    assert code == 0
    values = {(e["F"], e["Fp"], e["H"]): e["value"] for e in payload["entries"]}
    assert values[(0, 0, 0)] == "1" and values[(0, 0, 1)] == "1/3" and values[(0, 0, 2)] == "0"
    assert values[(0, 1, 1)] == "1/3" and values[(1, 1, 2)] == "1/3"
    # symmetric storage: only i <= j entries, value symmetric by construction
    assert all(e["F"] <= e["Fp"] for e in payload["entries"])


def test_solve_mantel(capsys):
    code, payload = run(capsys, "solve", "--m", "3", "--f", "2", "--t", "1")
    assert code == 0
    assert payload["bound"] == "1/2"
    assert payload["blocks"]["Q"] == [["1/2", "-1/2"], ["-1/2", "1/2"]]
    assert payload["verification"]["ok"]
    assert payload["solver"]["gap"] <= 1e-9


def test_solve_trivial_f_equals_t(capsys):
    code, payload = run(capsys, "solve", "--m", "3", "--f", "1", "--t", "1")
    assert code == 0
    assert payload["bound"] == "2/3"


def test_gp_mantel_n5(capsys):
    code, payload = run(capsys, "gp", "--n", "5", "--m", "3", "--f", "2", "--t", "1", "--d", "1")
    assert code == 0
    assert payload["block_sizes"] == {"5": 2, "4,1": 1}
    assert payload["status"] == "optimal" and payload["exact"]
    assert payload["flag_bound"] == "1/2"
    assert payload["bound_with_err"] == "2/3"  # 1/2 + max err at n=5


def test_gp_degree_zero_trivial_bound(capsys):
    code, payload = run(capsys, "gp", "--n", "5", "--m", "3", "--f", "2", "--t", "1", "--d", "0")
    assert code == 0
    assert payload["status"] == "trivial" and payload["flag_bound"] == "1"


def test_gp_leading_partition_only_infeasible(capsys):
    code, _ = run(capsys, "gp", "--n", "5", "--m", "3", "--f", "2", "--t", "1", "--d", "1",
                  "--partitions", "[[5]]")
    assert code == 3


def test_verify_identity(capsys):
    code, payload = run(capsys, "verify", "identity", "--n", "5", "--m", "3")
    assert code == 0
    assert payload["unit_partition_identity"] and payload["density_decomposition_identity"]


def test_verify_mantel(capsys):
    code, payload = run(capsys, "verify", "mantel", "--n", "4")
    assert code == 0
    assert payload["ok"] and payload["max_abs_err"] == "2/9"


def test_verify_section5(capsys):
    code, payload = run(capsys, "verify", "section5", "--n", "5")
    assert code == 0
    assert payload["ok"]


def test_verify_certificate_roundtrip(tmp_path, capsys):
    code, _ = run(capsys, "solve", "--m", "3", "--f", "2", "--t", "1",
                  "--out", str(tmp_path / "cert.json"))
    assert code == 0
    code, payload = run(capsys, "verify", "certificate",
                        "--certificate", str(tmp_path / "cert.json"), "--n", "4")
    assert code == 0
    assert payload["ok"] and payload["bound"] == "1/2"


def test_verify_tampered_certificate_exit_2(tmp_path, capsys):
    path = tmp_path / "cert.json"
    code, _ = run(capsys, "solve", "--m", "3", "--f", "2", "--t", "1", "--out", str(path))
    cert = json.loads(path.read_text())
    cert["blocks"]["Q"][0][0] = "1/3"
    path.write_text(json.dumps(cert))
    code = main(["verify", "certificate", "--certificate", str(path), "--n", "4"])
    assert code == 2


def test_budget_exit_4(capsys):
    assert main(["enumerate", "--m", "9"]) == 4


def test_demo(tmp_path, capsys):
    out = tmp_path / "demo.json"
    code = main(["demo", "mantel", "--n", "5", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["table_matches_published"]
    assert payload["section5_report"]["ok"]


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["table", "--m", "3", "--f", "2", "--t", "1", "--out", str(a)]) == 0
    assert main(["table", "--m", "3", "--f", "2", "--t", "1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_spec_file(tmp_path, capsys):
    spec = {"forbidden": "K3", "n": 5, "t": 1, "f": 2, "m": 3, "d": 1}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code, payload = run(capsys, "enumerate", "--spec", str(path))
    assert code == 0
    assert payload["counts"] == {"hosts": 3, "flags": 2}


def test_forbidden_graph_file(tmp_path, capsys):
    path = tmp_path / "k3.json"
    path.write_text(json.dumps({"n": 3, "edges": [[1, 2], [1, 3], [2, 3]]}))
    code, payload = run(capsys, "enumerate", "--m", "3", "--forbidden", str(path))
    assert code == 0
    assert payload["counts"]["hosts"] == 3
