import csv
import json
from importlib import resources

import numpy as np
import pytest

from qlr import cli, numerics
from qlr.cli import RunReport, main
from qlr.gloa import GeneString, string_to_unitary
from qlr.qsim import gate_matrix

DATA = resources.files("qlr").joinpath("data")


def _solve(tmp_path, *extra):
    out = tmp_path / "report.json"
    code = main(["solve", *extra, "--out", str(out)])
    return code, (RunReport.loads(out.read_text()) if code == 0 else None)


def test_solve_builtin_exact(tmp_path):
    code, rep = _solve(tmp_path, "--builtin", "paper", "--mode", "exact", "--exact-statevector", "--seed", "1")
    assert code == 0
    assert rep.hhl["error_2norm"] <= 1e-6
    assert rep.seed == 1
    assert rep.fingerprint.startswith("sha256:")
    assert set(rep.timings_ms) == {"load", "classical", "hhl"}


def test_solve_system_rows_csv(tmp_path):
    code, rep = _solve(tmp_path, "--dataset", str(DATA / "paper_system_rows.csv"), "--seed", "1")
    assert code == 0 and rep.hhl["error_2norm"] <= 1e-6
    assert np.allclose(rep.hhl["classical_reference"], [-1, 7, 11, 13])


def test_solve_system_json(tmp_path):
    code, rep = _solve(tmp_path, "--system", str(DATA / "paper_system.json"), "--seed", "1")
    assert code == 0 and rep.hhl["error_2norm"] <= 1e-6


def test_solve_gene_string_sampled(tmp_path):
    gs_path = tmp_path / "u.gs"
    assert main(["approximate", "--builtin", "expA16", "--method", "pauli", "--out", str(gs_path)]) == 0
    code, rep = _solve(tmp_path, "--builtin", "paper", "--mode", "gene-string", "--string", str(gs_path),
                       "--shots", "100000", "--seed", "7")
    assert code == 0
    assert rep.hhl["error_2norm"] <= 0.5
    assert rep.config["shots"] == 100000 and rep.seed == 7


def test_solve_is_deterministic_under_seed(tmp_path):
    args = ["--builtin", "paper", "--mode", "pauli-circuit", "--shots", "5000", "--seed", "3"]
    _, a = _solve(tmp_path, *args)
    _, b = _solve(tmp_path, *args)
    assert a.hhl == b.hhl


def test_solve_without_seed_prints_it(tmp_path, capsys):
    code, rep = _solve(tmp_path, "--builtin", "paper", "--shots", "100")
    assert code == 0
    assert f"seed: {rep.seed}" in capsys.readouterr().err


def test_report_round_trip(tmp_path):
    _, rep = _solve(tmp_path, "--builtin", "paper", "--shots", "1000", "--seed", "2")
    again = RunReport.loads(rep.dumps())
    assert again == rep and again.dumps() == rep.dumps()


def test_malformed_csv_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("y,x1,x2\n1,2\n")
    out = tmp_path / "r.json"
    assert main(["solve", "--dataset", str(bad), "--out", str(out), "--seed", "0"]) == cli.EXIT_PARSE
    assert not out.exists()
    assert "line 2" in capsys.readouterr().err


def test_conditioning_exit_codes(tmp_path):
    data = tmp_path / "ill.csv"
    data.write_text("y,a,b\n1,1,0\n1,0,0.01\n")
    assert main(["solve", "--dataset", str(data), "--seed", "0"]) == cli.EXIT_CONDITIONING
    sing = tmp_path / "sing.csv"
    sing.write_text("y,a,b\n1,1,1\n2,2,2\n")
    assert main(["solve", "--dataset", str(sing), "--seed", "0"]) == cli.EXIT_CONDITIONING


def test_postselection_exit_code(tmp_path):
    assert main(["solve", "--builtin", "paper", "--C", "1e-6", "--seed", "0"]) == cli.EXIT_POSTSELECTION


def test_unencodable_exit_code(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("y,a,b\n1,1,0\n1,0,1.7320508075688772\n")  # eigenvalues 1 and 3
    assert main(["solve", "--dataset", str(data), "--seed", "0"]) == cli.EXIT_UNENCODABLE


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"shots": 2000, "seed": 4, "mode": "pauli-circuit"}))
    _, rep = _solve(tmp_path, "--builtin", "paper", "--config", str(cfg), "--seed", "9")
    assert rep.seed == 9 and rep.config["shots"] == 2000
    assert rep.config["unitary_mode"] == "exact-pauli-circuit"
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["solve", "--builtin", "paper", "--config", str(cfg)]) == cli.EXIT_PARSE


def test_approximate_rx_target(tmp_path, capsys):
    target = tmp_path / "rx.json"
    target.write_text(json.dumps(numerics.matrix_to_json(gate_matrix("Rx", (1.0,)))))
    out = tmp_path / "rx.gs"
    code = main(["approximate", "--target", str(target), "--groups", "5", "--members", "10",
                 "--max-gates", "3", "--gate-set", "Rx,Ry,Rz,H", "--iterations", "2000",
                 "--seed", "1", "--out", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["fidelity"] >= 0.999 and summary["seed"] == 1
    GeneString.loads(out.read_text())


def test_approximate_seeded_and_refined(tmp_path, capsys):
    runs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.gs"
        assert main(["approximate", "--builtin", "expA16", "--seed", "11", "--groups", "3", "--members", "4",
                     "--iterations", "5", "--refine", "--out", str(out)]) == 0
        runs.append((out.read_text(), json.loads(capsys.readouterr().out)))
    assert runs[0] == runs[1]
    summary = runs[0][1]
    assert summary["refined_fidelity"] >= summary["fidelity"]


def test_approximate_rejects_non_unitary(tmp_path):
    target = tmp_path / "m.json"
    target.write_text(json.dumps(numerics.matrix_to_json(np.diag([1.0, 2.0]))))
    assert main(["approximate", "--target", str(target), "--seed", "0"]) == cli.EXIT_NON_UNITARY


def test_verify_string_against_own_unitary(tmp_path, capsys):
    gs = GeneString.loads("qubits=2 gateset=H,CNOT,Rzz\n1 1 0 0.0\n2 2 1 0.0\n3 1 2 0.4\n")
    sp = tmp_path / "s.gs"
    sp.write_text(gs.dumps())
    tp = tmp_path / "t.json"
    tp.write_text(json.dumps(numerics.matrix_to_json(string_to_unitary(gs))))
    assert main(["verify", str(sp), str(tp)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["trace_fidelity"] == pytest.approx(1.0)
    assert out["hilbert_schmidt_distance"] == pytest.approx(0.0, abs=1e-12)


def test_verify_pauli_export(tmp_path, capsys):
    sp = tmp_path / "p.gs"
    assert main(["approximate", "--builtin", "expA16", "--method", "pauli", "--out", str(sp)]) == 0
    capsys.readouterr()
    assert main(["verify", str(sp), "--builtin", "expA16", "--threshold", str(1 - 1e-10)]) == 0
    assert json.loads(capsys.readouterr().out)["trace_fidelity"] >= 1 - 1e-10


def test_verify_threshold_and_dimension_codes(tmp_path):
    sp = tmp_path / "x.gs"
    sp.write_text("qubits=1 gateset=X\n1 1 0 0.0\n")
    tp = tmp_path / "z.json"
    tp.write_text(json.dumps(numerics.matrix_to_json(gate_matrix("Z"))))
    assert main(["verify", str(sp), str(tp)]) == cli.EXIT_THRESHOLD
    tp.write_text(json.dumps(numerics.matrix_to_json(np.eye(4))))
    assert main(["verify", str(sp), str(tp)]) == cli.EXIT_DIMENSION


def test_qpe_subcommand(tmp_path):
    out = tmp_path / "q.json"
    assert main(["qpe", "--builtin", "paper", "--eigenvector", "3", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["0100"] >= 0.999


def _plot_rows(path):
    with open(path) as fp:
        return list(csv.DictReader(fp))


def test_emit_plot_exact(tmp_path):
    _solve(tmp_path, "--builtin", "paper", "--seed", "1")
    out = tmp_path / "plot.csv"
    assert main(["emit-plot", str(tmp_path / "report.json"), "--out", str(out)]) == 0
    rows = _plot_rows(out)
    assert [r["basis_state"] for r in rows] == ["00", "01", "10", "11"]
    pred = np.array([float(r["predicted_amplitude"]) for r in rows])
    sim = np.array([float(r["simulated_amplitude"]) for r in rows])
    assert np.allclose(pred, [-1, 7, 11, 13]) and np.allclose(sim, pred, atol=1e-6)


def test_emit_plot_sampled_consistent(tmp_path):
    _, rep = _solve(tmp_path, "--builtin", "paper", "--mode", "pauli-circuit", "--shots", "100000", "--seed", "7")
    out = tmp_path / "plot.csv"
    assert main(["emit-plot", str(tmp_path / "report.json"), "--out", str(out)]) == 0
    rows = _plot_rows(out)
    pred = np.array([float(r["predicted_amplitude"]) for r in rows])
    sim = np.array([float(r["simulated_amplitude"]) for r in rows])
    assert np.linalg.norm(sim - pred) <= rep.hhl["error_2norm"] + 1e-12


def test_emit_plot_empty_report(tmp_path):
    empty = tmp_path / "e.json"
    empty.write_text("{}")
    assert main(["emit-plot", str(empty)]) == cli.EXIT_PARSE
    assert main(["emit-plot", str(tmp_path / "missing.json")]) == cli.EXIT_PARSE


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["solve", "--mode", "nope"])
    assert info.value.code == 2
