from pathlib import Path

import pytest

from nodalvar import ConfigurationError, Reference
from nodalvar.cli import main
from nodalvar.config import load_config, parse_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def rows(text):
    """Parsed CSV rows without the # metadata lines."""
    import csv
    import io
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(body))))


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_minimal():
    cfg = parse_config("[problem]\nkind = oscillator\n[nodes]\nvalues = 0.9, 2.0\n")
    assert cfg.problem.n_points == 8001
    assert cfg.nodes == (0.9, 2.0)
    assert cfg.subsets is None
    assert cfg.reference is Reference.SUBSET_AVERAGE


def test_parse_subsets_and_reference():
    cfg = parse_config("[problem]\nkind = hydrogen\n[nodes]\nvalues = 2, 6.6, 15.6\n"
                       "[subset]\nregions = 3,4; 1,2,3,4\nreference = -0.03125\n")
    assert cfg.subsets == ((3, 4), (1, 2, 3, 4))
    assert cfg.reference == -0.03125


def test_parse_exact_nodes(h4s):
    cfg = load_config(CONFIGS / "hydrogen_exact.ini", grid_scale=1.0)
    assert cfg.nodes == h4s.interior_nodes


def test_grid_scale():
    cfg = parse_config("[problem]\nkind = oscillator\n", grid_scale=2.0)
    assert cfg.problem.n_points == 16001


@pytest.mark.parametrize("text,message", [
    ("[problem]\nkind = oscillator\ncolour = red\n", "unknown key"),
    ("[mystery]\nx = 1\n", "unknown section"),
    ("[problem]\nkind = oscillator\n[nodes]\nvalues = 2.0, 0.9\n", "nodes must be strictly increasing"),
    ("[problem]\nkind = oscillator\n[nodes]\nvalues = 0.9, abc\n", "not a number"),
    ("[problem]\nkind = oscillator\n[nodes]\nvalues = 0.9, 2.0\n[subset]\nregions = 1,4\n", "invalid"),
    ("[problem]\nkind = oscillator\n[objective]\nkind = err2\nscaling = none\n", "scaling set"),
    ("[problem]\nkind = oscillator\n[objective]\nkind = err3\n", "err1 or err2"),
    ("[problem]\nkind = oscillator\n[objective]\nmax_iterations = 0\n", "max_iterations"),
    ("[output]\nprecision = 40\n", "precision"),
    ("[jacobi]\nrefinement_levels = 1\n", "refinement_levels"),
    ("[problem\nkind = x\n", "malformed"),
])
def test_config_errors(text, message):
    with pytest.raises(ConfigurationError, match=message):
        parse_config(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_config(tmp_path / "absent.ini")


def test_solve_table_i(capsys):
    assert main(["solve", "--config", str(CONFIGS / "table_I.ini")]) == 0
    table = rows(capsys.readouterr().out)
    assert table[0] == ["region", "a", "b", "E", "p"]
    energies = [float(r[3]) for r in table[1:]]
    assert len(energies) == 4
    assert energies[0] == pytest.approx(-0.14010, abs=1e-4)
    assert energies[2] == pytest.approx(-0.03261, abs=1e-4)
    assert energies[3] == pytest.approx(-0.03106, abs=1e-4)


def test_solve_table_i_second_region(capsys):
    # printed as -0.01000; see the notes on the clamped entries
    assert main(["solve", "--config", str(CONFIGS / "table_I.ini")]) == 0
    table = rows(capsys.readouterr().out)
    assert float(table[2][3]) == pytest.approx(-0.01000, abs=1e-3)


def test_solve_exact_nodes(capsys):
    assert main(["solve", "--config", str(CONFIGS / "hydrogen_exact.ini")]) == 0
    table = rows(capsys.readouterr().out)
    assert all(float(r[3]) == pytest.approx(-0.03125, abs=2e-5) for r in table[1:])


def test_reversed_nodes_exit_1(tmp_path, capsys):
    cfg = write(tmp_path, "[problem]\nkind = hydrogen\n[nodes]\nvalues = 6.6, 2.0, 15.6\n")
    assert main(["solve", "--config", str(cfg)]) == 1
    assert "nodes must be strictly increasing" in capsys.readouterr().err


def test_missing_config_exit_1(capsys):
    assert main(["analyze"]) == 1
    assert "needs --config" in capsys.readouterr().err


def test_bad_precision_exit_1(capsys):
    assert main(["reproduce", "V", "--precision", "0"]) == 1


def test_analyze_table_i(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["analyze", "--config", str(CONFIGS / "table_I.ini"), "--out", str(out)]) == 0
    table = rows(capsys.readouterr().out)
    assert table[0] == ["subset", "E_avg", "reference", "err1", "err2"]
    assert len(table) == 16
    by_subset = {r[0]: r for r in table[1:]}
    assert float(by_subset["1,2,3,4"][3]) == pytest.approx(1.0167e-4, rel=0.02)
    assert float(by_subset["3,4"][1]) == pytest.approx(-0.03126, abs=1e-4)
    for name in ("report.csv", "regions.csv", "wavefunction.csv", "kinetic.csv", "potential.csv", "total.csv"):
        text = (out / name).read_bytes()
        assert text and b"\r" not in text


def test_analyze_ho1(capsys):
    assert main(["analyze", "--config", str(CONFIGS / "ho1.ini")]) == 0
    table = rows(capsys.readouterr().out)
    assert [r[0] for r in table[1:]] == ["1,2,3", "3"]
    assert float(table[1][1]) == pytest.approx(5.1974, abs=1e-3)
    assert float(table[2][1]) == pytest.approx(5.6742, abs=1e-3)


def test_analyze_exact_nodes(capsys):
    assert main(["analyze", "--config", str(CONFIGS / "hydrogen_exact.ini")]) == 0
    table = rows(capsys.readouterr().out)
    assert all(float(r[3]) < 1e-8 for r in table[1:])


def test_optimize_from_table_i(tmp_path, capsys):
    out = tmp_path / "opt"
    assert main(["optimize-nodes", "--config", str(CONFIGS / "table_I.ini"), "--out", str(out)]) == 0
    table = rows(capsys.readouterr().out)
    nodes = [float(v) for v in table[1][:3]]
    assert nodes == pytest.approx([1.8716, 6.6108, 15.5180], abs=5e-3)
    assert rows((out / "trace.csv").read_text())[0] == ["iter", "node_1", "node_2", "node_3", "objective"]


def test_optimize_iteration_limit(tmp_path, capsys):
    cfg = write(tmp_path, "[problem]\nkind = oscillator\n[nodes]\nvalues = 0.759, 2.080\n"
                          "[objective]\nmax_iterations = 1\n")
    out = tmp_path / "o"
    assert main(["optimize-nodes", "--config", str(cfg), "--out", str(out)]) == 2
    captured = capsys.readouterr()
    assert "did not converge" in captured.err
    assert len(rows((out / "trace.csv").read_text())) >= 2


def test_verify_jacobi_h4s(capsys):
    assert main(["verify-jacobi", "--config", str(CONFIGS / "jacobi_h4s.ini")]) == 0
    out = capsys.readouterr().out
    assert "# passed: true" in out
    assert rows(out)[0] == ["g_id", "h", "lhs", "rhs", "residual"]


def test_verify_jacobi_tolerance_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, "[jacobi]\nstate = HO n=5\nscaling = oscillator\nbase_refinement = 1\n"
                          "tolerance = 1e-9\n")
    assert main(["verify-jacobi", "--config", str(cfg)]) == 2
    assert "not below" in capsys.readouterr().err


def test_reproduce_v(capsys):
    assert main(["reproduce", "V", "--diff"]) == 0
    captured = capsys.readouterr()
    assert "12/12 cells within tolerance" in captured.err
    assert rows(captured.out)[0][-1] == "status"


def test_reproduce_table_flag(tmp_path, capsys):
    assert main(["reproduce", "--table", "Fig2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig2.csv").exists()
    assert (tmp_path / "ho2_full_line.csv").exists()


def test_reproduce_unknown_table(capsys):
    assert main(["reproduce", "Q"]) == 1
    assert "unknown table id" in capsys.readouterr().err


def test_reproduce_needs_table(capsys):
    assert main(["reproduce"]) == 1


def test_reproduce_diff_failure_exit_2(capsys):
    assert main(["reproduce", "I", "--diff"]) == 2
    assert "outside tolerance" in capsys.readouterr().err


def test_reproduce_grid_scale(monkeypatch, capsys):
    monkeypatch.setenv("NODALVAR_GRID_SCALE", "2")
    assert main(["reproduce", "V"]) == 0
    assert "n_points=16001" in capsys.readouterr().out
    monkeypatch.setenv("NODALVAR_GRID_SCALE", "-1")
    assert main(["reproduce", "V"]) == 1


def test_output_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["reproduce", "I", "--out", str(a)]) == 0
    assert main(["reproduce", "I", "--out", str(b)]) == 0
    for path in a.iterdir():
        assert path.read_bytes() == (b / path.name).read_bytes()


def test_precision_flag(capsys):
    assert main(["solve", "--config", str(CONFIGS / "table_I.ini"), "--precision", "3"]) == 0
    table = rows(capsys.readouterr().out)
    assert table[1][3] == "-1.40e-01"


def test_output_dir_from_config(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    cfg = write(tmp_path, "[problem]\nkind = oscillator\n[nodes]\nvalues = 0.9586, 2.0202\n"
                          "[output]\ndirectory = results\n")
    assert main(["solve", "--config", str(cfg)]) == 0
    assert (tmp_path / "results" / "regions.csv").exists()
