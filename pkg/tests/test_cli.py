"""Command-line interface: subcommands, exit codes, reproducibility."""

import math

import pytest

from ifsquant.cli import main


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def rows_of(out, header):
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert lines[0] == header
    return [l.split(",") for l in lines[1:]]


def strip_timestamp(out):
    return "\n".join(l for l in out.splitlines() if not l.startswith("# timestamp"))


def test_dim_dyadic_closed_form(capsys):
    code, out = run(capsys, ["dim", "--system", "dyadic", "--r", "1"])
    assert code == 0
    rows = rows_of(out, "r,kappa_r,residual")
    assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-9)
    assert float(rows[0][2]) <= 1e-10


def test_dim_gamma3_r_list(capsys):
    code, out = run(capsys, ["dim", "--system", "gamma3", "--r", "1,2"])
    assert code == 0
    rows = rows_of(out, "r,kappa_r,residual")
    for row in rows:
        assert float(row[1]) == pytest.approx(math.log(2) / math.log(3), abs=1e-9)


def test_unknown_flag_exits_64(capsys):
    assert main(["dim", "--system", "dyadic", "--frobnicate"]) == 64


def test_unknown_subcommand_exits_64(capsys):
    assert main(["transmogrify"]) == 64


def test_unknown_system_exits_2(capsys):
    assert main(["dim", "--system", "atlantis"]) == 2


def test_beta_grid(capsys):
    code, out = run(capsys, ["beta", "--system", "dyadic", "--q", "0,0.5,1"])
    assert code == 0
    rows = rows_of(out, "q,t,value,tail_bound")
    assert [float(r[1]) for r in rows] == pytest.approx([1.0, 0.5, 0.0], abs=1e-9)


def test_pressure_row(capsys):
    code, out = run(capsys, ["pressure", "--system", "dyadic", "--q", "1", "--t", "0"])
    assert code == 0
    rows = rows_of(out, "q,t,value,tail_bound")
    assert float(rows[0][2]) == pytest.approx(0.0, abs=1e-12)


def test_pressure_divergent_exits_2(capsys):
    assert main(["pressure", "--system", "dyadic", "--q", "1", "--t", "-2"]) == 2


def test_sample_writes_file_and_reruns_identically(tmp_path, capsys):
    argv = ["sample", "--system", "gamma3", "--samples", "50", "--eps", "1e-4",
            "--seed", "9", "--out", str(tmp_path / "a")]
    code, out1 = run(capsys, argv)
    assert code == 0
    written = (tmp_path / "a" / "sample.csv").read_text()
    assert written == out1
    argv2 = ["sample", "--system", "gamma3", "--samples", "50", "--eps", "1e-4",
             "--seed", "9", "--out", str(tmp_path / "b")]
    code, out2 = run(capsys, argv2)
    assert strip_timestamp(out1) == strip_timestamp(out2)
    rows = rows_of(out1, "x")
    assert len(rows) == 50
    assert "# spatial_error:" in out1 and "# seed: 9" in out1


def test_lloyd_centers(capsys):
    code, out = run(capsys, ["lloyd", "--system", "gamma3", "--n", "3",
                             "--samples", "3000", "--eps", "1e-4", "--seed", "2",
                             "--restarts", "2"])
    assert code == 0
    rows = rows_of(out, "cx")
    assert len(rows) == 3
    assert "# distortion:" in out and "# stderr:" in out


def test_constructive_metadata(capsys):
    code, out = run(capsys, ["constructive", "--system", "gamma3", "--n", "8",
                             "--r", "1", "--samples", "2000", "--seed", "4"])
    assert code == 0
    for key in ("# kappa_r:", "# alpha:", "# N:", "# card:", "# bound_sum:"):
        assert key in out


def test_wasserstein_csv_io(tmp_path, capsys):
    mu = tmp_path / "mu.csv"
    nu = tmp_path / "nu.csv"
    mu.write_text("x,mass\n0.0,0.5\n1.0,0.5\n")
    nu.write_text("x,mass\n0.5,1.0\n")
    code, out = run(capsys, ["wasserstein", str(mu), str(nu), "--r", "1"])
    assert code == 0
    rows = rows_of(out, "r,rho_r")
    assert float(rows[0][1]) == pytest.approx(0.5)


def test_wasserstein_assignment_coupling(tmp_path, capsys):
    mu = tmp_path / "mu.csv"
    nu = tmp_path / "nu.csv"
    mu.write_text("x,y,mass\n0.0,0.0,0.5\n1.0,1.0,0.5\n")
    nu.write_text("x,y,mass\n1.0,0.0,0.5\n0.0,1.0,0.5\n")
    code, out = run(capsys, ["wasserstein", str(mu), str(nu), "--r", "2"])
    assert code == 0
    assert "i,j,mass" in out
    rows = rows_of(out, "r,rho_r")
    assert float(rows[0][1]) == pytest.approx(1.0)


def test_wasserstein_bad_header_exits_2(tmp_path, capsys):
    mu = tmp_path / "mu.csv"
    mu.write_text("a,b\n0,1\n")
    assert main(["wasserstein", str(mu), str(mu)]) == 2


def test_curve_small(capsys):
    code, out = run(capsys, ["curve", "--system", "gamma3", "--n", "2,4,8,16",
                             "--samples", "4000", "--eps", "1e-5", "--seed", "1",
                             "--restarts", "2"])
    assert code == 0
    assert "# d_hat:" in out
    rows = rows_of(out, "n,V,stderr,coeff")
    assert len(rows) == 4


def test_witness_structure(capsys):
    code, out = run(capsys, ["witness", "--system", "gamma3",
                             "--n", "2:16:x2", "--r", "2",
                             "--kappa-minus", "0.4", "--kappa-plus", "1.2",
                             "--samples", "4000", "--seed", "3",
                             "--restarts", "2"])
    assert code in (0, 2)
    rows = rows_of(out, "n,V,stderr,coeff_minus,coeff_plus")
    assert len(rows) == 4
    assert "lower witness" in out and "upper witness" in out


def test_verify_builtin_systems(capsys):
    for name in ("dyadic", "gamma3", "uniform4"):
        code, out = run(capsys, ["verify", "--system", name])
        assert code == 0, out
        assert "FAIL" not in out
    _, out = run(capsys, ["verify", "--system", "dyadic"])
    assert "# SKIP separation" in out


def test_grid_parsing(capsys):
    code, out = run(capsys, ["curve", "--system", "gamma3", "--n", "2:12:+3",
                             "--samples", "3000", "--eps", "1e-4", "--seed", "1",
                             "--restarts", "1"])
    assert code == 0
    rows = rows_of(out, "n,V,stderr,coeff")
    assert [int(r[0]) for r in rows] == [2, 5, 8, 11]
