import csv
import io
import subprocess
import sys

import pytest

from tscale.cli import InputError, main, parse_complex, parse_grid


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("text,value", [
    ("2", 2), ("-1.5", -1.5), ("3i", 3j), ("i", 1j), ("-i", -1j), ("1-2i", 1 - 2j),
    ("1e-3+i", 1e-3 + 1j), (".5-.25i", 0.5 - 0.25j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "1 + 2i", "2i3", "abc", "1+", "--1"])
def test_parse_complex_rejects(text):
    with pytest.raises(InputError):
        parse_complex(text)


def test_parse_grid():
    assert parse_grid("0:4:5").tolist() == [0, 1, 2, 3, 4]
    assert parse_grid("1,2.5").tolist() == [1, 2.5]
    with pytest.raises(InputError):
        parse_grid("0:1:0")


def test_laplace_geometric_series():
    code, out, _ = run("laplace", "--f", "1", "--ts", "int", "--s", "0", "--z", "1")
    assert code == 0
    (row,) = rows(out)
    assert float(row["re"]) == pytest.approx(1.0, abs=1e-10)
    assert row["converged"] == "true"


def test_laplace_rectangle():
    code, out, _ = run("laplace", "--f", "1", "--ts", "real", "--z-re", "1:2:2", "--z-im", "0,1")
    assert code == 0
    got = [(float(r["z_re"]), float(r["z_im"])) for r in rows(out)]
    assert got == [(1, 0), (2, 0), (1, 1), (2, 1)]


def test_laplace_outside_region_is_an_input_error():
    code, _, err = run("laplace", "--f", "1", "--ts", "int", "--z", "-0.5")
    assert code == 2
    assert "outside" in err


def test_exp_and_monomial_tables():
    code, out, _ = run("exp", "--ts", "int", "--z", "1", "--t", "0:3:4")
    assert code == 0
    assert [float(r["re"]) for r in rows(out)] == pytest.approx([1, 2, 4, 8])
    code, out, _ = run("monomial", "--ts", "mixed", "--n", "2", "--t", "1,3")
    assert [float(r["h"]) for r in rows(out)] == pytest.approx([0.5, 3.75])


def test_lambda_table():
    code, out, _ = run("lambda", "--ts", "int", "--t", "3", "--x", "1,1000")
    assert code == 0
    r = rows(out)
    assert float(r[0]["lambda"]) == pytest.approx(0.8824969025845955)  # exp(-1/8)
    assert float(r[1]["limit"]) == 1.0


def test_null_check_verb():
    code, out, _ = run("null-check", "--f", "ind(0.5)", "--ts", "mixed")
    assert code == 0
    assert "verdict=null" in out.splitlines()


def test_lerch_null_exits_zero(tmp_path):
    lattice = tmp_path / "lattice.csv"
    code, out, _ = run("lerch", "--f", "ind(0.5)", "--ts", "mixed", "--lattice", str(lattice))
    assert code == 0
    assert "hypothesis_holds=true" in out
    assert lattice.read_text().startswith("n,k,re,im,converged,tail_estimate\n")


def test_lerch_impulse_reports_witness():
    code, out, _ = run("lerch", "--f", "ind(0)", "--ts", "int", "--varsigma", "1,2,3")
    assert code == 0
    head, table = out.split("\n\n")
    assert "witness=0,0" in head.splitlines()
    assert rows(table)[0]["re"] == "0.5"


def test_verify_passes():
    code, out, _ = run("verify")
    assert code == 0
    assert out.rstrip().endswith("properties passed")


@pytest.mark.parametrize("argv", [
    ["laplace", "--f", "t +", "--ts", "int", "--z", "1"],
    ["laplace", "--f", "1", "--ts", "nowhere.ts", "--z", "1"],
    ["laplace", "--f", "1", "--ts", "int", "--s", "0.5", "--z", "1"],
    ["exp", "--ts", "int", "--z", "1", "--t", "0.5"],
    ["lambda", "--ts", "int", "--t", "1", "--x", "0"],
    ["lerch", "--f", "1", "--ts", "int", "--varsigma", "2,1"],
    ["bogus"],
])
def test_bad_input_exits_two(argv):
    assert run(*argv)[0] == 2


def test_output_is_deterministic(tmp_path):
    argv = ["laplace", "--f", "cos(t)*hk(1)", "--ts", "mixed", "--z", "1,2+1i,0.5-3i"]
    assert run(*argv) == run(*argv)
    out = tmp_path / "o.csv"
    run(*argv, "--out", str(out))
    assert out.read_text() == run(*argv)[1]


def test_console_script_runs():
    r = subprocess.run([sys.executable, "-m", "tscale.cli", "exp", "--ts", "int", "--z", "1", "--t", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout == "t,re,im\n2.0,4.0,0.0\n"
