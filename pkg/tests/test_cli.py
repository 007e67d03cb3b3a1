import csv
import io
import json
import subprocess
import sys

import pytest

from opmono import cli
from opmono.exponents import ArgWitness, LoewnerWitness, Status, Verdict


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- check ---------------------------------------------------------------------------


def test_check_f_half(capsys):
    d = run_json(capsys, "check", "--gamma", "0", "--alpha", "1,1", "--beta", "0.5,0.5")
    assert d["verdict"] == "proved_monotone" and d["method"] == "thm-1.1"
    assert d["certificate"]["upper_sum"] == pytest.approx(1.0)
    assert d["loewner_cross_check"] is None
    assert set(d) >= {"verdict", "method", "certificate", "szabo_passes", "F0_est", "G0_est",
                      "witness", "margin"}


def test_check_numeric_not_monotone(capsys):
    d = run_json(capsys, "check", "--gamma", "0", "--alpha", "1.6", "--beta", "0.5")
    assert d["verdict"] == "numeric_not_monotone" and d["method"] == "thm-2.2-numeric"
    assert d["F0_est"] == pytest.approx(1.1, abs=1e-6)
    assert d["witness"]["kind"] == "boundary-arg" and d["witness"]["r"] > 0


def test_check_necessary_condition(capsys):
    d = run_json(capsys, "check", "--gamma", "0", "--alpha", "2.5", "--beta", "0.5")
    assert d["verdict"] == "proved_not_monotone" and d["method"] == "prop-3.1"


def test_check_gamma_above_two(capsys):
    d = run_json(capsys, "check", "--gamma", "2.5")
    assert d["verdict"] == "proved_not_monotone"


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--alpha", "1,x", "--beta", "0.5,0.5"],
        ["check", "--alpha", "1", "--beta", "0.5,0.5"],
        ["check", "--alpha", "-0.5", "--beta", "0.5"],
        ["check", "--alpha", "2.5", "--beta", "0.5", "--s", "0.5"],
        ["check", "--gamma", "nan"],
        ["check", "--samples", "0"],
        ["nonsense"],
        [],
    ],
)
def test_check_invalid_input_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == "" and err


def test_check_no_expression_evaluation(capsys):
    code, _, _ = run(capsys, "check", "--alpha", "1/2", "--beta", "0.3")
    assert code == 1


def test_check_exit_2_on_contradicting_witness(capsys, monkeypatch):
    fake = LoewnerWitness((1.0, 2.0), -1.0, 0.5)
    monkeypatch.setattr(cli, "witness_search", lambda *a, **k: fake)
    code, out, err = run(capsys, "check", "--alpha", "1,1", "--beta", "0.5,0.5")
    assert code == 2 and "inconsistency" in err


def test_check_exit_2_on_contradicting_boundary(capsys, monkeypatch):
    bad = Verdict(Status.NUMERIC_NOT_MONOTONE, "thm-2.2-numeric", margin=1e-3,
                  witness=ArgWitness(2.0, 1.0, 0.5),
                  details={"F0_est": 0.0, "G0_est": 0.0})
    monkeypatch.setattr(cli, "classify_numeric", lambda *a, **k: bad)
    code, _, _ = run(capsys, "check", "--alpha", "1,1", "--beta", "0.5,0.5")
    assert code == 2


def test_check_loewner_cross_check_upgrades_inconclusive(capsys, monkeypatch):
    flat = Verdict(Status.INCONCLUSIVE, "thm-2.2-numeric", margin=1e-3,
                   details={"F0_est": 0.0, "G0_est": 0.0})
    monkeypatch.setattr(cli, "classify_numeric", lambda *a, **k: flat)
    d = run_json(capsys, "check", "--alpha", "1.6", "--beta", "0.5")
    assert d["verdict"] == "numeric_not_monotone" and d["method"] == "loewner-witness"
    assert d["witness"]["kind"] == "loewner"


def test_check_deterministic(capsys):
    argv = ["check", "--gamma", "0.2", "--alpha", "1.2,0.4", "--beta", "0.9,0.6"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_json_seventeen_digits(capsys):
    d_text = run(capsys, "check", "--gamma", "0", "--alpha", "1,1", "--beta", "0.3,0.7")[1]
    assert '"upper_sum": 1.0' in d_text or '"upper_sum": 0.99999999999999989' in d_text
    assert cli.dumps(0.1) == "0.10000000000000001"
    assert cli.dumps(float("inf")) == "null"


def test_out_file(tmp_path, capsys):
    p = tmp_path / "v.json"
    code, out, _ = run(capsys, "check", "--alpha", "1,1", "--beta", "0.5,0.5", "--out", str(p))
    assert code == 0 and out == ""
    assert json.loads(p.read_text())["verdict"] == "proved_monotone"


# --- sweep ---------------------------------------------------------------------------


def test_sweep_sidecar_F0(capsys):
    d = run_json(capsys, "sweep", "--alpha", "0.5", "--beta", "0.3", "--format", "json")
    assert d["F0_est"] == pytest.approx(0.2, abs=1e-6)


def test_sweep_sidecar_G0_negative(capsys):
    d = run_json(capsys, "sweep", "--alpha", "1.8", "--beta", "1.5", "--format", "json")
    assert d["G0_est"] < 0


def test_sweep_empty_spec_zero_column(capsys):
    code, out, _ = run(capsys, "sweep", "--samples", "33")
    assert code == 0
    data = rows(out)
    assert len(data) == 33
    assert all(float(r["arg_over_pi"]) == 0.0 for r in data)


def test_sweep_csv_format(capsys):
    code, out, _ = run(capsys, "sweep", "--alpha", "0.5", "--beta", "0.3", "--samples", "65")
    assert out.startswith("r,log10_r,arg_over_pi\n")
    assert "\r" not in out and out.endswith("\n")
    r = [float(x["r"]) for x in rows(out)]
    assert r == sorted(r)


def test_sweep_out_writes_sidecar(tmp_path, capsys):
    p = tmp_path / "prof.csv"
    code, out, _ = run(capsys, "sweep", "--alpha", "0.5", "--beta", "0.3", "--samples", "65",
                       "--out", str(p))
    assert code == 0
    assert b"\r\n" not in p.read_bytes()
    side = json.loads((tmp_path / "prof.json").read_text())
    assert side == json.loads(out)


@pytest.mark.parametrize("argv", [
    ["sweep", "--alpha", "2.0", "--beta", "0.5"],
    ["sweep", "--rmin", "-1"],
    ["sweep", "--rmin", "10", "--rmax", "1"],
])
def test_sweep_range_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_sweep_deterministic(capsys):
    argv = ["sweep", "--alpha", "1.2,0.3", "--beta", "0.7,0.9", "--samples", "200"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


# --- region ---------------------------------------------------------------------------


def test_region_h1_quarter_step(capsys):
    code, out, _ = run(capsys, "region", "--family", "h1", "--grid", "17")
    data = rows(out)
    assert len(data) == 17 * 17
    codes = {(float(r["a"]), float(r["b"])): r["code"] for r in data}
    assert codes[(1.5, 0.5)] == "monotone"
    assert codes[(0.25, 0.75)] == "not_monotone"
    assert codes[(1.0, -1.0)] == "monotone"
    assert codes[(0.5, 0.5)] == "degenerate"
    assert set(codes.values()) <= {"monotone", "not_monotone", "degenerate"}
    # row-major with b descending
    assert float(data[0]["b"]) == 2.0 and float(data[0]["a"]) == -2.0


def test_region_h2_unknown(capsys):
    code, out, _ = run(capsys, "region", "--family", "h2", "--grid", "1", "--amin", "0.9",
                       "--amax", "0.9", "--bmin", "-0.5", "--bmax", "-0.5", "--evidence")
    assert code == 0
    (row,) = rows(out)
    assert row["code"] == "unknown" and row["evidence"] in {"monotone", "not_monotone",
                                                            "inconclusive"}


def test_region_general_agrees_with_h1(capsys):
    code, out, _ = run(capsys, "region", "--family", "general-thm22", "--grid", "6",
                       "--amin", "0.1", "--amax", "1.9", "--bmin", "0.1", "--bmax", "1.9",
                       "--samples", "512")
    assert code == 0
    from opmono.families import FamilyStatus, h1_classify

    checked = 0
    for r in rows(out):
        a, b = float(r["a"]), float(r["b"])
        if r["code"] in {"degenerate", "inconclusive"}:
            continue
        # stay clear of the region boundary where the margin band decides
        if min(abs(a - 1), abs(b - 1), abs(a - b)) < 0.05:
            continue
        expected = h1_classify(a, b).status
        assert (r["code"] == "monotone") == (expected is FamilyStatus.MONOTONE), (a, b)
        checked += 1
    assert checked > 10


@pytest.mark.parametrize("argv", [
    ["region", "--family", "h3"],
    ["region", "--family", "h1", "--grid", "2001"],
    ["region", "--family", "h1", "--amax", "3"],
    ["region", "--family", "general-thm22", "--amin", "0"],
])
def test_region_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_region_json(capsys):
    d = run_json(capsys, "region", "--family", "h1", "--grid", "3", "--format", "json")
    assert len(d) == 9 and set(d[0]) == {"a", "b", "code"}


# --- verify ---------------------------------------------------------------------------


def test_verify_f_half(capsys):
    d = run_json(capsys, "verify", "--family", "f_a", "--a", "0.5")
    assert d["loewner"]["psd"] and d["probe"]["violations"] == 0 and d["witness"] is None


def test_verify_square(capsys):
    d = run_json(capsys, "verify", "--gamma", "2")
    assert d["witness"] is not None and d["witness"]["min_eigenvalue"] < 0


def test_verify_h2_dual_evaluation(capsys):
    d = run_json(capsys, "verify", "--family", "h2", "--a", "1", "--b", "-0.5", "--dim", "4")
    assert d["probe"]["violations"] > 0
    assert d["dual_evaluation_max_rel_diff"] < 1e-12


def test_verify_search(capsys):
    d = run_json(capsys, "verify", "--alpha", "1.6", "--beta", "0.5", "--search")
    assert d["witness"] is not None


@pytest.mark.parametrize("argv", [
    ["verify", "--dim", "13"],
    ["verify", "--family", "f_a"],
    ["verify", "--family", "f_a", "--a", "3"],
    ["verify", "--family", "h1", "--a", "0.5"],
    ["verify", "--family", "h2", "--a", "0.5", "--b", "0.5"],
    ["verify", "--points", "1"],
])
def test_verify_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_verify_deterministic(capsys):
    argv = ["verify", "--gamma", "1.5", "--dim", "3", "--trials", "20"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


# --- mc -------------------------------------------------------------------------------


def test_mc_diagonal(capsys):
    d = run_json(capsys, "mc", "--alpha", "0.5", "--beta", "0.3", "--lam", "2", "--mu", "2")
    assert d["c_sinh"] == pytest.approx(0.3, rel=1e-15)
    assert d["symmetry_residual"] < 1e-12
    assert d["gamma_sym"] == pytest.approx(0.4)


def test_mc_balanced_routes_agree(capsys):
    d = run_json(capsys, "mc", "--alpha", "0.5,1.5", "--beta", "0.8,1.2", "--lam", "4", "--mu", "1")
    assert abs(d["route_ratio"] - 1) < 1e-12
    assert d["sufficient"]["verdict"] == "proved_monotone"


def test_mc_errors(capsys):
    assert run(capsys, "mc", "--alpha", "0.5", "--beta", "0.3,0.2")[0] == 1
    assert run(capsys, "mc", "--alpha", "0.5", "--beta", "0.3", "--lam", "0")[0] == 1


# --- entry point ------------------------------------------------------------------------


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "opmono", "check", "--alpha", "1,1", "--beta",
                        "0.5,0.5", "--no-cross-check"], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["verdict"] == "proved_monotone"
