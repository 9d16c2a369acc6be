import json
from pathlib import Path

import pytest

from rpbcs.cli import main, parse_csv



def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_zero_couplings(capsys):
    code, out, _ = run(capsys, "spectrum", "--d", "1", "--L", "1", "--g", "0")
    rep = json.loads(out)
    assert code == 0
    assert rep["summary"]["q"] == 16
    assert all(r["energy"] == 0.0 for r in rep["tables"]["eigenvalues"])
    assert rep["schema"] == "rpbcs-report/1" and rep["build"] and rep["config"]["seed"] == 0
    assert rep["conventions"]["pair_multiplicity"] == "directed-edges"


def test_spectrum_matches_oracle_file(capsys):
    with open(Path(__file__).parent / "data" / "oracle_spectrum_d1_L1.json") as fh:
        ref = json.load(fh)
    code, out, _ = run(capsys, "spectrum", "--d", "1", "--L", "1", "--kappa", "0", "--g", "1")
    energies = sorted(r["energy"] for r in json.loads(out)["tables"]["eigenvalues"])
    assert code == 0
    assert max(abs(a - b) for a, b in zip(energies, ref["eigenvalues"])) < 1e-12


def test_missing_flag(capsys):
    code, _, err = run(capsys, "spectrum", "--L", "1")
    assert code == 2 and "--d" in err
    code, _, err = run(capsys, "thermal", "--d", "1", "--L", "1")
    assert code == 2 and "--beta" in err


def test_bad_values(capsys):
    assert run(capsys, "verify", "--d", "1", "--L", "1", "--suite", "ALGEBRA", "--tol", "-1")[0] == 2
    assert run(capsys, "verify", "--d", "1", "--L", "1", "--suite", "BOGUS")[0] == 2
    assert run(capsys, "spectrum", "--d", "0", "--L", "1")[0] == 2
    assert run(capsys, "spectrum", "--d", "1", "--L", "1", "--kappa", "nan")[0] == 2
    assert run(capsys, "spectrum", "--d", "1", "--L", "1", "--format", "xml")[0] == 2
    assert run(capsys)[0] == 2


def test_cap_exit(capsys):
    code, _, err = run(capsys, "spectrum", "--d", "2", "--L", "2")
    assert code == 3 and "cap" in err
    assert run(capsys, "spectrum", "--d", "1", "--L", "2", "--dense-cap", "10")[0] == 3


def test_verify_algebra_exit_zero(capsys):
    code, out, _ = run(capsys, "verify", "--d", "1", "--L", "1", "--suite", "ALGEBRA")
    assert code == 0 and json.loads(out)["summary"]["fail"] == 0


def test_thermal_table(capsys):
    from rpbcs.fock import build_basis
    from rpbcs.hamiltonian import ModelParams, build_full
    from rpbcs.lattice import build_lattice
    from rpbcs.thermal import diagonalize, lro

    code, out, _ = run(capsys, "thermal", "--d", "1", "--L", "2", "--kappa", "0.1", "--beta", "0", "1", "4")
    rep = json.loads(out)
    assert code == 0
    rows = rep["tables"]["thermal"]
    assert rows[0]["beta"] == 0.0 and abs(rows[0]["density_mean"] - 0.5) < 1e-14
    assert rows[0]["free_energy"] is None
    b = build_basis(build_lattice(1, 2))
    sd = diagonalize(build_full(b, ModelParams(0.1, 1.0)), b)
    for row in rows:
        assert row["m_lro"] == lro(sd, row["beta"])
    assert len(rep["tables"]["gbc"]) == 3 * 4
    assert rep["tables"]["trial_energy"][0]["R"] == 1


def test_csv_json_identical(capsys, tmp_path):
    args = ["thermal", "--d", "1", "--L", "1", "--kappa", "0.3", "--B", "0.1", "--beta", "0.5", "2"]
    _, out_json, _ = run(capsys, *args)
    _, out_csv, _ = run(capsys, *args, "--format", "csv")
    rep = json.loads(out_json)
    tables = parse_csv(out_csv)
    assert set(tables) == set(rep["tables"])
    for name, rows in rep["tables"].items():
        assert len(rows) == len(tables[name])
        for a, b in zip(rows, tables[name]):
            for k, v in a.items():
                if isinstance(v, float):
                    assert float(b[k]) == v
                elif v is None:
                    assert b[k] == ""


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"d": 1, "L": 1, "kappa": 0.5, "g": 0.0, "beta": [1.0]}))
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--kappa", "0")
    rep = json.loads(out)
    assert code == 0 and rep["config"]["kappa"] == 0.0 and rep["summary"]["q"] == 16
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": 1, "colour": 3}))
    assert run(capsys, "spectrum", "--config", str(bad))[0] == 2


def test_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert main(["bzconst", "--d", "3", "--L", "4", "--out", str(path)]) == 0
    rep = json.loads(path.read_text())
    assert 0.675 <= rep["summary"]["I_d"] <= 0.685


def test_bzconst_divergence(capsys):
    code, out, err = run(capsys, "bzconst", "--d", "2", "--L", "4")
    assert code == 1 and "diverges" in err
    assert json.loads(out)["summary"]["I_d"] is None


def test_verify_default_failure_exit(capsys):
    code, out, err = run(capsys, "verify", "--d", "1", "--L", "2", "--suite", "INFRARED", "--kappa", "0")
    rep = json.loads(out)
    assert code == 1 and rep["summary"]["fail"] > 0 and "failed" in err
