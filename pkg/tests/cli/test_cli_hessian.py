"""``gradshift hessian``."""

from __future__ import annotations

import csv

import pytest

from gradshift import main

pytestmark = pytest.mark.cli


def _rows(path):
    with path.open(encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_hessian_both_readings(tmp_path, configs_dir):
    out = tmp_path / "hess.csv"
    code = main(
        ["hessian", "--config", str(configs_dir / "hessian_2q.json"), "--shift-reading", "both", "--out", str(out)]
    )
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 3 * 2
    assert {r["shift_reading"] for r in rows} == {"literal", "scaled"}
    for row in rows:
        assert float(row["fd_max_dev"]) < 1e-5
        assert float(row["h12"]) == pytest.approx(float(row["h21"]), abs=1e-9)
        assert float(row["residual"]) == pytest.approx(abs(float(row["lhs"]) - float(row["rhs"])), abs=1e-12)


def test_hessian_single_reading(tmp_path, configs_dir):
    out = tmp_path / "lit.csv"
    code = main(
        ["hessian", "--config", str(configs_dir / "hessian_2q.json"), "--shift-reading", "literal", "--out", str(out)]
    )
    assert code == 0
    assert {r["shift_reading"] for r in _rows(out)} == {"literal"}


def test_hessian_ensemble(tmp_path, write_config):
    config = write_config({"ensemble": {"seed": 4, "count": 5}, "gamma_pairs": [[0.3, 0.5]], "fd_step": 5e-4})
    out = tmp_path / "ens.csv"
    assert main(["hessian", "--config", str(config), "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 5 * 2
    assert rows[0]["record"] == "hess-0"


def test_hessian_unequal_r_leaves_identity_columns_empty(tmp_path, write_config):
    circuit = {
        "qubits": 2,
        "initial_state": "plus",
        "observable": "XX",
        "ops": [
            {"type": "param", "pauli": "Z", "qubit": 0, "scale": 0.5, "index": 0},
            {"type": "param", "pauli": "Z", "qubit": 1, "scale": 1.0, "index": 1},
        ],
    }
    config = write_config({"circuit": circuit, "theta": [0.2, 0.4], "gamma_pairs": [[0.3, 0.5]]})
    out = tmp_path / "r.csv"
    assert main(["hessian", "--config", str(config), "--out", str(out)]) == 0
    row = _rows(out)[0]
    assert row["lhs"] == "" and row["residual"] == ""
    assert row["h11"] != ""


def test_hessian_needs_two_parameters(circuits_dir, write_config):
    config = write_config({"circuit_file": str(circuits_dir / "cos_t.json")})
    assert main(["hessian", "--config", str(config)]) == 2


def test_hessian_rejects_unknown_reading(write_config, circuits_dir):
    config = write_config({"circuit_file": str(circuits_dir / "product_2q.json"), "shift_reading": "halb"})
    assert main(["hessian", "--config", str(config)]) == 2
