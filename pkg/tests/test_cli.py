"""End-to-end tests of the command-line interface and config handling."""

import json

import numpy as np
import pytest

from tvclust.cli import main
from tvclust.config import DEFAULTS
from tvclust.solver import SolverConfig

SYNTH_FILES = ("excitations.csv", "layout.csv", "pattern.csv", "report.json", "trace.csv")


def write_config(path, **overrides):
    cfg = {
        "geometry": {"n_elements": 12},
        "reference": {"generator": "dolph", "sll_db": -20},
        "tau": 0.2,
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


def test_synth_writes_all_outputs(tmp_path):
    cfg = write_config(tmp_path / "run.json")
    out = tmp_path / "out"
    assert main(["synth", "--config", str(cfg), "--out", str(out)]) == 0
    for name in SYNTH_FILES:
        assert (out / name).exists(), name
    report = json.loads((out / "report.json").read_text())
    assert set(report) == {"xi", "chi", "drr_db", "sll_db", "dmax_db", "q"}
    header = (out / "trace.csv").read_text().splitlines()[0]
    assert header == "iter,phi,grad_norm,tv_residual,fit_residual,sigma,rho"


def test_synth_is_byte_deterministic(tmp_path):
    cfg = write_config(tmp_path / "run.json")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["synth", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["synth", "--config", str(cfg), "--out", str(out2)]) == 0
    for name in SYNTH_FILES:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_missing_config_is_config_error(tmp_path, capsys):
    assert main(["synth", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)]) == 1
    assert "not found" in capsys.readouterr().err


def test_invalid_json_is_config_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["synth", "--config", str(bad), "--out", str(tmp_path)]) == 1


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json", typo_section={"x": 1})
    assert main(["synth", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "typo_section" in capsys.readouterr().err


def test_missing_element_table_names_path(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json",
                       elements={"kind": "tabulated", "path": "missing_tables.csv"})
    assert main(["synth", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "missing_tables.csv" in capsys.readouterr().err


def test_malformed_reference_file_is_data_error(tmp_path, capsys):
    ref = tmp_path / "ref.csv"
    ref.write_text("theta_deg,re,im\n0,1,bogus\n")
    cfg = write_config(tmp_path / "run.json", reference={"path": "ref.csv"})
    assert main(["synth", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_single_point_sweep_matches_synth_report(tmp_path):
    cfg = write_config(tmp_path / "run.json",
                       sweep={"gamma_values": [1024], "tau_values": [0.2]})
    synth_out, sweep_out = tmp_path / "synth", tmp_path / "sweep"
    assert main(["synth", "--config", str(cfg), "--out", str(synth_out)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(sweep_out)]) == 0
    front = (sweep_out / "front.csv").read_text().splitlines()
    assert len(front) == 2
    header, row = front[0].split(","), front[1].split(",")
    report = json.loads((synth_out / "report.json").read_text())
    as_map = dict(zip(header, row))
    assert float(as_map["xi"]) == report["xi"]
    assert float(as_map["chi"]) == report["chi"]
    assert int(as_map["q"]) == report["q"]


def test_sweep_requires_plan(tmp_path):
    cfg = write_config(tmp_path / "run.json")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_sweep_rejects_nonpositive_gamma(tmp_path):
    cfg = write_config(tmp_path / "run.json", sweep={"gamma_values": [-5]})
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_reference_round_trip_and_eval_self_score(tmp_path):
    cfg = write_config(tmp_path / "run.json")
    refdir = tmp_path / "ref"
    assert main(["reference", "--config", str(cfg), "--out", str(refdir)]) == 0
    assert (refdir / "reference.csv").exists()
    excit = refdir / "reference_excitations.csv"
    assert excit.exists()
    evdir = tmp_path / "ev"
    assert main(["eval", "--config", str(cfg), "--excitations", str(excit),
                 "--out", str(evdir)]) == 0
    report = json.loads((evdir / "report.json").read_text())
    assert report["xi"] == 0.0


def test_reference_taylor_excitations_symmetric(tmp_path):
    cfg = write_config(tmp_path / "run.json", geometry={"n_elements": 128},
                       reference={"generator": "taylor", "sll_db": -50, "nbar": 6})
    refdir = tmp_path / "ref"
    assert main(["reference", "--config", str(cfg), "--out", str(refdir)]) == 0
    rows = (refdir / "reference_excitations.csv").read_text().splitlines()[1:]
    re_col = np.array([float(r.split(",")[1]) for r in rows])
    assert np.allclose(re_col, re_col[::-1], atol=1e-12)


def test_reference_flattop_invalid_halfwidth(tmp_path):
    cfg = write_config(tmp_path / "run.json",
                       reference={"generator": "flattop", "halfwidth_deg": 0,
                                  "sll_db": -20})
    assert main(["reference", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_eval_malformed_excitations_reports_line(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json")
    bad = tmp_path / "w.csv"
    bad.write_text("n,re,im\n1,0.5,0\n2,zap,0\n")
    assert main(["eval", "--config", str(cfg), "--excitations", str(bad),
                 "--out", str(tmp_path)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_eval_length_mismatch_is_config_error(tmp_path):
    cfg = write_config(tmp_path / "run.json")
    short = tmp_path / "w.csv"
    short.write_text("n,re,im\n1,1,0\n2,1,0\n")
    assert main(["eval", "--config", str(cfg), "--excitations", str(short),
                 "--out", str(tmp_path)]) == 1


def test_explicit_positions_and_theta_grid(tmp_path):
    cfg = write_config(tmp_path / "run.json",
                       geometry={"positions": [0.0, 0.5, 1.0, 1.6, 2.2, 2.7]},
                       grid={"kind": "uniform-theta", "m": 25})
    out = tmp_path / "out"
    assert main(["synth", "--config", str(cfg), "--out", str(out)]) == 0


def test_committed_defaults_document_matches_code():
    import os

    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    with open(os.path.join(here, "configs", "defaults.json")) as fh:
        doc = json.load(fh)
    solver = SolverConfig()
    for key, value in doc["solver"].items():
        assert getattr(solver, key) == value, key
    assert doc["tau"] == DEFAULTS["tau"]
    assert doc["dense_factor"] == DEFAULTS["dense_factor"]
    assert doc["quad_points"] == DEFAULTS["quad_points"]
    assert doc["geometry"]["spacing"] == DEFAULTS["geometry"]["spacing"]
