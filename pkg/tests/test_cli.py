import json
import math

import numpy as np
import pytest

from friedrichs.cli import main, model_from_doc


def run(argv):
    return main(argv)


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--help"])
    assert exc.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_unknown_subcommand_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_waveguide_document_roundtrip(tmp_path):
    out = tmp_path / "model.json"
    assert run(
        ["waveguide", "--n-atoms", "3", "--kappa", "0.75", "--xi", "0.25",
         "--site", "2", "-o", str(out)]
    ) == 0
    doc = json.loads(out.read_text())
    assert doc["derived"]["bic_energies"] == [0.0]
    model, initial, params = model_from_doc(doc)
    assert model.n_levels == 3
    assert params.l_int == 2


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "waveguide", "n_atoms": 3, "oops": 1}))
    assert run(["bound-states", "--model", str(bad)]) == 2


def test_generic_model_document(tmp_path):
    doc = {
        "kind": "generic",
        "levels": [-2.5, 2.5],
        "couplings": [0.4, [0.2, 0.1]],
        "band": [-1.0, 1.0],
        "spectral_density": {
            "form": "power_edges",
            "amplitude": 0.08,
            "s_low": 1.0,
            "s_up": 1.0,
        },
    }
    model, initial, params = model_from_doc(doc)
    assert params is None and initial is None
    assert model.couplings[1] == 0.2 + 0.1j
    path = tmp_path / "generic.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "states.json"
    assert run(["bound-states", "--model", str(path), "-o", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["census"]["n_low"] == 1
    assert payload["census"]["n_up"] == 1


def test_divergent_edge_document():
    doc = {
        "kind": "generic",
        "levels": [0.0],
        "couplings": [0.3],
        "band": [-1.0, 1.0],
        "spectral_density": {
            "form": "power_edges",
            "amplitude": 0.05,
            "s_low": "divergent",
            "s_up": "divergent",
        },
    }
    model, _, _ = model_from_doc(doc)
    assert model.continuum.edge_exponents == (None, None)
    # J ~ 1/sqrt near both edges
    assert model.j(np.array([0.999]))[0] > model.j(np.array([0.5]))[0]


def test_spectrum_csv(tmp_path):
    out = tmp_path / "spec.csv"
    assert run(
        ["spectrum", "--n-atoms", "2", "--kappa", "1.0", "--xi", "0.4",
         "--site", "1", "--points", "21", "-o", str(out)]
    ) == 0
    lines = out.read_text().splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    assert any("command = spectrum" in c for c in comments)
    header = next(ln for ln in lines if not ln.startswith("#"))
    assert header == "E,sigma_or_delta,gamma,k,k_prime"
    assert len([ln for ln in lines if not ln.startswith("#")]) == 22


def test_dynamics_csv_and_sidecar(tmp_path):
    out, side = tmp_path / "dyn.csv", tmp_path / "dyn.json"
    assert run(
        ["dynamics", "--n-atoms", "3", "--kappa", "0.75", "--xi", "0.25",
         "--site", "2", "--t-max", "10", "--points", "30",
         "-o", str(out), "--sidecar", str(side)]
    ) == 0
    rows = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert rows[0] == "t,p,p_bound,p_scatter,p_cross"
    first = [float(x) for x in rows[1].split(",")]
    assert first[1] == pytest.approx(1.0, abs=1e-4)
    assert first[1] == pytest.approx(first[2] + first[3] + first[4], abs=1e-12)
    payload = json.loads(side.read_text())
    assert payload["mean"] == pytest.approx(0.4487534626, rel=1e-6)


def test_oracle_csv(tmp_path):
    out = tmp_path / "orc.csv"
    assert run(
        ["oracle", "--n-atoms", "2", "--kappa", "1.0", "--xi", "0.3",
         "--site", "1", "--t-max", "5", "--points", "11", "-o", str(out)]
    ) == 0
    rows = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert rows[0] == "t,p"
    assert float(rows[1].split(",")[1]) == pytest.approx(1.0, abs=1e-12)


def test_markovian_sweep_and_decay(tmp_path):
    flow = tmp_path / "flow.csv"
    assert run(
        ["markovian", "--n-atoms", "2", "--kappa", "4", "--xi", "2",
         "--site", "inf", "--gamma", "0.125",
         "--sweep", "xi", "0", "8", "17", "-o", str(flow)]
    ) == 0
    rows = [ln for ln in flow.read_text().splitlines() if not ln.startswith("#")]
    assert rows[0] == "xi,re_z1,im_z1,re_z2,im_z2"
    assert len(rows) == 18
    decay, side = tmp_path / "decay.csv", tmp_path / "mk.json"
    assert run(
        ["markovian", "--n-atoms", "2", "--kappa", "4", "--xi", "4",
         "--site", "inf", "--gamma", "0.125", "--t-max", "5",
         "--points", "26", "-o", str(decay), "--sidecar", str(side)]
    ) == 0
    payload = json.loads(side.read_text())
    assert payload["kind"] == "defective"
    assert payload["phase"] == "exceptional"
    assert payload["anti_pt_residual"] == 0.0


def test_config_file_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"points": 7, "t_max": 3.0}))
    out = tmp_path / "o.csv"
    assert run(
        ["oracle", "--n-atoms", "2", "--kappa", "1.0", "--xi", "0.3",
         "--site", "1", "--config", str(cfg), "-o", str(out)]
    ) == 0
    rows = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert len(rows) == 8  # header + 7 points
    bad = tmp_path / "bad_cfg.json"
    bad.write_text(json.dumps({"no_such_flag": 1}))
    assert run(
        ["oracle", "--n-atoms", "2", "--kappa", "1.0", "--xi", "0.3",
         "--site", "1", "--config", str(bad)]
    ) == 2


def test_reproduce_fig5_deterministic(tmp_path):
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    assert run(["reproduce", "fig5", "--outdir", str(d1)]) == 0
    assert run(["reproduce", "fig5", "--outdir", str(d2)]) == 0
    for name in ("fig5_eigenvalue_flow.csv", "fig5_decay_xi2.csv",
                 "fig5_decay_xi4.csv", "fig5_decay_xi6.csv", "plot_stub.py"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    flow = (d1 / "fig5_eigenvalue_flow.csv").read_text().splitlines()
    rows = [ln for ln in flow if not ln.startswith("#")]
    assert len(rows) == 162
    # EP row: both eigenvalues -i exactly
    ep_row = next(ln for ln in rows[1:] if float(ln.split(",")[0]) == 4.0)
    vals = [float(x) for x in ep_row.split(",")]
    assert vals[1] == 0.0 and vals[3] == 0.0
    assert vals[2] == pytest.approx(-1.0, abs=1e-12)
    assert vals[4] == pytest.approx(-1.0, abs=1e-12)
