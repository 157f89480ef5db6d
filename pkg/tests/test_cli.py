import csv
import json

import numpy as np
import pytest

from hyperscatter import __version__
from hyperscatter.cli import main, parse_range
from hyperscatter.io import config_hash, write_csv, write_json


def read_csv(path):
    with open(path) as fh:
        stamp = fh.readline()
        rows = list(csv.reader(fh))
    return stamp, rows[0], np.array(rows[1:], dtype=float)


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_parse_range():
    assert np.allclose(parse_range("0:1:3"), [0, 0.5, 1])


def test_green_table(tmp_path):
    assert run(tmp_path, "green", "--n", "3", "--mu", "1", "--branch", "outgoing", "--rho", "0.1:10:100") == 0
    stamp, header, data = read_csv(tmp_path / "green.csv")
    assert stamp.startswith(f"# hyperscatter {__version__} config=")
    assert header == ["rho", "re", "im", "err"]
    assert data.shape == (100, 4)
    assert np.all(data[:, 3] < 1e-12)


def test_green_closed_form_check(tmp_path):
    assert run(tmp_path, "green", "--n", "3", "--mu", "1", "--check", "closed-form") == 0
    rep = json.loads((tmp_path / "green_check.json").read_text())
    assert rep["max_rel_deviation"] <= 1e-10
    assert rep["version"] == __version__


def test_green_ode_check(tmp_path):
    assert run(tmp_path, "green", "--n", "4", "--mu", "2", "--check", "ode-residual") == 0
    rep = json.loads((tmp_path / "green_check.json").read_text())
    assert all(abs(o - 2.0) < 0.2 for o in rep["orders"])


def test_tolerance_failure_exit_code(tmp_path):
    assert run(tmp_path, "green", "--check", "closed-form", "--tol", "1e-30") == 3


def test_config_errors(tmp_path, capsys):
    assert run(tmp_path, "green", "--mu", "-1") == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "config" and err["exit_code"] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "green", "--config", str(bad)) == 2
    bad.write_text(json.dumps({"nonsense": 1}))
    assert run(tmp_path, "green", "--config", str(bad)) == 2
    assert run(tmp_path, "source", "--n", "4") == 2
    assert main(["nosuchcommand"]) == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mu": 2.0, "rho": "1:2:5"}))
    assert run(tmp_path, "green", "--config", str(cfg), "--rho", "1:2:3") == 0
    _, _, data = read_csv(tmp_path / "green.csv")
    assert data.shape[0] == 3
    assert data[0, 1] == pytest.approx(np.cos(2.0) / (4 * np.pi * np.sinh(1.0)), rel=1e-12)


def test_heat_command(tmp_path):
    assert run(tmp_path, "heat") == 0
    rep = json.loads((tmp_path / "heat_report.json").read_text())
    assert rep["passed"]
    assert {c["name"] for c in rep["checks"]} >= {"mass_t0.25", "semigroup", "mellin_n5_k1.5"}


def test_source_zero_and_conjugate(tmp_path):
    assert run(tmp_path / "zero", "source", "--amplitude", "0") == 0
    _, _, z = read_csv(tmp_path / "zero" / "source_field.csv")
    assert np.all(z[:, 3:] == 0)
    assert run(tmp_path / "out", "source") == 0
    assert run(tmp_path / "in", "source", "--branch", "ingoing") == 0
    _, header, a = read_csv(tmp_path / "out" / "source_far_field.csv")
    _, _, b = read_csv(tmp_path / "in" / "source_far_field.csv")
    assert header == ["d1", "d2", "d3", "re", "im"]
    assert np.allclose(a[:, 3], b[:, 3]) and np.allclose(a[:, 4], -b[:, 4])
    man = json.loads((tmp_path / "out" / "source_manifest.json").read_text())
    scaled = [r["scaled_remainder"] for r in man["matching_ladder"]]
    assert max(scaled) < 1.0 and np.ptp(scaled) < 0.05 * max(scaled)


def test_potential_trivial(tmp_path):
    assert run(tmp_path, "potential", "--amplitude", "0", "--imag", "0") == 0
    rep = json.loads((tmp_path / "potential_report.json").read_text())
    assert rep["sigma_min"] == 1.0 and rep["scattered_norm"] == 0.0


def test_potential_born_and_homogeneous(tmp_path):
    assert run(tmp_path / "a", "potential") == 0
    rep = json.loads((tmp_path / "a" / "potential_report.json").read_text())
    assert all(abs(r - 4) <= 1 for r in rep["born_sweep"]["ratios"])
    assert rep["sigma_min"] > 1e-6
    assert abs(rep["sigma_min_refined"] / rep["sigma_min"] - 1) <= 0.2
    assert run(tmp_path / "b", "potential", "--homogeneous") == 0
    rep = json.loads((tmp_path / "b" / "potential_report.json").read_text())
    assert all(f["flux"] < 1e-10 for f in rep["flux_ladder"])


def test_potential_descriptor_file(tmp_path):
    desc = tmp_path / "pot.json"
    desc.write_text(json.dumps({"R0": 0.8, "amplitude": [0.3, 0.0], "imag": 0.1, "n_rho": 6, "degree": 7}))
    assert run(tmp_path, "potential", "--potential", str(desc)) == 0
    rep = json.loads((tmp_path / "potential_report.json").read_text())
    assert rep["potential"]["R0"] == 0.8


def test_potential_conditioning_exit(tmp_path, monkeypatch):
    import hyperscatter.potential_scatter as ps

    orig = ps.solve
    monkeypatch.setattr(ps, "solve", lambda s: orig(s, sigma_floor=10.0))
    assert run(tmp_path, "potential") == 4


def test_modes_command(tmp_path):
    assert run(tmp_path, "modes") == 0
    _, header, data = read_csv(tmp_path / "modes.csv")
    assert header == ["l", "m", "rho", "re", "im"]
    assert set(data[:, 0]) == {0.0, 1.0, 2.0}
    # l = 0 rows reproduce Psi, e^{i rho} / (2 sinh rho) for n = 3
    l0 = data[data[:, 0] == 0]
    exact = np.exp(1j * l0[:, 2]) / (2 * np.sinh(l0[:, 2]))
    assert np.allclose(l0[:, 3] + 1j * l0[:, 4], exact, rtol=1e-8)
    dich = json.loads((tmp_path / "modes_dichotomy.json").read_text())["dichotomy"]
    assert len(dich) == 25
    assert sum(d["verdict"] == "decays-strictly-faster" for d in dich) == 1


@pytest.mark.parametrize("suite", ["heat", "rellich", "default"])
def test_verify_suites(tmp_path, suite):
    assert run(tmp_path, "verify", "--suite", suite) == 0
    rep = json.loads((tmp_path / "verify_report.json").read_text())
    assert rep["passed"]


def test_deterministic_output(tmp_path):
    run(tmp_path / "a", "green", "--rho", "0.5:3:7")
    run(tmp_path / "b", "green", "--rho", "0.5:3:7")
    assert (tmp_path / "a" / "green.csv").read_bytes() == (tmp_path / "b" / "green.csv").read_bytes()


def test_io_stamp_and_atomic(tmp_path):
    cfg = {"b": 1, "a": [1.0, 2.0]}
    assert config_hash(cfg) == config_hash({"a": [1.0, 2.0], "b": 1})
    write_json(tmp_path / "r.json", {"value": 1 + 2j}, cfg)
    body = json.loads((tmp_path / "r.json").read_text())
    assert body["value"] == [1.0, 2.0] and body["config_hash"] == config_hash(cfg)
    write_csv(tmp_path / "t.csv", ["x"], [(0.1,)], cfg)
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]
