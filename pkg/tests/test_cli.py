import json
import xml.etree.ElementTree as ET

import pytest

from omcspec import cli, presets


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fig2_stationary_spectrum_rows(tmp_path, capsys):
    code, _, _ = run_cli(["spectrum", "--preset", "fig2", "--time", "20", "--out", str(tmp_path)], capsys)
    assert code == 0
    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "t,delta,N" and len(lines) == 802
    assert lines[1].startswith("20,-8,")
    for name in ("peaks.json", "dressed.json", "ledger.json", "meta.json"):
        json.loads((tmp_path / name).read_text())
    assert not (tmp_path / "plot.svg").exists()


def test_reproducible_bytes(tmp_path, capsys):
    args = ["spectrum", "--preset", "fig4", "--time", "3", "--time", "1", "--delta-points", "81", "--svg"]
    assert run_cli(args + ["--out", str(tmp_path / "a")], capsys)[0] == 0
    assert run_cli(args + ["--out", str(tmp_path / "b")], capsys)[0] == 0
    for name in ("spectrum.csv", "peaks.json", "dressed.json", "ledger.json", "meta.json", "plot.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    ET.fromstring((tmp_path / "a" / "plot.svg").read_text())
    meta = json.loads((tmp_path / "a" / "meta.json").read_text())
    assert meta["config"]["times"] == [1.0, 3.0]
    assert meta["config"]["delta_points"] == 81 and meta["config"]["peak_prominence"] == 0.01


def test_ledger_balances(tmp_path, capsys):
    code, out, _ = run_cli(["ledger", "--preset", "fig2", "--tmax", "120", "--out", str(tmp_path)], capsys)
    assert code == 0
    summary = json.loads(out)
    assert abs(summary["detected"] + summary["norm2"] - 1) < 1e-4
    assert json.loads((tmp_path / "ledger.json").read_text())["summary"]["T"] == 120


def test_dressed_jc_levels(tmp_path, capsys):
    code, out, _ = run_cli(["dressed", "--ga", "4", "--gm", "0", "--mmax", "1", "--out", str(tmp_path)], capsys)
    assert code == 0
    levels = json.loads((tmp_path / "dressed.json").read_text())["levels"]
    assert -4.0 in levels and 4.0 in levels
    assert out.startswith("levels:")


def test_fig4_transition_table(tmp_path, capsys):
    assert run_cli(["dressed", "--preset", "fig4", "--out", str(tmp_path)], capsys)[0] == 0
    doc = json.loads((tmp_path / "dressed.json").read_text())
    assert len(doc["transitions"]) == 8
    assert set(doc["single_phonon_closed_form"]["excited"]) == {"++", "+-", "-+", "--"}


def test_evolve_csv(tmp_path, capsys):
    code, _, _ = run_cli(["evolve", "--mmax", "2", "--tmax", "5", "--points", "11", "--out", str(tmp_path)], capsys)
    assert code == 0
    lines = (tmp_path / "evolve.csv").read_text().splitlines()
    assert lines[0] == "t,norm2,re_a0,im_a0,re_a1,im_a1,re_a2,im_a2,re_b0,im_b0,re_b1,im_b1,re_b2,im_b2"
    norms = [float(line.split(",")[1]) for line in lines[1:]]
    assert norms[0] == 1 and all(a >= b for a, b in zip(norms, norms[1:]))


def test_evolve_at_exceptional_point(tmp_path, capsys):
    args = ["evolve", "--ga", "0.125", "--gm", "0", "--mmax", "0", "--points", "5", "--out", str(tmp_path)]
    assert run_cli(args, capsys)[0] == 0


def test_config_document(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"params": {"g_m": 0.0, "m_max": 1}, "times": [5], "delta_points": 41,
                               "mode": "coherent"}))
    assert run_cli(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)[0] == 0
    meta = json.loads((tmp_path / "o" / "meta.json").read_text())["config"]
    assert meta["params"]["g_m"] == 0.0 and meta["params"]["g_a"] == 4.0 and meta["mode"] == "coherent"


@pytest.mark.parametrize("args", [["spectrum", "--bogus"], ["frobnicate"], [], ["spectrum", "--mode", "x"]])
def test_usage_errors(args, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(args)
    assert exc.value.code == 2


def test_config_errors_are_usage_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = run_cli(["spectrum", "--config", str(cfg)], capsys)
    assert code == 2 and json.loads(err)["exit_code"] == 2
    code, _, _ = run_cli(["spectrum", "--preset", "nope"], capsys)
    assert code == 2


def test_model_errors_exit_one(tmp_path, capsys):
    code, _, err = run_cli(["spectrum", "--kappa", "-1", "--out", str(tmp_path)], capsys)
    assert code == 1 and json.loads(err)["error"] == "ParameterError"
    code, _, err = run_cli(["dressed", "--delta-a", "0.5", "--out", str(tmp_path)], capsys)
    assert code == 0  # closed forms are skipped off resonance
    code, _, err = run_cli(["ledger", "--ga", "0.125", "--gm", "0", "--mmax", "0", "--out", str(tmp_path)], capsys)
    assert code == 1 and json.loads(err)["error"] == "NonDiagonalizableError"
    assert json.loads((tmp_path / "error.json").read_text())["exit_code"] == 1


def test_presets_listing(capsys):
    code, out, _ = run_cli(["presets"], capsys)
    listed = json.loads(out)
    assert code == 0 and {"fig2", "fig4", "fig5"} <= set(listed)


@pytest.mark.parametrize("name, expected", [
    ("fig2", dict(g_a=4.0, g_m=1.2, kappa=0.5, gamma_a=0.0, gamma_m=0.0, m_max=10)),
    ("fig4", dict(g_a=4.0, g_m=1.2, kappa=0.5, m_max=1)),
    ("fig5", dict(g_a=4.0, g_m=1.2, kappa=0.5, gamma_a=0.4, gamma_m=0.1, mbar=0.1, include_mbar_terms=False)),
])
def test_preset_parameter_blocks(name, expected):
    block = presets.get(name)
    assert block["filter_gamma"] == 0.1
    for key, value in expected.items():
        assert block["params"][key] == value
    assert block["thermal"] is (name == "fig5")


def test_preset_copies_are_independent():
    presets.get("fig2")["params"]["g_a"] = 99
    assert presets.get("fig2")["params"]["g_a"] == 4.0
