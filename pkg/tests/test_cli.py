import json
import math

import pytest

from artifact.cli import run
from artifact.config import ConfigError, parse_config
from artifact.optics import HBAR_EV_S, K_B_EV_PER_K

SMALL = {
    "frequency_grid": {"start": 1e-3, "stop": 10, "count": 6, "unit": "thouless"},
    "k_grid": {"count": 5},
    "cut_grid": {"count": 5},
    "temperatures": {"values": [0.5], "unit": "thouless"},
}


def write_config(tmp_path, doc, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def data_rows(path):
    lines = path.read_text().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    return body[:3], body[3:]


def test_dos_row_count(tmp_path):
    doc = dict(SMALL, frequency_grid={"start": 1e-3, "stop": 10, "count": 64, "unit": "thouless"})
    out = tmp_path / "out"
    assert run(["dos", "--config", write_config(tmp_path, doc), "--out", str(out), "--no-timestamp"]) == 0
    header, rows = data_rows(out / "dos_count.csv")
    assert len(rows) == 64
    assert header[2].split(",")[2:4] == ["CL", "CL"]
    # every value column is followed by its error column
    names = header[0].split(",")[2:]
    assert names[1::2] == [n + "_err" for n in names[0::2]]
    _, rows = data_rows(out / "dos_density.csv")
    assert len(rows) == 64


def test_invalid_gamma_exit_2_without_output(tmp_path):
    cfg = write_config(tmp_path, {"material": {"omega_p": {"value": 9, "unit": "eV"}, "gamma": 0.0}})
    out = tmp_path / "never"
    assert run(["dos", "--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()


@pytest.mark.parametrize("doc", [
    {"unknown": 1},
    {"gap": {"value": 100, "unit": "furlong"}},
    {"frequency_grid": {"start": 1, "stop": 0.1}},
    {"material": {"preset": "silver"}},
    {"material": {"gamma": 0.03}, "extra": True},
    {"temperature": 1, "temperatures": {"values": [1]}},
])
def test_malformed_config_exit_2(tmp_path, doc):
    out = tmp_path / "never"
    assert run(["modes", "--config", write_config(tmp_path, doc), "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_and_broken_config(tmp_path):
    assert run(["modes", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["modes", "--config", str(bad)]) == 2


def test_bad_flags_exit_2(tmp_path):
    assert run(["modes", "--tol", "0.5", "--out", str(tmp_path / "x")]) == 2
    assert run(["modes", "--threads", "0", "--out", str(tmp_path / "x")]) == 2
    assert run(["nonsense"]) == 2
    assert not (tmp_path / "x").exists()


def test_deterministic_output(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["modes", "--config", cfg, "--out", str(a), "--no-timestamp"]) == 0
    assert run(["modes", "--config", cfg, "--out", str(b), "--no-timestamp"]) == 0
    for name in ("modes_boundary.csv", "modes_cut.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
        assert b"\r" not in (a / name).read_bytes()
    c = tmp_path / "c"
    assert run(["modes", "--config", cfg, "--out", str(c)]) == 0
    lines = (c / "modes_cut.csv").read_text().splitlines()
    assert lines[0].startswith("# generated")
    assert lines[1:] == (a / "modes_cut.csv").read_text().splitlines()


def test_provenance_in_every_report(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    out = tmp_path / "o"
    assert run(["modes", "--config", cfg, "--out", str(out), "--format", "json", "--no-timestamp"]) == 0
    doc = json.loads((out / "modes_cut.json").read_text())
    assert doc["provenance"]["preset"] == "gold"
    assert doc["provenance"]["omega_p_eV"] == 9.0 and doc["provenance"]["gamma_eV"] == 0.035
    assert len(doc["rows"]) == 5
    text = (tmp_path / "o2")
    assert run(["modes", "--config", cfg, "--out", str(text), "--no-timestamp"]) == 0
    assert "preset=gold omega_p=9.0 eV gamma=0.035 eV" in (text / "modes_boundary.csv").read_text()


def test_sweep_order_independent_of_workers(tmp_path):
    doc = dict(SMALL, sweep={"gaps": [100, {"value": 2e-7, "unit": "m"}]})
    cfg = write_config(tmp_path, doc)
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["sweep", "--config", cfg, "--out", str(a), "--no-timestamp", "--threads", "1"]) == 0
    assert run(["sweep", "--config", cfg, "--out", str(b), "--no-timestamp", "--threads", "2"]) == 0
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()
    _, rows = data_rows(a / "sweep.csv")
    assert [float(r.split(",")[2]) for r in rows] == [100.0, 200.0]


def test_validate_subset(tmp_path, capsys):
    out = tmp_path / "v"
    assert run(["validate", "--checks", "1", "8", "--out", str(out), "--no-timestamp"]) == 0
    printed = capsys.readouterr().out
    assert "[PASS]  1" in printed and "[PASS]  8" in printed
    rep = json.loads((out / "validation.json").read_text())
    assert rep["passed"] == rep["total"] == 2


def test_validate_reports_failure_exit_1(tmp_path, capsys):
    assert run(["validate", "--checks", "5", "--out", str(tmp_path / "v")]) == 1
    assert "[FAIL]  5" in capsys.readouterr().out


def test_config_unit_conversion():
    cfg = parse_config({
        "material": {"omega_p": {"value": 9.0 / HBAR_EV_S, "unit": "rad/s"}, "gamma": {"value": 0.035, "unit": "eV"}},
        "gap": {"value": 1e-7, "unit": "m"},
        "temperatures": {"values": [10.0], "unit": "K"},
        "tolerance": 1e-8,
    })
    assert cfg.material.omega_p == pytest.approx(9.0, rel=1e-12)
    assert cfg.gap == pytest.approx(100.0)
    assert cfg.temperature_values() == [pytest.approx(10.0 * K_B_EV_PER_K)]
    assert cfg.preset is None and cfg.tolerance == 1e-8


def test_config_thouless_temperatures_and_grid():
    cfg = parse_config({"temperatures": {"start": 0.1, "stop": 1, "count": 3, "unit": "thouless"}})
    xiL = cfg.cavity.thouless
    assert cfg.temperature_values() == [pytest.approx(v * xiL) for v in (0.1, math.sqrt(0.1), 1.0)]
    grid = cfg.frequency_grid.values(cfg.cavity)
    assert len(grid) == 64 and grid[0] == pytest.approx(1e-4 * xiL)


def test_config_rejects_nonpositive():
    with pytest.raises(ConfigError):
        parse_config({"gap": -1})
    with pytest.raises(ConfigError):
        parse_config({"material": {"omega_p": 9, "gamma": float("nan")}})
