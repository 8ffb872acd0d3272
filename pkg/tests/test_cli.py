import numpy as np
import pytest

from wavecascade import cli
from wavecascade import config as cfgmod

STRAIGHT = """
structure:
  - block:
      name: duct
      u_range: [0.0, 2.0]
      map: {kind: straight, width: 0.5}
  - guide: {length: 0.3}
  - block:
      name: duct2
      u_range: [0.0, 1.0]
      map: {kind: straight, width: 0.5}
solver: {N: 3}
k: {start: 1.0, stop: 3.0, step: 1.0}
"""


def _rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


@pytest.fixture
def straight_cfg(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(STRAIGHT)
    return p


def test_config_parse_and_round_trip(straight_cfg):
    cfg = cfgmod.load(straight_cfg)
    assert cfg.k_list == [1.0, 2.0, 3.0]
    assert cfg.elements[1].width == pytest.approx(0.5) and cfg.elements[1].length == 0.3
    text = cfgmod.dumps(cfg)
    assert cfgmod.dumps(cfgmod.loads(text)) == text


def test_preset_round_trip():
    cfg = cfgmod.example_config()
    text = cfgmod.dumps(cfg)
    again = cfgmod.loads(text)
    assert cfgmod.dumps(again) == text
    assert again.elements[0].map == cfg.elements[0].map
    assert again.elements[2].admittance == cfg.elements[2].admittance
    assert cfg.notes["structure[1].length"] == pytest.approx(0.5729, abs=1e-3)


@pytest.mark.parametrize("text,field", [
    ("structure: []\nk: 1\n", "structure"),
    ("structure:\n  - block: {u_range: [0, 1]}\nk: 1\n", "structure[0].map"),
    ("structure:\n  - block: {map: {kind: straight, width: 1}, u_range: [0, 1]}\nk: -1\n", "k"),
    ("structure:\n  - block: {map: {kind: straight, width: 1}, u_range: [0, 1]}\nk: 1\nsolver: {N: 0}\n",
     "solver.N"),
    ("structure:\n  - block: {map: {kind: straight, width: 1}, u_range: [0, 1]}\n"
     "  - guide: {length: 1}\n  - block: {map: {kind: straight, width: 2}, u_range: [0, 1]}\nk: 1\n", "widths"),
    ("structure: [\nk: 1\n", "line"),
])
def test_config_errors_name_the_field(text, field):
    with pytest.raises(cfgmod.ConfigError) as exc:
        cfgmod.loads(text)
    assert field in str(exc.value)


def test_solve_straight_conserves_power_and_is_reproducible(straight_cfg, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["solve", "--config", str(straight_cfg), "--jobs", "1", "--out", str(out1)]) == 0
    assert cli.main(["solve", "--config", str(straight_cfg), "--jobs", "2", "--out", str(out2)]) == 0
    head, rows = _rows(out1 / "sweep.csv")
    assert head[:2] == ["k", "P"] and len(rows) == 3
    assert np.allclose([float(r[1]) for r in rows], 1.0, atol=1e-8)
    assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
    assert (out1 / "config.yaml").exists()


def test_field_and_validate(straight_cfg, tmp_path):
    assert cli.main(["field", "--config", str(straight_cfg), "--k", "2", "--out", str(tmp_path)]) == 0
    data = np.loadtxt(tmp_path / "field.csv", delimiter=",", skiprows=1)
    mag = np.hypot(data[:, 3], data[:, 4])
    assert np.allclose(mag, 1.0, atol=1e-6)
    assert "plot 'field.csv'" in (tmp_path / "field.gp").read_text()
    assert cli.main(["validate", "--config", str(straight_cfg), "--k", "2", "--jobs", "1",
                     "--out", str(tmp_path)]) == 0
    _, rows = _rows(tmp_path / "validate.csv")
    assert {r[1] for r in rows} == {"rt_dtn", "fourier_fd"}
    assert max(float(r[-1]) for r in rows if r[1] == "rt_dtn") < 1e-6
    assert max(float(r[-1]) for r in rows if r[1] == "fourier_fd") < 1e-3


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("structure: 3\nk: 1\n")
    assert cli.main(["solve", "--config", str(bad), "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "structure" in capsys.readouterr().err
    assert cli.main(["solve", "--config", str(tmp_path / "missing.yaml")]) == cli.EXIT_CONFIG
    with pytest.raises(SystemExit):
        cli.main(["solve"])
