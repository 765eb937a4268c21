import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from nematiclab.cli import main
from nematiclab.config import load_config, parse_config, serialize_config
from nematiclab.errors import ConfigError
from nematiclab.experiments import run
from nematiclab.reporting import TimeSeries, write_csv
from nematiclab.svgplot import emit_plot

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

TINY_GLOBAL = """
[experiment]
kind = axisym_global
out_dir = {out}
snapshot_stride = 5

[coefficients]
mu1 = 0.0
mu2 = -0.5
mu3 = 0.5
mu4 = 1.0
mu5 = 0.0
mu6 = 0.0

[grid]
n_cells = 64

[time]
dt = 1e-3
scheme = semi_implicit
t_end = 0.05

[initial]
preset = scaled_linear
amplitude = 3.0

[barrier]
c = 0.03
local_energy_radius = 0.1
"""


# ---------------------------------------------------------------------------
# config parsing and validation


def test_shipped_configs_parse_and_round_trip():
    for path in sorted(CONFIG_DIR.glob("*.ini")):
        config = load_config(path)
        normal = serialize_config(config)
        again = parse_config(normal)
        assert serialize_config(again) == normal
        assert again.hash() == config.hash()


def test_empty_config_rejected():
    with pytest.raises(ConfigError, match="experiment"):
        parse_config("")


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError, match="unknown experiment kind"):
        parse_config("[experiment]\nkind = warp_drive\n")


def test_unknown_key_rejected():
    text = TINY_GLOBAL.format(out="x").replace(
        "n_cells = 64", "n_cells = 64\nresolution = 3"
    )
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(text)


def test_unused_section_rejected():
    text = TINY_GLOBAL.format(out="x") + "\n[hopf]\nmesh = 64\n"
    with pytest.raises(ConfigError, match="not used"):
        parse_config(text)


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError, match="preset"):
        parse_config(TINY_GLOBAL.format(out="x").replace("scaled_linear", "spiral"))


def test_invalid_coefficients_rejected():
    with pytest.raises(ConfigError, match="relations violated"):
        parse_config(TINY_GLOBAL.format(out="x").replace("mu4 = 1.0", "mu4 = -1.0"))


def test_explicit_stability_guard_checked():
    text = TINY_GLOBAL.format(out="x").replace(
        "scheme = semi_implicit", "scheme = explicit"
    )
    with pytest.raises(ConfigError, match="explicit scheme needs"):
        parse_config(text)


def test_missing_preset_parameter_rejected():
    with pytest.raises(ConfigError, match="amplitude"):
        parse_config(
            TINY_GLOBAL.format(out="x").replace("amplitude = 3.0", "beta0 = 0.1")
        )


# ---------------------------------------------------------------------------
# experiment runs: artifacts, determinism, containment


def test_run_writes_only_into_out_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = parse_config(TINY_GLOBAL.format(out="results/a"))
    before = set(tmp_path.rglob("*"))
    result = run(config)
    created = set(tmp_path.rglob("*")) - before
    out_root = tmp_path / "results"
    assert all(str(p).startswith(str(out_root)) for p in created)
    expected = {"report.json", "series.csv", "series.svg", "config.normalized.ini"}
    assert {p.name for p in result.files} == expected


def test_identical_configs_give_byte_identical_outputs(tmp_path):
    config = parse_config(TINY_GLOBAL.format(out="unused"))
    r1 = run(config, out_dir=tmp_path / "one")
    r2 = run(config, out_dir=tmp_path / "two")
    for f1, f2 in zip(sorted(r1.files), sorted(r2.files)):
        assert f1.name == f2.name
        assert f1.read_bytes() == f2.read_bytes()


def test_no_plots_flag_skips_svg(tmp_path):
    config = parse_config(TINY_GLOBAL.format(out="unused"))
    result = run(config, out_dir=tmp_path, plots=False)
    assert not any(p.suffix == ".svg" for p in result.files)


def test_global_report_contents(tmp_path):
    config = parse_config(TINY_GLOBAL.format(out="unused"))
    result = run(config, out_dir=tmp_path)
    report = result.report
    assert report["experiment"] == "axisym_global"
    assert report["blowup"]["detected"] is False
    assert report["ordering"]["passed"] is True
    # series carries the documented columns
    header = (tmp_path / "series.csv").read_text().splitlines()[0]
    assert header == "t,phi_r_origin,e_total,e_grad,e_sin,local_energy_R"


# ---------------------------------------------------------------------------
# time series and SVG plots


def test_time_series_validates_shape_and_time():
    with pytest.raises(ValueError, match="arity"):
        TimeSeries(("t", "y"), np.zeros((3, 3)))
    with pytest.raises(ValueError, match="increasing"):
        TimeSeries(("t", "y"), np.array([[0.0, 1.0], [0.0, 2.0]]))


def test_csv_round_trips_full_precision(tmp_path):
    rows = np.array([[0.1, 1.0 / 3.0], [0.2, np.pi]])
    series = TimeSeries(("t", "y"), rows)
    path = tmp_path / "s.csv"
    write_csv(series, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,y"
    parsed = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.all(parsed == rows)


def test_two_point_series_single_polyline(tmp_path):
    series = TimeSeries(("t", "y"), np.array([[0.0, 1.0], [1.0, 2.0]]))
    path = tmp_path / "p.svg"
    emit_plot(series, path)
    svg = ET.parse(path).getroot()
    polylines = svg.findall(".//{http://www.w3.org/2000/svg}polyline")
    assert len(polylines) == 1
    points = polylines[0].attrib["points"].split()
    assert len(points) == 2


def test_svg_polyline_matches_data_after_affine_transform(tmp_path):
    t = np.linspace(0.0, 1.0, 17)
    y = np.sin(2 * np.pi * t)
    series = TimeSeries(("t", "y"), np.column_stack([t, y]))
    path = tmp_path / "p.svg"
    emit_plot(series, path)
    svg = ET.parse(path).getroot()
    poly = svg.find(".//{http://www.w3.org/2000/svg}polyline")
    pts = np.array(
        [[float(a) for a in pair.split(",")] for pair in poly.attrib["points"].split()]
    )
    # fit the affine axis transform from the data and check pixel agreement
    ax = np.polyfit(t, pts[:, 0], 1)
    ay = np.polyfit(y, pts[:, 1], 1)
    assert np.max(np.abs(np.polyval(ax, t) - pts[:, 0])) <= 0.5
    assert np.max(np.abs(np.polyval(ay, y) - pts[:, 1])) <= 0.5


def test_svg_drops_nonfinite_points_with_count(tmp_path):
    rows = np.array([[0.0, 1.0], [1.0, np.nan], [2.0, 3.0], [3.0, 4.0]])
    series = TimeSeries(("t", "y"), rows)
    path = tmp_path / "p.svg"
    emit_plot(series, path)
    svg = ET.parse(path).getroot()
    desc = svg.find("{http://www.w3.org/2000/svg}desc")
    assert "dropped=1" in desc.text
    poly = svg.find(".//{http://www.w3.org/2000/svg}polyline")
    assert len(poly.attrib["points"].split()) == 3


def test_empty_series_rejected(tmp_path):
    series = TimeSeries(("t", "y"), np.zeros((0, 2)))
    with pytest.raises(ValueError, match="empty"):
        emit_plot(series, tmp_path / "p.svg")


# ---------------------------------------------------------------------------
# the command line


def _write_tiny(tmp_path, name="tiny.ini", out="results/cli"):
    path = tmp_path / name
    path.write_text(TINY_GLOBAL.format(out=out))
    return path


def test_cli_simulate(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    cfg = _write_tiny(tmp_path)
    assert main(["simulate", str(cfg)]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert (tmp_path / "results/cli/report.json").exists()
    assert any(line.endswith("report.json") for line in printed)


def test_cli_simulate_out_override_and_no_plots(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = _write_tiny(tmp_path)
    assert main(["simulate", str(cfg), "--out", "elsewhere", "--no-plots"]) == 0
    assert (tmp_path / "elsewhere/report.json").exists()
    assert not (tmp_path / "elsewhere/series.svg").exists()


def test_cli_validate_echoes_normal_form(tmp_path, capsys):
    cfg = _write_tiny(tmp_path)
    assert main(["validate", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert out == serialize_config(parse_config(cfg.read_text()))


def test_cli_rejects_empty_config(tmp_path, capsys):
    cfg = tmp_path / "empty.ini"
    cfg.write_text("")
    assert main(["simulate", str(cfg)]) == 2
    assert "config error" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()  # no partial outputs


def test_cli_missing_file_is_config_error(tmp_path):
    assert main(["validate", str(tmp_path / "nope.ini")]) == 2


@pytest.mark.filterwarnings("ignore::RuntimeWarning")  # overflow is the point
def test_cli_runtime_halt_exit_code(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = tmp_path / "halt.ini"
    cfg.write_text(
        """
[experiment]
kind = poiseuille_generic
out_dir = results/halt

[coefficients]
mu1 = 0.0
mu2 = -1.0
mu3 = 1.0
mu4 = 3.0
mu5 = 0.0
mu6 = 0.0

[poiseuille]
half_length = 10.0
n_cells = 64
t_end = 0.01
velocity_amplitude = 1.7e308
"""
    )
    assert main(["simulate", str(cfg)]) == 3


def test_cli_sweep(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    _write_tiny(tmp_path, "a.ini", out="results/a")
    _write_tiny(tmp_path, "b.ini", out="results/b")
    assert main(["sweep", str(tmp_path / "*.ini"), "--no-plots"]) == 0
    assert (tmp_path / "results/a/report.json").exists()
    assert (tmp_path / "results/b/report.json").exists()


def test_cli_sweep_rejects_shared_out_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _write_tiny(tmp_path, "a.ini", out="results/same")
    _write_tiny(tmp_path, "b.ini", out="results/same")
    assert main(["sweep", str(tmp_path / "*.ini")]) == 2


def test_cli_sweep_no_match(tmp_path):
    assert main(["sweep", str(tmp_path / "*.ini")]) == 2


def test_thread_count_env_var(monkeypatch):
    from nematiclab.experiments import THREAD_ENV_VAR, thread_count

    monkeypatch.setenv(THREAD_ENV_VAR, "3")
    assert thread_count() == 3
    monkeypatch.setenv(THREAD_ENV_VAR, "not-a-number")
    assert thread_count() >= 1
    monkeypatch.delenv(THREAD_ENV_VAR)
    assert thread_count() >= 1
