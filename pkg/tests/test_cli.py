import json

import pytest

from matchpool.cli import main


def test_region_command(tmp_path, capsys):
    out = tmp_path / "region.csv"
    svg = tmp_path / "region.svg"
    rc = main(["region", "--p", "0.1", "--delta", "0.001",
               "--out", str(out), "--chart", str(svg)])
    assert rc == 0
    assert out.read_text().splitlines()[0] == "c,rho,lhs,satisfied"
    assert svg.read_text().startswith("<svg")


def _write_cfg(tmp_path, **extra):
    cfg = {
        "name": "cli",
        "model": {"rho": 0.5, "c": 2.0, "p": 0.3},
        "n_values": [24],
        "trials": 2,
        "master_seed": 77,
        "policies": [
            {"scheme": "CM2", "s_h": 1, "s_l": 1},
            {"scheme": "CM2", "s_h": "n/2", "s_l": "n/2", "name": "batch"},
        ],
        "comparisons": [["batch", "CM2(1,1)"]],
    }
    cfg.update(extra)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_simulate_command(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    out = tmp_path / "rows.csv"
    rc = main(["simulate", str(cfg), "--out", str(out), "--workers", "1"])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 2 * 2  # header + policies x trials


def test_scaling_command(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, n_values=[16, 32, 64])
    rc = main(["scaling", str(cfg), "--workers", "1",
               "--out", str(tmp_path / "s.csv")])
    assert rc == 0
    text = capsys.readouterr().out
    assert "batch vs CM2(1,1)" in text
    assert (tmp_path / "s_gaps.csv").exists()


def test_chart_command(tmp_path):
    cfg = _write_cfg(tmp_path)
    out = tmp_path / "rows.csv"
    main(["simulate", str(cfg), "--out", str(out), "--workers", "1"])
    svg = tmp_path / "viz.svg"
    rc = main(["chart", str(out), "--kind", "waiting", "--out", str(svg)])
    assert rc == 0
    assert svg.read_text().count("<polyline") >= 1


def test_trials_override(tmp_path):
    cfg = _write_cfg(tmp_path)
    out = tmp_path / "rows.csv"
    main(["simulate", str(cfg), "--out", str(out), "--workers", "1",
          "--trials", "1"])
    assert len(out.read_text().splitlines()) == 1 + 2


def test_cli_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])
