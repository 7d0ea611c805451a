"""Command-line surface: exit codes, output files, format mirroring,
determinism, and parity with the library calls."""

import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from logmetric import balls, cli
from logmetric.hyperbolicity import ultrametric_delta
from logmetric.lens import ecc_growth_experiment
from logmetric.spaces import FiniteMetricSpace, PointCloud, Region, log_transform

LINE6 = np.abs(np.arange(6.0)[:, None] - np.arange(6.0)[None, :])


@pytest.fixture
def iodir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write_points(path, pts):
    lines = ["x,y"] + [f"{float(p[0])!r},{float(p[1])!r}" for p in pts]
    Path(path).write_text("\n".join(lines) + "\n")


def write_matrix(path, D):
    lines = [",".join(repr(float(v)) for v in row) for row in D]
    Path(path).write_text("\n".join(lines) + "\n")


def grid_points(side, spacing=1.0):
    xs = np.arange(side) * spacing
    return np.stack(np.meshgrid(xs, xs, indexing="xy"), axis=-1).reshape(-1, 2)


@pytest.fixture
def pts12(iodir):
    write_points(iodir / "pts.csv", grid_points(4)[:12])
    return str(iodir / "pts.csv")


@pytest.fixture
def mat6(iodir):
    write_matrix(iodir / "mat.csv", LINE6)
    return str(iodir / "mat.csv")


@pytest.fixture
def path9(iodir):
    lines = ["t,x,y"] + [f"{float(t)!r},{3.0 * t!r},0.0" for t in range(9)]
    (iodir / "path.csv").write_text("\n".join(lines) + "\n")
    return str(iodir / "path.csv")


def read_csv_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_validate_points_pass(iodir, pts12, capsys):
    assert cli.main(["validate", "--points", pts12]) == 0
    out = capsys.readouterr().out
    assert "pass" in out
    (row,) = read_csv_rows(iodir / "validate_out.csv")
    assert row["ok"] == "true"
    assert row["failure_kind"] == ""


def test_validate_bad_matrix_fails(iodir, capsys):
    D = np.array([[0.0, 1.0, 9.0], [1.0, 0.0, 1.0], [9.0, 1.0, 0.0]])
    write_matrix(iodir / "bad.csv", D)
    assert cli.main(["validate", "--matrix", str(iodir / "bad.csv")]) == 1
    (row,) = read_csv_rows(iodir / "validate_out.csv")
    assert row["ok"] == "false"
    assert row["failure_kind"] == "triangle"
    assert "triangle" in capsys.readouterr().out


def test_transform_writes_log_matrix(iodir, mat6):
    out = iodir / "t.csv"
    assert cli.main(["transform", "--matrix", mat6, "--output", str(out)]) == 0
    got = np.array([[float(v) for v in row] for row in csv.reader(out.open())])
    np.testing.assert_array_equal(got, np.log1p(LINE6))


def test_transform_rejects_log_flag(iodir, mat6, capsys):
    assert cli.main(["transform", "--matrix", mat6, "--log"]) == 1
    assert "drop the --log flag" in capsys.readouterr().err


def test_transform_json_matrix(iodir, mat6):
    out = iodir / "t.json"
    assert cli.main(["transform", "--matrix", mat6, "--output", str(out), "--format", "json"]) == 0
    got = np.array(json.loads(out.read_text()))
    np.testing.assert_array_equal(got, np.log1p(LINE6))


def test_delta_on_line_matrix(iodir, mat6):
    assert cli.main(["delta", "--matrix", mat6]) == 0
    (row,) = read_csv_rows(iodir / "delta_out.csv")
    assert float(row["delta"]) == 0.0
    assert row["variant"] == "full"
    assert int(row["quadruples_scanned"]) == 6**4
    assert int(row["points"]) == 6


def test_delta_guard_refuses_and_base_substitutes(iodir, capsys):
    write_points(iodir / "big.csv", grid_points(21))
    assert cli.main(["delta", "--points", str(iodir / "big.csv")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: guard:")
    assert "441 points" in err and "--force or --base" in err
    assert cli.main(["delta", "--points", str(iodir / "big.csv"), "--base", "0"]) == 0
    (row,) = read_csv_rows(iodir / "delta_out.csv")
    assert row["variant"] == "fixed-base(0)"
    assert int(row["quadruples_scanned"]) == 441**3


def test_delta_force_overrides_guard(iodir, pts12, monkeypatch):
    monkeypatch.setattr(cli, "FULL_SCAN_GUARD", 10)
    assert cli.main(["delta", "--points", pts12]) == 2
    assert cli.main(["delta", "--points", pts12, "--force"]) == 0
    (row,) = read_csv_rows(iodir / "delta_out.csv")
    assert row["variant"] == "full"


def test_guard_threshold_value():
    assert cli.FULL_SCAN_GUARD == 400


def test_ultra_log_points_parity(iodir, pts12):
    assert cli.main(["ultra", "--points", pts12, "--log"]) == 0
    (row,) = read_csv_rows(iodir / "ultra_out.csv")
    expected = ultrametric_delta(log_transform(PointCloud(grid_points(4)[:12])))
    assert float(row["delta_u"]) == expected.delta_u
    assert float(row["delta_u"]) <= math.log(2.0) + 1e-9


def test_ecc_region_parity(iodir, mat6):
    assert cli.main(["ecc", "--matrix", mat6, "--region", "0,1,2"]) == 0
    (row,) = read_csv_rows(iodir / "ecc_out.csv")
    space = FiniteMetricSpace(LINE6)
    rep = balls.eccentricity(space, Region(space, (0, 1, 2)))
    assert float(row["ecc"]) == rep.ecc
    assert int(row["inner_center"]) == rep.inner.center
    assert float(row["outer_radius"]) == rep.outer.radius
    assert int(row["region_size"]) == 3


def test_ecc_ball_intersection_route(iodir, mat6):
    assert cli.main(["ecc", "--matrix", mat6, "--ball1", "0,3", "--ball2", "5,4"]) == 0
    (row,) = read_csv_rows(iodir / "ecc_out.csv")
    space = FiniteMetricSpace(LINE6)
    region = balls.intersect_balls(space, balls.BallSpec(0, 3.0), balls.BallSpec(5, 4.0))
    assert int(row["region_size"]) == len(region)
    assert float(row["ecc"]) == balls.eccentricity(space, region).ecc


def test_ecc_argument_exclusivity(iodir, mat6, capsys):
    assert cli.main(["ecc", "--matrix", mat6, "--region", "0", "--ball1", "0,1", "--ball2", "1,1"]) == 1
    assert "not both" in capsys.readouterr().err
    assert cli.main(["ecc", "--matrix", mat6]) == 1
    assert "need --region" in capsys.readouterr().err


def test_quasiball_parity(iodir, mat6):
    assert cli.main(["quasiball", "--matrix", mat6, "--region", "0,5"]) == 0
    (row,) = read_csv_rows(iodir / "quasiball_out.csv")
    space = FiniteMetricSpace(LINE6)
    defect, spec = balls.quasi_ball_defect(space, Region(space, (0, 5)))
    assert float(row["defect"]) == defect
    assert int(row["center"]) == spec.center
    assert float(row["radius"]) == spec.radius


def test_weakecc_parity_and_validation(iodir, mat6, capsys):
    assert cli.main(["weakecc", "--matrix", mat6, "--region", "0,1", "--lambda", "2.0"]) == 0
    (row,) = read_csv_rows(iodir / "weakecc_out.csv")
    space = FiniteMetricSpace(LINE6)
    expected = balls.weak_ecc_defect(space, Region(space, (0, 1)), 2.0)
    assert float(row["defect"]) == expected
    assert cli.main(["weakecc", "--matrix", mat6, "--region", "0,1", "--lambda", "0.5"]) == 1
    assert "error: geometry: lambda" in capsys.readouterr().err


def test_lens_rows_match_library(iodir):
    assert cli.main(["lens", "--n-list", "1", "2", "--h", "0.25"]) == 0
    rows = read_csv_rows(iodir / "lens_out.csv")
    expected = ecc_growth_experiment([1, 2], 0.25)
    assert [int(r["n"]) for r in rows] == [1, 2]
    for got, exp in zip(rows, expected):
        for key, val in exp.items():
            assert float(got[key]) == float(val)


def test_lens_output_is_thread_independent(iodir):
    assert cli.main(["lens", "--n-list", "1", "2", "--h", "0.25", "--output", "a.csv"]) == 0
    assert cli.main(
        ["lens", "--n-list", "1", "2", "--h", "0.25", "--output", "b.csv", "--threads", "4"]
    ) == 0
    assert (iodir / "a.csv").read_bytes() == (iodir / "b.csv").read_bytes()


def test_lens_json_mirrors_csv(iodir):
    assert cli.main(["lens", "--n-list", "1", "--h", "0.5", "--output", "l.csv"]) == 0
    assert cli.main(
        ["lens", "--n-list", "1", "--h", "0.5", "--output", "l.json", "--format", "json"]
    ) == 0
    (crow,) = read_csv_rows(iodir / "l.csv")
    (jrow,) = json.loads((iodir / "l.json").read_text())
    assert set(crow) == set(jrow)
    for key, jval in jrow.items():
        # full-precision mirror: the CSV string parses back to the exact
        # JSON number
        assert float(crow[key]) == float(jval)


def test_lens_plot_writes_figure(iodir):
    assert cli.main(["lens", "--n-list", "1", "--h", "0.5", "--plot"]) == 0
    fig = iodir / "lens_out_fig.png"
    assert fig.exists()
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_grid_command_and_guard(iodir, capsys):
    assert cli.main(["grid", "--sides", "2", "3", "--plot"]) == 0
    rows = read_csv_rows(iodir / "grid_out.csv")
    assert [r["variant"] for r in rows] == ["full", "full"]
    assert float(rows[0]["delta_d"]) == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-12)
    assert (iodir / "grid_out_fig.png").exists()
    capsys.readouterr()
    assert cli.main(["grid", "--sides", "21"]) == 2
    assert "error: guard:" in capsys.readouterr().err
    assert cli.main(["grid", "--sides", "21", "--fixed-base-above", "400"]) == 0
    rows = read_csv_rows(iodir / "grid_out.csv")
    assert rows[0]["variant"] == "fixed-base(0)"


def test_lineultra_closed_form(iodir):
    assert cli.main(["lineultra", "--N", "1000"]) == 0
    (row,) = read_csv_rows(iodir / "lineultra_out.csv")
    assert float(row["delta_u"]) == math.log(1001.0) - math.log(501.0)
    assert float(row["gap_to_ln2"]) < 0.0011


def test_horizon_command(iodir):
    assert cli.main(["horizon", "--L", "1", "--C", "0", "--plot"]) == 0
    (row,) = read_csv_rows(iodir / "horizon_out.csv")
    assert float(row["d_star"]) == pytest.approx(2.335593630268704, abs=1e-9)
    assert (float(row["c_prime"]), float(row["k1"]), float(row["k2"])) == (3.0, 1.0, 7.0)
    assert (iodir / "horizon_out_fig.png").exists()


def test_tame_roundtrip_through_emitted_path(iodir, path9):
    emitted = iodir / "tamed.csv"
    assert cli.main(
        ["tame", "--input", path9, "--L", "2", "--C", "1", "--emit-path", str(emitted)]
    ) == 0
    (row,) = read_csv_rows(iodir / "tame_out.csv")
    assert row["ok"] == "true"
    assert float(row["chordarc_margin"]) >= 0.0
    assert float(row["hausdorff_dprime"]) == 0.0
    got = read_csv_rows(emitted)
    assert [r["t"] for r in got] == [repr(float(t)) for t in range(9)]
    assert [float(r["x"]) for r in got] == [3.0 * t for t in range(9)]
    # the emitted file is itself a valid lengths input
    assert cli.main(["lengths", "--input", str(emitted)]) == 0
    (lrow,) = read_csv_rows(iodir / "lengths_out.csv")
    assert float(lrow["length_d"]) == 24.0


def test_lengths_frozen_values(iodir, path9):
    assert cli.main(["lengths", "--input", path9]) == 0
    (row,) = read_csv_rows(iodir / "lengths_out.csv")
    assert float(row["length_d"]) == 24.0
    assert float(row["length_dprime"]) == pytest.approx(23.999999463558215, abs=1e-9)
    assert int(row["segments"]) == 8


def test_malformed_inputs_exit_one(iodir, capsys):
    (iodir / "broken.csv").write_text("x,y\n1,foo\n")
    assert cli.main(["delta", "--points", str(iodir / "broken.csv")]) == 1
    assert "error: input:" in capsys.readouterr().err
    assert cli.main(["delta", "--points", str(iodir / "missing.csv")]) == 1
    assert "not found" in capsys.readouterr().err
    assert cli.main(["frobnicate"]) == 1
    assert "error: input:" in capsys.readouterr().err


def test_thread_count_validated(iodir, mat6, capsys):
    assert cli.main(["delta", "--matrix", mat6, "--threads", "0"]) == 1
    assert "--threads must be at least 1" in capsys.readouterr().err


def test_points_and_matrix_mutually_exclusive(iodir, mat6, pts12, capsys):
    assert cli.main(["delta", "--matrix", mat6, "--points", pts12]) == 1
    assert "error: input:" in capsys.readouterr().err
