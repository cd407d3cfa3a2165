from typer.testing import CliRunner

from waveguide_cavity.cli import app
from waveguide_cavity.mirror_optics import disorder_averaged_reflectance

runner = CliRunner()


def _invoke(tmp_path, name, args):
    out = tmp_path / name
    result = runner.invoke(app, ["--out", str(out), "--reproducible", *args])
    assert result.exit_code == 0, result.output
    return out.read_bytes()


def test_disorder_table_is_byte_identical(tmp_path):
    args = [
        "--seed",
        "5",
        "reflectance",
        "--n-atoms",
        "20",
        "--delta-range=-40:40",
        "--points",
        "41",
        "--sigma",
        "0.02",
        "--samples",
        "50",
    ]
    first = _invoke(tmp_path, "a.csv", args)
    second = _invoke(tmp_path, "b.csv", args)
    assert first == second
    assert b"created" not in first


def test_trajectory_table_and_plot_are_byte_identical(tmp_path):
    args = ["simulate", "--n-atoms", "100", "--tau", "0.5", "--t-max", "1.5", "--points", "151"]
    svg_a, svg_b = tmp_path / "a.svg", tmp_path / "b.svg"
    first = _invoke(tmp_path, "a.csv", ["--svg", str(svg_a), *args])
    second = _invoke(tmp_path, "b.csv", ["--svg", str(svg_b), *args])
    assert first == second
    assert svg_a.read_bytes() == svg_b.read_bytes()


def test_disorder_ensemble_depends_only_on_seed():
    grid = [0.0, 5.0, 10.0]
    spacing = 3.141592653589793 / 100
    a = disorder_averaged_reflectance(10, spacing, 0.05, grid, 20, 11, omega_a=100.0)
    b = disorder_averaged_reflectance(10, spacing, 0.05, grid, 20, 11, omega_a=100.0)
    assert (a.mean == b.mean).all()
