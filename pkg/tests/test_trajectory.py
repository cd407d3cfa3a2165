import numpy as np
import pytest

from waveguide_cavity.errors import ConfigurationError
from waveguide_cavity.trajectory import TRAJECTORY_COLUMNS, Trajectory, as_time_grid, uniform_grid
from waveguide_cavity.writers import metadata_lines, read_csv, render_csv, render_json, write_table


def _traj(n=11):
    t = np.linspace(0, 1, n)
    return Trajectory(t, np.exp(-t) + 0j, 0.1j * t, {"method": "test"})


def test_state_view():
    state = _traj().state(10)
    assert state.p0 == pytest.approx(np.exp(-2.0))
    assert state.total == pytest.approx(np.exp(-2.0) + 0.01)


def test_decimate_keeps_origin():
    traj = _traj(1001).decimate(101)
    assert len(traj) == 101
    assert traj.t_grid[0] == 0.0
    assert traj.meta["decimation_stride"] == 10
    short = _traj(5)
    assert short.decimate(10) is short


def test_frame_columns():
    frame = _traj().to_frame()
    assert list(frame.columns) == TRAJECTORY_COLUMNS
    without_mode = Trajectory([0.0, 1.0], [1.0, 0.5]).to_frame()
    assert without_mode["re_cm"].isna().all()


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        Trajectory([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(ConfigurationError):
        Trajectory([0.0, 1.0], [1.0])
    with pytest.raises(ConfigurationError):
        as_time_grid([-1.0, 0.0])
    with pytest.raises(ConfigurationError):
        uniform_grid(1.0, 1)


def test_metadata_lines_are_sorted_and_stamped():
    lines = metadata_lines({"b": 1, "a": 0.5})
    assert lines[:2] == ["# a: 0.5", "# b: 1"]
    assert lines[2].startswith("# created: ")
    assert metadata_lines({"a": 1}, reproducible=True) == ["# a: 1"]


def test_csv_file_round_trip(tmp_path):
    frame = _traj().to_frame()
    path = write_table(frame, tmp_path / "sub" / "t.csv", {"method": "test", "dt": 0.1}, reproducible=True)
    meta, loaded = read_csv(path)
    assert meta == {"dt": "0.1", "method": "test"}
    np.testing.assert_allclose(loaded["p0"], frame["p0"], rtol=1e-14)


def test_json_rendering():
    text = render_json(_traj(3).to_frame(), {"method": "test"}, reproducible=True)
    assert '"columns"' in text
    assert "created" not in text
    assert render_csv(_traj(3).to_frame(), {}, reproducible=True).startswith("t_gamma,")
