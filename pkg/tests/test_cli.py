import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dmdkit.cli import main


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def csv_rows(text):
    lines = [line for line in text.splitlines() if line]
    header = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    return header, rows


def write_diag_traj(capsys, tmp_path, name="traj.csv"):
    path = tmp_path / name
    code, _, _ = run(capsys, [
        "simulate", "--system", "linear", "--a", "0.9,0;0,0.5",
        "--x0", "1,1", "--steps", "20", "--out", str(path),
    ])
    assert code == 0
    return path


def write_quadratic_traj(capsys, tmp_path, name="quad.csv"):
    path = tmp_path / name
    code, _, _ = run(capsys, [
        "simulate", "--system", "quadratic", "--mu", "0.9", "--lam", "0.5",
        "--c", "0.4", "--x0", "1,-0.4", "--steps", "30", "--out", str(path),
    ])
    assert code == 0
    return path


def test_simulate_stdout_is_trajectory_csv(capsys):
    code, out, _ = run(capsys, [
        "simulate", "--system", "linear", "--a", "0.9,0;0,0.5",
        "--x0", "1,1", "--steps", "3",
    ])
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["t", "x1", "x2"]
    assert_allclose(rows, [
        [0, 1, 1], [1, 0.9, 0.5], [2, 0.81, 0.25], [3, 0.729, 0.125],
    ], atol=1e-15)


def test_simulate_rotation_first_coordinate_is_scalar(capsys):
    code, out, _ = run(capsys, [
        "simulate", "--system", "rotation", "--theta", "0.5",
        "--observe", "first", "--steps", "4",
    ])
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["t", "x1"]
    assert_allclose([r[1] for r in rows], np.cos(0.5 * np.arange(5)), atol=1e-14)


def test_fit_dmd_prints_eigenvalues_and_residual(capsys, tmp_path):
    traj = write_diag_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    code, out, err = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(traj), "--out", str(model),
    ])
    assert code == 0
    assert model.exists()
    header, rows = csv_rows(out)
    assert header == ["index", "re", "im", "training_residual"]
    found = sorted(r[1] for r in rows)
    assert_allclose(found, [0.5, 0.9], atol=1e-10)
    assert all(r[3] < 1e-10 for r in rows)
    assert "wrote model" in err


def test_fit_reruns_are_byte_identical(capsys, tmp_path):
    traj = write_diag_traj(capsys, tmp_path)
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    code_a, out_a, _ = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(traj), "--out", str(first),
    ])
    code_b, out_b, _ = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(traj), "--out", str(second),
    ])
    assert code_a == code_b == 0
    assert first.read_bytes() == second.read_bytes()
    assert out_a == out_b


def test_fit_concatenates_multiple_data_files(capsys, tmp_path):
    first = write_diag_traj(capsys, tmp_path, "t1.csv")
    second = tmp_path / "t2.csv"
    code, _, _ = run(capsys, [
        "simulate", "--system", "linear", "--a", "0.9,0;0,0.5",
        "--x0=-0.3,0.8", "--steps", "15", "--out", str(second),
    ])
    assert code == 0
    model = tmp_path / "model.json"
    code, out, _ = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(first), "--data", str(second),
        "--out", str(model),
    ])
    assert code == 0
    _, rows = csv_rows(out)
    assert_allclose(sorted(r[1] for r in rows), [0.5, 0.9], atol=1e-10)


def test_spectrum_rotation_magnitudes_and_phases(capsys, tmp_path):
    traj = tmp_path / "rot.csv"
    code, _, _ = run(capsys, [
        "simulate", "--system", "rotation", "--theta", "0.3",
        "--steps", "32", "--out", str(traj),
    ])
    assert code == 0
    model = tmp_path / "model.json"
    code, _, _ = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(traj), "--out", str(model),
    ])
    assert code == 0
    code, out, _ = run(capsys, ["spectrum", str(model)])
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["index", "re", "im", "magnitude", "phase"]
    assert len(rows) == 2
    mags = [r[3] for r in rows]
    assert_allclose(mags, [1.0, 1.0], atol=1e-10)
    assert_allclose(sorted(r[4] for r in rows), [-0.3, 0.3], atol=1e-10)


def test_spectrum_rows_sorted_by_magnitude(capsys, tmp_path):
    traj = write_diag_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    run(capsys, ["fit", "--algo", "dmd", "--data", str(traj), "--out", str(model)])
    code, out, _ = run(capsys, ["spectrum", str(model)])
    assert code == 0
    _, rows = csv_rows(out)
    mags = [r[3] for r in rows]
    assert mags == sorted(mags, reverse=True)
    assert all(r[2] == 0.0 and r[4] == 0.0 for r in rows)


def test_predict_diagonal_powers(capsys, tmp_path):
    traj = write_diag_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    run(capsys, ["fit", "--algo", "dmd", "--data", str(traj), "--out", str(model)])
    ic = tmp_path / "ic.csv"
    ic.write_text("1,1\n")
    code, out, _ = run(capsys, ["predict", str(model), str(ic), "2"])
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["step", "g1", "g2"]
    assert_allclose(rows, [[1, 0.9, 0.5], [2, 0.81, 0.25]], atol=1e-10)


def test_predict_reruns_are_byte_identical(capsys, tmp_path):
    traj = write_diag_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    run(capsys, ["fit", "--algo", "dmd", "--data", str(traj), "--out", str(model)])
    ic = tmp_path / "ic.csv"
    ic.write_text("0.4,-0.7\n")
    _, out_a, _ = run(capsys, ["predict", str(model), str(ic), "5"])
    _, out_b, _ = run(capsys, ["predict", str(model), str(ic), "5"])
    assert out_a == out_b


def test_companion_fit_and_predict(capsys, tmp_path):
    traj = write_diag_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    code, out, _ = run(capsys, [
        "fit", "--algo", "companion", "--data", str(traj), "--out", str(model),
    ])
    assert code == 0
    _, rows = csv_rows(out)
    assert_allclose(sorted(r[1] for r in rows), [0.5, 0.9], atol=1e-9)
    ic = tmp_path / "ic.csv"
    ic.write_text("1,1\n")
    code, out, _ = run(capsys, ["predict", str(model), str(ic), "2"])
    assert code == 0
    _, rows = csv_rows(out)
    assert_allclose(rows, [[1, 0.9, 0.5], [2, 0.81, 0.25]], atol=1e-9)


def test_edmd_cli_round_trip_tracks_simulation(capsys, tmp_path):
    traj = write_quadratic_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    code, out, _ = run(capsys, [
        "fit", "--algo", "edmd", "--dict", "poly:2",
        "--data", str(traj), "--out", str(model),
    ])
    assert code == 0
    _, rows = csv_rows(out)
    found = [r[1] for r in rows]
    for expected in (0.9, 0.5, 0.81):
        assert min(abs(v - expected) for v in found) < 1e-6
    ic = tmp_path / "ic.csv"
    ic.write_text("1,-0.4\n")
    code, out, _ = run(capsys, ["predict", str(model), str(ic), "5"])
    assert code == 0
    _, rows = csv_rows(out)
    x = np.array([1.0, -0.4])
    for step, row in enumerate(rows, start=1):
        x = np.array([0.9 * x[0], 0.5 * x[1] + 0.4 * x[0] ** 2])
        assert row[0] == step
        assert_allclose(row[1:], x, atol=1e-5)


def test_kernel_edmd_cli_round_trip(capsys, tmp_path):
    traj = write_quadratic_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    code, out, _ = run(capsys, [
        "fit", "--algo", "kernel-edmd", "--kernel", "poly:2",
        "--data", str(traj), "--out", str(model),
    ])
    assert code == 0
    ic = tmp_path / "ic.csv"
    ic.write_text("1,-0.4\n")
    code, out, _ = run(capsys, ["predict", str(model), str(ic), "5"])
    assert code == 0
    _, rows = csv_rows(out)
    x = np.array([1.0, -0.4])
    for row in rows:
        x = np.array([0.9 * x[0], 0.5 * x[1] + 0.4 * x[0] ** 2])
        assert_allclose(row[1:], x, atol=1e-5)


def test_embedded_predict_needs_full_history(capsys, tmp_path):
    traj = tmp_path / "rot.csv"
    run(capsys, [
        "simulate", "--system", "rotation", "--theta", "0.5",
        "--observe", "first", "--steps", "64", "--out", str(traj),
    ])
    model = tmp_path / "model.json"
    code, _, _ = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(traj), "--embed", "2",
        "--out", str(model),
    ])
    assert code == 0
    short = tmp_path / "short.csv"
    short.write_text("1.0\n")
    code, _, err = run(capsys, ["predict", str(model), str(short), "3"])
    assert code == 3
    assert "2 history rows" in err
    full = tmp_path / "full.csv"
    full.write_text("1.0\n" + format(np.cos(0.5), ".17g") + "\n")
    code, out, _ = run(capsys, ["predict", str(model), str(full), "3"])
    assert code == 0
    _, rows = csv_rows(out)
    assert_allclose(
        [r[2] for r in rows], np.cos(0.5 * np.arange(2, 5)), atol=1e-8
    )


@pytest.mark.parametrize("argv", [
    ["fit", "--algo", "dmd", "--dict", "poly:2"],
    ["fit", "--algo", "edmd"],
    ["fit", "--algo", "kernel-edmd"],
    ["fit", "--algo", "companion", "--kernel", "poly:2"],
    ["fit", "--algo", "dmd", "--embed", "0"],
])
def test_incompatible_fit_flags_exit_2(capsys, tmp_path, argv):
    traj = write_diag_traj(capsys, tmp_path)
    full = argv + ["--data", str(traj), "--out", str(tmp_path / "m.json")]
    code, _, err = run(capsys, full)
    assert code == 2
    assert "error" in err.lower()


def test_missing_required_flag_is_usage_error(capsys, tmp_path):
    code, _, _ = run(capsys, ["fit", "--algo", "dmd", "--data", "x.csv"])
    assert code == 2


def test_unknown_subcommand_is_usage_error(capsys):
    code, _, _ = run(capsys, ["frobnicate"])
    assert code == 2


def test_malformed_data_csv_exits_3(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x1\n0,1\n1,word\n")
    code, _, err = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(bad),
        "--out", str(tmp_path / "m.json"),
    ])
    assert code == 3
    assert "word" in err


def test_missing_data_file_exits_3(capsys, tmp_path):
    code, _, _ = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(tmp_path / "absent.csv"),
        "--out", str(tmp_path / "m.json"),
    ])
    assert code == 3


def test_zero_data_exits_4(capsys, tmp_path):
    traj = tmp_path / "zero.csv"
    run(capsys, [
        "simulate", "--system", "linear", "--a", "0.9", "--x0", "0",
        "--steps", "6", "--out", str(traj),
    ])
    code, _, err = run(capsys, [
        "fit", "--algo", "dmd", "--data", str(traj),
        "--out", str(tmp_path / "m.json"),
    ])
    assert code == 4
    assert "error" in err


def test_schema_bump_is_rejected_on_load(capsys, tmp_path):
    traj = write_diag_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    run(capsys, ["fit", "--algo", "dmd", "--data", str(traj), "--out", str(model)])
    payload = json.loads(model.read_text())
    payload["schema_version"] = 2
    model.write_text(json.dumps(payload))
    code, _, err = run(capsys, ["spectrum", str(model)])
    assert code == 3
    assert "schema_version" in err
    ic = tmp_path / "ic.csv"
    ic.write_text("1,1\n")
    code, _, _ = run(capsys, ["predict", str(model), str(ic), "1"])
    assert code == 3


def test_wrong_ic_width_exits_3(capsys, tmp_path):
    traj = write_diag_traj(capsys, tmp_path)
    model = tmp_path / "model.json"
    run(capsys, ["fit", "--algo", "dmd", "--data", str(traj), "--out", str(model)])
    ic = tmp_path / "ic.csv"
    ic.write_text("1,2,3\n")
    code, _, err = run(capsys, ["predict", str(model), str(ic), "2"])
    assert code == 3
    assert "3" in err


def test_simulate_missing_system_parameter_exits_2(capsys):
    code, _, err = run(capsys, ["simulate", "--system", "linear", "--steps", "5"])
    assert code == 2
    assert "--a" in err


def test_fit_quadratic_edmd_eigenvalue_081_present(capsys, tmp_path):
    traj = write_quadratic_traj(capsys, tmp_path)
    code, out, _ = run(capsys, [
        "fit", "--algo", "edmd", "--dict", "poly:2",
        "--data", str(traj), "--out", str(tmp_path / "m.json"),
    ])
    assert code == 0
    _, rows = csv_rows(out)
    assert min(abs(r[1] - 0.81) for r in rows) < 1e-6
