"""Command-line interface: exit codes, CSV outputs, and override parsing."""

import csv
import math

import pytest

from rpgplan import cli, lab
from rpgplan.world import build_stepping_stones, load_scenario, save_scenario


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


@pytest.fixture(scope="module")
def corridor_json(tmp_path_factory):
    # gap 0 / no stones degenerates the stepping-stones world into a plain
    # 2 m corridor, the cheapest solvable scenario for exercising the CLI
    path = str(tmp_path_factory.mktemp("cli") / "corridor.json")
    rc = cli.main(["scenario", "build", "stepping-stones", "--out", path,
                   "--set", "gap_width=0", "--set", "stone_count=0"])
    assert rc == 0
    return path


class TestPlanCommand:
    def test_solves_corridor(self, corridor_json, capsys):
        rc = cli.main(["plan", "--scenario", corridor_json, "--seed", "0",
                       "--np", "500", "--nsigma", "400", "--max-rounds", "3"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "status:    solved" in out
        assert "2.00 R_max" in out  # default rho is 2 * max_step
        assert "mode path:" in out

    def test_missing_scenario_file_exits_1(self, capsys):
        rc = cli.main(["plan", "--scenario", "no-such-file.json"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_no_command_is_usage_error(self):
        with pytest.raises(SystemExit):
            cli.main([])


class TestScenarioBuild:
    def test_round_trip_matches_builder(self, tmp_path, capsys):
        built = tmp_path / "stones.json"
        rc = cli.main(["scenario", "build", "stepping-stones", "--out", str(built)])
        assert rc == 0
        assert "wrote" in capsys.readouterr().out

        assert built.read_text() == save_scenario(build_stepping_stones())
        assert load_scenario(built.read_text()).name == "stepping-stones"

    def test_overrides_reach_builder(self, tmp_path):
        path = tmp_path / "two.json"
        rc = cli.main(["scenario", "build", "stepping-stones", "--out", str(path),
                       "--set", "stone_count=2", "--set", "stone_radius=0.21"])
        assert rc == 0
        scn = load_scenario(path.read_text())
        assert len(scn.truth_cylinders) == 2
        bigger = 0.21 * math.cos(math.pi / 64) - scn.robot.foot_circumradius - 1e-6
        for cyl in scn.truth_cylinders:
            assert cyl.radius == pytest.approx(bigger)

    def test_bar_heights_colon_list(self, tmp_path):
        path = tmp_path / "bars.json"
        rc = cli.main(["scenario", "build", "pass-under", "--out", str(path),
                       "--set", "bar_heights=1.3:1.15"])
        assert rc == 0
        scn = load_scenario(path.read_text())
        undersides = sorted(box.min_corner[2] for box in scn.environment.obstacles)
        assert undersides == pytest.approx([1.15, 1.3])

    def test_bad_override_format_exits_1(self, tmp_path, capsys):
        rc = cli.main(["scenario", "build", "checkers",
                       "--out", str(tmp_path / "x.json"), "--set", "cell0.3"])
        assert rc == 1
        assert "KEY=VALUE" in capsys.readouterr().err

    def test_builder_rejection_exits_1(self, tmp_path, capsys):
        rc = cli.main(["scenario", "build", "stepping-stones",
                       "--out", str(tmp_path / "x.json"), "--set", "gap_width=0.3"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_builder_name_rejected(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["scenario", "build", "mystery", "--out", str(tmp_path / "x.json")])


class TestBoundsCommand:
    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "bounds.csv"
        rc = cli.main(["bounds", "--scenario", "stepping-stones", "--seed", "1",
                       "--np-list", "500", "--nsigma-list", "500,1000",
                       "--out", str(out)])
        assert rc == 0
        rows = read_rows(out)
        assert rows[0] == ["bound_name", "N_P", "N_sigma", "value"]
        assert len(rows) > 1
        for name, n_p, n_sigma, value in rows[1:]:
            assert name
            assert int(n_p) >= 0 and int(n_sigma) >= 0
            assert math.isfinite(float(value))
        assert any(r[2] == "1000" for r in rows[1:])

    def test_prints_table_without_out(self, capsys):
        rc = cli.main(["bounds", "--scenario", "stepping-stones",
                       "--np-list", "500", "--nsigma-list", "500"])
        assert rc == 0
        assert "bound_name" in capsys.readouterr().out


class TestVerifyCommand:
    def test_combined_grid_ok(self, tmp_path, capsys):
        out = tmp_path / "verify.csv"
        rc = cli.main(["verify", "combined", "--grid", "0,0.4",
                       "--trials", "1500", "--seed", "1", "--out", str(out)])
        assert rc == 0
        assert "no violations" in capsys.readouterr().out
        rows = read_rows(out)
        assert rows[0] == lab.VERIFY_COMBINED_HEADER.split(",")
        assert len(rows) == 1 + 4  # 2x2 grid

    def test_mode_bound_ok(self, capsys):
        rc = cli.main(["verify", "mode-bound", "--nsigma-list", "0,40",
                       "--trials", "250", "--seed", "3"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "n_sigma" in out
        assert "no violations" in out

    def test_violation_exits_2(self, monkeypatch, capsys):
        row = lab.VerifyRow(label=(0.1, 0.2), trials=100, failures=90,
                            empirical=0.9, bound=0.3, sigma=0.01, violation=True)
        monkeypatch.setattr(lab, "verify_combined", lambda *a, **k: [row])
        assert cli.main(["verify", "combined"]) == 2
        captured = capsys.readouterr()
        assert "violation" in captured.err
        assert "VIOL" in captured.out


class TestSweepCommand:
    def test_writes_summary_and_trials(self, corridor_json, tmp_path, capsys):
        summary = tmp_path / "summary.csv"
        trials = tmp_path / "trials.csv"
        rc = cli.main(["sweep", "--scenario", corridor_json,
                       "--rho-list", "2,4", "--trials", "2", "--seed", "0",
                       "--np", "300", "--nsigma", "300", "--max-rounds", "1",
                       "--out", str(summary), "--trials-out", str(trials),
                       "--no-time"])
        assert rc == 0
        assert "spearman" in capsys.readouterr().out

        srows = read_rows(summary)
        assert srows[0] == lab.SUMMARY_HEADER.split(",")
        assert [r[1] for r in srows[1:]] == ["2", "4"]

        trows = read_rows(trials)
        assert trows[0] == lab.TRIAL_HEADER.split(",")
        assert len(trows) == 1 + 4
        assert all(r[5] == "0" for r in trows[1:])  # --no-time zeroes wall_ms
