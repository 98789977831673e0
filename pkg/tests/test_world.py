"""Benchmark builders and scenario JSON round-trips."""

import json
import math

import numpy as np
import pytest

from rpgplan import geometry
from rpgplan.biped import BipedSpec, FootPose, foot_valid, foot_valid_batch
from rpgplan.world import (
    BUILDERS,
    Box3,
    ScenarioError,
    build_checkers,
    build_pass_under,
    build_stepping_stones,
    load_scenario,
    save_scenario,
)

SPEC = BipedSpec()


def sample_cylinder(cyl, n, rng):
    """Uniform (x, y, yaw) draws from a placement cylinder's interior."""
    u = rng.random(n)
    ang = rng.random(n) * 2 * math.pi
    rad = cyl.radius * (1 - 1e-9) * np.sqrt(u)
    yaw = cyl.yaw_lo + rng.random(n) * cyl.yaw_span
    return np.column_stack([cyl.cx + rad * np.cos(ang), cyl.cy + rad * np.sin(ang), yaw])


class TestSteppingStones:
    def test_default_scenario(self):
        s = build_stepping_stones()
        assert s.name == "stepping-stones"
        assert len(s.truth_cylinders) == 3
        for c in s.truth_cylinders:
            assert c.radius >= 0.05
            assert c.yaw_span == pytest.approx(2 * math.pi)

    def test_truth_cylinders_all_foot_valid(self, rng):
        env = build_stepping_stones().environment
        for cyl in build_stepping_stones().truth_cylinders:
            placements = sample_cylinder(cyl, 500, rng)
            assert foot_valid_batch(env, placements).all()

    def test_empty_gap_is_plain_corridor(self):
        s = build_stepping_stones(gap_width=0.0, stone_count=0)
        assert s.environment.invalid.is_empty
        assert s.truth_cylinders == ()
        assert foot_valid(s.environment, FootPose(1.0, 0.0, 1.0))

    def test_small_stone_rejected(self):
        # a 0.12 m stone cannot hold the 0.12 x 0.06 foot at arbitrary yaw
        with pytest.raises(ScenarioError):
            build_stepping_stones(stone_radius=0.12)
        with pytest.raises(ScenarioError):
            build_stepping_stones(stone_radius=0.05)

    def test_unreachable_spacing_rejected(self):
        with pytest.raises(ScenarioError, match="unreachable"):
            build_stepping_stones(gap_width=0.9, stone_count=0)

    def test_overlapping_stones_rejected(self):
        with pytest.raises(ScenarioError, match="overlap"):
            build_stepping_stones(gap_width=0.3, stone_count=3)

    def test_seeded_jitter_is_deterministic(self):
        a = build_stepping_stones(seed=7).truth_cylinders
        b = build_stepping_stones(seed=7).truth_cylinders
        c = build_stepping_stones(seed=8).truth_cylinders
        assert [(p.cx, p.cy) for p in a] == [(p.cx, p.cy) for p in b]
        assert [(p.cx, p.cy) for p in a] != [(p.cx, p.cy) for p in c]


class TestCheckers:
    def test_default_scenario(self):
        s = build_checkers()
        assert s.name == "checkers"
        assert len(s.truth_cylinders) == 6  # one per column
        for c in s.truth_cylinders:
            assert c.radius >= 0.05

    def test_truth_cylinders_all_foot_valid(self, rng):
        s = build_checkers()
        for cyl in s.truth_cylinders:
            assert foot_valid_batch(s.environment, sample_cylinder(cyl, 500, rng)).all()

    def test_checkerboard_coloring(self):
        s = build_checkers(cell_size=0.48, rows=4, cols=6)
        y0 = -4 * 0.48 / 2
        valid_center = (1.0 + 0.24, y0 + 0.24)  # cell (0, 0)
        invalid_center = (1.0 + 0.48 + 0.24, y0 + 0.24)  # cell (0, 1)
        assert foot_valid(s.environment, FootPose(*valid_center, 0.0))
        assert not foot_valid(s.environment, FootPose(*invalid_center, 0.0))

    def test_single_cell_reduces_to_one_stone(self):
        s = build_checkers(rows=1, cols=1)
        assert len(s.truth_cylinders) == 1

    def test_single_row_multi_column_rejected(self):
        with pytest.raises(ScenarioError, match="single-row"):
            build_checkers(rows=1, cols=3)

    def test_small_cell_rejected(self):
        # a 0.25 m cell is below the 0.268 m foot diameter
        with pytest.raises(ScenarioError, match="cell size"):
            build_checkers(cell_size=0.25)
        with pytest.raises(ScenarioError):
            build_checkers(rows=0, cols=3)


class TestPassUnder:
    def test_default_scenario(self):
        s = build_pass_under()
        assert s.name == "pass-under"
        assert len(s.environment.obstacles) == 3
        for box in s.environment.obstacles:
            assert box.min_corner[2] == pytest.approx(1.1)

    def test_floor_stays_walkable_under_bars(self):
        env = build_pass_under().environment
        assert env.invalid.is_empty
        for box in env.obstacles:
            x = (box.min_corner[0] + box.max_corner[0]) / 2
            assert foot_valid(env, FootPose(x, 0.0, 0.3))

    def test_zero_bars_open_corridor(self):
        s = build_pass_under(bar_heights=())
        assert s.environment.obstacles == ()

    def test_low_bar_rejected(self):
        with pytest.raises(ScenarioError, match="crouch"):
            build_pass_under(bar_heights=(0.5,))

    def test_bad_geometry_rejected(self):
        with pytest.raises(ScenarioError):
            build_pass_under(bar_thickness=0.0)
        with pytest.raises(ScenarioError):
            build_pass_under(spacing=-1.0)


def assert_scenarios_equal(a, b, rng):
    ea, eb = a.environment, b.environment
    assert ea.ground_bounds == pytest.approx(eb.ground_bounds)
    assert [(x.min_corner, x.max_corner) for x in ea.obstacles] == [
        (x.min_corner, x.max_corner) for x in eb.obstacles
    ]
    assert ea.robot == eb.robot
    assert ea.invalid.area == pytest.approx(eb.invalid.area, abs=1e-12)
    pts = rng.random((500, 2)) * [6.0, 2.0] + [0.0, -1.0]
    for x, y in pts:
        assert ea.invalid.contains(x, y) == eb.invalid.contains(x, y)
    for qa, qb in ((a.query.start, b.query.start), (a.query.goal, b.query.goal)):
        assert qa.left == qb.left and qa.right == qb.right
    assert len(a.truth_cylinders) == len(b.truth_cylinders)
    for ca, cb in zip(a.truth_cylinders, b.truth_cylinders):
        assert (ca.cx, ca.cy, ca.radius, ca.yaw_lo, ca.yaw_span) == pytest.approx(
            (cb.cx, cb.cy, cb.radius, cb.yaw_lo, cb.yaw_span)
        )


class TestRoundTrip:
    @pytest.mark.parametrize("name", sorted(BUILDERS))
    def test_builder_save_load_identity(self, name, rng):
        s = BUILDERS[name]()
        s2 = load_scenario(save_scenario(s))
        assert_scenarios_equal(s, s2, rng)
        # a second trip produces the identical document text
        assert save_scenario(s2) == save_scenario(s)

    def test_minimal_document(self):
        doc = {
            "ground": {"min": [0.0, -1.0], "max": [4.0, 1.0]},
            "explore_bounds": {"min": [0.0, -1.0, 0.3], "max": [4.0, 1.0, 1.6]},
            "query": {
                "start": {"left": [0.5, 0.1, 0.0], "right": [0.5, -0.1, 0.0]},
                "goal": {"left": [3.5, 0.1, 0.0], "right": [3.5, -0.1, 0.0]},
            },
        }
        s = load_scenario(json.dumps(doc))
        assert s.environment.obstacles == ()
        assert s.environment.invalid.is_empty
        assert foot_valid(s.environment, FootPose(2.0, 0.5, 1.2))

    def test_goal_on_invalid_ground_rejected(self):
        doc = json.loads(save_scenario(build_stepping_stones()))
        mid = 1.0 + 0.45  # middle of the gap strip, off the stones
        doc["query"]["goal"] = {
            "left": [mid, 0.55, 0.0],
            "right": [mid, 0.35, 0.0],
        }
        with pytest.raises(ScenarioError, match="goal"):
            load_scenario(json.dumps(doc))

    def test_parse_and_schema_errors(self):
        with pytest.raises(ScenarioError, match="JSON"):
            load_scenario("not a document {")
        with pytest.raises(ScenarioError, match="ground"):
            load_scenario("{}")
        doc = json.loads(save_scenario(build_pass_under()))
        doc["obstacles"] = [{"min": [1, -1, 1], "max": [0, 1, 2]}]
        with pytest.raises(ScenarioError):
            load_scenario(json.dumps(doc))

    def test_unknown_robot_field_rejected(self):
        doc = json.loads(save_scenario(build_pass_under()))
        doc["robot"] = {"hip_height": 1.0}
        with pytest.raises(ScenarioError, match="robot"):
            load_scenario(json.dumps(doc))
