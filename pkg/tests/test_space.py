import math

import numpy as np
import pytest
from scipy import stats

from rpgplan.space import (
    DEFAULT_ROT_WEIGHT,
    ExploreBounds,
    ExplorePose,
    distance,
    distance_arrays,
    interpolate,
    make_route,
    sample_poses,
    segment_checks,
    segment_points,
    segment_valid,
    subdivide_path,
    wrap_pi,
)

UNIT = ExploreBounds(
    pos_min=(0, 0, 0), pos_max=(1, 1, 1),
    roll_range=(0, 1), pitch_range=(0, 1), yaw_range=(0, 1),
)


def pose(x=0, y=0, z=0, roll=0, pitch=0, yaw=0):
    return ExplorePose(x, y, z, roll, pitch, yaw)


class TestSampling:
    def test_same_seed_identical(self):
        a = sample_poses(UNIT, np.random.default_rng(7), 100)
        b = sample_poses(UNIT, np.random.default_rng(7), 100)
        assert np.array_equal(a, b)

    def test_means_near_center(self):
        draws = sample_poses(UNIT, np.random.default_rng(0), 100_000)
        assert np.all(np.abs(draws.mean(axis=0) - 0.5) < 0.01)

    def test_degenerate_box(self):
        degenerate = ExploreBounds(
            pos_min=(2, 3, 4), pos_max=(2, 3, 4),
            roll_range=(0.5, 0.5), pitch_range=(0.5, 0.5), yaw_range=(1, 1),
        )
        draws = sample_poses(degenerate, np.random.default_rng(0), 10)
        assert np.allclose(draws, [2, 3, 4, 0.5, 0.5, 1])

    def test_uniformity_chi_squared(self):
        """4^6 occupancy grid over 10^6 draws must not reject uniformity at
        p = 0.001."""
        draws = sample_poses(UNIT, np.random.default_rng(42), 1_000_000)
        cells = np.clip((draws * 4).astype(int), 0, 3)
        flat = np.ravel_multi_index(cells.T, (4,) * 6)
        counts = np.bincount(flat, minlength=4**6)
        chi2 = ((counts - counts.mean()) ** 2 / counts.mean()).sum()
        p = stats.chi2.sf(chi2, df=4**6 - 1)
        assert p > 0.001

    def test_normalization(self):
        p = pose(roll=4.0, yaw=-1.0)
        assert -math.pi <= p.roll < math.pi
        assert 0 <= p.yaw < 2 * math.pi
        assert p.yaw == pytest.approx(2 * math.pi - 1.0)


class TestMetric:
    def test_identity(self):
        a = pose(0.3, 0.4, 0.5, 0.1, 0.2, 0.3)
        assert distance(a, a) == 0.0

    def test_pure_translation(self):
        assert distance(pose(), pose(x=1)) == pytest.approx(1.0)

    def test_pure_yaw(self):
        assert distance(pose(), pose(yaw=math.pi / 2)) == pytest.approx(0.3 * math.pi / 2)

    def test_axioms_on_random_triples(self, rng):
        arr = rng.uniform(-2, 2, (1000, 3, 6))
        for a6, b6, c6 in arr:
            a, b, c = (ExplorePose(*v) for v in (a6, b6, c6))
            dab, dba = distance(a, b), distance(b, a)
            assert dab == pytest.approx(dba, abs=1e-12)
            assert dab >= 0
            assert distance(a, c) <= dab + distance(b, c) + 1e-9

    def test_arrays_match_scalar(self, rng):
        pa = rng.uniform(-2, 2, (50, 6))
        pb = rng.uniform(-2, 2, (50, 6))
        batch = distance_arrays(pa, pb)
        for i in range(50):
            want = distance(ExplorePose(*pa[i]), ExplorePose(*pb[i]))
            # batch operates on raw arrays; pose construction normalizes
            # angles first, which never changes wrapped differences
            assert batch[i] == pytest.approx(want, abs=1e-9)


class TestInterpolate:
    def test_endpoints(self):
        a, b = pose(0.1, 0.2, 0.3, 0.4, 0.5, 0.6), pose(1, 1, 1, -0.4, 0.3, 5.0)
        for t, want in ((0.0, a), (1.0, b)):
            got = interpolate(a, b, t)
            assert got.as_array() == pytest.approx(want.as_array(), abs=1e-12)

    def test_midpoint_linear(self):
        got = interpolate(pose(), pose(x=2, yaw=math.pi / 2), 0.5)
        assert got.x == pytest.approx(1.0)
        assert got.yaw == pytest.approx(math.pi / 4)

    def test_yaw_shortest_arc(self):
        a = pose(yaw=math.radians(350))
        b = pose(yaw=math.radians(10))
        mid = interpolate(a, b, 0.5)
        assert mid.yaw == pytest.approx(0.0, abs=1e-12)


class TestSegment:
    def test_always_true_check(self):
        assert segment_valid(pose(), pose(x=1.3), lambda p: True)

    def test_endpoint_failure(self):
        a = pose()
        assert not segment_valid(a, pose(x=1), lambda p: not np.allclose(p.as_array(), a.as_array()))

    def test_slab_crossing_caught(self):
        # invalid slab x in [0.5, 0.6]; spacing at half the slab width
        check = lambda p: not (0.5 <= p.x <= 0.6)
        assert not segment_valid(pose(), pose(x=2), check, step=0.05)

    def test_spacing_bound(self, rng):
        a = rng.uniform(-1, 1, 6)
        b = rng.uniform(-1, 1, 6)
        n = segment_checks(a, b, 0.05)
        pts = segment_points(a, b, n)
        d = distance_arrays(pts[:-1], pts[1:])
        assert np.all(d <= 0.05 + 1e-12)

    def test_rejection_monotone_under_refinement(self, rng):
        """A segment rejected at step d stays rejected at every finer step:
        the dyadic grids are nested."""
        for _ in range(50):
            a = rng.uniform(-1, 1, 6)
            b = rng.uniform(-1, 1, 6)
            lo = rng.uniform(0.3, 0.7, 6)
            blocked = lambda p: not np.all((p.as_array() >= lo) & (p.as_array() <= lo + 0.05))
            pa, pb = ExplorePose(*a), ExplorePose(*b)
            coarse = rng.uniform(0.05, 0.4)
            fine = coarse * rng.uniform(0.1, 1.0)
            if not segment_valid(pa, pb, blocked, step=coarse):
                assert not segment_valid(pa, pb, blocked, step=fine)


class TestRoute:
    def test_needs_two_vertices(self):
        with pytest.raises(ValueError):
            make_route([pose()])

    def test_length_and_projection(self):
        r = make_route([pose(), pose(x=1), pose(x=1, y=2)])
        assert r.length == pytest.approx(3.0)
        assert r.projected_xy == pytest.approx(np.array([[0, 0], [1, 0], [1, 2]]))

    def test_subdivide_spacing(self, rng):
        a = ExplorePose(*rng.uniform(-1, 1, 6))
        b = ExplorePose(*rng.uniform(-1, 1, 6))
        out = subdivide_path([a, b], 0.1)
        assert out[0] is a
        assert np.allclose(out[-1].as_array(), b.as_array())
        for u, v in zip(out[:-1], out[1:]):
            assert distance(u, v) <= 0.1 + 1e-9


class TestBounds:
    def test_volume(self):
        assert UNIT.volume6 == pytest.approx(1.0)
        wide = ExploreBounds(
            pos_min=(0, 0, 0), pos_max=(2, 3, 1),
            roll_range=(-0.5, 0.5), pitch_range=(0, 1), yaw_range=(0, 2 * math.pi),
        )
        assert wide.volume6 == pytest.approx(2 * 3 * 1 * 1 * 1 * 2 * math.pi)

    def test_contains(self):
        assert UNIT.contains(pose(0.5, 0.5, 0.5, 0.5, 0.5, 0.5))
        assert not UNIT.contains(pose(1.5, 0.5, 0.5, 0.5, 0.5, 0.5))

    def test_invalid_ranges(self):
        with pytest.raises(ValueError):
            ExploreBounds(pos_min=(0, 0, 0), pos_max=(-1, 1, 1),
                          roll_range=(0, 1), pitch_range=(0, 1), yaw_range=(0, 1))

    def test_wrap_pi(self):
        assert wrap_pi(3 * math.pi) == pytest.approx(-math.pi)
        assert wrap_pi(-math.pi) == pytest.approx(-math.pi)
        vals = wrap_pi(np.array([0.0, 2 * math.pi, -0.1]))
        assert vals == pytest.approx([0.0, 0.0, -0.1])
