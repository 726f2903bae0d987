import numpy as np
import pytest

from kppfronts.errors import EmptyWindow, LevelNotBracketed, NeverCrossed
from kppfronts.levelset import (
    CrossingProbe,
    LevelTrace,
    crossing_time,
    level_positions,
    ratio_extrema,
)
from kppfronts.media import MediaProfile
from kppfronts.solver import SolverConfig, field_from_values, init_field, run


def make_field(values, dx=1.0, x_left=0.0):
    return field_from_values(0.0, x_left, dx, np.asarray(values, dtype=float))


class TestLevelPositions:
    def test_monotone_linear_profile(self):
        f = make_field([1.0, 0.75, 0.5, 0.25, 0.0], dx=0.25)
        xm, xp = level_positions(f, 0.5)
        assert xm == pytest.approx(0.5, abs=1e-12)
        assert xp == pytest.approx(0.5, abs=1e-12)

    def test_piecewise_example(self):
        f = make_field([0.8, 0.8, 0.1, 0.1, 0.6, 0.6, 0.0])
        xm, xp = level_positions(f, 0.5)
        assert xm == pytest.approx(1.0 + 0.3 / 0.7, abs=1e-9)
        assert xp == pytest.approx(5.0 + 0.1 / 0.6, abs=1e-9)
        assert xp - xm == pytest.approx(3.738095238095238, abs=1e-9)

    def test_flat_below_not_bracketed(self):
        with pytest.raises(LevelNotBracketed):
            level_positions(make_field([0.2, 0.2, 0.2]), 0.5)

    def test_flat_above_not_bracketed(self):
        with pytest.raises(LevelNotBracketed):
            level_positions(make_field([0.9, 0.9]), 0.5)

    def test_gamma_outside_unit_interval(self):
        with pytest.raises(LevelNotBracketed):
            level_positions(make_field([1.0, 0.0]), 1.5)

    def test_monotone_zero_width_random(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            vals = np.sort(rng.uniform(0, 1, size=50))[::-1]
            vals[0] = 1.0
            vals[-1] = 0.0
            f = make_field(vals, dx=0.1)
            for g in rng.uniform(0.05, 0.95, size=5):
                xm, xp = level_positions(f, g)
                assert abs(xp - xm) <= 0.1 + 1e-12

    def test_levels_move_left_as_gamma_rises(self):
        # sum-of-sigmoids fields: both crossings are nonincreasing in gamma
        rng = np.random.default_rng(8)
        x = np.linspace(0, 30, 600)
        for _ in range(10):
            u = np.zeros_like(x)
            for c in sorted(rng.uniform(4, 26, size=3)):
                u += np.where(x < c, 0.33, 0.33 * np.exp(-(x - c) * rng.uniform(0.5, 3)))
            u = np.clip(u, 0, 1)
            u[0] = 1.0
            u[-1] = 0.0
            f = make_field(u, dx=x[1] - x[0])
            gammas = np.sort(rng.uniform(0.05, 0.9, size=6))
            xms, xps = zip(*(level_positions(f, g) for g in gammas))
            assert all(b <= a + 1e-9 for a, b in zip(xps, xps[1:]))
            assert all(b <= a + 1e-9 for a, b in zip(xms, xms[1:]))

    def test_dx_refinement_stability(self):
        # positions move by <= dx when the grid is refined 2x on a resolved profile
        x1 = np.linspace(0, 10, 101)
        x2 = np.linspace(0, 10, 201)
        prof = lambda x: 1 / (1 + np.exp(3 * (x - 5)))
        f1 = make_field(prof(x1), dx=x1[1] - x1[0])
        f2 = make_field(prof(x2), dx=x2[1] - x2[0])
        for g in (0.2, 0.5, 0.8):
            a = level_positions(f1, g)
            b = level_positions(f2, g)
            assert abs(a[0] - b[0]) <= 0.1
            assert abs(a[1] - b[1]) <= 0.1


class TestCrossingTime:
    def test_homogeneous_probe_pilot(self):
        # level 0.5 front passes y=40 around y/2 + (3/4) ln y + O(1)
        cfg = SolverConfig()
        probe = CrossingProbe(40.0)
        run(init_field(cfg, (-20.0, 30.0)), cfg, MediaProfile.homogeneous(1.0), 30.0,
            observers=[probe], sample_interval=0.25)
        t = probe.crossing(0.5)
        assert 21.0 <= t <= 25.0

    def test_probe_left_of_origin_returns_zero(self):
        cfg = SolverConfig()
        probe = CrossingProbe(-5.0)
        run(init_field(cfg, (-20.0, 30.0)), cfg, MediaProfile.homogeneous(1.0), 1.0,
            observers=[probe], sample_interval=0.25)
        assert probe.crossing(0.5) == 0.0

    def test_never_crossed(self):
        with pytest.raises(NeverCrossed):
            crossing_time([0.0, 1.0, 2.0], [0.0, 0.1, 0.2], 0.9999)

    def test_interpolation(self):
        t = crossing_time([0.0, 1.0, 2.0], [0.0, 0.2, 0.6], 0.4)
        assert t == pytest.approx(1.5)


class TestRatioExtrema:
    def test_zero_width(self):
        tr = LevelTrace(0.5)
        for t in np.arange(0.5, 10.5, 0.5):
            tr.append(t, 3.0, 3.0)
        r = ratio_extrema(tr, 0.0)
        assert r.max_ratio == 0.0
        assert r.min_ratio == 0.0
        assert r.argmax_t == 0.5
        assert r.argmin_t == 0.5

    def test_synthetic_ramp(self):
        tr = LevelTrace(0.5)
        for t in np.arange(1.0, 30.0, 1.0):
            w = t if 10 <= t <= 20 else 0.0
            tr.append(t, 0.0, w)
        r = ratio_extrema(tr, 0.0)
        assert r.max_ratio == pytest.approx(1.0)
        assert 10 <= r.argmax_t <= 20
        assert r.min_ratio == 0.0

    def test_t_min_window(self):
        tr = LevelTrace(0.5)
        tr.append(1.0, 0.0, 10.0)
        tr.append(5.0, 0.0, 5.0)
        r = ratio_extrema(tr, 2.0)
        assert r.max_ratio == pytest.approx(1.0)
        assert r.argmax_t == 5.0

    def test_empty_window(self):
        tr = LevelTrace(0.5)
        tr.append(1.0, 0.0, 1.0)
        with pytest.raises(EmptyWindow):
            ratio_extrema(tr, 10.0)


def test_trace_rows_schema():
    tr = LevelTrace(0.25)
    tr.append(1.0, 2.0, 5.0)
    rows = list(tr.rows())
    assert rows == [(0.25, 1.0, 2.0, 5.0, 3.0)]
    assert tr.width_at(1.0) == 3.0
