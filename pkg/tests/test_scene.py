from __future__ import annotations

import math

import numpy as np
import pytest

from detpipe.scene import (
    SceneConfig,
    Trajectory,
    TrajectoryLabel,
    gen_random,
    gen_sinusoid,
    read_trajectory_csv,
    render_frame,
    synth_video,
    write_trajectory_csv,
)


class TestTrajectoryType:
    def test_rejects_nonfinite_and_out_of_range(self):
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, np.nan]), 30.0)
        with pytest.raises(ValueError):
            Trajectory(np.array([181.0]), 30.0)
        with pytest.raises(ValueError):
            Trajectory(np.array([]), 30.0)

    def test_with_label(self):
        t = Trajectory(np.zeros(3), 30.0)
        assert t.with_label(TrajectoryLabel.MEASURED).label is TrajectoryLabel.MEASURED


class TestSinusoid:
    def test_starts_at_zero(self):
        t = gen_sinusoid(150, 20.0, 0.01)
        assert t.angles[0] == 0.0

    def test_quarter_period_hits_amplitude(self):
        # t = 1/(4 gamma) = 25 -> sin(pi/2) = 1
        t = gen_sinusoid(150, 20.0, 0.01)
        assert t.angles[25] == pytest.approx(20.0, abs=1e-12)

    def test_periodicity_when_integer_period(self):
        t = gen_sinusoid(150, 20.0, 0.01)  # period 100 frames
        assert t.angles[7] == pytest.approx(t.angles[107], abs=1e-9)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            gen_sinusoid(0, 20.0, 0.01)
        with pytest.raises(ValueError):
            gen_sinusoid(10, 0.0, 0.01)
        with pytest.raises(ValueError):
            gen_sinusoid(10, 200.0, 0.01)


class TestRandomTrajectory:
    def test_zero_amplitude_all_zero(self):
        t = gen_random(150, 0.0, seed=3)
        assert np.all(t.angles == 0.0)

    def test_deterministic_per_seed(self):
        a = gen_random(150, 20.0, seed=11)
        b = gen_random(150, 20.0, seed=11)
        assert np.array_equal(a.angles, b.angles)
        c = gen_random(150, 20.0, seed=12)
        assert not np.array_equal(a.angles, c.angles)

    def test_waypoints_equal_raw_uniform_draws(self):
        # independent re-draw of the seeded sequence
        frames, every, seed = 150, 30, 7
        n_segments = math.ceil((frames - 1) / every)
        expected = np.random.default_rng(seed).uniform(-20.0, 20.0, n_segments + 1)
        t = gen_random(frames, 20.0, waypoint_every=every, seed=seed)
        for j in range(n_segments):  # waypoint at frame 150 is outside range
            assert t.angles[j * every] == pytest.approx(expected[j], abs=1e-12)

    def test_bounded_by_amplitude(self):
        t = gen_random(150, 20.0, seed=5)
        assert np.all(np.abs(t.angles) <= 20.0)

    def test_c1_at_waypoints(self):
        # smoothstep s(u) = 3u^2 - 2u^3 has zero slope at segment ends, so the
        # one-frame increments around a waypoint must match the analytic value
        # delta * s(1/every), which itself tends to zero slope
        every = 30
        t = gen_random(301, 20.0, waypoint_every=every, seed=9)
        u = 1.0 / every
        s_u = 3 * u * u - 2 * u**3
        for j in range(1, 9):
            k = j * every
            delta_right = t.angles[(j + 1) * every] - t.angles[k] if (j + 1) * every < 301 else None
            right = t.angles[k + 1] - t.angles[k]
            if delta_right is not None:
                assert right == pytest.approx(delta_right * s_u, abs=1e-6)
            # slope magnitude bound: |delta| <= 40, so |fd slope| <= 40*s(u)
            assert abs(right) <= 40 * s_u + 1e-9
            assert abs(t.angles[k] - t.angles[k - 1]) <= 40 * s_u + 1e-9


class TestRenderer:
    def test_angle_zero_dot_right_of_center(self):
        cfg = SceneConfig()
        f = render_frame(cfg, 0.0)
        # dot color dominates right of center on the horizontal axis
        x_probe = int(64 + cfg.dot_offset * cfg.width)
        assert tuple(f.pixels[64, x_probe]) == cfg.dot_color
        assert tuple(f.pixels[64, 64]) == cfg.disk_color

    def test_quarter_turn_symmetry(self):
        from detpipe.pose import detect_marker

        cfg = SceneConfig()
        d0 = detect_marker(render_frame(cfg, 0.0)).dot_centroid
        d90 = detect_marker(render_frame(cfg, 90.0)).dot_centroid
        cx, cy = cfg.width / 2, cfg.height / 2
        rx, ry = cx + (d0[1] - cy), cy - (d0[0] - cx)
        assert abs(rx - d90[0]) <= 0.5 and abs(ry - d90[1]) <= 0.5

    def test_render_estimate_loop_within_one_degree(self):
        from detpipe.pose import detect_marker, estimate_angle

        cfg = SceneConfig()
        for theta in np.arange(0.0, 360.0, 360.0 / 64):
            theta = ((theta + 180) % 360) - 180
            obs = detect_marker(render_frame(cfg, theta))
            assert obs.present
            err = abs((estimate_angle(obs) - theta + 180) % 360 - 180)
            assert err <= 1.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SceneConfig(disk_radius=0.5)
        with pytest.raises(ValueError):
            SceneConfig(dot_offset=0.3, dot_radius=0.1, disk_radius=0.35)


class TestSynthVideo:
    def test_five_second_clip_is_150_frames(self):
        traj = gen_sinusoid(150, 20.0, 0.01, fps=30.0)
        clip = synth_video(SceneConfig(), traj)
        assert len(clip) == 150
        assert clip.fps == 30.0
        assert len(clip) / clip.fps == pytest.approx(5.0)

    def test_constant_trajectory_identical_frames(self):
        traj = Trajectory(np.full(5, 12.5), 30.0)
        clip = synth_video(SceneConfig(), traj)
        for f in clip.frames[1:]:
            assert np.array_equal(f.pixels, clip.frames[0].pixels)

    def test_frame_count_matches_trajectory(self):
        traj = gen_random(37, 20.0, seed=1)
        assert len(synth_video(SceneConfig(), traj)) == 37


class TestTrajectoryCsv:
    def test_round_trip(self, tmp_path):
        t = gen_sinusoid(20, 20.0, 0.01)
        path = tmp_path / "t.csv"
        write_trajectory_csv(t, path)
        back, present = read_trajectory_csv(path)
        assert np.allclose(back.angles, t.angles, atol=1e-6)
        assert back.label is TrajectoryLabel.GROUND_TRUTH
        assert present.all()

    def test_gaps_round_trip(self, tmp_path):
        t = Trajectory(np.arange(5, dtype=float), 30.0, TrajectoryLabel.MEASURED)
        present = np.array([True, True, False, True, False])
        path = tmp_path / "m.csv"
        write_trajectory_csv(t, path, present)
        back, back_present = read_trajectory_csv(path)
        assert np.array_equal(back_present, present)
        assert back.angles[3] == 3.0 and back.angles[2] == 0.0

    def test_header_schema(self, tmp_path):
        path = tmp_path / "t.csv"
        write_trajectory_csv(gen_sinusoid(3, 20.0, 0.01), path)
        assert path.read_text().splitlines()[0] == "frame,angle_deg,label"
