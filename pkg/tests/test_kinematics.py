import numpy as np
import pytest

from gaitradar.cohort import Gender, SubjectProfile
from gaitradar.kinematics import (
    AliasingError, GaitStyle, Mode, RadarPose, dump_trajectories_csv,
    gait_parameters, half_gait_boundaries, phase_offsets, simulate_trajectories,
)


@pytest.fixture(scope="module")
def subject():
    return SubjectProfile(id=0, height=1.8, weight=77.76, gender=Gender.MALE)


@pytest.fixture(scope="module")
def params(subject):
    return gait_parameters(subject, 1.6)


@pytest.fixture(scope="module")
def treadmill(subject, params):
    return simulate_trajectories(subject, params, Mode.TREADMILL, duration=10.0)


class TestGaitParameters:
    def test_half_gait_near_half_second(self, params):
        half = params.cycle_duration / 2.0
        assert 0.4 <= half <= 0.6  # 0.5 s +- 20%

    def test_fractions_sum_to_one(self, params):
        assert params.stance_fraction + params.swing_fraction == pytest.approx(1.0)

    def test_stance_fraction_near_sixty_percent(self, params):
        assert 0.55 <= params.stance_fraction <= 0.65

    def test_cadence_definition(self, params):
        assert params.cadence == pytest.approx(2.0 / params.cycle_duration)

    def test_rejects_non_positive_speed(self, subject):
        with pytest.raises(ValueError):
            gait_parameters(subject, 0.0)
        with pytest.raises(ValueError):
            gait_parameters(subject, -1.0)


class TestPhaseOffsets:
    def test_feet_half_cycle_apart(self, params):
        phases = phase_offsets(params)
        assert phases["foot_left"] - phases["foot_right"] == pytest.approx(np.pi)

    def test_contralateral_arm_leg_coordination(self, params):
        phases = phase_offsets(params)
        assert phases["forearm_left"] == phases["foot_right"]
        assert phases["forearm_right"] == phases["foot_left"]

    def test_full_cycle_shift_is_identity(self, subject, params):
        # shifting all phases by a full cycle = evaluating one period later
        a = simulate_trajectories(subject, params, duration=3 * params.cycle_duration)
        T = params.cycle_duration
        for i in range(len(a.names)):
            r = a.radial_distance[i]
            shifted = np.interp(a.t[: len(a.t) // 2] + T, a.t, r)
            np.testing.assert_allclose(shifted, r[: len(a.t) // 2], atol=1e-5)


class TestTrajectories:
    def test_standing_limit_is_static(self, subject):
        params = gait_parameters(subject, 1e-12)
        traj = simulate_trajectories(subject, params, duration=2.0)
        assert np.abs(traj.radial_velocity).max() < 1e-9

    def test_treadmill_torso_zero_mean_velocity(self, subject, params, treadmill):
        R, v = treadmill.scatterer("torso")
        # average over whole cycles only
        n = int(np.floor(treadmill.duration / params.cycle_duration)
                * params.cycle_duration * treadmill.sample_rate)
        assert abs(v[:n].mean()) <= 0.02

    def test_free_walk_torso_recedes_at_walking_speed(self, subject, params):
        traj = simulate_trajectories(subject, params, Mode.FREE_WALK, duration=10.0)
        _, v = traj.scatterer("torso")
        assert v.mean() == pytest.approx(-1.6, rel=0.05)

    def test_foot_peak_speed_within_doppler_span(self, treadmill):
        _, v = treadmill.scatterer("foot_left")
        peak = np.abs(v).max()
        assert 2 * 1.6 <= peak <= 6.0

    def test_periodicity_after_first_cycle(self, subject, params, treadmill):
        T = params.cycle_duration
        t = treadmill.t
        sel = (t >= T) & (t + T <= t[-1])
        for i in range(len(treadmill.names)):
            r = treadmill.radial_distance[i]
            shifted = np.interp(t[sel] + T, t, r)
            np.testing.assert_allclose(shifted, r[sel], atol=1e-5)

    def test_half_cycle_mirror_symmetry(self, subject, params, treadmill):
        half = params.cycle_duration / 2.0
        t = treadmill.t
        sel = t + half <= t[-1]
        for name in treadmill.names:
            if not name.endswith("_left"):
                continue
            mirror = name.replace("_left", "_right")
            r_left, _ = treadmill.scatterer(name)
            r_right, _ = treadmill.scatterer(mirror)
            shifted = np.interp(t[sel] + half, t, r_right)
            np.testing.assert_allclose(shifted, r_left[sel], atol=1e-5)

    def test_velocity_matches_position_derivative(self, treadmill):
        dt = 1.0 / treadmill.sample_rate
        R = treadmill.radial_distance
        v = treadmill.radial_velocity
        numeric = -(R[:, 2:] - R[:, :-2]) / (2 * dt)
        err = np.abs(numeric - v[:, 1:-1])
        tol = np.maximum(1e-3, 1e-3 * np.abs(v[:, 1:-1]))
        assert np.all(err <= tol)

    def test_swings_alternate_between_feet(self, params, treadmill):
        _, v_l = treadmill.scatterer("foot_left")
        _, v_r = treadmill.scatterer("foot_right")
        T = params.cycle_duration
        fs = treadmill.sample_rate
        # locate the fastest-receding instant within each cycle
        n_cycles = int(treadmill.duration / T)
        for k in range(1, n_cycles - 1):
            cyc = slice(int(k * T * fs), int((k + 1) * T * fs))
            t_l = treadmill.t[cyc][np.argmin(v_l[cyc])]
            t_r = treadmill.t[cyc][np.argmin(v_r[cyc])]
            assert abs(t_l - t_r) == pytest.approx(T / 2.0, abs=0.05 * T)

    def test_velocity_bounded_across_cohort(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            h = rng.uniform(1.62, 1.95)
            p = SubjectProfile(id=0, height=h,
                               weight=rng.uniform(20, 35) * h**2,
                               gender=Gender.MALE)
            speed = rng.uniform(0.5, 1.6)
            style = GaitStyle.sample(rng)
            params = gait_parameters(p, speed, style)
            traj = simulate_trajectories(p, params, duration=4.0, style=style)
            assert np.abs(traj.radial_velocity).max() <= 6.0

    def test_rejects_low_sample_rate(self, subject, params):
        with pytest.raises(AliasingError, match="2000"):
            simulate_trajectories(subject, params, duration=1.0, sample_rate=500.0)

    def test_rejects_unknown_mode(self, subject, params):
        with pytest.raises(ValueError):
            simulate_trajectories(subject, params, mode="crawl", duration=1.0)

    def test_rejects_non_positive_duration(self, subject, params):
        with pytest.raises(ValueError):
            simulate_trajectories(subject, params, duration=0.0)


def test_ground_truth_boundaries_spacing(params):
    times, sides = half_gait_boundaries(params, 10.0)
    assert np.allclose(np.diff(times), params.cycle_duration / 2.0)
    assert sides[:4] == ["left", "right", "left", "right"]


def test_csv_dump(tmp_path, subject, params):
    traj = simulate_trajectories(subject, params, duration=0.05)
    path = tmp_path / "traj.csv"
    dump_trajectories_csv(traj, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "t,scatterer_id,R,v"
    assert len(lines) == 1 + len(traj.names) * len(traj.t)
