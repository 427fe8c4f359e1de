"""Closed-form walking kinematics: radial scatterer trajectories for a walking subject.

Spatio-temporal gait structure follows the classical parametric average-walk
model (stride length and duty factor as functions of the velocity normalized
by thigh height), with every trajectory expressed as a smooth periodic closed
form so periodicity, symmetry and velocity bounds are analytically checkable.

Sign convention used throughout the package: the velocity channel is the
Doppler velocity -dR/dt, so receding scatterers have negative velocity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .cohort import SubjectProfile

HIP_HEIGHT_FRAC = 0.530       # thigh (hip) height as fraction of stature
STRIDE_COEF = 1.346           # relative cycle length = STRIDE_COEF * sqrt(RV)
DUTY_SLOPE, DUTY_OFFSET = 0.752, -0.143  # stance duration [s] vs cycle duration
STANCE_FRAC_MIN, STANCE_FRAC_MAX = 0.5, 0.75

# Swing velocity profile: fundamental plus second harmonic. The harmonic
# flattens the lobe so peak foot speed stays inside the +-6 m/s span.
SWING_HARMONIC = 0.35

# Horizontal swing weight per leg segment (fraction of the foot trajectory).
LEG_WEIGHTS = {"foot": 1.0, "lower_leg": 0.60, "thigh": 0.28}
ARM_WEIGHTS = {"forearm": 1.0, "upper_arm": 0.5}

# Oscillation amplitudes scale linearly with walking speed (units: seconds),
# so the standing limit is exactly static.
ARM_AMP_COEF = 0.125     # arm swing amplitude / speed
BOB_AMP_COEF = 0.015     # vertical torso bob amplitude / speed
SWAY_AMP_COEF = 0.006    # fore-aft torso sway amplitude / speed
CLEARANCE_COEF = 0.040   # peak foot clearance / speed

MIN_SLOW_TIME_RATE = 2000.0  # [Hz]; keeps a 6 m/s Doppler unambiguous at 12 mm wavelength


class Mode(str, Enum):
    TREADMILL = "treadmill"
    FREE_WALK = "free_walk"


class AliasingError(ValueError):
    pass


@dataclass(frozen=True)
class RadarPose:
    height: float = 1.0    # [m]
    standoff: float = 3.0  # [m]


@dataclass(frozen=True)
class GaitParameters:
    walking_speed: float      # [m/s]
    relative_velocity: float  # speed / thigh height [1/s]
    cycle_duration: float     # [s]
    cycle_length: float       # [m]
    stance_fraction: float
    swing_fraction: float

    @property
    def cadence(self) -> float:
        # half gaits per second
        return 2.0 / self.cycle_duration


@dataclass(frozen=True)
class GaitStyle:
    """Per-subject walking-style perturbation, stable across recording sessions."""
    cadence_scale: float = 1.0
    bob_scale: float = 1.0
    arm_scale: float = 1.0
    clearance_scale: float = 1.0
    limb_weight_scale: float = 1.0
    arm_phase_shift: float = 0.0  # [rad]

    @classmethod
    def sample(cls, rng: np.random.Generator, spread: float = 0.10,
               cadence_spread: float = 0.02) -> "GaitStyle":
        u = lambda s: float(rng.uniform(1.0 - s, 1.0 + s))
        return cls(cadence_scale=u(cadence_spread), bob_scale=u(spread),
                   arm_scale=u(spread), clearance_scale=u(spread),
                   limb_weight_scale=u(spread),
                   arm_phase_shift=float(rng.uniform(-0.3, 0.3)))


def gait_parameters(profile: SubjectProfile, walking_speed: float,
                    style: GaitStyle | None = None) -> GaitParameters:
    """Stride, cadence and duty factor from the normalized relative velocity."""
    if walking_speed <= 0:
        raise ValueError(f"walking_speed must be positive, got {walking_speed}")
    thigh_height = HIP_HEIGHT_FRAC * profile.height
    rv = walking_speed / thigh_height
    cycle_length = STRIDE_COEF * np.sqrt(rv) * thigh_height
    cycle_duration = cycle_length / walking_speed
    if style is not None:
        cycle_duration *= style.cadence_scale
        cycle_length = cycle_duration * walking_speed
    stance_seconds = DUTY_SLOPE * cycle_duration + DUTY_OFFSET
    stance = float(np.clip(stance_seconds / cycle_duration,
                           STANCE_FRAC_MIN, STANCE_FRAC_MAX))
    return GaitParameters(
        walking_speed=walking_speed,
        relative_velocity=rv,
        cycle_duration=float(cycle_duration),
        cycle_length=float(cycle_length),
        stance_fraction=stance,
        swing_fraction=1.0 - stance,
    )


def phase_offsets(params: GaitParameters) -> dict[str, float]:
    """Per-limb cycle phase [rad]; left limbs lead right by half a cycle,
    each arm swings with the contralateral leg."""
    left, right = np.pi, 0.0
    return {
        "thigh_left": left, "lower_leg_left": left, "foot_left": left,
        "thigh_right": right, "lower_leg_right": right, "foot_right": right,
        "upper_arm_left": right, "forearm_left": right,
        "upper_arm_right": left, "forearm_right": left,
        "torso": 0.0, "head": 0.0,
    }


@dataclass(frozen=True)
class TrajectorySet:
    names: tuple[str, ...]
    radial_distance: np.ndarray  # (n_scatterers, n_samples) [m]
    radial_velocity: np.ndarray  # (n_scatterers, n_samples) [m/s], -dR/dt
    t: np.ndarray
    sample_rate: float
    duration: float
    mode: Mode
    cycle_duration: float

    def scatterer(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        i = self.names.index(name)
        return self.radial_distance[i], self.radial_velocity[i]


def _swing_profile(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalized swing velocity shape f(w) on w in [0,1] and its integral F(w).

    f(0) = f(1) = 0 and f'(0) = f'(1) = 0, so position is C^2 across the
    stance/swing boundaries. mean(f) = (1 + SWING_HARMONIC) / 2.
    """
    b = SWING_HARMONIC
    f = 0.5 * (1.0 - np.cos(2 * np.pi * w)) + 0.5 * b * (1.0 - np.cos(4 * np.pi * w))
    F = 0.5 * (w - np.sin(2 * np.pi * w) / (2 * np.pi)) \
        + 0.5 * b * (w - np.sin(4 * np.pi * w) / (4 * np.pi))
    return f, F


def _foot_motion(t: np.ndarray, params: GaitParameters, phase_offset: float,
                 clearance: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Foot displacement/velocity relative to the body, plus lift and lift rate.

    Stance: moves with the belt at -v. Swing: returns forward with a smooth
    two-harmonic lobe; the cycle closes exactly (zero net drift).
    """
    v = params.walking_speed
    T = params.cycle_duration
    ds = params.stance_fraction
    u = np.mod(t / T + phase_offset, 1.0)
    in_swing = u > ds
    w = np.where(in_swing, (u - ds) / (1.0 - ds), 0.0)
    f, F = _swing_profile(w)
    mean_f = 0.5 * (1.0 + SWING_HARMONIC)
    amp = v / (mean_f * (1.0 - ds))
    t_swing = (1.0 - ds) * T

    x = -v * u * T + np.where(in_swing, amp * t_swing * F, 0.0) + 0.5 * v * ds * T
    xdot = -v + np.where(in_swing, amp * f, 0.0)

    q = np.where(in_swing, 0.5 * (1.0 - np.cos(2 * np.pi * w)), 0.0)
    lift = clearance * q**2
    qdot = np.where(in_swing, np.pi * np.sin(2 * np.pi * w) / t_swing, 0.0)
    liftdot = clearance * 2.0 * q * qdot
    return x, xdot, lift, liftdot


def simulate_trajectories(profile: SubjectProfile, params: GaitParameters,
                          mode: Mode | str = Mode.TREADMILL,
                          duration: float = 10.0,
                          sample_rate: float = 2000.0,
                          pose: RadarPose = RadarPose(),
                          style: GaitStyle | None = None) -> TrajectorySet:
    """Radial trajectories of all body-segment scatterer centers on the slow-time grid."""
    mode = Mode(mode)
    if duration <= 0:
        raise ValueError("duration must be positive")
    if sample_rate < MIN_SLOW_TIME_RATE:
        raise AliasingError(
            f"sample_rate {sample_rate} Hz is below the minimum {MIN_SLOW_TIME_RATE} Hz "
            f"needed to keep walking Doppler unambiguous"
        )
    style = style or GaitStyle()
    h = profile.height
    v = params.walking_speed
    T = params.cycle_duration
    omega = 2 * np.pi / T
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate

    if mode is Mode.TREADMILL:
        x_base = np.full(n, pose.standoff)
        v_base = np.zeros(n)
    else:
        x_base = pose.standoff + v * t
        v_base = np.full(n, v)

    bob = BOB_AMP_COEF * style.bob_scale * v
    sway = SWAY_AMP_COEF * v
    arm_amp = ARM_AMP_COEF * style.arm_scale * v
    clearance = CLEARANCE_COEF * style.clearance_scale * v

    trunk_dx = sway * np.sin(2 * omega * t)
    trunk_vx = sway * 2 * omega * np.cos(2 * omega * t)
    trunk_dz = bob * np.sin(2 * omega * t - np.pi / 2)
    trunk_vz = bob * 2 * omega * np.cos(2 * omega * t - np.pi / 2)

    phases = phase_offsets(params)
    foot_cache = {
        off: _foot_motion(t, params, off, clearance)
        for off in (0.0, 0.5)  # right, left
    }

    def base_name(name: str) -> str:
        for suffix in ("_left", "_right"):
            if name.endswith(suffix):
                return name[: -len(suffix)]
        return name

    def center_z(seg) -> float:
        base = base_name(seg.name)
        if base in ("torso", "head"):
            return seg.attach[2] + seg.length / 2.0
        if base == "foot":
            return seg.attach[2]
        return seg.attach[2] - seg.length / 2.0

    names, R_rows, v_rows = [], [], []
    for seg in profile.segments:
        base = base_name(seg.name)
        y = seg.attach[1]
        z0 = center_z(seg)
        if base in ("torso", "head"):
            x = x_base + trunk_dx
            xdot = v_base + trunk_vx
            z = z0 + trunk_dz
            zdot = trunk_vz
        elif base in LEG_WEIGHTS:
            off = phases[seg.name] / (2 * np.pi)
            fx, fxdot, lift, liftdot = foot_cache[off]
            w = LEG_WEIGHTS[base] * style.limb_weight_scale
            w = min(w, 1.0)
            x = x_base + w * fx
            xdot = v_base + w * fxdot
            if base == "foot":
                z = z0 + lift
                zdot = liftdot
            else:
                z = np.full(n, z0)
                zdot = np.zeros(n)
        else:  # arms
            ph = phases[seg.name] + style.arm_phase_shift
            w = ARM_WEIGHTS[base] * style.arm_scale
            x = x_base + w * arm_amp * np.sin(omega * t + ph)
            xdot = v_base + w * arm_amp * omega * np.cos(omega * t + ph)
            z = np.full(n, z0)
            zdot = np.zeros(n)

        dz = z - pose.height
        R = np.sqrt(x**2 + y**2 + dz**2)
        v_rad = -(x * xdot + dz * zdot) / R
        names.append(seg.name)
        R_rows.append(R)
        v_rows.append(v_rad)

    R_all = np.vstack(R_rows)
    v_all = np.vstack(v_rows)
    if not (np.all(np.isfinite(R_all)) and np.all(np.isfinite(v_all))):
        raise FloatingPointError("non-finite trajectory values")
    return TrajectorySet(tuple(names), R_all, v_all, t, sample_rate, duration,
                         mode, T)


def half_gait_boundaries(params: GaitParameters, duration: float
                         ) -> tuple[np.ndarray, list[str]]:
    """Ground-truth half-gait boundary times (double-support midpoints) and
    the swing side of each resulting interval."""
    ds = params.stance_fraction
    T = params.cycle_duration
    first = (ds - 0.5) / 2.0 * T
    times = np.arange(first, duration, T / 2.0)
    sides = ["left" if k % 2 == 0 else "right" for k in range(max(len(times) - 1, 0))]
    return times, sides


def dump_trajectories_csv(traj: TrajectorySet, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "scatterer_id", "R", "v"])
        for i, name in enumerate(traj.names):
            for k in range(len(traj.t)):
                writer.writerow([f"{traj.t[k]:.6f}", name,
                                 f"{traj.radial_distance[i, k]:.6f}",
                                 f"{traj.radial_velocity[i, k]:.6f}"])
