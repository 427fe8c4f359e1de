"""Simulated subject cohort: body characteristics and per-segment radar cross sections."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# Cohort bounds for the treadmill study preset.
HEIGHT_MIN = 1.62   # [m]
HEIGHT_MAX = 1.95   # [m]
WEIGHT_MIN = 54.0   # [kg]
WEIGHT_MAX = 115.0  # [kg]

# Cohort mean BMI; segment RCS multipliers are anchored here (multiplier == 1).
REFERENCE_BMI = 24.0

# The 22 class labels of the study cohort, sorted ascending.
PAPER_BMI_VALUES = (
    18.59, 19.37, 19.93, 20.24, 20.58, 21.05, 21.93, 22.35, 22.75, 22.92,
    23.06, 23.67, 23.77, 24.80, 25.00, 25.15, 25.76, 26.64, 27.17, 28.73,
    29.92, 37.55,
)

# Fixed ids of the 5 female subjects in the preset (lower-BMI half of the cohort).
PAPER_FEMALE_IDS = frozenset({1, 3, 5, 7, 9})

# Anthropometric segment table, Drillis-Contini fractions of stature.
# (length_frac, width_semiaxis_frac, depth_semiaxis_frac, attach_height_frac, lateral_frac)
_SEGMENT_TABLE = {
    "torso":     (0.288, 0.100, 0.055, 0.530, 0.0),
    "head":      (0.130, 0.040, 0.040, 0.870, 0.0),
    "upper_arm": (0.186, 0.023, 0.023, 0.818, 0.129),
    "forearm":   (0.146, 0.018, 0.018, 0.632, 0.129),
    "thigh":     (0.245, 0.035, 0.035, 0.530, 0.0955),
    "lower_leg": (0.246, 0.025, 0.025, 0.285, 0.0955),
    "foot":      (0.152, 0.015, 0.015, 0.039, 0.0955),
}

_BILATERAL = ("upper_arm", "forearm", "thigh", "lower_leg", "foot")


class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"


class CohortConstraintError(ValueError):
    """Raised when a cohort spec cannot be satisfied within the height/weight bounds."""


def bmi(weight: float, height: float) -> float:
    """Body mass index, weight / height**2 [kg/m^2]."""
    if weight <= 0 or height <= 0:
        raise ValueError(f"weight and height must be positive, got ({weight}, {height})")
    return weight / height**2


@dataclass(frozen=True)
class BodySegment:
    name: str           # e.g. "thigh_left"
    length: float       # [m]
    rcs: float          # [m^2]
    attach: tuple[float, float, float]  # (x fore-aft, y lateral, z up) [m], neutral stance


@dataclass(frozen=True)
class BodySegmentSet:
    segments: tuple[BodySegment, ...]

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, name: str) -> BodySegment:
        for seg in self.segments:
            if seg.name == name:
                return seg
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(seg.name for seg in self.segments)

    @property
    def total_rcs(self) -> float:
        return float(sum(seg.rcs for seg in self.segments))


@dataclass(frozen=True)
class SubjectProfile:
    id: int
    height: float   # [m]
    weight: float   # [kg]
    gender: Gender
    rcs_bmi_exponent: float = 1.0
    segments: BodySegmentSet = field(init=False, repr=False)

    def __post_init__(self):
        if self.height <= 0 or self.weight <= 0:
            raise ValueError("height and weight must be positive")
        object.__setattr__(self, "segments", derive_segments(self))

    @property
    def bmi(self) -> float:
        # Always recomputed from weight and height, never stored.
        return bmi(self.weight, self.height)


def _ellipsoid_rcs(length: float, width: float, depth: float) -> float:
    # High-frequency ellipsoid RCS pi*a^2*b^2/c^2 with the look direction along
    # the depth semi-axis (radial aspect, horizontal look at an upright body).
    a = length / 2.0
    return np.pi * a**2 * width**2 / depth**2


def derive_segments(profile: SubjectProfile) -> BodySegmentSet:
    """Segment lengths from stature fractions; RCS from ellipsoid baselines scaled by BMI."""
    h = profile.height
    multiplier = (profile.bmi / REFERENCE_BMI) ** profile.rcs_bmi_exponent
    segments = []
    for base, (lf, wf, df, zf, yf) in _SEGMENT_TABLE.items():
        length = lf * h
        sigma = _ellipsoid_rcs(length, wf * h, df * h) * multiplier
        if base in _BILATERAL:
            for side, sign in (("left", 1.0), ("right", -1.0)):
                segments.append(BodySegment(f"{base}_{side}", length, sigma,
                                            (0.0, sign * yf * h, zf * h)))
        else:
            segments.append(BodySegment(base, length, sigma, (0.0, 0.0, zf * h)))
    return BodySegmentSet(tuple(segments))


@dataclass(frozen=True)
class CohortSpec:
    count: int
    female_count: int
    bmis: tuple[float, ...] | None = None       # explicit BMI list, len == count
    bmi_range: tuple[float, float] | None = None  # else sampled uniformly
    seed: int = 0
    rcs_bmi_exponent: float = 1.0
    # Preset keeps heights near the low end of each feasible window so cohort
    # cadence at 1.6 m/s centers on the study's 0.5 s half gait.
    height_window: float = 0.10

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 0 <= self.female_count <= self.count:
            raise ValueError("female_count must be within [0, count]")
        if self.bmis is not None and len(self.bmis) != self.count:
            raise ValueError("bmis length must equal count")

    @classmethod
    def paper_preset(cls, seed: int = 0) -> "CohortSpec":
        return cls(count=22, female_count=5, bmis=PAPER_BMI_VALUES, seed=seed)


def _height_bounds(target_bmi: float) -> tuple[float, float]:
    lo = max(HEIGHT_MIN, np.sqrt(WEIGHT_MIN / target_bmi))
    hi = min(HEIGHT_MAX, np.sqrt(WEIGHT_MAX / target_bmi))
    if lo > hi:
        raise CohortConstraintError(
            f"BMI {target_bmi} unreachable: requires height in "
            f"[{np.sqrt(WEIGHT_MIN / target_bmi):.3f}, {np.sqrt(WEIGHT_MAX / target_bmi):.3f}] m "
            f"but bounds are [{HEIGHT_MIN}, {HEIGHT_MAX}] m with weight in "
            f"[{WEIGHT_MIN}, {WEIGHT_MAX}] kg"
        )
    return lo, hi


def generate_cohort(spec: CohortSpec) -> list[SubjectProfile]:
    """Deterministic cohort for a given (spec, seed); heights solved per target BMI."""
    rng = np.random.default_rng(spec.seed)
    if spec.bmis is not None:
        bmis = list(spec.bmis)
    else:
        lo, hi = spec.bmi_range if spec.bmi_range else (18.5, 30.0)
        bmis = sorted(rng.uniform(lo, hi, size=spec.count).tolist())

    if spec.bmis is PAPER_BMI_VALUES or tuple(bmis) == PAPER_BMI_VALUES:
        female_ids = set(PAPER_FEMALE_IDS)
    else:
        female_ids = set(rng.choice(spec.count, size=spec.female_count,
                                    replace=False).tolist())

    profiles = []
    for i, b in enumerate(bmis):
        lo, hi = _height_bounds(b)
        height = float(lo + rng.uniform(0.0, 1.0) * min(spec.height_window, hi - lo))
        weight = b * height**2
        gender = Gender.FEMALE if i in female_ids else Gender.MALE
        profiles.append(SubjectProfile(id=i, height=height, weight=weight,
                                       gender=gender,
                                       rcs_bmi_exponent=spec.rcs_bmi_exponent))
    return profiles


def cohort_to_json(profiles: list[SubjectProfile], spec: CohortSpec) -> str:
    doc = {
        "seed": spec.seed,
        "rcs_bmi_exponent": spec.rcs_bmi_exponent,
        "subjects": [
            {
                "id": p.id,
                "height_m": round(p.height, 6),
                "weight_kg": round(p.weight, 6),
                "bmi": round(p.bmi, 6),
                "gender": p.gender.value,
            }
            for p in profiles
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def cohort_from_json(text: str) -> list[SubjectProfile]:
    doc = json.loads(text)
    gamma = doc.get("rcs_bmi_exponent", 1.0)
    return [
        SubjectProfile(id=s["id"], height=s["height_m"], weight=s["weight_kg"],
                       gender=Gender(s["gender"]), rcs_bmi_exponent=gamma)
        for s in doc["subjects"]
    ]
