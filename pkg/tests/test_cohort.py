import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaitradar.cohort import (
    PAPER_BMI_VALUES, CohortConstraintError, CohortSpec, Gender, SubjectProfile,
    bmi, cohort_from_json, cohort_to_json, generate_cohort,
)


class TestBmi:
    def test_direct_definition(self):
        assert bmi(80, 1.8) == pytest.approx(24.691, abs=1e-3)

    def test_cohort_minimum_round_trip(self):
        # weight solving weight/height^2 = 18.59 at 54 kg
        height = np.sqrt(54.0 / 18.59)
        assert bmi(54.0, height) == pytest.approx(18.59, abs=1e-9)

    def test_cohort_maximum_is_heaviest_class(self):
        assert max(PAPER_BMI_VALUES) == 37.55

    @pytest.mark.parametrize("w,h", [(0, 1.8), (-5, 1.8), (70, 0), (70, -1)])
    def test_non_positive_inputs_rejected(self, w, h):
        with pytest.raises(ValueError):
            bmi(w, h)

    @given(w=st.floats(30, 200), h=st.floats(1.0, 2.3))
    def test_inverse_consistency(self, w, h):
        assert bmi(w, h) * h**2 == pytest.approx(w, rel=1e-12)


class TestGenerateCohort:
    def test_paper_preset_bmis_and_split(self):
        profiles = generate_cohort(CohortSpec.paper_preset(seed=3))
        assert len(profiles) == 22
        assert [round(p.bmi, 2) for p in profiles] == list(PAPER_BMI_VALUES)
        genders = [p.gender for p in profiles]
        assert genders.count(Gender.FEMALE) == 5
        assert genders.count(Gender.MALE) == 17
        for p in profiles:
            assert 1.62 <= p.height <= 1.95
            assert 54 <= p.weight <= 115
        assert len({p.id for p in profiles}) == 22

    def test_deterministic_per_seed(self):
        a = generate_cohort(CohortSpec.paper_preset(seed=11))
        b = generate_cohort(CohortSpec.paper_preset(seed=11))
        assert a == b
        c = generate_cohort(CohortSpec.paper_preset(seed=12))
        assert [p.height for p in a] != [p.height for p in c]

    def test_unreachable_bmi_names_bound(self):
        spec = CohortSpec(count=1, female_count=0, bmis=(50.0,), seed=0)
        with pytest.raises(CohortConstraintError, match="unreachable"):
            generate_cohort(spec)

    def test_sampled_range_cohort(self):
        spec = CohortSpec(count=10, female_count=4, bmi_range=(19.0, 28.0), seed=5)
        profiles = generate_cohort(spec)
        assert len(profiles) == 10
        assert sum(p.gender is Gender.FEMALE for p in profiles) == 4
        assert all(19.0 <= p.bmi <= 28.0 for p in profiles)

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            CohortSpec(count=0, female_count=0)
        with pytest.raises(ValueError):
            CohortSpec(count=2, female_count=3)
        with pytest.raises(ValueError):
            CohortSpec(count=2, female_count=0, bmis=(20.0,))


class TestSegments:
    def test_thigh_length_is_stature_fraction(self):
        p = SubjectProfile(id=0, height=1.8, weight=77.76, gender=Gender.MALE)
        assert p.segments["thigh_left"].length == pytest.approx(0.245 * 1.8)

    def test_leg_segments_shorter_than_height(self):
        p = SubjectProfile(id=0, height=1.7, weight=65.0, gender=Gender.MALE)
        legs = sum(p.segments[f"{s}_left"].length
                   for s in ("thigh", "lower_leg", "foot"))
        assert legs < p.height

    def test_rcs_monotone_in_bmi(self):
        h = 1.75
        lo = SubjectProfile(id=0, height=h, weight=18.59 * h**2, gender=Gender.MALE)
        hi = SubjectProfile(id=1, height=h, weight=37.55 * h**2, gender=Gender.MALE)
        for seg_lo, seg_hi in zip(lo.segments, hi.segments):
            assert seg_hi.rcs > seg_lo.rcs

    def test_reference_bmi_multiplier_is_one(self):
        h = 1.8
        ref = SubjectProfile(id=0, height=h, weight=24.0 * h**2, gender=Gender.MALE)
        # gamma = 0 removes the BMI coupling entirely; at BMI 24 both agree
        flat = SubjectProfile(id=0, height=h, weight=24.0 * h**2,
                              gender=Gender.MALE, rcs_bmi_exponent=0.0)
        for a, b in zip(ref.segments, flat.segments):
            assert a.rcs == pytest.approx(b.rcs, rel=1e-12)

    def test_all_rcs_positive(self):
        p = SubjectProfile(id=0, height=1.62, weight=54.0, gender=Gender.FEMALE)
        assert all(seg.rcs > 0 for seg in p.segments)

    @given(bmi_a=st.floats(16, 40), bmi_b=st.floats(16, 40),
           h=st.floats(1.5, 2.0))
    def test_total_rcs_strictly_monotone(self, bmi_a, bmi_b, h):
        a = SubjectProfile(id=0, height=h, weight=bmi_a * h**2, gender=Gender.MALE)
        b = SubjectProfile(id=1, height=h, weight=bmi_b * h**2, gender=Gender.MALE)
        if bmi_a < bmi_b:
            assert a.segments.total_rcs < b.segments.total_rcs
        elif bmi_a > bmi_b:
            assert a.segments.total_rcs > b.segments.total_rcs


def test_json_round_trip():
    spec = CohortSpec.paper_preset(seed=2)
    profiles = generate_cohort(spec)
    text = cohort_to_json(profiles, spec)
    doc = json.loads(text)
    assert len(doc["subjects"]) == 22
    restored = cohort_from_json(text)
    for orig, back in zip(profiles, restored):
        assert back.id == orig.id
        assert back.height == pytest.approx(orig.height, abs=1e-6)
        assert back.bmi == pytest.approx(orig.bmi, abs=1e-4)
        assert back.gender == orig.gender
