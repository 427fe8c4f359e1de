"""End-to-end dataset generation, manifest persistence, splits and the k-NN baseline."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import cv2
import numpy as np

from . import kinematics, radar, segmentation, spectrogram
from .cohort import CohortSpec, SubjectProfile, cohort_to_json, generate_cohort
from .kinematics import GaitStyle, RadarPose
from .radar import RadarConfig

DEFAULT_DURATION = 180.0  # [s] acquisition time per subject
DEFAULT_SPEED = 1.6       # [m/s] treadmill speed


@dataclass(frozen=True)
class Condition:
    range_m: float
    reference_snr_db: float


@dataclass(frozen=True)
class ImageRecord:
    path: str              # relative to the manifest directory
    subject_id: int
    bmi: float
    swing_side: str
    snr_db: float
    range_m: float
    split: str             # "train" | "test"


@dataclass(frozen=True)
class DatasetManifest:
    dataset_id: str
    seed: int
    config: dict
    records: tuple[ImageRecord, ...]

    def to_json(self) -> str:
        doc = {
            "dataset_id": self.dataset_id,
            "seed": self.seed,
            "config": self.config,
            "records": [
                {"path": r.path, "subject_id": r.subject_id, "bmi": r.bmi,
                 "swing_side": r.swing_side, "snr_db": r.snr_db,
                 "range_m": r.range_m, "split": r.split}
                for r in self.records
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        doc = json.loads(text)
        records = tuple(
            ImageRecord(path=r["path"], subject_id=r["subject_id"], bmi=r["bmi"],
                        swing_side=r["swing_side"], snr_db=r["snr_db"],
                        range_m=r["range_m"], split=r["split"])
            for r in doc["records"]
        )
        return cls(dataset_id=doc["dataset_id"], seed=doc["seed"],
                   config=doc["config"], records=records)


class PipelineError(RuntimeError):
    pass


def subject_style(cohort_seed: int, subject_id: int) -> GaitStyle:
    """Walking-style jitter is a pure function of (cohort seed, subject id), so
    both recording sessions of a subject share the same style."""
    rng = np.random.default_rng([cohort_seed, subject_id, 0x57E1])
    return GaitStyle.sample(rng)


def _generate_subject_images(profile: SubjectProfile, cohort_seed: int,
                             condition: Condition, cond_index: int,
                             out_dir: Path, image_subdir: str, seed: int,
                             duration: float, speed: float,
                             split: str) -> list[ImageRecord]:
    cfg = RadarConfig(reference_snr_db=condition.reference_snr_db)
    style = subject_style(cohort_seed, profile.id)
    params = kinematics.gait_parameters(profile, speed, style)
    traj = kinematics.simulate_trajectories(
        profile, params, kinematics.Mode.TREADMILL, duration=duration,
        sample_rate=cfg.slow_time_rate,
        pose=RadarPose(height=1.0, standoff=cfg.reference_range), style=style)
    clean = radar.synthesize(traj, profile.segments, cfg, subject_id=profile.id)
    noise_seed = int(np.random.default_rng(
        [seed, profile.id, cond_index]).integers(2**31))
    noisy = radar.apply_snr(clean, condition.range_m, cfg, seed=noise_seed)
    spec = spectrogram.micro_doppler(noisy, cfg)
    seg = segmentation.segment(spec)
    spans = segmentation.slice_half_gaits(
        spec, seg, first_side=_first_side(params, spec, seg))

    img_dir = out_dir / image_subdir
    img_dir.mkdir(parents=True, exist_ok=True)
    snr_tag = "inf" if np.isinf(noisy.snr_db) else f"{noisy.snr_db:.1f}"
    records = []
    for k, span in enumerate(spans):
        image = spectrogram.render_image(
            spec, (span.t_start, span.t_stop), subject_id=profile.id,
            swing_side=span.side, snr_db=noisy.snr_db)
        name = f"subject{profile.id:02d}_gait{k:03d}_snr{snr_tag}.png"
        spectrogram.write_image(image, img_dir / name)
        records.append(ImageRecord(
            path=str(Path(image_subdir) / name), subject_id=profile.id,
            bmi=round(profile.bmi, 6), swing_side=span.side,
            snr_db=round(float(noisy.snr_db), 4),
            range_m=condition.range_m, split=split))
    return records


def _first_side(params, spec, seg) -> str:
    """Swing side of the first estimated slice, from simulator ground truth."""
    truth, sides = kinematics.half_gait_boundaries(params, spec.time_axis[-1])
    if len(truth) == 0 or len(seg.boundaries) == 0:
        return "left"
    t0 = spec.time_axis[seg.boundaries[0]]
    k = int(np.argmin(np.abs(truth - t0)))
    return "left" if k % 2 == 0 else "right"


def generate_session(cohort: list[SubjectProfile], cohort_seed: int,
                     conditions: list[Condition], out_dir: Path, seed: int,
                     duration: float, speed: float, split: str
                     ) -> list[ImageRecord]:
    records: list[ImageRecord] = []
    for profile in cohort:
        for j, condition in enumerate(conditions):
            try:
                records.extend(_generate_subject_images(
                    profile, cohort_seed, condition, j, out_dir,
                    f"images/{split}/cond{j}", seed, duration, speed, split))
            except Exception as exc:
                raise PipelineError(
                    f"subject {profile.id}, condition {j} "
                    f"(range {condition.range_m} m): {exc}") from exc
    return records


def generate_dataset(spec: CohortSpec, conditions: list[Condition],
                     out_dir: str | Path, seed: int,
                     duration: float = DEFAULT_DURATION,
                     speed: float = DEFAULT_SPEED,
                     dataset_id: str = "dataset") -> DatasetManifest:
    """Run the full chain (kinematics -> synthesis -> SNR -> spectrogram ->
    segmentation -> rendering) for every subject and condition; write images
    and a manifest. Deterministic for a fixed seed."""
    if not conditions:
        raise ValueError("at least one condition is required")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cohort = generate_cohort(spec)
    records = generate_session(cohort, spec.seed, conditions, out_dir, seed,
                               duration, speed, "train")
    config = {
        "cohort": {
            "count": spec.count, "female_count": spec.female_count,
            "bmis": list(spec.bmis) if spec.bmis else None,
            "bmi_range": list(spec.bmi_range) if spec.bmi_range else None,
            "seed": spec.seed, "rcs_bmi_exponent": spec.rcs_bmi_exponent,
            "height_window": spec.height_window,
        },
        "conditions": [
            {"range_m": c.range_m, "reference_snr_db": c.reference_snr_db}
            for c in conditions
        ],
        "duration_s": duration,
        "speed_mps": speed,
    }
    manifest = DatasetManifest(dataset_id=dataset_id, seed=seed, config=config,
                               records=tuple(records))
    write_manifest(manifest, out_dir / "manifest.json")
    (out_dir / "cohort.json").write_text(cohort_to_json(cohort, spec))
    return manifest


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    Path(path).write_text(manifest.to_json())


def read_manifest(path: str | Path) -> DatasetManifest:
    return DatasetManifest.from_json(Path(path).read_text())


def _spec_from_config(config: dict) -> CohortSpec:
    c = config["cohort"]
    return CohortSpec(count=c["count"], female_count=c["female_count"],
                      bmis=tuple(c["bmis"]) if c["bmis"] else None,
                      bmi_range=tuple(c["bmi_range"]) if c["bmi_range"] else None,
                      seed=c["seed"], rcs_bmi_exponent=c["rcs_bmi_exponent"],
                      height_window=c["height_window"])


def fresh_session_split(manifest: DatasetManifest, out_dir: str | Path,
                        test_seed: int) -> DatasetManifest:
    """Simulate an independent second recording session of the same cohort and
    tag it as the test split."""
    if test_seed == manifest.seed:
        raise ValueError("test session seed must differ from the train seed")
    out_dir = Path(out_dir)
    spec = _spec_from_config(manifest.config)
    cohort = generate_cohort(spec)
    conditions = [Condition(c["range_m"], c["reference_snr_db"])
                  for c in manifest.config["conditions"]]
    test_records = generate_session(
        cohort, spec.seed, conditions, out_dir, test_seed,
        manifest.config["duration_s"], manifest.config["speed_mps"], "test")
    combined = DatasetManifest(
        dataset_id=manifest.dataset_id, seed=manifest.seed,
        config={**manifest.config, "test_seed": test_seed},
        records=manifest.records + tuple(test_records))
    write_manifest(combined, out_dir / "manifest.json")
    return combined


def random_split(manifest: DatasetManifest, fraction: float, seed: int
                 ) -> DatasetManifest:
    """Retag records with a random test fraction."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    n = len(manifest.records)
    rng = np.random.default_rng(seed)
    test_idx = set(rng.permutation(n)[: round(n * fraction)].tolist())
    records = tuple(
        replace(r, split="test" if i in test_idx else "train")
        for i, r in enumerate(manifest.records)
    )
    return replace(manifest, records=records)


@dataclass(frozen=True)
class EvaluationReport:
    labels: tuple[str, ...]          # class labels (BMI strings), index = class id
    confusion: np.ndarray            # counts, rows = target class, cols = output
    overall_accuracy: float = field(init=False)

    def __post_init__(self):
        acc = float(np.trace(self.confusion) / max(self.confusion.sum(), 1))
        object.__setattr__(self, "overall_accuracy", acc)

    @property
    def row_normalized(self) -> np.ndarray:
        totals = self.confusion.sum(axis=1, keepdims=True)
        return self.confusion / np.maximum(totals, 1)

    @property
    def per_class_recall(self) -> np.ndarray:
        return np.diag(self.row_normalized)

    def to_json(self) -> str:
        return json.dumps({
            "overall_accuracy": self.overall_accuracy,
            "labels": list(self.labels),
            "confusion": self.confusion.astype(int).tolist(),
            "row_normalized": np.round(self.row_normalized, 6).tolist(),
            "per_class_recall": np.round(self.per_class_recall, 6).tolist(),
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        doc = json.loads(text)
        return cls(labels=tuple(doc["labels"]),
                   confusion=np.asarray(doc["confusion"], dtype=float))


def image_features(manifest: DatasetManifest, base_dir: str | Path,
                   size: int = 64) -> np.ndarray:
    """Down-sampled luminance features, one row per manifest record."""
    base_dir = Path(base_dir)
    rows = []
    for record in manifest.records:
        pixels = spectrogram.read_image_pixels(base_dir / record.path)
        gray = pixels.astype(np.float32).mean(axis=2) / spectrogram.U16_MAX
        rows.append(cv2.resize(gray, (size, size),
                               interpolation=cv2.INTER_AREA).ravel())
    return np.vstack(rows)


def manifest_hash(manifest: DatasetManifest) -> str:
    return hashlib.sha256(manifest.to_json().encode()).hexdigest()


def load_latents(path: str | Path, manifest: DatasetManifest) -> np.ndarray:
    """Flat little-endian float32 feature file with a JSON sidecar (n, d, hash)."""
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    n, d = sidecar["n"], sidecar["d"]
    if n != len(manifest.records):
        raise ValueError(f"latents hold {n} rows, manifest has {len(manifest.records)}")
    data = np.fromfile(path, dtype="<f4")
    if data.size != n * d:
        raise ValueError(f"latents file holds {data.size} floats, expected {n * d}")
    return data.reshape(n, d)


def write_embedding_csv(y: np.ndarray, manifest: DatasetManifest,
                        path: str | Path) -> None:
    """CSV export of 2D embedding coordinates with per-image metadata."""
    if len(y) != len(manifest.records):
        raise ValueError("embedding row count does not match the manifest")
    lines = ["id,x,y,subject,bmi,swing_side"]
    for i, (row, rec) in enumerate(zip(y, manifest.records)):
        lines.append(f"{i},{row[0]:.6f},{row[1]:.6f},{rec.subject_id},"
                     f"{rec.bmi:.2f},{rec.swing_side}")
    Path(path).write_text("\n".join(lines) + "\n")


def _knn_predict(train_x: np.ndarray, train_y: np.ndarray, test_x: np.ndarray,
                 k: int, n_classes: int, chunk: int = 512) -> np.ndarray:
    train_sq = np.sum(train_x**2, axis=1)
    out = np.empty(len(test_x), dtype=int)
    for start in range(0, len(test_x), chunk):
        block = test_x[start:start + chunk]
        d2 = np.sum(block**2, axis=1)[:, None] + train_sq[None, :] \
            - 2.0 * (block @ train_x.T)
        nearest = np.argpartition(d2, k - 1, axis=1)[:, :k]
        for i in range(len(block)):
            idx = nearest[i]
            dists = d2[i, idx]
            labels = train_y[idx]
            votes = np.bincount(labels, minlength=n_classes)
            top = votes.max()
            tied = np.flatnonzero(votes == top)
            if len(tied) == 1:
                out[start + i] = tied[0]
            else:
                # ties: smallest mean distance among tied classes, then lowest id
                means = [dists[labels == c].mean() for c in tied]
                out[start + i] = int(tied[int(np.argmin(means))])
    return out


def knn_baseline(manifest: DatasetManifest, base_dir: str | Path, k: int = 5,
                 features: np.ndarray | None = None) -> EvaluationReport:
    """Nearest-neighbor majority vote on down-sampled images (or supplied
    feature rows aligned with the manifest)."""
    if features is None:
        features = image_features(manifest, base_dir)
    splits = np.array([r.split for r in manifest.records])
    labels = np.array([r.subject_id for r in manifest.records])
    train_mask, test_mask = splits == "train", splits == "test"
    if not train_mask.any() or not test_mask.any():
        raise ValueError("both train and test splits must be non-empty")
    if k > train_mask.sum():
        raise ValueError(f"k={k} exceeds train size {train_mask.sum()}")

    class_bmis = {r.subject_id: r.bmi for r in manifest.records}
    n_classes = max(class_bmis) + 1
    predictions = _knn_predict(features[train_mask].astype(np.float32),
                               labels[train_mask], features[test_mask].astype(np.float32),
                               k, n_classes)
    confusion = np.zeros((n_classes, n_classes))
    for truth, pred in zip(labels[test_mask], predictions):
        confusion[truth, pred] += 1
    class_labels = tuple(f"{class_bmis.get(c, float('nan')):.2f}"
                         for c in range(n_classes))
    return EvaluationReport(labels=class_labels, confusion=confusion)
