"""Dataset access for the pipeline's file interface: a JSON manifest with
relative paths to 16-bit RGB PNG images plus per-image labels."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
import torch
from torch.utils.data import Dataset

U16_MAX = 65535


@dataclass(frozen=True)
class ManifestRecord:
    path: str
    subject_id: int
    bmi: float
    swing_side: str
    snr_db: float
    range_m: float
    split: str


@dataclass(frozen=True)
class Manifest:
    dataset_id: str
    seed: int
    config: dict
    records: tuple[ManifestRecord, ...]
    base_dir: Path
    sha256: str

    def split(self, name: str) -> list[ManifestRecord]:
        return [r for r in self.records if r.split == name]

    @property
    def class_bmis(self) -> dict[int, float]:
        return {r.subject_id: r.bmi for r in self.records}


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    text = path.read_text()
    doc = json.loads(text)
    records = tuple(
        ManifestRecord(path=r["path"], subject_id=r["subject_id"], bmi=r["bmi"],
                       swing_side=r["swing_side"], snr_db=r["snr_db"],
                       range_m=r["range_m"], split=r["split"])
        for r in doc["records"]
    )
    return Manifest(dataset_id=doc["dataset_id"], seed=doc["seed"],
                    config=doc["config"], records=records,
                    base_dir=path.parent,
                    sha256=hashlib.sha256(text.encode()).hexdigest())


def read_image(base_dir: Path, record: ManifestRecord) -> np.ndarray:
    pixels = cv2.imread(str(base_dir / record.path), cv2.IMREAD_UNCHANGED)
    if pixels is None:
        raise IOError(f"failed to read {base_dir / record.path}")
    return pixels[:, :, ::-1].astype(np.float32) / U16_MAX  # BGR -> RGB, [0, 1]


class ManifestImageDataset(Dataset):
    """(C, H, W) float tensors in [0, 1] with integer subject labels."""

    def __init__(self, manifest: Manifest,
                 records: list[ManifestRecord] | None = None):
        self.manifest = manifest
        self.records = list(manifest.records) if records is None else records

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, idx: int) -> tuple[torch.Tensor, int]:
        record = self.records[idx]
        image = read_image(self.manifest.base_dir, record)
        return torch.from_numpy(np.ascontiguousarray(
            image.transpose(2, 0, 1))), record.subject_id
