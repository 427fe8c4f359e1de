import json
from pathlib import Path

import cv2
import numpy as np
import pytest


def write_toy_manifest(out_dir: Path, n_classes: int = 3, n_train: int = 8,
                       n_test: int = 4, size: int = 256, seed: int = 0) -> Path:
    """Synthetic 16-bit PNG dataset with a class-dependent pattern so a
    classifier has signal to learn; matches the pipeline manifest schema."""
    rng = np.random.default_rng(seed)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    records = []
    for cls in range(n_classes):
        for k in range(n_train + n_test):
            yy, xx = np.mgrid[0:size, 0:size] / size
            base = 0.5 + 0.4 * np.sin(2 * np.pi * (cls + 1) * yy)
            img = np.clip(base + rng.normal(0, 0.05, (size, size)), 0, 1)
            rgb = np.stack([img, img * 0.5, 1.0 - img], axis=2)
            pixels = np.round(rgb * 65535).astype(np.uint16)
            name = f"images/c{cls}_{k:02d}.png"
            cv2.imwrite(str(out_dir / name), pixels[:, :, ::-1])
            records.append({
                "path": name, "subject_id": cls, "bmi": 20.0 + cls,
                "swing_side": "left" if k % 2 == 0 else "right",
                "snr_db": 30.0, "range_m": 3.0,
                "split": "train" if k < n_train else "test",
            })
    path = out_dir / "manifest.json"
    path.write_text(json.dumps({
        "dataset_id": "toy", "seed": seed, "config": {}, "records": records,
    }, indent=2, sort_keys=True))
    return path


@pytest.fixture(scope="session")
def toy_manifest_path(tmp_path_factory):
    return write_toy_manifest(tmp_path_factory.mktemp("toy"))


@pytest.fixture(scope="session")
def small_toy_manifest_path(tmp_path_factory):
    """64x64 variant for classifier smoke tests (stem + pooling accept any
    size; small inputs keep CPU runtime down)."""
    return write_toy_manifest(tmp_path_factory.mktemp("toy64"), size=64,
                              n_train=10, n_test=5)
