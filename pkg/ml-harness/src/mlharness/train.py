"""Training loops: CAE reconstruction, latent export, and the residual
classifier with an evaluation report in the pipeline's JSON schema."""

from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn
from torch.utils.data import DataLoader, Subset

from .cae import LATENT_DIM, ConvAutoencoder
from .data import Manifest, ManifestImageDataset, ManifestRecord
from .resnet import ResNet50


def _device(name: str | None) -> torch.device:
    if name:
        return torch.device(name)
    return torch.device("cuda" if torch.cuda.is_available() else "cpu")


def _held_out_mse(model: ConvAutoencoder, loader: DataLoader,
                  device: torch.device) -> float:
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for x, _ in loader:
            x = x.to(device)
            total += F.mse_loss(model(x), x, reduction="sum").item()
            count += x.numel()
    return total / max(count, 1)


def train_cae(manifest: Manifest, epochs: int = 5, seed: int = 0,
              batch_size: int = 32, lr: float = 1e-3, limit: int | None = None,
              holdout_fraction: float = 0.2, device: str | None = None,
              ) -> tuple[ConvAutoencoder, list[float]]:
    """Train on the manifest's train split; returns the model and the
    held-out reconstruction MSE per epoch (index 0 = before training)."""
    records = manifest.split("train")
    if not records:
        raise ValueError("manifest train split is empty")
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(records))
    if limit is not None:
        order = order[:limit]
    n_hold = max(int(round(len(order) * holdout_fraction)), 1)
    held = [records[i] for i in order[:n_hold]]
    fit = [records[i] for i in order[n_hold:]]
    if not fit:
        raise ValueError("no training records left after the hold-out split")

    dev = _device(device)
    model = ConvAutoencoder().to(dev)
    fit_loader = DataLoader(ManifestImageDataset(manifest, fit),
                            batch_size=batch_size, shuffle=True,
                            generator=torch.Generator().manual_seed(seed))
    held_loader = DataLoader(ManifestImageDataset(manifest, held),
                             batch_size=batch_size)
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)

    trace = [_held_out_mse(model, held_loader, dev)]
    for _ in range(epochs):
        model.train()
        for x, _ in fit_loader:
            x = x.to(dev)
            loss = F.mse_loss(model(x), x)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
        trace.append(_held_out_mse(model, held_loader, dev))
    return model, trace


def export_latents(model: ConvAutoencoder, manifest: Manifest,
                   out_path: str | Path, batch_size: int = 32,
                   device: str | None = None) -> np.ndarray:
    """One 2048-d row per manifest record, manifest order; written as flat
    little-endian float32 plus a JSON sidecar (n, d, manifest hash)."""
    dev = _device(device)
    model = model.to(dev).eval()
    loader = DataLoader(ManifestImageDataset(manifest), batch_size=batch_size)
    rows = []
    with torch.no_grad():
        for x, _ in loader:
            rows.append(model.latent_vector(x.to(dev)).cpu().numpy())
    latents = np.vstack(rows).astype("<f4")
    out_path = Path(out_path)
    latents.tofile(out_path)
    sidecar = {"n": int(latents.shape[0]), "d": LATENT_DIM,
               "manifest_sha256": manifest.sha256}
    Path(str(out_path) + ".json").write_text(json.dumps(sidecar, indent=2))
    return latents


def evaluation_report_json(labels: tuple[str, ...],
                           confusion: np.ndarray) -> str:
    """Same schema as the pipeline's baseline report."""
    totals = confusion.sum(axis=1, keepdims=True)
    row_norm = confusion / np.maximum(totals, 1)
    return json.dumps({
        "overall_accuracy": float(np.trace(confusion)
                                  / max(confusion.sum(), 1)),
        "labels": list(labels),
        "confusion": confusion.astype(int).tolist(),
        "row_normalized": np.round(row_norm, 6).tolist(),
        "per_class_recall": np.round(np.diag(row_norm), 6).tolist(),
    }, indent=2, sort_keys=True)


def _check_class_coverage(train: list[ManifestRecord],
                          test: list[ManifestRecord]) -> None:
    missing = sorted({r.subject_id for r in test}
                     - {r.subject_id for r in train})
    if missing:
        raise ValueError(f"classes absent from the train split: {missing}")


def train_identifier(manifest: Manifest, epochs: int = 10, seed: int = 0,
                     batch_size: int = 32, lr: float = 1e-3,
                     device: str | None = None,
                     ) -> tuple[ResNet50, str, float]:
    """Train the residual classifier on the train split and evaluate on the
    test split; returns (model, report JSON, single-image latency seconds)."""
    train_records = manifest.split("train")
    test_records = manifest.split("test")
    if not train_records or not test_records:
        raise ValueError("both train and test splits must be non-empty")
    _check_class_coverage(train_records, test_records)

    class_bmis = manifest.class_bmis
    n_classes = max(class_bmis) + 1
    torch.manual_seed(seed)
    dev = _device(device)
    model = ResNet50(num_classes=n_classes).to(dev)
    loader = DataLoader(ManifestImageDataset(manifest, train_records),
                        batch_size=batch_size, shuffle=True,
                        generator=torch.Generator().manual_seed(seed))
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)

    for _ in range(epochs):
        model.train()
        for x, y in loader:
            loss = F.cross_entropy(model.logits(x.to(dev)), y.to(dev))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

    model.eval()
    confusion = np.zeros((n_classes, n_classes))
    test_loader = DataLoader(ManifestImageDataset(manifest, test_records),
                             batch_size=batch_size)
    with torch.no_grad():
        for x, y in test_loader:
            pred = model.logits(x.to(dev)).argmax(dim=1).cpu().numpy()
            for truth, p in zip(y.numpy(), pred):
                confusion[truth, p] += 1
        x0, _ = ManifestImageDataset(manifest, test_records)[0]
        start = time.perf_counter()
        model(x0[None].to(dev))
        latency = time.perf_counter() - start

    labels = tuple(f"{class_bmis.get(c, float('nan')):.2f}"
                   for c in range(n_classes))
    return model, evaluation_report_json(labels, confusion), latency
