"""Plot helpers: embedding scatters and BMI-labeled confusion matrices."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .pipeline import EvaluationReport

# BMI group edges used to color embeddings (slim ... obese).
BMI_GROUP_EDGES = (18.5, 21.0, 23.5, 26.0, 30.0)


def bmi_group(bmi: float) -> int:
    return int(np.searchsorted(BMI_GROUP_EDGES, bmi, side="right")) - 1


def read_embedding_csv(path: str | Path):
    ids, xs, ys, subjects, bmis, sides = [], [], [], [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            ids.append(int(row["id"]))
            xs.append(float(row["x"]))
            ys.append(float(row["y"]))
            subjects.append(int(row["subject"]))
            bmis.append(float(row["bmi"]))
            sides.append(row["swing_side"])
    return (np.array(ids), np.array(xs), np.array(ys), np.array(subjects),
            np.array(bmis), sides)


def plot_embedding(csv_path: str | Path, out_path: str | Path,
                   color_by: str = "subject") -> None:
    _, xs, ys, subjects, bmis, _ = read_embedding_csv(csv_path)
    fig, ax = plt.subplots(figsize=(7, 6))
    if color_by == "bmi":
        groups = np.array([bmi_group(b) for b in bmis])
        sc = ax.scatter(xs, ys, c=groups, s=8, cmap="tab10", alpha=0.8)
        ax.set_title("2D embedding by BMI group")
    else:
        sc = ax.scatter(xs, ys, c=subjects, s=8, cmap="tab20", alpha=0.8)
        ax.set_title("2D embedding by subject")
    fig.colorbar(sc, ax=ax)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_confusion(report: EvaluationReport, out_path: str | Path,
                   title: str = "Confusion matrix") -> None:
    norm = report.row_normalized
    fig, ax = plt.subplots(figsize=(8, 7))
    im = ax.imshow(norm * 100.0, cmap="copper", vmin=0, vmax=100)
    ax.set_xticks(range(len(report.labels)))
    ax.set_yticks(range(len(report.labels)))
    ax.set_xticklabels(report.labels, rotation=270, fontsize=7)
    ax.set_yticklabels(report.labels, fontsize=7)
    ax.set_xlabel("Output Class")
    ax.set_ylabel("Target Class")
    ax.set_title(f"{title} (accuracy {report.overall_accuracy:.1%})")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
