"""Half-gait period estimation and slicing of micro-Doppler spectrograms.

The periodicity detector works on the power-weighted velocity spread per
frame: it expands during swings and contracts at double support, so its
autocorrelation peaks at the half-gait lag and its minima mark slice
boundaries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .spectrogram import Spectrogram


class NoPeriodicityError(ValueError):
    pass


@dataclass(frozen=True)
class GaitSegmentation:
    half_gait_period: float       # [s]
    boundaries: np.ndarray        # frame indices, strictly increasing
    confidence: float             # normalized autocorrelation peak, [0, 1]


@dataclass(frozen=True)
class SliceSpan:
    start_frame: int
    end_frame: int
    t_start: float
    t_stop: float
    side: str  # "left" | "right" | "unknown"


def velocity_spread_envelope(spec: Spectrogram) -> np.ndarray:
    """Per-frame power-weighted standard deviation of velocity."""
    power = 10.0 ** (spec.values / 10.0)
    total = power.sum(axis=0)
    v = spec.velocity_axis[:, None]
    mean = (power * v).sum(axis=0) / total
    var = (power * (v - mean[None, :]) ** 2).sum(axis=0) / total
    return np.sqrt(var)


def estimate_cadence(spec: Spectrogram, min_period: float = 0.25,
                     max_period: float = 1.2,
                     confidence_threshold: float = 0.3
                     ) -> tuple[float, float]:
    """Half-gait period and a periodicity confidence from the envelope autocorrelation."""
    env = velocity_spread_envelope(spec)
    n = len(env)
    dt = spec.frame_period
    if dt <= 0 or n * dt < 2.0:
        raise NoPeriodicityError(f"record spans {n * dt:.2f} s, need >= 2 s")
    env = env - env.mean()
    denom = float(np.dot(env, env))
    if denom <= 0:
        raise NoPeriodicityError("flat envelope, no periodicity")
    acf = np.correlate(env, env, mode="full")[n - 1:] / denom

    lo = max(int(round(min_period / dt)), 1)
    hi = min(int(round(max_period / dt)), n - 2)
    if hi <= lo:
        raise NoPeriodicityError("record too short for the searched period range")
    window = acf[lo:hi + 1]
    peak_height = float(window.max())
    # first local maximum comparable to the strongest one (avoids locking onto
    # the full-gait harmonic)
    lag = None
    for k in range(lo, hi + 1):
        if acf[k] >= acf[k - 1] and acf[k] >= acf[k + 1] and acf[k] >= 0.8 * peak_height:
            lag = k
            break
    if lag is None or acf[lag] < confidence_threshold:
        conf = 0.0 if lag is None else float(acf[lag])
        raise NoPeriodicityError(
            f"periodicity confidence {conf:.3f} below threshold {confidence_threshold}")
    return lag * dt, float(min(max(acf[lag], 0.0), 1.0))


def find_boundaries(spec: Spectrogram, half_gait_period: float) -> np.ndarray:
    """Frame indices of envelope minima, one per half gait (double-support instants)."""
    env = velocity_spread_envelope(spec)
    if len(env) >= 3:
        env = np.convolve(env, np.ones(3) / 3.0, mode="same")
    p = half_gait_period / spec.frame_period
    first = int(np.argmin(env[: max(int(round(p)), 2)]))
    boundaries = [first]
    while True:
        lo = boundaries[-1] + int(np.floor(0.75 * p))
        hi = boundaries[-1] + int(np.ceil(1.25 * p))
        if lo >= len(env):
            break
        hi = min(hi, len(env) - 1)
        if hi <= lo:
            break
        boundaries.append(lo + int(np.argmin(env[lo:hi + 1])))
    return np.asarray(boundaries, dtype=int)


def segment(spec: Spectrogram, confidence_threshold: float = 0.3) -> GaitSegmentation:
    period, confidence = estimate_cadence(spec, confidence_threshold=confidence_threshold)
    boundaries = find_boundaries(spec, period)
    return GaitSegmentation(half_gait_period=period, boundaries=boundaries,
                            confidence=confidence)


def slice_half_gaits(spec: Spectrogram, seg: GaitSegmentation,
                     first_side: str | None = None) -> list[SliceSpan]:
    """Spans between consecutive boundaries. Sides alternate; without ground
    truth the starting side is an arbitrary convention ("left")."""
    first = first_side if first_side in ("left", "right") else "left"
    other = "right" if first == "left" else "left"
    spans = []
    for k in range(len(seg.boundaries) - 1):
        a, b = int(seg.boundaries[k]), int(seg.boundaries[k + 1])
        spans.append(SliceSpan(
            start_frame=a, end_frame=b,
            t_start=float(spec.time_axis[a]), t_stop=float(spec.time_axis[b]),
            side=first if k % 2 == 0 else other,
        ))
    return spans


def segmentation_report(seg: GaitSegmentation, spans: list[SliceSpan]) -> str:
    doc = {
        "half_gait_period_s": seg.half_gait_period,
        "confidence": seg.confidence,
        "boundary_frames": [int(b) for b in seg.boundaries],
        "slices": [
            {"start_frame": s.start_frame, "end_frame": s.end_frame,
             "t_start": s.t_start, "t_stop": s.t_stop, "side": s.side}
            for s in spans
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)
