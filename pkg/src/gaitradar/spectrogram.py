"""STFT micro-Doppler spectrograms, velocity-axis calibration and image rendering."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
from scipy.signal import get_window

from ._colormap_data import _TABLE
from .radar import BasebandSignal, RadarConfig

COLORMAP = np.asarray(_TABLE, dtype=np.float64)  # 256 x 3 RGB in [0, 1]

LOG_FLOOR_REL = 1e-12   # relative power floor before the log
IMAGE_SIZE = 256
U16_MAX = 65535


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class StftGrid:
    values: np.ndarray      # (window_size, n_frames) complex, FFT bin order
    frame_times: np.ndarray  # [s], frame centers
    sample_rate: float
    window_size: int
    hop: int
    window_kind: str


@dataclass(frozen=True)
class Spectrogram:
    """Time x velocity grid of log power. The velocity axis is DC-centered and
    spans the full unambiguous interval symmetrically; the shared Nyquist bin
    appears at both extremes."""
    values: np.ndarray       # (window_size + 1, n_frames) dB
    time_axis: np.ndarray    # [s]
    velocity_axis: np.ndarray  # [m/s], ascending
    window_size: int
    hop: int
    window_kind: str

    @property
    def frame_period(self) -> float:
        return float(self.time_axis[1] - self.time_axis[0]) if len(self.time_axis) > 1 else 0.0

    def crop(self, t_start: float, t_stop: float) -> "Spectrogram":
        sel = (self.time_axis >= t_start) & (self.time_axis < t_stop)
        if not np.any(sel):
            raise ValueError(f"empty time span [{t_start}, {t_stop})")
        return Spectrogram(self.values[:, sel], self.time_axis[sel],
                           self.velocity_axis, self.window_size, self.hop,
                           self.window_kind)


def stft(signal: BasebandSignal, window_size: int = 512, overlap: float = 0.75,
         window_kind: str = "hann") -> StftGrid:
    """Sliding-window DFT; one column per frame."""
    x = signal.samples
    if len(x) < window_size:
        raise InsufficientDataError(
            f"signal has {len(x)} samples, need at least {window_size}")
    hop = int(round(window_size * (1.0 - overlap)))
    if hop < 1:
        raise ValueError(f"overlap {overlap} leaves no hop")
    n_frames = (len(x) - window_size) // hop + 1
    window = get_window(window_kind, window_size, fftbins=True)
    idx = np.arange(window_size)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = x[idx] * window
    grid = np.fft.fft(frames, axis=1).T  # (window_size, n_frames)
    frame_times = (hop * np.arange(n_frames) + window_size / 2.0) / signal.sample_rate
    return StftGrid(grid, frame_times, signal.sample_rate, window_size, hop,
                    window_kind)


def to_micro_doppler(grid: StftGrid, cfg: RadarConfig) -> Spectrogram:
    """Log squared magnitude with the frequency axis mapped to Doppler velocity."""
    power = np.abs(grid.values) ** 2
    peak = float(power.max())
    floor = LOG_FLOOR_REL * max(peak, np.finfo(np.float64).tiny)
    values = 10.0 * np.log10(power + floor)

    w = grid.window_size
    # DC-centered reorder, then repeat the Nyquist row at the top so the axis
    # spans the unambiguous interval symmetrically.
    shifted = np.fft.fftshift(values, axes=0)
    values = np.vstack([shifted, shifted[0:1, :]])
    vmax = grid.sample_rate / 2.0 * cfg.wavelength / 2.0
    velocity_axis = np.linspace(-vmax, vmax, w + 1)
    return Spectrogram(values, grid.frame_times, velocity_axis, w, grid.hop,
                       grid.window_kind)


def micro_doppler(signal: BasebandSignal, cfg: RadarConfig,
                  window_size: int = 512, overlap: float = 0.75,
                  window_kind: str = "hann") -> Spectrogram:
    return to_micro_doppler(stft(signal, window_size, overlap, window_kind), cfg)


@dataclass(frozen=True)
class HalfGaitImage:
    pixels: np.ndarray           # (256, 256, 3) uint16, RGB
    subject_id: int
    swing_side: str              # "left" | "right" | "unknown"
    snr_db: float
    time_span: tuple[float, float]


def apply_colormap(norm: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] through the baked-in lookup table (linear interp)."""
    pos = np.clip(norm, 0.0, 1.0) * (len(COLORMAP) - 1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, len(COLORMAP) - 1)
    frac = (pos - lo)[..., None]
    return COLORMAP[lo] * (1.0 - frac) + COLORMAP[hi] * frac


def decode_colormap(rgb: np.ndarray) -> np.ndarray:
    """Inverse of apply_colormap by nearest table entry; returns values in [0, 1]."""
    flat = rgb.reshape(-1, 3)
    d2 = ((flat[:, None, :] - COLORMAP[None, :, :]) ** 2).sum(axis=2)
    return (d2.argmin(axis=1) / (len(COLORMAP) - 1)).reshape(rgb.shape[:-1])


def render_image(spec: Spectrogram, time_span: tuple[float, float] | None = None,
                 dynamic_range_db: float = 40.0,
                 subject_id: int = -1, swing_side: str = "unknown",
                 snr_db: float = float("inf")) -> HalfGaitImage:
    """Clip to the top ``dynamic_range_db`` of the slice, normalize, colorize
    and resample to 256x256 unsigned 16-bit RGB. Velocity increases upward."""
    part = spec if time_span is None else spec.crop(*time_span)
    span = (float(part.time_axis[0]), float(part.time_axis[-1]))
    peak = float(part.values.max())
    clipped = np.clip(part.values, peak - dynamic_range_db, peak)
    norm = (clipped - (peak - dynamic_range_db)) / dynamic_range_db
    rgb = apply_colormap(norm[::-1, :])  # row 0 = highest velocity
    resized = cv2.resize(rgb, (IMAGE_SIZE, IMAGE_SIZE), interpolation=cv2.INTER_LINEAR)
    pixels = np.round(np.clip(resized, 0.0, 1.0) * U16_MAX).astype(np.uint16)
    return HalfGaitImage(pixels, subject_id, swing_side, snr_db, span)


def write_image(image: HalfGaitImage, path: str | Path) -> None:
    ok = cv2.imwrite(str(path), image.pixels[:, :, ::-1])  # RGB -> BGR
    if not ok:
        raise IOError(f"failed to write {path}")


def read_image_pixels(path: str | Path) -> np.ndarray:
    pixels = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if pixels is None:
        raise IOError(f"failed to read {path}")
    return pixels[:, :, ::-1]  # BGR -> RGB
