"""Radar micro-Doppler gait toolkit: simulation, spectrograms, segmentation,
embedding and baseline classification for walking-subject identification."""

from .cohort import CohortSpec, SubjectProfile, bmi, derive_segments, generate_cohort
from .kinematics import (GaitParameters, GaitStyle, Mode, RadarPose,
                         gait_parameters, phase_offsets, simulate_trajectories)
from .radar import BasebandSignal, RadarConfig, apply_snr, synthesize
from .segmentation import GaitSegmentation, estimate_cadence, segment, slice_half_gaits
from .spectrogram import HalfGaitImage, Spectrogram, micro_doppler, render_image, stft, to_micro_doppler
from .tsne import TsneConfig, input_affinities, kl_divergence, tsne

__version__ = "0.1.0"
