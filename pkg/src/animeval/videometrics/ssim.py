"""Structural similarity between grayscale frames and cross-video matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from skimage.metrics import structural_similarity

from ..defaults import SSIM_DYNAMIC_RANGE, SSIM_K1, SSIM_K2, SSIM_SIGMA
from ..errors import ContractViolation
from .frames import FrameSequence


@dataclass(frozen=True)
class MatchProfiles:
    """Best-match SSIM value per frame of either video."""

    gen_profile: tuple[float, ...]
    ref_profile: tuple[float, ...]


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM with an 11x11 Gaussian window (sigma 1.5) over 8-bit frames.

    Stabilizers K1=0.01 and K2=0.03 at dynamic range 255; frames must share
    dimensions (the caller resizes first).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ContractViolation("ssim expects 2-D grayscale frames")
    if a.shape != b.shape:
        raise ContractViolation(f"frame dimensions differ: {a.shape} vs {b.shape}")
    if min(a.shape) < 11:
        raise ContractViolation("frames must be at least 11x11 for the SSIM window")
    return float(
        structural_similarity(
            a,
            b,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
            K1=SSIM_K1,
            K2=SSIM_K2,
            data_range=SSIM_DYNAMIC_RANGE,
        )
    )


def ssim_matrix(gen: FrameSequence, ref: FrameSequence) -> np.ndarray:
    """All-pairs SSIM: entry [i, j] compares gen frame i with ref frame j."""
    values = np.empty((len(gen.gray), len(ref.gray)), dtype=np.float64)
    for i, gen_frame in enumerate(gen.gray):
        for j, ref_frame in enumerate(ref.gray):
            values[i, j] = ssim(gen_frame, ref_frame)
    return values


def best_match_profiles(matrix: np.ndarray) -> MatchProfiles:
    """Row-wise maxima (generated profile) and column-wise maxima (reference)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ContractViolation("best_match_profiles expects a non-empty 2-D matrix")
    gen_profile = tuple(float(x) for x in matrix.max(axis=1))
    ref_profile = tuple(float(x) for x in matrix.max(axis=0))
    return MatchProfiles(gen_profile=gen_profile, ref_profile=ref_profile)
