"""Visual reward: structural and semantic alignment scores and their mix.

The structural score aligns per-frame best-match SSIM profiles with DTW and
maps the cost through ``exp(-k * cost / max(T, T_hat))``.  The semantic score
aligns frame embeddings with the cosine-gap distance and uses the same mapping
without the strictness factor.  The visual reward is their geometric mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import cv2
import numpy as np

from ..defaults import DTW_STRICTNESS
from ..errors import ContractViolation
from .dtw import MODE_AUTO, cosine_gap, dtw_distance, euclidean
from .frames import FrameSequence
from .ssim import best_match_profiles, ssim_matrix


@dataclass(frozen=True)
class VisualScoreBreakdown:
    """Both alignment scores and their geometric mean for one video pair."""

    s_ssim: float
    s_sem: float
    visual_reward: float
    k: float


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ContractViolation(f"{name} must lie in [0, 1], got {value}")


def profile_alignment_score(
    gen_profile: Sequence[float],
    ref_profile: Sequence[float],
    k: float,
    mode: str = MODE_AUTO,
) -> float:
    """exp(-k * DTW(gen_profile, ref_profile) / max length), Euclidean steps."""
    result = dtw_distance(list(gen_profile), list(ref_profile), euclidean, mode)
    longest = max(len(gen_profile), len(ref_profile))
    return math.exp(-k * result.distance / longest)


def _resize_to(frames: FrameSequence, target: FrameSequence) -> FrameSequence:
    """Resize generated frames (bilinear) to the reference frame dimensions."""
    ref_shape = target.gray[0].shape
    if frames.gray[0].shape == ref_shape:
        return frames
    height, width = ref_shape
    resized_rgb = [
        cv2.resize(frame, (width, height), interpolation=cv2.INTER_LINEAR)
        for frame in frames.rgb
    ]
    return FrameSequence(
        rgb=resized_rgb,
        gray=[cv2.resize(g, (width, height), interpolation=cv2.INTER_LINEAR) for g in frames.gray],
        timestamps=frames.timestamps,
        sample_fps=frames.sample_fps,
        source_duration=frames.source_duration,
    )


def structural_score(
    gen: FrameSequence,
    ref: FrameSequence,
    k: float = DTW_STRICTNESS,
    mode: str = MODE_AUTO,
) -> float:
    """SSIM-profile alignment score between two frame sequences."""
    gen = _resize_to(gen, ref)
    profiles = best_match_profiles(ssim_matrix(gen, ref))
    return profile_alignment_score(profiles.gen_profile, profiles.ref_profile, k, mode)


def embed_frames(frames: Sequence[np.ndarray], embedder) -> np.ndarray:
    """Embed RGB frames and normalize each vector to unit Euclidean norm.

    ``embedder`` is any provider with ``embed_images(list[frame]) -> vectors``.
    """
    if len(frames) == 0:
        raise ContractViolation("embed_frames requires at least one frame")
    vectors = np.asarray(embedder.embed_images(list(frames)), dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0.0):
        raise ContractViolation("embedding provider returned a zero-norm vector")
    return vectors / norms[:, np.newaxis]


def semantic_score(
    gen_emb: np.ndarray, ref_emb: np.ndarray, mode: str = MODE_AUTO
) -> float:
    """Embedding alignment score exp(-DTW / max length) with d = 1 - <e, e_hat>."""
    gen_rows = [np.asarray(row, dtype=np.float64) for row in gen_emb]
    ref_rows = [np.asarray(row, dtype=np.float64) for row in ref_emb]
    result = dtw_distance(gen_rows, ref_rows, cosine_gap, mode)
    longest = max(len(gen_rows), len(ref_rows))
    return math.exp(-result.distance / longest)


def visual_reward(s_ssim: float, s_sem: float) -> float:
    """Geometric mean sqrt(s_ssim * s_sem)."""
    _check_unit("s_ssim", s_ssim)
    _check_unit("s_sem", s_sem)
    return math.sqrt(s_ssim * s_sem)


def score_video_pair(
    gen: FrameSequence,
    ref: FrameSequence,
    image_embedder,
    k: float = DTW_STRICTNESS,
    mode: str = MODE_AUTO,
) -> VisualScoreBreakdown:
    """Compute the full visual breakdown for one pair of frame sequences."""
    s_ssim = structural_score(gen, ref, k, mode)
    gen_emb = embed_frames(gen.rgb, image_embedder)
    ref_emb = embed_frames(ref.rgb, image_embedder)
    s_sem = semantic_score(gen_emb, ref_emb, mode)
    return VisualScoreBreakdown(
        s_ssim=s_ssim, s_sem=s_sem, visual_reward=visual_reward(s_ssim, s_sem), k=k
    )
