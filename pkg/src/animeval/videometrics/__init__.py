"""Visual comparison metrics: frame sampling, SSIM profiles, DTW alignment."""

from .dtw import AlignmentResult, cosine_gap, dtw_distance, euclidean
from .frames import FrameSequence, OpenCVDecoder, PipeDecoder, sample_frames
from .ssim import MatchProfiles, best_match_profiles, ssim, ssim_matrix
from .scores import (
    VisualScoreBreakdown,
    embed_frames,
    semantic_score,
    score_video_pair,
    structural_score,
    visual_reward,
)

__all__ = [
    "AlignmentResult",
    "dtw_distance",
    "euclidean",
    "cosine_gap",
    "FrameSequence",
    "OpenCVDecoder",
    "PipeDecoder",
    "sample_frames",
    "MatchProfiles",
    "ssim",
    "ssim_matrix",
    "best_match_profiles",
    "VisualScoreBreakdown",
    "structural_score",
    "semantic_score",
    "embed_frames",
    "visual_reward",
    "score_video_pair",
]
