"""Unified reward and the policy-gradient numeric kernel.

The unified reward mixes the text reward (always computable once code is
extracted) and the visual reward (zero when the render fails) with a convex
weight pair.  The kernel functions compute group-normalized advantages, the
clipped per-token surrogate with a KL penalty, and the constant-normalized
group loss from supplied log-probabilities; no differentiation happens here.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import defaults
from .codeblock import Completion, extract_code
from .codemetrics.scores import CodeScoreBreakdown, score_code_pair
from .errors import ConfigurationError, ContractViolation, DatasetError, MediaError
from .videometrics.frames import FrameSequence, sample_frames
from .videometrics.scores import VisualScoreBreakdown, score_video_pair

FAILURE_NONE = "none"
FAILURE_NO_CODE = "no_code_extracted"
FAILURE_RENDER = "render_failed"


@dataclass(frozen=True)
class RewardWeights:
    """Convex mixing pair for the text and visual rewards."""

    lambda_t: float = defaults.LAMBDA_TEXT
    lambda_v: float = defaults.LAMBDA_VISUAL

    def __post_init__(self) -> None:
        if not (0.0 <= self.lambda_t <= 1.0 and 0.0 <= self.lambda_v <= 1.0):
            raise ConfigurationError("reward weights must lie in [0, 1]")
        if abs(self.lambda_t + self.lambda_v - 1.0) > 1e-9:
            raise ConfigurationError(
                f"reward weights must sum to 1, got {self.lambda_t + self.lambda_v}"
            )


@dataclass(frozen=True)
class RewardBreakdown:
    """Unified reward with all sub-scores and failure provenance."""

    r_t: float
    r_v: float
    unified: float
    code_scores: CodeScoreBreakdown | None
    visual_scores: VisualScoreBreakdown | None
    failure: str
    render_status: str | None = None


@dataclass(frozen=True)
class GroupRewards:
    """Rewards of one sampled group."""

    rewards: tuple[float, ...]
    group_size: int = defaults.GROUP_SIZE

    def __post_init__(self) -> None:
        if self.group_size < 2:
            raise ContractViolation("group_size must be >= 2")
        if len(self.rewards) != self.group_size:
            raise ContractViolation(
                f"expected {self.group_size} rewards, got {len(self.rewards)}"
            )


@dataclass(frozen=True)
class TokenLogProbs:
    """Per-token log-probabilities under the current, old, and reference policies."""

    current: tuple[float, ...]
    old: tuple[float, ...]
    reference: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.current) == len(self.old) == len(self.reference) >= 1):
            raise ContractViolation("log-probability sequences must have equal length >= 1")
        for seq in (self.current, self.old, self.reference):
            if not np.all(np.isfinite(seq)):
                raise ContractViolation("log-probabilities must be finite")

    def __len__(self) -> int:
        return len(self.current)


@dataclass(frozen=True)
class GrpoHyperparams:
    """Clip range, KL coefficient, and the constant token normalizer."""

    epsilon: float = defaults.CLIP_EPSILON
    beta: float = defaults.KL_BETA
    normalizer_length: int = defaults.LOSS_NORMALIZER_LENGTH

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ConfigurationError("epsilon must be positive")
        if self.beta < 0:
            raise ConfigurationError("beta must be non-negative")
        if self.normalizer_length < 1:
            raise ConfigurationError("normalizer_length must be >= 1")


@dataclass(frozen=True)
class LossBreakdown:
    """Group loss with its surrogate/KL split when the split is known."""

    surrogate_sum: float
    kl_sum: float
    total: float


def group_advantages(group: GroupRewards | Sequence[float]) -> list[float]:
    """Normalize group rewards to advantages: (R_i - mean) / population std.

    Every token of sample i later receives the same advantage.  When the
    group's standard deviation collapses below 1e-8 all advantages are zero.
    """
    rewards = np.asarray(
        group.rewards if isinstance(group, GroupRewards) else list(group),
        dtype=np.float64,
    )
    if rewards.size < 2:
        raise ContractViolation("group_advantages requires at least 2 rewards")
    mean = rewards.mean()
    std = rewards.std()
    if std < defaults.DEGENERATE_STD:
        return [0.0] * rewards.size
    return [float(x) for x in (rewards - mean) / std]


def per_token_kl(logprobs: TokenLogProbs) -> list[float]:
    """Non-negative per-token KL estimator exp(ref - current) - (ref - current) - 1."""
    gap = np.asarray(logprobs.reference) - np.asarray(logprobs.current)
    return [float(x) for x in np.exp(gap) - gap - 1.0]


def per_token_loss(
    logprobs: TokenLogProbs, advantage: float, params: GrpoHyperparams
) -> list[float]:
    """Clipped surrogate minus the weighted KL penalty, per token.

    ratio = exp(current - old); surrogate = min(ratio * A, clip(ratio) * A);
    l = surrogate - beta * KL.
    """
    ratio = np.exp(np.asarray(logprobs.current) - np.asarray(logprobs.old))
    clipped = np.clip(ratio, 1.0 - params.epsilon, 1.0 + params.epsilon)
    surrogate = np.minimum(ratio * advantage, clipped * advantage)
    kl = np.asarray(per_token_kl(logprobs))
    return [float(x) for x in surrogate - params.beta * kl]


def dr_grpo_loss(
    token_losses: Sequence[Sequence[float]],
    params: GrpoHyperparams,
    group_size: int,
    token_kls: Sequence[Sequence[float]] | None = None,
) -> LossBreakdown:
    """Constant-normalized group loss: -(1/(L*G)) * sum of all per-token l.

    The normalizer is the constant ``params.normalizer_length``, never a
    per-sample length.  When ``token_kls`` (the raw per-token KL values) is
    supplied the surrogate/KL split is recovered exactly; otherwise the split
    reports the l values as pure surrogate, which is exact for beta = 0.
    """
    if len(token_losses) != group_size:
        raise ContractViolation(
            f"expected {group_size} samples, got {len(token_losses)}"
        )
    loss_sum = float(sum(value for sample in token_losses for value in sample))
    if token_kls is not None:
        if len(token_kls) != group_size:
            raise ContractViolation("token_kls must match the group size")
        kl_sum = float(sum(value for sample in token_kls for value in sample))
        surrogate_sum = loss_sum + params.beta * kl_sum
    else:
        kl_sum = 0.0
        surrogate_sum = loss_sum
    total = -loss_sum / (params.normalizer_length * group_size)
    return LossBreakdown(surrogate_sum=surrogate_sum, kl_sum=kl_sum, total=total)


def group_loss(
    group_logprobs: Sequence[TokenLogProbs],
    advantages: Sequence[float],
    params: GrpoHyperparams,
) -> LossBreakdown:
    """Full pipeline over one group: per-token losses, KLs, and the total."""
    if len(group_logprobs) != len(advantages):
        raise ContractViolation("one advantage per sample is required")
    losses = [
        per_token_loss(lp, adv, params) for lp, adv in zip(group_logprobs, advantages)
    ]
    kls = [per_token_kl(lp) for lp in group_logprobs]
    return dr_grpo_loss(losses, params, len(group_logprobs), token_kls=kls)


def unified_score(r_t: float, r_v: float, weights: RewardWeights) -> float:
    """Convex mix of the two rewards."""
    for name, value in (("r_t", r_t), ("r_v", r_v)):
        if not 0.0 <= value <= 1.0:
            raise ContractViolation(f"{name} must lie in [0, 1], got {value}")
    return weights.lambda_t * r_t + weights.lambda_v * r_v


class RewardEngine:
    """Bundles the extractor, scorers, renderer, and embedders behind one call.

    ``renderer`` is any object with ``render_code(code) -> RenderOutcome``;
    it may be None for text-only scoring (visual failures then surface as
    render_failed).
    """

    def __init__(
        self,
        code_embedder,
        image_embedder,
        renderer=None,
        weights: RewardWeights = RewardWeights(),
        *,
        sample_fps: float = defaults.SAMPLE_FPS,
        strictness: float = defaults.DTW_STRICTNESS,
        decoder=None,
        dtw_mode: str = "auto",
        max_n: int = defaults.BLEU_MAX_N,
        keyword_weight: float = defaults.KEYWORD_WEIGHT,
        codebleu_weights: Sequence[float] = defaults.CODEBLEU_WEIGHTS,
        extra_keywords: frozenset[str] = frozenset(),
    ) -> None:
        self.code_embedder = code_embedder
        self.image_embedder = image_embedder
        self.renderer = renderer
        self.weights = weights
        self.sample_fps = sample_fps
        self.strictness = strictness
        self.decoder = decoder
        self.dtw_mode = dtw_mode
        self.max_n = max_n
        self.keyword_weight = keyword_weight
        self.codebleu_weights = tuple(codebleu_weights)
        self.extra_keywords = extra_keywords

    def score_codes(self, gen_code: str, ref_code: str) -> CodeScoreBreakdown:
        return score_code_pair(
            gen_code,
            ref_code,
            self.code_embedder,
            max_n=self.max_n,
            keyword_weight=self.keyword_weight,
            weights=self.codebleu_weights,
            extra_keywords=self.extra_keywords,
        )

    def frames_of(self, video: str | Path | FrameSequence) -> FrameSequence:
        if isinstance(video, FrameSequence):
            return video
        return sample_frames(video, self.sample_fps, self.decoder)

    def score_videos(
        self,
        gen_video: str | Path | FrameSequence,
        ref_video: str | Path | FrameSequence,
    ) -> VisualScoreBreakdown:
        return score_video_pair(
            self.frames_of(gen_video),
            self.frames_of(ref_video),
            self.image_embedder,
            self.strictness,
            self.dtw_mode,
        )

    def score_rendered(
        self,
        code: str | None,
        video: str | Path | FrameSequence | None,
        ref_code: str,
        ref_video: str | Path | FrameSequence,
        render_status: str | None = None,
    ) -> RewardBreakdown:
        """Score already-rendered artifacts (used by the agent/harness path)."""
        if code is None:
            return RewardBreakdown(
                r_t=0.0,
                r_v=0.0,
                unified=0.0,
                code_scores=None,
                visual_scores=None,
                failure=FAILURE_NO_CODE,
                render_status=render_status,
            )
        code_scores = self.score_codes(code, ref_code)
        r_t = code_scores.text_reward
        gen_frames: FrameSequence | None = None
        if video is not None:
            try:
                gen_frames = self.frames_of(video)
            except MediaError:
                gen_frames = None
        if gen_frames is None:
            return RewardBreakdown(
                r_t=r_t,
                r_v=0.0,
                unified=unified_score(r_t, 0.0, self.weights),
                code_scores=code_scores,
                visual_scores=None,
                failure=FAILURE_RENDER,
                render_status=render_status,
            )
        try:
            ref_frames = self.frames_of(ref_video)
        except MediaError as exc:
            raise DatasetError(f"reference video is not decodable: {exc}") from exc
        visual_scores = self.score_videos(gen_frames, ref_frames)
        r_v = visual_scores.visual_reward
        return RewardBreakdown(
            r_t=r_t,
            r_v=r_v,
            unified=unified_score(r_t, r_v, self.weights),
            code_scores=code_scores,
            visual_scores=visual_scores,
            failure=FAILURE_NONE,
            render_status=render_status,
        )

    def unified_reward(
        self,
        completion: str | Completion,
        ref_code: str,
        ref_video: str | Path | FrameSequence,
    ) -> RewardBreakdown:
        """Extract, render, and score one completion against its reference.

        The reference video must be decodable (references are expected to
        render; a broken reference is a dataset error, not a sample failure).
        """
        snippet = extract_code(completion)
        if snippet is None:
            return self.score_rendered(None, None, ref_code, ref_video)
        if self.renderer is None:
            return self.score_rendered(snippet.code, None, ref_code, ref_video)
        outcome = self.renderer.render_code(snippet.code)
        video = outcome.video_path if outcome.status == "success" else None
        return self.score_rendered(
            snippet.code, video, ref_code, ref_video, render_status=outcome.status
        )
