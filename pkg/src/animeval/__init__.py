"""animeval: rewards, self-correcting generation, and benchmarks for Manim code.

The package scores LLM-generated Manim programs against references along two
axes — a code-similarity text reward and a DTW-aligned video reward — mixes
them into one unified reward, provides the numeric kernel of the
group-relative policy-gradient loss built on that reward, runs a
renderer-in-the-loop self-correction agent, and evaluates datasets end to end
with report emission.
"""

from .agent import (
    AgentConfig,
    AgentTrace,
    ChatMessage,
    GenerationParams,
    HttpChatClient,
    IterationRecord,
    PromptTemplates,
    run_agent,
)
from .codeblock import CodeSnippet, Completion, extract_code
from .codemetrics import (
    CodeScoreBreakdown,
    ast_distance,
    codebleu,
    cosine_similarity,
    ngram_match,
    parse_syntax,
    syntax_match,
    text_reward,
    tokenize_code,
    tree_edit_distance,
    weighted_ngram_match,
)
from .config import (
    RunConfig,
    build_agent_config,
    build_engine,
    build_renderer,
    load_kb_from_config,
)
from .docskb import (
    ApiEntry,
    DocBundle,
    KnowledgeBase,
    build_kb,
    extract_api_calls,
    load_or_build_kb,
    retrieve_docs,
)
from .embeddings import (
    HashedTokenEmbedder,
    HttpCodeEmbedder,
    HttpImageEmbedder,
    PixelGridEmbedder,
)
from .endpoint import EndpointConfig
from .errors import (
    AnimevalError,
    ConfigurationError,
    ContractViolation,
    DatasetError,
    EndpointError,
    EnvironmentFailure,
    MediaError,
    RendererUnavailable,
)
from .harness import (
    AggregateReport,
    DatasetRecord,
    EvalRecord,
    evaluate_run,
    load_completions,
    load_dataset,
    precompute_references,
)
from .renderer import ManimRenderer, RendererConfig, RenderOutcome, RenderRequest
from .report import emit_report
from .rewardcore import (
    GroupRewards,
    GrpoHyperparams,
    LossBreakdown,
    RewardBreakdown,
    RewardEngine,
    RewardWeights,
    TokenLogProbs,
    dr_grpo_loss,
    group_advantages,
    group_loss,
    per_token_kl,
    per_token_loss,
    unified_score,
)
from .stats import kendall_tau, spearman_rho
from .videometrics import (
    AlignmentResult,
    FrameSequence,
    VisualScoreBreakdown,
    dtw_distance,
    sample_frames,
    score_video_pair,
    ssim,
    ssim_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "AgentConfig",
    "AgentTrace",
    "AggregateReport",
    "AlignmentResult",
    "AnimevalError",
    "ApiEntry",
    "ChatMessage",
    "CodeScoreBreakdown",
    "CodeSnippet",
    "Completion",
    "ConfigurationError",
    "ContractViolation",
    "DatasetError",
    "DatasetRecord",
    "DocBundle",
    "EndpointConfig",
    "EndpointError",
    "EnvironmentFailure",
    "EvalRecord",
    "FrameSequence",
    "GenerationParams",
    "GroupRewards",
    "GrpoHyperparams",
    "HashedTokenEmbedder",
    "HttpChatClient",
    "HttpCodeEmbedder",
    "HttpImageEmbedder",
    "IterationRecord",
    "KnowledgeBase",
    "LossBreakdown",
    "ManimRenderer",
    "MediaError",
    "PixelGridEmbedder",
    "PromptTemplates",
    "RenderOutcome",
    "RenderRequest",
    "RendererConfig",
    "RendererUnavailable",
    "RewardBreakdown",
    "RewardEngine",
    "RewardWeights",
    "RunConfig",
    "TokenLogProbs",
    "VisualScoreBreakdown",
    "ast_distance",
    "build_agent_config",
    "build_engine",
    "build_kb",
    "build_renderer",
    "codebleu",
    "cosine_similarity",
    "dr_grpo_loss",
    "dtw_distance",
    "emit_report",
    "evaluate_run",
    "extract_api_calls",
    "extract_code",
    "group_advantages",
    "group_loss",
    "kendall_tau",
    "load_completions",
    "load_dataset",
    "load_kb_from_config",
    "load_or_build_kb",
    "ngram_match",
    "parse_syntax",
    "per_token_kl",
    "per_token_loss",
    "precompute_references",
    "retrieve_docs",
    "run_agent",
    "sample_frames",
    "score_video_pair",
    "spearman_rho",
    "ssim",
    "ssim_matrix",
    "syntax_match",
    "text_reward",
    "tokenize_code",
    "tree_edit_distance",
    "unified_score",
    "weighted_ngram_match",
]
