"""Run configuration: one JSON document driving the whole toolkit.

``RunConfig`` mirrors the JSON layout section by section; ``RunConfig.default()``
is the shipped configuration.  The ``build_*`` helpers turn a config into live
objects (reward engine, renderer, chat client, knowledge base).  Endpoint
credentials never live in the document — only the names of environment
variables that hold them.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import defaults
from .agent import AgentConfig, GenerationParams, PromptTemplates
from .docskb import KnowledgeBase, load_or_build_kb
from .embeddings import (
    HashedTokenEmbedder,
    HttpCodeEmbedder,
    HttpImageEmbedder,
    PixelGridEmbedder,
)
from .endpoint import EndpointConfig
from .errors import ConfigurationError
from .renderer import ManimRenderer, RendererConfig
from .rewardcore import RewardEngine, RewardWeights

_AGENT_MODES = ("vanilla", "ritl", "ritl_doc")
_DTW_MODES = ("exact", "fast", "auto")
_QUALITIES = ("low", "medium", "high")


@dataclass(frozen=True)
class SsimConstants:
    """Declared SSIM kernel constants.

    The kernel is fixed; these fields document it in the config document and
    reject any attempt to run with unsupported values.
    """

    window: int = defaults.SSIM_WINDOW
    sigma: float = defaults.SSIM_SIGMA
    k1: float = defaults.SSIM_K1
    k2: float = defaults.SSIM_K2
    dynamic_range: int = defaults.SSIM_DYNAMIC_RANGE

    def __post_init__(self) -> None:
        fixed = SsimConstants.__dataclass_fields__
        for name in fixed:
            if getattr(self, name) != fixed[name].default:
                raise ConfigurationError(
                    f"ssim constant {name!r} is fixed at {fixed[name].default}; "
                    f"got {getattr(self, name)}"
                )


@dataclass(frozen=True)
class MetricSettings:
    """Knobs of the text and visual metrics."""

    sample_fps: float = defaults.SAMPLE_FPS
    dtw_strictness: float = defaults.DTW_STRICTNESS
    dtw_mode: str = "auto"
    bleu_max_n: int = defaults.BLEU_MAX_N
    keyword_weight: float = defaults.KEYWORD_WEIGHT
    codebleu_weights: tuple[float, float, float] = defaults.CODEBLEU_WEIGHTS
    ssim: SsimConstants = field(default_factory=SsimConstants)

    def __post_init__(self) -> None:
        if self.sample_fps <= 0:
            raise ConfigurationError("sample_fps must be positive")
        if self.dtw_strictness <= 0:
            raise ConfigurationError("dtw_strictness must be positive")
        if self.dtw_mode not in _DTW_MODES:
            raise ConfigurationError(f"dtw_mode must be one of {_DTW_MODES}")
        if self.bleu_max_n < 1:
            raise ConfigurationError("bleu_max_n must be >= 1")
        if self.keyword_weight < 1:
            raise ConfigurationError("keyword_weight must be >= 1")


@dataclass(frozen=True)
class AgentSettings:
    """Self-correction loop settings (templates referenced by path)."""

    mode: str = "vanilla"
    max_rounds: int = 1
    doc_budget: int = defaults.DOC_BUDGET
    error_tail_lines: int = defaults.ERROR_TAIL_LINES
    template_path: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in _AGENT_MODES:
            raise ConfigurationError(f"agent mode must be one of {_AGENT_MODES}")
        if self.max_rounds < 0:
            raise ConfigurationError("max_rounds must be >= 0")
        if self.doc_budget <= 0:
            raise ConfigurationError("doc_budget must be positive")
        if self.error_tail_lines < 1:
            raise ConfigurationError("error_tail_lines must be >= 1")


@dataclass(frozen=True)
class GrpoSettings:
    """Group size and loss constants for the policy-gradient kernel."""

    group_size: int = defaults.GROUP_SIZE
    epsilon: float = defaults.CLIP_EPSILON
    beta: float = defaults.KL_BETA
    normalizer_length: int = defaults.LOSS_NORMALIZER_LENGTH

    def __post_init__(self) -> None:
        if self.group_size < 2:
            raise ConfigurationError("group_size must be >= 2")
        if self.epsilon <= 0:
            raise ConfigurationError("epsilon must be positive")
        if self.beta < 0:
            raise ConfigurationError("beta must be non-negative")
        if self.normalizer_length < 1:
            raise ConfigurationError("normalizer_length must be >= 1")


@dataclass(frozen=True)
class ChatSettings:
    """Chat-completion endpoint plus generation parameters."""

    url: str = ""
    model: str = ""
    temperature: float = defaults.TEMPERATURE
    max_tokens: int = defaults.MAX_TOKENS
    timeout: float = 30.0
    retries: int = 3
    backoff_base: float = 0.5
    token_env: str = ""

    def endpoint(self) -> EndpointConfig:
        return EndpointConfig(
            url=self.url,
            timeout=self.timeout,
            retries=self.retries,
            backoff_base=self.backoff_base,
            token_env=self.token_env,
        )


@dataclass(frozen=True)
class EmbedderSettings:
    """One embedding endpoint; an empty URL selects the offline fallback."""

    url: str = ""
    timeout: float = 30.0
    retries: int = 3
    backoff_base: float = 0.5
    token_env: str = ""

    def endpoint(self) -> EndpointConfig:
        return EndpointConfig(
            url=self.url,
            timeout=self.timeout,
            retries=self.retries,
            backoff_base=self.backoff_base,
            token_env=self.token_env,
        )


@dataclass(frozen=True)
class RendererSettings:
    """Renderer child-process settings."""

    executable: tuple[str, ...] = ("manim",)
    subcommand: tuple[str, ...] = ()
    extra_args: tuple[str, ...] = ("--disable_caching",)
    quality: str = defaults.RENDER_QUALITY
    timeout: float = defaults.RENDER_TIMEOUT

    def __post_init__(self) -> None:
        if not self.executable:
            raise ConfigurationError("renderer executable must be non-empty")
        if self.quality not in _QUALITIES:
            raise ConfigurationError(f"quality must be one of {_QUALITIES}")
        if self.timeout <= 0:
            raise ConfigurationError("renderer timeout must be positive")


@dataclass(frozen=True)
class KbSettings:
    """Where the documentation knowledge base comes from and is stored."""

    source: str | None = None
    path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    """Top-level configuration; every section has working defaults."""

    agent: AgentSettings = field(default_factory=AgentSettings)
    weights: RewardWeights = field(default_factory=RewardWeights)
    metrics: MetricSettings = field(default_factory=MetricSettings)
    grpo: GrpoSettings = field(default_factory=GrpoSettings)
    chat: ChatSettings = field(default_factory=ChatSettings)
    code_embedder: EmbedderSettings = field(default_factory=EmbedderSettings)
    image_embedder: EmbedderSettings = field(default_factory=EmbedderSettings)
    renderer: RendererSettings = field(default_factory=RendererSettings)
    kb: KbSettings = field(default_factory=KbSettings)
    cache_dir: str | None = None
    output_dir: str = "reports"

    @classmethod
    def default(cls) -> "RunConfig":
        return cls()

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigurationError("config document must be a JSON object")
        sections = {
            "agent": AgentSettings,
            "weights": RewardWeights,
            "metrics": MetricSettings,
            "grpo": GrpoSettings,
            "chat": ChatSettings,
            "code_embedder": EmbedderSettings,
            "image_embedder": EmbedderSettings,
            "renderer": RendererSettings,
            "kb": KbSettings,
        }
        scalars = {"cache_dir", "output_dir"}
        unknown = set(doc) - set(sections) - scalars
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict = {}
        for name, section_cls in sections.items():
            if name not in doc:
                continue
            kwargs[name] = _section_from_dict(section_cls, doc[name], name)
        for name in scalars:
            if name in doc:
                kwargs[name] = doc[name]
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            doc = json.loads(text)
        except ValueError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        file = Path(path)
        if not file.is_file():
            raise ConfigurationError(f"config file does not exist: {file}")
        return cls.from_json(file.read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")


def _section_from_dict(section_cls, doc, name: str):
    if not isinstance(doc, dict):
        raise ConfigurationError(f"config section {name!r} must be a JSON object")
    fields = section_cls.__dataclass_fields__
    unknown = set(doc) - set(fields)
    if unknown:
        raise ConfigurationError(f"unknown keys in section {name!r}: {sorted(unknown)}")
    kwargs = dict(doc)
    if name == "agent" and isinstance(kwargs.get("mode"), str):
        kwargs["mode"] = kwargs["mode"].replace("-", "_")
    if name == "metrics" and "ssim" in kwargs:
        kwargs["ssim"] = _section_from_dict(SsimConstants, kwargs["ssim"], "metrics.ssim")
    for key in ("codebleu_weights", "executable", "subcommand", "extra_args"):
        if key in kwargs and isinstance(kwargs[key], list):
            kwargs[key] = tuple(kwargs[key])
    try:
        return section_cls(**kwargs)
    except TypeError as exc:
        raise ConfigurationError(f"section {name!r}: {exc}") from exc


def build_renderer(config: RunConfig) -> ManimRenderer:
    """Cached renderer per the config's renderer section."""
    cache_dir = None
    if config.cache_dir is not None:
        cache_dir = Path(config.cache_dir) / "renders"
    return ManimRenderer(
        RendererConfig(
            executable=config.renderer.executable,
            subcommand=config.renderer.subcommand,
            extra_args=config.renderer.extra_args,
        ),
        cache_dir=cache_dir,
        quality=config.renderer.quality,
        timeout=config.renderer.timeout,
    )


def build_code_embedder(config: RunConfig, offline: bool = False):
    if offline or not config.code_embedder.url:
        return HashedTokenEmbedder()
    return HttpCodeEmbedder(config.code_embedder.endpoint())


def build_image_embedder(config: RunConfig, offline: bool = False):
    if offline or not config.image_embedder.url:
        return PixelGridEmbedder()
    return HttpImageEmbedder(config.image_embedder.endpoint())


def build_engine(
    config: RunConfig, renderer=None, *, offline: bool = False, extra_keywords=frozenset()
) -> RewardEngine:
    """Reward engine wired per the config (offline selects local embedders)."""
    return RewardEngine(
        build_code_embedder(config, offline),
        build_image_embedder(config, offline),
        renderer,
        config.weights,
        sample_fps=config.metrics.sample_fps,
        strictness=config.metrics.dtw_strictness,
        dtw_mode=config.metrics.dtw_mode,
        max_n=config.metrics.bleu_max_n,
        keyword_weight=config.metrics.keyword_weight,
        codebleu_weights=config.metrics.codebleu_weights,
        extra_keywords=extra_keywords,
    )


def build_generation_params(config: RunConfig) -> GenerationParams:
    if not config.chat.url:
        raise ConfigurationError("chat.url is required for live generation")
    return GenerationParams(
        temperature=config.chat.temperature,
        max_tokens=config.chat.max_tokens,
        model_name=config.chat.model,
        endpoint=config.chat.endpoint(),
    )


def build_agent_config(config: RunConfig) -> AgentConfig:
    templates = (
        PromptTemplates.load(config.agent.template_path)
        if config.agent.template_path
        else PromptTemplates.default()
    )
    return AgentConfig(
        mode=config.agent.mode,
        max_rounds=config.agent.max_rounds,
        doc_budget=config.agent.doc_budget,
        error_tail_lines=config.agent.error_tail_lines,
        templates=templates,
    )


def load_kb_from_config(config: RunConfig) -> KnowledgeBase | None:
    """KB per the kb section: load serialized, build from source, or None."""
    source, path = config.kb.source, config.kb.path
    if source and path:
        return load_or_build_kb(source, path)
    if path:
        return KnowledgeBase.load(path)
    if source:
        from .docskb import build_kb

        return build_kb(source)
    return None


def kb_keywords(kb: KnowledgeBase | None) -> frozenset[str]:
    """Exported names of the KB, used as extra keyword tokens in scoring."""
    if kb is None:
        return frozenset()
    return frozenset(entry.name for entry in kb.entries)
