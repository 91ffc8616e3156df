"""Self-correcting generation loops: vanilla, render-feedback, and doc-augmented.

The agent asks a chat endpoint for Manim code, renders it, and — in the
feedback modes — rebuilds a fresh two-message prompt from the description, the
failing code, and the truncated renderer error (plus retrieved API docs in
``ritl_doc`` mode), repeating up to a bounded number of correction rounds.
Conversations never accumulate: every round stands alone.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import defaults
from .codeblock import extract_code
from .docskb import DocBundle, KnowledgeBase, extract_api_calls, retrieve_docs
from .endpoint import EndpointConfig, post_json
from .errors import (
    ConfigurationError,
    ContractViolation,
    EndpointError,
    EnvironmentFailure,
)
from .renderer import STATUS_SUCCESS, tail_lines

MODE_VANILLA = "vanilla"
MODE_RITL = "ritl"
MODE_RITL_DOC = "ritl_doc"
_MODES = (MODE_VANILLA, MODE_RITL, MODE_RITL_DOC)

NO_CODE_ERROR = "no code block in model output"
_EMPTY_ERROR_PLACEHOLDER = "(no renderer output)"
_EMPTY_DOCS_PLACEHOLDER = "(no matching API documentation)"
_NO_CODE_PLACEHOLDER = "(no code block was extracted from the previous response)"

_SECTION_RE = re.compile(r"^\[(\w+)\]\s*$", re.MULTILINE)


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ContractViolation(f"unknown chat role: {self.role!r}")
        if self.role in ("system", "user") and not self.content:
            raise ContractViolation(f"{self.role} message content must be non-empty")


@dataclass(frozen=True)
class GenerationParams:
    """Sampling settings plus how to reach the chat endpoint."""

    temperature: float = defaults.TEMPERATURE
    max_tokens: int = defaults.MAX_TOKENS
    model_name: str = ""
    endpoint: EndpointConfig = EndpointConfig(url="")

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ConfigurationError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ConfigurationError("max_tokens must be >= 1")


@dataclass(frozen=True)
class PromptTemplates:
    """Named prompt sections with {description}/{code}/{error}/{docs} slots."""

    system: str
    initial: str
    ritl: str
    ritl_doc: str

    @classmethod
    def from_text(cls, text: str) -> "PromptTemplates":
        sections: dict[str, str] = {}
        matches = list(_SECTION_RE.finditer(text))
        for i, match in enumerate(matches):
            end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
            sections[match.group(1)] = text[match.end() : end].strip("\n")
        missing = {"system", "initial", "ritl", "ritl_doc"} - sections.keys()
        if missing:
            raise ConfigurationError(
                f"prompt template file is missing sections: {sorted(missing)}"
            )
        return cls(
            system=sections["system"],
            initial=sections["initial"],
            ritl=sections["ritl"],
            ritl_doc=sections["ritl_doc"],
        )

    @classmethod
    def load(cls, path: str | Path) -> "PromptTemplates":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "PromptTemplates":
        text = (
            resources.files("animeval").joinpath("templates/default.txt").read_text("utf-8")
        )
        return cls.from_text(text)


@dataclass(frozen=True)
class AgentConfig:
    mode: str = MODE_VANILLA
    max_rounds: int = 1
    doc_budget: int = defaults.DOC_BUDGET
    error_tail_lines: int = defaults.ERROR_TAIL_LINES
    templates: PromptTemplates = field(default_factory=PromptTemplates.default)

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise ConfigurationError(f"unknown agent mode: {self.mode!r}")
        if self.max_rounds < 0:
            raise ConfigurationError("max_rounds must be >= 0")
        if self.doc_budget <= 0:
            raise ConfigurationError("doc_budget must be positive")
        if self.error_tail_lines < 1:
            raise ConfigurationError("error_tail_lines must be >= 1")


@dataclass(frozen=True)
class IterationRecord:
    """One generation + render attempt."""

    code: str | None
    source: str | None
    status: str
    error_tail: str
    prompt_chars: int
    docs_used: tuple[str, ...] = ()
    video_path: str | None = None


@dataclass(frozen=True)
class AgentTrace:
    iterations: tuple[IterationRecord, ...]
    final_code: str | None
    final_status: str
    rounds_used: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "iterations": [
                    {
                        "code": it.code,
                        "source": it.source,
                        "status": it.status,
                        "error_tail": it.error_tail,
                        "prompt_chars": it.prompt_chars,
                        "docs_used": list(it.docs_used),
                        "video_path": it.video_path,
                    }
                    for it in self.iterations
                ],
                "final_code": self.final_code,
                "final_status": self.final_status,
                "rounds_used": self.rounds_used,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "AgentTrace":
        doc = json.loads(text)
        iterations = tuple(
            IterationRecord(
                code=item["code"],
                source=item["source"],
                status=item["status"],
                error_tail=item["error_tail"],
                prompt_chars=item["prompt_chars"],
                docs_used=tuple(item["docs_used"]),
                video_path=item.get("video_path"),
            )
            for item in doc["iterations"]
        )
        return cls(
            iterations=iterations,
            final_code=doc["final_code"],
            final_status=doc["final_status"],
            rounds_used=doc["rounds_used"],
        )


def llm_generate(messages: list[ChatMessage], params: GenerationParams) -> str:
    """One chat-completion call; returns the first choice's content verbatim."""
    payload = {
        "model": params.model_name,
        "messages": [{"role": m.role, "content": m.content} for m in messages],
        "temperature": params.temperature,
        "max_tokens": params.max_tokens,
    }
    body = post_json(params.endpoint, payload)
    try:
        content = body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise EndpointError(
            f"malformed chat response from {params.endpoint.url}"
        ) from exc
    if not isinstance(content, str):
        raise EndpointError(
            f"chat response content is not text ({type(content).__name__})"
        )
    return content


class HttpChatClient:
    """Callable chat client bound to fixed generation params."""

    def __init__(self, params: GenerationParams) -> None:
        self.params = params

    def generate(self, messages: list[ChatMessage]) -> str:
        return llm_generate(messages, self.params)


def build_prompt_initial(
    description: str, templates: PromptTemplates
) -> list[ChatMessage]:
    """System framing plus the bare animation description."""
    user = templates.initial.format(description=description)
    return [ChatMessage("system", templates.system), ChatMessage("user", user)]


def build_prompt_ritl(
    description: str, code: str, error_tail: str, templates: PromptTemplates
) -> list[ChatMessage]:
    """Fresh correction prompt: description, failing code, renderer error tail."""
    user = templates.ritl.format(
        description=description,
        code=code or _NO_CODE_PLACEHOLDER,
        error=error_tail or _EMPTY_ERROR_PLACEHOLDER,
    )
    return [ChatMessage("system", templates.system), ChatMessage("user", user)]


def build_prompt_ritl_doc(
    description: str,
    code: str,
    error_tail: str,
    docs: DocBundle,
    templates: PromptTemplates,
) -> list[ChatMessage]:
    """Correction prompt extended with retrieved API documentation."""
    user = templates.ritl_doc.format(
        description=description,
        code=code or _NO_CODE_PLACEHOLDER,
        error=error_tail or _EMPTY_ERROR_PLACEHOLDER,
        docs=docs.rendered or _EMPTY_DOCS_PLACEHOLDER,
    )
    return [ChatMessage("system", templates.system), ChatMessage("user", user)]


def prompt_chars(messages: list[ChatMessage]) -> int:
    return sum(len(m.content) for m in messages)


def _attempt(
    messages: list[ChatMessage],
    llm,
    renderer,
    docs_used: tuple[str, ...],
) -> IterationRecord:
    """Run one generate + render attempt, mapping failures to a record."""
    chars = prompt_chars(messages)
    completion = llm.generate(messages)
    snippet = extract_code(completion)
    if snippet is None:
        return IterationRecord(
            code=None,
            source=None,
            status="fail",
            error_tail=NO_CODE_ERROR,
            prompt_chars=chars,
            docs_used=docs_used,
        )
    outcome = renderer.render_code(snippet.code)
    return IterationRecord(
        code=snippet.code,
        source=snippet.source,
        status=outcome.status,
        error_tail=outcome.error_tail,
        prompt_chars=chars,
        docs_used=docs_used,
        video_path=str(outcome.video_path) if outcome.video_path else None,
    )


def run_agent(
    description: str,
    config: AgentConfig,
    *,
    llm,
    renderer,
    kb: KnowledgeBase | None = None,
) -> AgentTrace:
    """Run one full generation loop and return its trace.

    ``llm`` needs ``generate(list[ChatMessage]) -> str`` and ``renderer``
    needs ``render_code(code) -> RenderOutcome``.  Dependency errors (endpoint
    or renderer environment) terminate the run with final status ``fail`` and
    the error recorded on the last iteration.
    """
    if config.mode == MODE_RITL_DOC and kb is None:
        raise ConfigurationError("ritl_doc mode requires a knowledge base")
    iterations: list[IterationRecord] = []
    dependency_failed = False

    def protected(messages: list[ChatMessage], docs_used: tuple[str, ...]) -> IterationRecord:
        nonlocal dependency_failed
        try:
            return _attempt(messages, llm, renderer, docs_used)
        except (EndpointError, EnvironmentFailure) as exc:
            dependency_failed = True
            return IterationRecord(
                code=None,
                source=None,
                status="fail",
                error_tail=tail_lines(str(exc), config.error_tail_lines),
                prompt_chars=prompt_chars(messages),
                docs_used=docs_used,
            )

    record = protected(build_prompt_initial(description, config.templates), ())
    iterations.append(record)

    if config.mode != MODE_VANILLA:
        for _ in range(config.max_rounds):
            if record.status == STATUS_SUCCESS or dependency_failed:
                break
            failing_code = record.code or ""
            error_tail = tail_lines(record.error_tail, config.error_tail_lines)
            if config.mode == MODE_RITL_DOC:
                names = extract_api_calls(failing_code, kb) if failing_code else []
                docs = retrieve_docs(names, kb, config.doc_budget)
                messages = build_prompt_ritl_doc(
                    description, failing_code, error_tail, docs, config.templates
                )
                docs_used = tuple(dict.fromkeys(entry.name for entry in docs.entries))
            else:
                messages = build_prompt_ritl(
                    description, failing_code, error_tail, config.templates
                )
                docs_used = ()
            record = protected(messages, docs_used)
            iterations.append(record)

    final = iterations[-1]
    return AgentTrace(
        iterations=tuple(iterations),
        final_code=final.code,
        final_status=final.status,
        rounds_used=len(iterations),
    )
