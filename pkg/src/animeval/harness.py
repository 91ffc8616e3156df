"""Benchmark harness: dataset loading, evaluation runs, aggregate metrics.

An evaluation walks every dataset record, obtains a completion (live from the
agent or from a pre-generated completions file), scores it against the
reference code and reference video, and aggregates Visual Similarity (VS),
CodeBERTBLEU (CBB), Render Success Rate (RSR), and the (vs, cbb) rank
correlations.  Failed records contribute zero scores; they never abort a run.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import shutil
from dataclasses import dataclass, replace
from pathlib import Path

from .agent import AgentConfig, run_agent
from .codeblock import extract_code
from .docskb import KnowledgeBase
from .errors import AnimevalError, ContractViolation, DatasetError
from .renderer import STATUS_SUCCESS
from .rewardcore import RewardEngine
from .stats import kendall_tau, spearman_rho

logger = logging.getLogger(__name__)

FAILURE_DEPENDENCY = "dependency_error"


@dataclass(frozen=True)
class DatasetRecord:
    """One benchmark item: a description and its reference implementation."""

    id: str
    description: str
    reference_code: str
    reference_video: Path | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ContractViolation("record id must be non-empty")
        if not self.reference_code:
            raise ContractViolation(f"record {self.id}: reference_code must be non-empty")


@dataclass(frozen=True)
class EvalRecord:
    """Scores and provenance for one evaluated record."""

    id: str
    final_code: str | None
    render_status: str
    vs: float
    cbb: float
    rounds_used: int
    failure: str


@dataclass(frozen=True)
class AggregateReport:
    """Run-level metrics; percentages over all n records including failures."""

    mean_vs: float
    mean_cbb: float
    rsr: float
    n: int
    per_record: tuple[EvalRecord, ...]
    spearman_rho: float | None
    kendall_tau: float | None


def _parse_jsonl(path: Path, required: tuple[str, ...]) -> list[tuple[int, dict]]:
    if not path.is_file():
        raise DatasetError(f"file does not exist: {path}")
    rows: list[tuple[int, dict]] = []
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except ValueError as exc:
                raise DatasetError(f"{path} line {line_no}: invalid JSON ({exc})") from exc
            if not isinstance(doc, dict):
                raise DatasetError(f"{path} line {line_no}: expected a JSON object")
            for field_name in required:
                if field_name not in doc:
                    raise DatasetError(f"{path} line {line_no}: missing field {field_name!r}")
                if not isinstance(doc[field_name], str) or not doc[field_name]:
                    raise DatasetError(
                        f"{path} line {line_no}: field {field_name!r} must be a non-empty string"
                    )
            rows.append((line_no, doc))
    return rows


def load_dataset(path: str | Path) -> list[DatasetRecord]:
    """Read a JSONL dataset (one {id, description, reference_code} per line)."""
    rows = _parse_jsonl(Path(path), ("id", "description", "reference_code"))
    records: list[DatasetRecord] = []
    seen: dict[str, int] = {}
    for line_no, doc in rows:
        record_id = doc["id"]
        if record_id in seen:
            raise DatasetError(
                f"{path}: duplicate id {record_id!r} on lines {seen[record_id]} and {line_no}"
            )
        seen[record_id] = line_no
        records.append(
            DatasetRecord(
                id=record_id,
                description=doc["description"],
                reference_code=doc["reference_code"],
            )
        )
    return records


def load_completions(path: str | Path) -> dict[str, str]:
    """Read a completions JSONL (one {id, completion} per line) into a map."""
    rows = _parse_jsonl(Path(path), ("id",))
    completions: dict[str, str] = {}
    for line_no, doc in rows:
        if "completion" not in doc or not isinstance(doc["completion"], str):
            raise DatasetError(f"{path} line {line_no}: missing field 'completion'")
        record_id = doc["id"]
        if record_id in completions:
            raise DatasetError(f"{path} line {line_no}: duplicate id {record_id!r}")
        completions[record_id] = doc["completion"]
    return completions


def precompute_references(
    records: list[DatasetRecord], renderer, cache_dir: str | Path | None = None
) -> list[DatasetRecord]:
    """Render every reference once and attach the videos.

    With ``cache_dir`` set, rendered references are kept there keyed by the
    hash of the exact code text, so a second invocation performs zero renders.
    Any reference that fails to render makes the whole dataset unusable, so
    all offending ids are reported in one fatal error.
    """
    cache = Path(cache_dir) if cache_dir is not None else None
    if cache is not None:
        cache.mkdir(parents=True, exist_ok=True)
    out: list[DatasetRecord] = []
    broken: list[str] = []
    for record in records:
        target = None
        if cache is not None:
            key = hashlib.sha256(record.reference_code.encode("utf-8")).hexdigest()
            target = cache / f"{key}.mp4"
            if target.is_file() and target.stat().st_size > 0:
                out.append(replace(record, reference_video=target))
                continue
        outcome = renderer.render_code(record.reference_code)
        if outcome.status != STATUS_SUCCESS:
            broken.append(record.id)
            continue
        video = Path(outcome.video_path)
        if target is not None:
            shutil.copyfile(video, target)
            video = target
        out.append(replace(record, reference_video=video))
    if broken:
        raise DatasetError(
            "reference code failed to render for ids: " + ", ".join(broken)
        )
    return out


def _evaluate_offline(record: DatasetRecord, completion: str, engine: RewardEngine) -> EvalRecord:
    snippet = extract_code(completion)
    breakdown = engine.unified_reward(completion, record.reference_code, record.reference_video)
    return EvalRecord(
        id=record.id,
        final_code=snippet.code if snippet else None,
        render_status=breakdown.render_status or "fail",
        vs=breakdown.r_v,
        cbb=breakdown.r_t,
        rounds_used=1,
        failure=breakdown.failure,
    )


def _evaluate_live(
    record: DatasetRecord,
    engine: RewardEngine,
    agent_config: AgentConfig,
    llm,
    renderer,
    kb: KnowledgeBase | None,
) -> EvalRecord:
    trace = run_agent(
        record.description, agent_config, llm=llm, renderer=renderer, kb=kb
    )
    last = trace.iterations[-1]
    video = last.video_path if trace.final_status == STATUS_SUCCESS else None
    breakdown = engine.score_rendered(
        trace.final_code,
        video,
        record.reference_code,
        record.reference_video,
        render_status=trace.final_status,
    )
    return EvalRecord(
        id=record.id,
        final_code=trace.final_code,
        render_status=trace.final_status,
        vs=breakdown.r_v,
        cbb=breakdown.r_t,
        rounds_used=trace.rounds_used,
        failure=breakdown.failure,
    )


def evaluate_run(
    records: list[DatasetRecord],
    engine: RewardEngine,
    *,
    completions: dict[str, str] | None = None,
    agent_config: AgentConfig | None = None,
    llm=None,
    renderer=None,
    kb: KnowledgeBase | None = None,
) -> AggregateReport:
    """Evaluate every record and aggregate the run metrics.

    Offline mode consumes ``completions`` (id -> raw completion text); live
    mode drives the agent via ``llm``/``renderer``.  References must be
    precomputed (reference_video populated).  Per-record failures are scored
    as zeros and recorded, never raised.
    """
    if not records:
        raise ContractViolation("evaluate_run requires at least one record")
    if completions is None and llm is None:
        raise ContractViolation("either completions (offline) or llm (live) is required")
    if completions is not None:
        missing = [r.id for r in records if r.id not in completions]
        if missing:
            raise DatasetError(
                "completions file lacks ids: " + ", ".join(sorted(missing))
            )
    per_record: list[EvalRecord] = []
    for record in records:
        if record.reference_video is None:
            raise ContractViolation(
                f"record {record.id}: reference video missing (run precompute_references)"
            )
        try:
            if completions is not None:
                per_record.append(_evaluate_offline(record, completions[record.id], engine))
            else:
                per_record.append(
                    _evaluate_live(
                        record,
                        engine,
                        agent_config or AgentConfig(),
                        llm,
                        renderer,
                        kb,
                    )
                )
        except DatasetError:
            raise
        except AnimevalError as exc:
            logger.warning("record %s failed: %s", record.id, exc)
            per_record.append(
                EvalRecord(
                    id=record.id,
                    final_code=None,
                    render_status="fail",
                    vs=0.0,
                    cbb=0.0,
                    rounds_used=0,
                    failure=FAILURE_DEPENDENCY,
                )
            )
    return aggregate(per_record)


def aggregate(per_record: list[EvalRecord]) -> AggregateReport:
    """Fold per-record scores into the run-level report."""
    n = len(per_record)
    if n == 0:
        raise ContractViolation("aggregate requires at least one record")
    vs_values = [r.vs for r in per_record]
    cbb_values = [r.cbb for r in per_record]
    successes = sum(1 for r in per_record if r.render_status == STATUS_SUCCESS)
    rho = tau = None
    if n >= 2:
        rho_value = spearman_rho(vs_values, cbb_values)
        tau_value = kendall_tau(vs_values, cbb_values)
        rho = None if math.isnan(rho_value) else rho_value
        tau = None if math.isnan(tau_value) else tau_value
    return AggregateReport(
        mean_vs=100.0 * sum(vs_values) / n,
        mean_cbb=100.0 * sum(cbb_values) / n,
        rsr=100.0 * successes / n,
        n=n,
        per_record=tuple(per_record),
        spearman_rho=rho,
        kendall_tau=tau,
    )
