"""Command-line front-end: eval, agent, reward, render, and kb commands."""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click

from . import __version__
from .agent import HttpChatClient, run_agent
from .codeblock import extract_code
from .config import (
    RunConfig,
    build_agent_config,
    build_engine,
    build_generation_params,
    build_renderer,
    kb_keywords,
    load_kb_from_config,
)
from .docskb import KnowledgeBase, build_kb, render_entry
from .errors import AnimevalError
from .harness import evaluate_run, load_completions, load_dataset, precompute_references
from .renderer import STATUS_SUCCESS
from .report import emit_report, format_percent

_MODE_CHOICES = ("vanilla", "ritl", "ritl-doc")


def _load_config(path: str | None) -> RunConfig:
    return RunConfig.load(path) if path else RunConfig.default()


def _fail(exc: AnimevalError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@click.group()
@click.version_option(version=__version__, prog_name="animeval")
def main() -> None:
    """Evaluate LLM-generated Manim animations: rewards, agent loops, benchmarks."""


@main.command(name="eval")
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--offline",
    "offline_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Score pre-generated completions (JSONL with id/completion) instead of querying an endpoint.",
)
def eval_command(dataset: str, config_path: str, offline_path: str | None) -> None:
    """Run a benchmark evaluation and write the report artifacts."""
    try:
        config = _load_config(config_path)
        records = load_dataset(dataset)
        renderer = build_renderer(config)
        kb = load_kb_from_config(config)
        engine = build_engine(
            config,
            renderer,
            offline=offline_path is not None,
            extra_keywords=kb_keywords(kb),
        )
        reference_cache = (
            Path(config.cache_dir) / "references" if config.cache_dir else None
        )
        records = precompute_references(records, renderer, reference_cache)
        if offline_path is not None:
            report = evaluate_run(
                records, engine, completions=load_completions(offline_path)
            )
        else:
            llm = HttpChatClient(build_generation_params(config))
            report = evaluate_run(
                records,
                engine,
                agent_config=build_agent_config(config),
                llm=llm,
                renderer=renderer,
                kb=kb,
            )
        written = emit_report(report, config.output_dir)
    except AnimevalError as exc:
        _fail(exc)
        return
    click.echo(f"n={report.n}")
    click.echo(f"RSR={format_percent(report.rsr)}")
    click.echo(f"mean_VS={format_percent(report.mean_vs)}")
    click.echo(f"mean_CBB={format_percent(report.mean_cbb)}")
    rho = "n/a" if report.spearman_rho is None else f"{report.spearman_rho:.3f}"
    tau = "n/a" if report.kendall_tau is None else f"{report.kendall_tau:.3f}"
    click.echo(f"spearman_rho={rho}")
    click.echo(f"kendall_tau={tau}")
    for path in written:
        click.echo(f"wrote {path}")


@main.group()
def agent() -> None:
    """Generation with optional renderer-in-the-loop self-correction."""


@agent.command(name="run")
@click.option("--description", default=None, help="Animation description text.")
@click.option(
    "--file",
    "description_file",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Read the description from a file.",
)
@click.option("--mode", type=click.Choice(_MODE_CHOICES), default="vanilla")
@click.option("-K", "--max-rounds", "max_rounds", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--trace-out", type=click.Path(dir_okay=False), default=None)
def agent_run(
    description: str | None,
    description_file: str | None,
    mode: str,
    max_rounds: int | None,
    config_path: str | None,
    trace_out: str | None,
) -> None:
    """Generate (and optionally self-correct) one animation."""
    if (description is None) == (description_file is None):
        raise click.UsageError("provide exactly one of --description or --file")
    if description_file is not None:
        description = Path(description_file).read_text(encoding="utf-8")
    try:
        config = _load_config(config_path)
        agent_config = replace(build_agent_config(config), mode=mode.replace("-", "_"))
        if max_rounds is not None:
            agent_config = replace(agent_config, max_rounds=max_rounds)
        llm = HttpChatClient(build_generation_params(config))
        renderer = build_renderer(config)
        kb = load_kb_from_config(config) if agent_config.mode == "ritl_doc" else None
        trace = run_agent(description, agent_config, llm=llm, renderer=renderer, kb=kb)
    except AnimevalError as exc:
        _fail(exc)
        return
    for index, record in enumerate(trace.iterations, start=1):
        click.echo(f"round {index}: {record.status}", err=True)
        if record.error_tail:
            for line in record.error_tail.splitlines():
                click.echo(f"  {line}", err=True)
    click.echo(f"final status: {trace.final_status} ({trace.rounds_used} rounds)", err=True)
    if trace_out is not None:
        Path(trace_out).write_text(trace.to_json() + "\n", encoding="utf-8")
        click.echo(f"wrote {trace_out}", err=True)
    if trace.final_code:
        click.echo(trace.final_code)
    if trace.final_status != STATUS_SUCCESS:
        sys.exit(1)


def _read_code_or_completion(path: str) -> str:
    """Code from a file that may be raw code or a completion with code blocks."""
    text = Path(path).read_text(encoding="utf-8")
    snippet = extract_code(text)
    return snippet.code if snippet is not None else text


@main.command()
@click.option("--gen", "gen_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ref", "ref_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ref-video", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--offline", is_flag=True, default=False, help="Use local embedders.")
def reward(
    gen_path: str,
    ref_path: str,
    ref_video: str | None,
    config_path: str | None,
    offline: bool,
) -> None:
    """Score one generated program against a reference (text, optionally visual)."""
    try:
        config = _load_config(config_path)
        gen_code = _read_code_or_completion(gen_path)
        ref_code = _read_code_or_completion(ref_path)
        renderer = build_renderer(config) if ref_video is not None else None
        engine = build_engine(config, renderer, offline=offline)
        if ref_video is None:
            scores = engine.score_codes(gen_code, ref_code)
            click.echo(f"ngram={scores.ngram:.6f}")
            click.echo(f"weighted_ngram={scores.weighted_ngram:.6f}")
            click.echo(f"syntax_match={scores.syntax_match:.6f}")
            click.echo(f"codebleu={scores.codebleu:.6f}")
            click.echo(f"ast_distance={scores.ast_distance:.6f}")
            click.echo(f"codebert_sim={scores.codebert_sim:.6f}")
            click.echo(f"R_T={scores.text_reward:.6f}")
            return
        outcome = renderer.render_code(gen_code)
        video = outcome.video_path if outcome.status == STATUS_SUCCESS else None
        breakdown = engine.score_rendered(
            gen_code, video, ref_code, ref_video, render_status=outcome.status
        )
    except AnimevalError as exc:
        _fail(exc)
        return
    click.echo(f"render_status={breakdown.render_status}")
    click.echo(f"R_T={breakdown.r_t:.6f}")
    click.echo(f"R_V={breakdown.r_v:.6f}")
    click.echo(f"R={breakdown.unified:.6f}")
    if breakdown.visual_scores is not None:
        click.echo(f"S_ssim={breakdown.visual_scores.s_ssim:.6f}")
        click.echo(f"S_sem={breakdown.visual_scores.s_sem:.6f}")


@main.command()
@click.option("--code", "code_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--scene", default=None, help="Scene class to render (default: first Scene subclass).")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def render(code_path: str, scene: str | None, config_path: str | None) -> None:
    """Render one program and print the resulting video path."""
    try:
        config = _load_config(config_path)
        renderer = build_renderer(config)
        code = _read_code_or_completion(code_path)
        outcome = renderer.render_code(code, scene_name=scene)
    except AnimevalError as exc:
        _fail(exc)
        return
    click.echo(f"status={outcome.status}")
    if outcome.video_path is not None:
        click.echo(f"video={outcome.video_path}")
    if outcome.error_tail:
        click.echo(outcome.error_tail, err=True)
    if outcome.status != STATUS_SUCCESS:
        sys.exit(1)


@main.group()
def kb() -> None:
    """Build and query the API documentation knowledge base."""


@kb.command(name="build")
@click.option("--source", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def kb_build(source: str, out_path: str) -> None:
    """Extract signatures and parameter docs from a source tree."""
    try:
        knowledge = build_kb(source)
        knowledge.save(out_path)
    except AnimevalError as exc:
        _fail(exc)
        return
    click.echo(f"wrote {out_path} ({len(knowledge)} entries)")


@kb.command(name="lookup")
@click.argument("name")
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True, dir_okay=False))
def kb_lookup(name: str, kb_path: str) -> None:
    """Print the documentation entries matching NAME."""
    try:
        knowledge = KnowledgeBase.load(kb_path)
    except AnimevalError as exc:
        _fail(exc)
        return
    entries = knowledge.lookup(name)
    if not entries:
        click.echo(f"no entry named {name!r}", err=True)
        sys.exit(1)
    for index, entry in enumerate(entries):
        if index:
            click.echo("---")
        click.echo(render_entry(entry))


if __name__ == "__main__":
    main()
