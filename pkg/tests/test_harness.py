"""Evaluation harness: dataset IO, reference precompute, runs, aggregation."""

import json

import pytest

from animeval.embeddings import HashedTokenEmbedder, PixelGridEmbedder
from animeval.errors import ContractViolation, DatasetError, EndpointError
from animeval.harness import (
    FAILURE_DEPENDENCY,
    AggregateReport,
    DatasetRecord,
    EvalRecord,
    aggregate,
    evaluate_run,
    load_completions,
    load_dataset,
    precompute_references,
)
from animeval.rewardcore import FAILURE_NO_CODE, FAILURE_RENDER, RewardEngine
from conftest import BROKEN_SCENE_NAME_ERROR, VALID_SCENE, VALID_SCENE_SQUARE
from helpers import CountingRenderer, ScriptedChat

GREEN_DOT_SCENE = """\
from manim import *

class GreenDot(Scene):
    def construct(self):
        dot = Dot(color=GREEN)
        self.play(FadeIn(dot))
        self.wait(1)
"""

REFERENCE_CODES = {
    "circle": VALID_SCENE,
    "square": VALID_SCENE_SQUARE,
    "dot": GREEN_DOT_SCENE,
}


def wrap(code):
    return f"<CODE>\n{code}\n</CODE>"


def write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(row) for row in rows) + "\n")
    return path


def make_records():
    return [
        DatasetRecord(id=name, description=f"a {name}", reference_code=code)
        for name, code in REFERENCE_CODES.items()
    ]


@pytest.fixture()
def engine(shared_renderer):
    return RewardEngine(
        HashedTokenEmbedder(), PixelGridEmbedder(), renderer=shared_renderer
    )


@pytest.fixture()
def ready_records(shared_renderer):
    return precompute_references(make_records(), shared_renderer)


# --- dataset loading ------------------------------------------------------


def test_load_dataset_round_trip(tmp_path):
    path = write_jsonl(
        tmp_path / "data.jsonl",
        [
            {"id": "a", "description": "first", "reference_code": "x = 1"},
            {"id": "b", "description": "second", "reference_code": "y = 2"},
        ],
    )
    records = load_dataset(path)
    assert [r.id for r in records] == ["a", "b"]
    assert records[0].description == "first"
    assert records[1].reference_code == "y = 2"
    assert records[0].reference_video is None


def test_load_dataset_skips_blank_lines(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(
        '\n{"id": "a", "description": "d", "reference_code": "c"}\n\n\n'
    )
    assert len(load_dataset(path)) == 1


def test_load_dataset_reports_bad_json_line(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(
        '{"id": "a", "description": "d", "reference_code": "c"}\n{broken\n'
    )
    with pytest.raises(DatasetError, match="line 2"):
        load_dataset(path)


def test_load_dataset_reports_missing_field(tmp_path):
    path = write_jsonl(tmp_path / "data.jsonl", [{"id": "a", "reference_code": "c"}])
    with pytest.raises(DatasetError, match="line 1.*'description'"):
        load_dataset(path)


def test_load_dataset_rejects_empty_field(tmp_path):
    path = write_jsonl(
        tmp_path / "data.jsonl",
        [{"id": "a", "description": "", "reference_code": "c"}],
    )
    with pytest.raises(DatasetError, match="non-empty string"):
        load_dataset(path)


def test_load_dataset_rejects_non_object_line(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text("[1, 2, 3]\n")
    with pytest.raises(DatasetError, match="expected a JSON object"):
        load_dataset(path)


def test_load_dataset_duplicate_id_names_both_lines(tmp_path):
    path = write_jsonl(
        tmp_path / "data.jsonl",
        [
            {"id": "a", "description": "d", "reference_code": "c"},
            {"id": "b", "description": "d", "reference_code": "c"},
            {"id": "a", "description": "d2", "reference_code": "c2"},
        ],
    )
    with pytest.raises(DatasetError, match=r"duplicate id 'a' on lines 1 and 3"):
        load_dataset(path)


def test_load_dataset_missing_file(tmp_path):
    with pytest.raises(DatasetError, match="does not exist"):
        load_dataset(tmp_path / "absent.jsonl")


def test_load_completions_round_trip(tmp_path):
    path = write_jsonl(
        tmp_path / "comp.jsonl",
        [{"id": "a", "completion": "hello"}, {"id": "b", "completion": ""}],
    )
    completions = load_completions(path)
    assert completions == {"a": "hello", "b": ""}


def test_load_completions_requires_completion_field(tmp_path):
    path = write_jsonl(tmp_path / "comp.jsonl", [{"id": "a"}])
    with pytest.raises(DatasetError, match="'completion'"):
        load_completions(path)


def test_load_completions_rejects_duplicates(tmp_path):
    path = write_jsonl(
        tmp_path / "comp.jsonl",
        [{"id": "a", "completion": "x"}, {"id": "a", "completion": "y"}],
    )
    with pytest.raises(DatasetError, match="duplicate id 'a'"):
        load_completions(path)


# --- reference precompute -------------------------------------------------


def test_precompute_attaches_videos(shared_renderer):
    records = precompute_references(make_records(), shared_renderer)
    assert len(records) == 3
    for record in records:
        assert record.reference_video is not None
        assert record.reference_video.is_file()
        assert record.reference_video.stat().st_size > 0


def test_precompute_second_invocation_renders_nothing(stub_renderer, tmp_path):
    counting = CountingRenderer(stub_renderer)
    cache = tmp_path / "ref-cache"
    precompute_references(make_records(), counting, cache)
    first_calls = counting.calls
    assert first_calls == 3
    again = precompute_references(make_records(), counting, cache)
    assert counting.calls == first_calls  # all cache hits, zero renders
    assert all(r.reference_video.parent == cache for r in again)


def test_precompute_whitespace_edit_re_renders(stub_renderer, tmp_path):
    counting = CountingRenderer(stub_renderer)
    cache = tmp_path / "ref-cache"
    records = make_records()
    precompute_references(records, counting, cache)
    edited = [
        DatasetRecord(
            id=records[0].id,
            description=records[0].description,
            reference_code=records[0].reference_code + "\n",
        )
    ]
    before = counting.calls
    precompute_references(edited, counting, cache)
    assert counting.calls == before + 1


def test_precompute_reports_all_broken_ids(stub_renderer):
    records = [
        DatasetRecord(id="bad1", description="d", reference_code=BROKEN_SCENE_NAME_ERROR),
        DatasetRecord(id="ok", description="d", reference_code=VALID_SCENE),
        DatasetRecord(
            id="bad2", description="d", reference_code=BROKEN_SCENE_NAME_ERROR + "\n# v2\n"
        ),
    ]
    with pytest.raises(DatasetError, match=r"ids: bad1, bad2"):
        precompute_references(records, stub_renderer)


def test_precompute_leaves_input_untouched(shared_renderer):
    records = make_records()
    precompute_references(records, shared_renderer)
    assert all(r.reference_video is None for r in records)


# --- offline evaluation ---------------------------------------------------


def test_offline_identity_run(engine, ready_records):
    completions = {r.id: wrap(r.reference_code) for r in ready_records}
    report = evaluate_run(ready_records, engine, completions=completions)
    assert report.n == 3
    assert report.rsr == 100.0
    assert report.mean_vs >= 99.0
    assert report.mean_cbb >= 99.0
    for record in report.per_record:
        assert record.render_status == "success"
        assert record.failure == "none"
        assert record.rounds_used == 1


def test_offline_no_code_run(engine, ready_records):
    completions = {r.id: "I cannot produce code." for r in ready_records}
    report = evaluate_run(ready_records, engine, completions=completions)
    assert report.rsr == 0.0
    assert report.mean_vs == 0.0
    assert report.mean_cbb == 0.0
    for record in report.per_record:
        assert record.failure == FAILURE_NO_CODE
        assert record.final_code is None


def test_offline_mixed_run(engine, ready_records):
    completions = {
        "circle": wrap(VALID_SCENE),
        "square": wrap(BROKEN_SCENE_NAME_ERROR),
        "dot": "no code at all",
    }
    report = evaluate_run(ready_records, engine, completions=completions)
    by_id = {r.id: r for r in report.per_record}
    assert by_id["circle"].render_status == "success"
    assert by_id["square"].render_status == "fail"
    assert by_id["square"].failure == FAILURE_RENDER
    assert by_id["square"].cbb > 0.0  # text reward survives a render failure
    assert by_id["dot"].failure == FAILURE_NO_CODE
    assert report.rsr == pytest.approx(100.0 / 3.0)
    # failed renders always carry zero visual similarity
    for record in report.per_record:
        if record.render_status != "success":
            assert record.vs == 0.0


def test_offline_missing_completion_ids(engine, ready_records):
    with pytest.raises(DatasetError, match="lacks ids: circle, square"):
        evaluate_run(ready_records, engine, completions={"dot": "x"})


def test_evaluate_requires_precomputed_references(engine):
    with pytest.raises(ContractViolation, match="reference video missing"):
        evaluate_run(make_records(), engine, completions={"circle": "x", "square": "x", "dot": "x"})


def test_evaluate_requires_records_and_a_source(engine, ready_records):
    with pytest.raises(ContractViolation, match="at least one record"):
        evaluate_run([], engine, completions={})
    with pytest.raises(ContractViolation, match="completions .* or llm"):
        evaluate_run(ready_records, engine)


class FlakyEmbedder:
    """Delegates to the offline embedder but fails on a marked text."""

    def __init__(self):
        self.inner = HashedTokenEmbedder()

    def embed_texts(self, texts):
        if any("EMBEDDER_BOOM" in text for text in texts):
            raise EndpointError("embedding endpoint exploded")
        return self.inner.embed_texts(texts)


def test_offline_dependency_error_is_recorded_not_raised(shared_renderer, ready_records):
    engine = RewardEngine(
        FlakyEmbedder(), PixelGridEmbedder(), renderer=shared_renderer
    )
    completions = {r.id: wrap(r.reference_code) for r in ready_records}
    completions["square"] = wrap(VALID_SCENE_SQUARE + "\n# EMBEDDER_BOOM\n")
    report = evaluate_run(ready_records, engine, completions=completions)
    by_id = {r.id: r for r in report.per_record}
    assert by_id["square"].failure == FAILURE_DEPENDENCY
    assert by_id["square"].vs == 0.0 and by_id["square"].cbb == 0.0
    assert by_id["square"].render_status == "fail"
    assert by_id["circle"].failure == "none"
    assert report.n == 3


# --- live evaluation ------------------------------------------------------


def test_live_matches_offline_for_identical_completions(
    engine, ready_records, shared_renderer
):
    completions = {r.id: wrap(r.reference_code) for r in ready_records}
    offline = evaluate_run(ready_records, engine, completions=completions)
    chat = ScriptedChat([completions[r.id] for r in ready_records])
    live = evaluate_run(
        ready_records, engine, llm=chat, renderer=shared_renderer
    )
    assert live.n == offline.n
    assert live.rsr == offline.rsr
    assert live.mean_vs == pytest.approx(offline.mean_vs, abs=1e-9)
    assert live.mean_cbb == pytest.approx(offline.mean_cbb, abs=1e-9)
    for got, want in zip(live.per_record, offline.per_record):
        assert got.id == want.id
        assert got.render_status == want.render_status
        assert got.vs == pytest.approx(want.vs, abs=1e-9)
        assert got.cbb == pytest.approx(want.cbb, abs=1e-9)


def test_live_per_record_failures_do_not_abort(engine, ready_records, shared_renderer):
    chat = ScriptedChat(
        [
            "no code in this answer",
            wrap(ready_records[1].reference_code),
            wrap(BROKEN_SCENE_NAME_ERROR),
        ]
    )
    report = evaluate_run(ready_records, engine, llm=chat, renderer=shared_renderer)
    assert report.n == 3
    by_id = {r.id: r for r in report.per_record}
    assert by_id["circle"].failure == FAILURE_NO_CODE
    assert by_id["square"].render_status == "success"
    assert by_id["dot"].render_status == "fail"
    assert by_id["dot"].vs == 0.0
    assert report.rsr == pytest.approx(100.0 / 3.0)


# --- aggregation ----------------------------------------------------------


def eval_record(id, vs, cbb, status="success"):
    return EvalRecord(
        id=id,
        final_code="code",
        render_status=status,
        vs=vs,
        cbb=cbb,
        rounds_used=1,
        failure="none",
    )


def test_aggregate_hand_computed():
    report = aggregate(
        [
            eval_record("a", 1.0, 0.9),
            eval_record("b", 0.5, 0.6),
            eval_record("c", 0.0, 0.3, status="fail"),
        ]
    )
    assert isinstance(report, AggregateReport)
    assert report.mean_vs == pytest.approx(50.0)
    assert report.mean_cbb == pytest.approx(60.0)
    assert report.rsr == pytest.approx(200.0 / 3.0)
    assert report.n == 3
    assert report.spearman_rho == 1.0
    assert report.kendall_tau == 1.0


def test_aggregate_single_record_has_no_correlations():
    report = aggregate([eval_record("a", 0.5, 0.5)])
    assert report.spearman_rho is None
    assert report.kendall_tau is None
    assert report.rsr == 100.0


def test_aggregate_constant_scores_have_no_correlations():
    report = aggregate([eval_record("a", 1.0, 0.5), eval_record("b", 1.0, 0.7)])
    assert report.spearman_rho is None
    assert report.kendall_tau is None


def test_aggregate_anticorrelated():
    report = aggregate([eval_record("a", 1.0, 0.1), eval_record("b", 0.2, 0.9)])
    assert report.spearman_rho == -1.0
    assert report.kendall_tau == -1.0


def test_aggregate_requires_records():
    with pytest.raises(ContractViolation):
        aggregate([])
