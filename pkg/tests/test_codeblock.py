"""Code-block extraction: precedence, stripping, absence, idempotence."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from animeval.codeblock import (
    SOURCE_FENCED_ANY,
    SOURCE_FENCED_PYTHON,
    SOURCE_TAGGED,
    CodeSnippet,
    Completion,
    extract_code,
)
from animeval.errors import ContractViolation


def test_tagged_block():
    snippet = extract_code("<CODE>\nfrom manim import *\n</CODE>")
    assert snippet is not None
    assert snippet.code == "from manim import *"
    assert snippet.source == SOURCE_TAGGED


def test_python_fence():
    snippet = extract_code("```python\nx = 1\n```")
    assert snippet == CodeSnippet(code="x = 1", source=SOURCE_FENCED_PYTHON)


def test_unlabelled_fence():
    snippet = extract_code("Sure:\n```\ny = 2\n```\nDone.")
    assert snippet == CodeSnippet(code="y = 2", source=SOURCE_FENCED_ANY)


def test_other_language_fence():
    snippet = extract_code("```text\nz = 3\n```")
    assert snippet == CodeSnippet(code="z = 3", source=SOURCE_FENCED_ANY)


def test_no_code_is_absent():
    assert extract_code("I cannot write that.") is None


def test_empty_string_is_absent():
    assert extract_code("") is None


def test_tag_beats_python_fence():
    text = "```python\nfenced = True\n```\n<CODE>\ntagged = True\n</CODE>"
    snippet = extract_code(text)
    assert snippet.source == SOURCE_TAGGED
    assert snippet.code == "tagged = True"


def test_python_fence_beats_other_fence():
    text = "```text\nplain\n```\n```python\npythonic = 1\n```"
    snippet = extract_code(text)
    assert snippet.source == SOURCE_FENCED_PYTHON
    assert snippet.code == "pythonic = 1"


def test_first_occurrence_wins_within_pattern():
    text = "<CODE>\nfirst\n</CODE>\n<CODE>\nsecond\n</CODE>"
    assert extract_code(text).code == "first"


def test_unterminated_tag_is_absent():
    assert extract_code("<CODE>\nx = 1\n") is None


def test_unterminated_fence_is_absent():
    assert extract_code("```python\nx = 1\n") is None


def test_blank_tag_block_falls_through_to_fence():
    text = "<CODE>\n\n</CODE>\n```python\nreal = 1\n```"
    snippet = extract_code(text)
    assert snippet.source == SOURCE_FENCED_PYTHON
    assert snippet.code == "real = 1"


def test_edge_blank_lines_stripped_inner_preserved():
    text = "<CODE>\n\n\na = 1\n\nb = 2\n\n\n</CODE>"
    assert extract_code(text).code == "a = 1\n\nb = 2"


def test_inner_lines_not_rstripped():
    text = "<CODE>\na = 1   \n</CODE>"
    assert extract_code(text).code == "a = 1   "


def test_completion_wrapper_accepted():
    snippet = extract_code(Completion(text="```python\nq = 9\n```"))
    assert snippet.code == "q = 9"


def test_multiline_code_preserved():
    body = "from manim import *\n\nclass S(Scene):\n    def construct(self):\n        pass"
    assert extract_code(f"<CODE>\n{body}\n</CODE>").code == body


def test_snippet_must_be_non_empty():
    with pytest.raises(ContractViolation):
        CodeSnippet(code="", source=SOURCE_TAGGED)


def test_snippet_source_validated():
    with pytest.raises(ContractViolation):
        CodeSnippet(code="x", source="mystery")


def test_non_string_rejected():
    with pytest.raises(ContractViolation):
        extract_code(42)  # type: ignore[arg-type]


@given(st.text(alphabet=st.characters(blacklist_characters="`<"), max_size=200))
def test_no_delimiters_no_match(text):
    assert extract_code(text) is None


@given(
    st.text(
        alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="`<"),
        min_size=1,
        max_size=120,
    )
)
def test_idempotent_on_own_output(body):
    snippet = extract_code(f"<CODE>\n{body}\n</CODE>")
    if snippet is None:
        # body was blank after edge-stripping
        assert not body.strip()
        return
    again = extract_code(f"<CODE>\n{snippet.code}\n</CODE>")
    assert again is not None
    assert again.code == snippet.code


def test_delimiters_never_inside_code():
    for text in (
        "<CODE>\nx = 1\n</CODE>",
        "```python\nx = 1\n```",
        "```\nx = 1\n```",
    ):
        code = extract_code(text).code
        assert "<CODE>" not in code and "</CODE>" not in code
        assert "```" not in code
