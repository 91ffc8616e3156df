"""Extraction of code blocks from raw model completions.

A completion may carry its code inside ``<CODE>...</CODE>`` tags, inside a
```` ```python ```` fence, or inside a fence with any other (or no) language
label.  Extraction prefers tags over python fences over other fences; within
one pattern the first occurrence wins.  An unterminated block never matches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ContractViolation

# Matched sources, in precedence order.
SOURCE_TAGGED = "tagged"
SOURCE_FENCED_PYTHON = "fenced_python"
SOURCE_FENCED_ANY = "fenced_any"

_TAGGED_RE = re.compile(r"<CODE>(.*?)</CODE>", re.DOTALL)
_FENCED_PYTHON_RE = re.compile(r"```python[ \t]*\r?\n(.*?)```", re.DOTALL)
_FENCED_ANY_RE = re.compile(r"```[^\n`]*\r?\n(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class Completion:
    """A raw sampled completion; extraction never alters it."""

    text: str


@dataclass(frozen=True)
class CodeSnippet:
    """A non-empty code block and the pattern it was extracted from."""

    code: str
    source: str

    def __post_init__(self) -> None:
        if not self.code:
            raise ContractViolation("CodeSnippet.code must be non-empty")
        if self.source not in (SOURCE_TAGGED, SOURCE_FENCED_PYTHON, SOURCE_FENCED_ANY):
            raise ContractViolation(f"unknown snippet source: {self.source!r}")


def _strip_blank_edges(text: str) -> str:
    """Drop leading and trailing blank lines; leave inner lines untouched."""
    lines = text.splitlines()
    start = 0
    while start < len(lines) and not lines[start].strip():
        start += 1
    end = len(lines)
    while end > start and not lines[end - 1].strip():
        end -= 1
    return "\n".join(lines[start:end])


def extract_code(completion: str | Completion) -> CodeSnippet | None:
    """Return the first code block in ``completion``, or None when there is none.

    Tag blocks beat ```python fences, which beat fences with any other label.
    The returned code has leading/trailing blank lines removed; a block that is
    blank after stripping counts as absent.
    """
    if isinstance(completion, Completion):
        completion = completion.text
    if not isinstance(completion, str):
        raise ContractViolation("completion must be a string or Completion")
    for pattern, source in (
        (_TAGGED_RE, SOURCE_TAGGED),
        (_FENCED_PYTHON_RE, SOURCE_FENCED_PYTHON),
        (_FENCED_ANY_RE, SOURCE_FENCED_ANY),
    ):
        match = pattern.search(completion)
        if match is None:
            continue
        code = _strip_blank_edges(match.group(1))
        if code:
            return CodeSnippet(code=code, source=source)
    return None
